#include "vh/optics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace vh::optics {
namespace {

std::mutex plan_mutex;
std::mutex stats_mutex;
ParsevalStats stats;

void record_parseval(double before, double after) {
    const double rel = before > 0 ? std::abs(after - before) / before : std::abs(after);
    std::lock_guard lock(stats_mutex);
    ++stats.calls;
    stats.max_rel_error = std::max(stats.max_rel_error, rel);
}

struct Buffer {
    fftw_complex* data = nullptr;
    explicit Buffer(std::size_t count) {
        data = fftw_alloc_complex(count);
        if (!data) throw std::bad_alloc();
    }
    ~Buffer() { fftw_free(data); }
    Buffer(const Buffer&) = delete;
    Buffer& operator=(const Buffer&) = delete;
};

// e^{i pi t / N} for the integer t = j (N-1) - N (N-1) / 2, reduced mod 2N.
std::vector<cplx> output_phase(std::size_t N) {
    std::vector<cplx> ph(N);
    const long long n = (long long)N;
    const long long offset = n * (n - 1) / 2;
    for (long long j = 0; j < n; ++j) {
        long long t = (j * (n - 1) - offset) % (2 * n);
        if (t < 0) t += 2 * n;
        ph[j] = std::polar(1.0, std::numbers::pi * double(t) / double(n));
    }
    return ph;
}

void find_orders(DiffractionPattern& pat) {
    const std::size_t N = pat.field.grid.n;
    const double s = pat.order_spacing;
    std::vector<double> proj(N, 0.0);
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t c = 0; c < N; ++c) proj[c] += std::norm(pat.field.at(r, c));
    const double top = *std::max_element(proj.begin(), proj.end());
    double total = 0;
    for (double v : proj) total += v;

    std::vector<std::size_t> peaks;
    for (std::size_t c = 1; c + 1 < N; ++c)
        if (proj[c] > proj[c - 1] && proj[c] >= proj[c + 1] && proj[c] > 1e-6 * top) peaks.push_back(c);
    std::stable_sort(peaks.begin(), peaks.end(), [&](auto a, auto b) { return proj[a] > proj[b]; });

    std::vector<std::size_t> kept;
    for (auto c : peaks) {
        bool ok = true;
        for (auto k : kept)
            if (std::abs(double(c) - double(k)) < 0.5 * s) { ok = false; break; }
        if (ok) kept.push_back(c);
    }
    const double mid = double(N / 2);
    // ring-shaped orders project to several humps and neighbouring orders
    // leak into the edges; iterate a half-width window to convergence
    auto refine = [&](double at) {
        for (int it = 0; it < 50; ++it) {
            const long lo = std::max(0L, long(std::ceil(at - 0.25 * s)));
            const long hi = std::min(long(N) - 1, long(std::floor(at + 0.25 * s)));
            double w = 0, wx = 0;
            for (long i = lo; i <= hi; ++i) { w += proj[i]; wx += proj[i] * double(i); }
            if (!(w > 0)) break;
            const double next = wx / w;
            const bool done = std::abs(next - at) < 1e-9;
            at = next;
            if (done) break;
        }
        return at;
    };

    std::vector<std::pair<int, double>> found;   // (h, detected peak)
    for (auto c : kept) {
        const double pos = (double(c) - mid) / s;
        const int h = int(std::lround(pos));
        // sidelobes between orders sit off the lattice
        if (std::abs(pos - h) > 0.25) continue;
        bool dup = false;
        for (const auto& f : found) dup |= (f.first == h);
        if (!dup) found.push_back({h, double(c)});
    }
    // measured spacing of the bright first orders seeds the weaker ones
    double sp = s;
    {
        double up = 0, dn = 0;
        for (const auto& [h, c] : found) {
            if (h == 1) up = refine(c);
            if (h == -1) dn = refine(c);
        }
        if (up > 0 && dn > 0) sp = 0.5 * (up - dn);
    }
    for (const auto& [h, c] : found) {
        const double at = std::abs(h) == 1 ? refine(c) : refine(mid + h * sp);
        if (std::abs((at - mid) / s - h) > 0.25) continue;   // slid onto a neighbour
        double w = 0;
        const long lo = std::max(0L, long(std::ceil(at - 0.5 * s)));
        const long hi = std::min(long(N) - 1, long(std::floor(at + 0.5 * s)));
        for (long i = lo; i <= hi; ++i) w += proj[i];
        OrderCenter oc;
        oc.h = h;
        oc.bin = at;
        oc.theta = (oc.bin - mid) * pat.theta_pitch;
        oc.power = total > 0 ? w / total : 0.0;
        pat.order_centers.push_back(oc);
    }
    std::sort(pat.order_centers.begin(), pat.order_centers.end(),
              [](const auto& a, const auto& b) { return a.h < b.h; });
}

} // namespace

std::vector<double> intensity(const ComplexField& f) {
    std::vector<double> out(f.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(f.values[i]);
    return out;
}

DiffractionPattern propagate(const ComplexField& f, const BeamParams& beam, double period, int pad) {
    if (f.plane != Plane::aperture) throw std::invalid_argument("propagate: input must be an aperture-plane field");
    if (pad < 1) throw std::invalid_argument("propagate: pad must be >= 1");
    const std::size_t n = f.grid.n;
    const std::size_t N = n * std::size_t(pad);
    const std::size_t off = (N - n) / 2;

    Buffer buf(N * N);
    std::fill(reinterpret_cast<double*>(buf.data), reinterpret_cast<double*>(buf.data) + 2 * N * N, 0.0);
    double e_in = 0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const cplx v = f.at(r, c);
            e_in += std::norm(v);
            const std::size_t R = r + off, C = c + off;
            const double sgn = ((R + C) & 1) ? -1.0 : 1.0;
            buf.data[R * N + C][0] = sgn * v.real();
            buf.data[R * N + C][1] = sgn * v.imag();
        }
    }
    fftw_plan plan;
    {
        std::lock_guard lock(plan_mutex);
        plan = fftw_plan_dft_2d(int(N), int(N), buf.data, buf.data, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(plan_mutex);
        fftw_destroy_plan(plan);
    }

    DiffractionPattern pat;
    pat.field.grid = ApertureGrid{N, f.grid.pitch};
    pat.field.plane = Plane::diffraction;
    pat.theta_pitch = beam.wavelength / (double(N) * f.grid.pitch);
    pat.field.angular_pitch = pat.theta_pitch;
    pat.field.values.resize(N * N);
    const auto ph = output_phase(N);
    const double scale = 1.0 / double(N);
    double e_out = 0;
    for (std::size_t r = 0; r < N; ++r) {
        for (std::size_t c = 0; c < N; ++c) {
            const cplx v = cplx(buf.data[r * N + c][0], buf.data[r * N + c][1]) * (ph[r] * ph[c] * scale);
            pat.field.at(r, c) = v;
            e_out += std::norm(v);
        }
    }
    record_parseval(e_in, e_out);

    if (period > 0) {
        pat.order_spacing = double(N) * f.grid.pitch / period;
        find_orders(pat);
    }
    return pat;
}

DiffractionPattern astig_transform(const ComplexField& f, const AstigParams& a, const BeamParams& beam,
                                   double period, int pad) {
    if (a.strength < 0) throw std::invalid_argument("astig_transform: strength must be >= 0");
    if (a.strength == 0) return propagate(f, beam, period, pad);
    ComplexField g = f;
    const double ca = std::cos(a.axis_angle), sa = std::sin(a.axis_angle);
    const double k = a.strength / (beam.rho_max * beam.rho_max);
    for (std::size_t r = 0; r < g.grid.n; ++r) {
        const double y = g.grid.coord(r);
        for (std::size_t c = 0; c < g.grid.n; ++c) {
            cplx& v = g.at(r, c);
            if (v == cplx{}) continue;
            const double x = g.grid.coord(c);
            const double xr = x * ca + y * sa, yr = -x * sa + y * ca;
            v *= std::polar(1.0, k * (xr * xr - yr * yr));
        }
    }
    return propagate(g, beam, period, pad);
}

int max_order(const DiffractionPattern& pat) {
    if (pat.order_spacing <= 0) return 0;
    const double N = double(pat.field.grid.n);
    const long W = long(std::floor(pat.order_spacing)) | 1L;
    const double usable = 0.5 * N - 0.5 * double(W) - 1.0;
    return int(std::floor(usable / pat.order_spacing));
}

ExtractedOrder extract_order(const DiffractionPattern& pat, int h, const BeamParams& beam) {
    if (pat.order_spacing <= 0) throw std::invalid_argument("extract_order: pattern has no grating period");
    const long N = long(pat.field.grid.n);
    long W = long(std::floor(pat.order_spacing));
    if ((W & 1) == 0) --W;
    const long hw = W / 2;
    const long mid = N / 2;

    auto inside = [&](long r0, long c0) { return r0 - hw >= 0 && c0 - hw >= 0 && r0 + hw < N && c0 + hw < N; };
    auto centroid = [&](long r0, long c0, double& cy, double& cx) {
        double w = 0, wy = 0, wx = 0;
        for (long r = r0 - hw; r <= r0 + hw; ++r)
            for (long c = c0 - hw; c <= c0 + hw; ++c) {
                const double I = std::norm(pat.field.at(std::size_t(r), std::size_t(c)));
                w += I; wy += I * double(r); wx += I * double(c);
            }
        if (w <= 0) { cy = double(r0); cx = double(c0); return; }
        cy = wy / w;
        cx = wx / w;
    };

    long r0 = mid, c0 = mid + std::lround(h * pat.order_spacing);
    if (!inside(r0, c0)) throw std::out_of_range("extract_order: order " + std::to_string(h) + " outside band");
    double cy, cx;
    centroid(r0, c0, cy, cx);
    r0 = std::lround(cy);
    c0 = std::lround(cx);
    if (!inside(r0, c0)) throw std::out_of_range("extract_order: recentred window leaves band");

    ExtractedOrder out;
    out.h = h;
    out.field.grid = ApertureGrid{std::size_t(W), pat.field.grid.pitch};
    out.field.plane = Plane::diffraction;
    out.field.angular_pitch = pat.theta_pitch;
    out.field.values.resize(std::size_t(W * W));
    for (long r = 0; r < W; ++r)
        for (long c = 0; c < W; ++c)
            out.field.values[std::size_t(r * W + c)] =
                pat.field.at(std::size_t(r0 - hw + r), std::size_t(c0 - hw + c));
    out.cy = cy - double(r0 - hw);
    out.cx = cx - double(c0 - hw);
    out.k_pitch = beam.k0 * pat.theta_pitch;

    const long edge = std::max(1L, W / 10);
    double total = 0, rim = 0;
    for (long r = 0; r < W; ++r)
        for (long c = 0; c < W; ++c) {
            const double I = std::norm(out.field.values[std::size_t(r * W + c)]);
            total += I;
            if (c < edge || c >= W - edge) rim += I;
        }
    out.overlap = total > 0 ? rim / total : 0.0;
    if (out.overlap > 0.05)
        out.warnings.push_back("adjacent-order overlap " + std::to_string(out.overlap));
    return out;
}

ExtractedOrder wrap_window(const ComplexField& window, int h, const BeamParams& beam) {
    ExtractedOrder out;
    out.h = h;
    out.field = window;
    const std::size_t W = window.grid.n;
    double w = 0, wy = 0, wx = 0;
    for (std::size_t r = 0; r < W; ++r)
        for (std::size_t c = 0; c < W; ++c) {
            const double I = std::norm(window.at(r, c));
            w += I; wy += I * double(r); wx += I * double(c);
        }
    out.cy = w > 0 ? wy / w : 0.5 * double(W - 1);
    out.cx = w > 0 ? wx / w : 0.5 * double(W - 1);
    out.k_pitch = beam.k0 * window.angular_pitch;
    return out;
}

ParsevalStats parseval_stats() {
    std::lock_guard lock(stats_mutex);
    return stats;
}

void reset_parseval_stats() {
    std::lock_guard lock(stats_mutex);
    stats = ParsevalStats{};
}

} // namespace vh::optics
