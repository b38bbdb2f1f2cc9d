#include "vh/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vh::analysis {
namespace {

double bilinear(const std::vector<double>& img, long W, double y, double x) {
    const long x0 = long(std::floor(x)), y0 = long(std::floor(y));
    const double fx = x - double(x0), fy = y - double(y0);
    auto px = [&](long r, long c) { return (r < 0 || c < 0 || r >= W || c >= W) ? 0.0 : img[std::size_t(r * W + c)]; };
    return (1 - fy) * ((1 - fx) * px(y0, x0) + fx * px(y0, x0 + 1)) +
           fy * ((1 - fx) * px(y0 + 1, x0) + fx * px(y0 + 1, x0 + 1));
}

// Azimuthal Fourier coefficients C_l(r) for l in [-n_a/2, n_a/2).
std::vector<cplx> azimuthal_coefficients(const PolarSamples& ps) {
    const std::size_t na = ps.n_a;
    std::vector<cplx> tw(na);
    for (std::size_t k = 0; k < na; ++k) tw[k] = std::polar(1.0, -2.0 * std::numbers::pi * double(k) / double(na));
    std::vector<cplx> out(ps.n_r * na);
    for (std::size_t ir = 0; ir < ps.n_r; ++ir) {
        const cplx* row = &ps.v[ir * na];
        for (std::size_t m = 0; m < na; ++m) {
            cplx s{};
            for (std::size_t a = 0; a < na; ++a) s += row[a] * tw[(m * a) % na];
            out[ir * na + m] = s / double(na);
        }
    }
    return out;
}

int bin_to_l(std::size_t m, std::size_t na) { return m < na / 2 ? int(m) : int(m) - int(na); }
std::size_t l_to_bin(int l, std::size_t na) { return std::size_t((l % long(na) + long(na)) % long(na)); }

struct Peak {
    std::size_t index;
    double height;
    double prominence;
};

std::vector<Peak> find_peaks(const std::vector<double>& y) {
    std::vector<Peak> out;
    const std::size_t n = y.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
        double left = y[i], right = y[i];
        for (std::size_t j = i; j-- > 0;) {
            if (y[j] > y[i]) break;
            left = std::min(left, y[j]);
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            if (y[j] > y[i]) break;
            right = std::min(right, y[j]);
        }
        out.push_back({i, y[i], y[i] - std::max(left, right)});
    }
    return out;
}

std::vector<double> gaussian_smooth(const std::vector<double>& y, double sigma) {
    if (sigma <= 0) return y;
    const long half = long(std::ceil(4 * sigma));
    std::vector<double> k(std::size_t(2 * half + 1));
    double ks = 0;
    for (long i = -half; i <= half; ++i) ks += k[std::size_t(i + half)] = std::exp(-0.5 * double(i * i) / (sigma * sigma));
    std::vector<double> out(y.size(), 0.0);
    for (long i = 0; i < long(y.size()); ++i) {
        double s = 0;
        for (long j = -half; j <= half; ++j) {
            const long t = i + j;
            if (t >= 0 && t < long(y.size())) s += k[std::size_t(j + half)] * y[std::size_t(t)];
        }
        out[std::size_t(i)] = s / ks;
    }
    return out;
}

} // namespace

PolarSamples polar_resample(const ExtractedOrder& e, std::size_t n_r, std::size_t n_a) {
    const long W = long(e.field.grid.n);
    const double rmax = std::min({e.cx, e.cy, double(W - 1) - e.cx, double(W - 1) - e.cy});
    if (!(rmax > 1.0)) throw std::invalid_argument("polar_resample: centroid too close to the window edge");
    std::vector<double> re(e.field.values.size()), im(e.field.values.size());
    for (std::size_t i = 0; i < re.size(); ++i) { re[i] = e.field.values[i].real(); im[i] = e.field.values[i].imag(); }
    PolarSamples ps;
    ps.n_r = n_r;
    ps.n_a = n_a;
    ps.r.resize(n_r);
    ps.v.resize(n_r * n_a);
    for (std::size_t ir = 0; ir < n_r; ++ir) {
        const double r = (double(ir) + 0.5) * rmax / double(n_r);
        ps.r[ir] = r;
        for (std::size_t ia = 0; ia < n_a; ++ia) {
            const double a = 2.0 * std::numbers::pi * double(ia) / double(n_a);
            const double y = e.cy + r * std::sin(a), x = e.cx + r * std::cos(a);
            ps.v[ir * n_a + ia] = cplx(bilinear(re, W, y, x), bilinear(im, W, y, x));
        }
    }
    return ps;
}

OamSpectrum oam_spectrum(const ExtractedOrder& e, const AnalysisSettings& s) {
    const auto ps = polar_resample(e, s.polar_radial, s.polar_azimuthal);
    const auto C = azimuthal_coefficients(ps);
    const std::size_t na = ps.n_a;
    std::vector<double> w(na, 0.0);
    double total = 0;
    for (std::size_t ir = 0; ir < ps.n_r; ++ir)
        for (std::size_t m = 0; m < na; ++m) {
            const double v = std::norm(C[ir * na + m]) * ps.r[ir];
            w[m] += v;
            total += v;
        }
    if (!(total > 1e-300)) throw std::invalid_argument("oam_spectrum: field has no energy");
    OamSpectrum out;
    double best = -1;
    for (std::size_t m = 0; m < na; ++m) {
        const int l = bin_to_l(m, na);
        const double wl = w[m] / total;
        out.weights[l] = wl;
        out.mean += l * wl;
        if (wl > best) { best = wl; out.dominant = l; }
    }
    return out;
}

RadialDecomposition radial_decompose(const ExtractedOrder& e, int l_fixed, const BeamParams& beam, int max_p,
                                     const AnalysisSettings& s) {
    if (max_p < 0) throw std::invalid_argument("radial_decompose: max_p must be >= 0");
    const auto ps = polar_resample(e, s.polar_radial, s.polar_azimuthal);
    const auto C = azimuthal_coefficients(ps);
    const std::size_t m = l_to_bin(l_fixed, ps.n_a);
    std::vector<cplx> f(ps.n_r);
    double fe = 0;
    for (std::size_t ir = 0; ir < ps.n_r; ++ir) {
        f[ir] = C[ir * ps.n_a + m];
        fe += std::norm(f[ir]) * ps.r[ir];
    }
    RadialDecomposition out;
    if (!(fe > 1e-300)) {
        out.weights.assign(std::size_t(max_p + 1), 0.0);
        out.warnings.push_back("empty azimuthal component");
        return out;
    }
    std::vector<double> proj;
    double ps_sum = 0;
    for (int p = 0; p <= max_p; ++p) {
        const ModeIndex mi{p, l_fixed};
        std::vector<double> v(ps.n_r);
        double vn = 0;
        for (std::size_t ir = 0; ir < ps.n_r; ++ir) {
            v[ir] = modes::ft_tbb_radial(mi, beam.rho_max, ps.r[ir] * e.k_pitch);
            vn += v[ir] * v[ir] * ps.r[ir];
        }
        cplx ip{};
        for (std::size_t ir = 0; ir < ps.n_r; ++ir) ip += v[ir] * f[ir] * ps.r[ir];
        const double pw = std::norm(ip) / vn;
        proj.push_back(pw);
        ps_sum += pw;
    }
    out.captured = ps_sum / fe;
    for (std::size_t p = 0; p < proj.size(); ++p) out.weights.push_back(ps_sum > 0 ? proj[p] / ps_sum : 0.0);
    out.dominant = int(std::max_element(out.weights.begin(), out.weights.end()) - out.weights.begin());
    if (out.captured < 0.8) out.warnings.push_back("radial subspace captures " + std::to_string(out.captured));
    return out;
}

RingCount count_rings(const ExtractedOrder& e, const AnalysisSettings& s) {
    const auto ps = polar_resample(e, s.polar_radial, s.polar_azimuthal);
    RingCount out;
    out.profile.assign(ps.n_r, 0.0);
    for (std::size_t ir = 0; ir < ps.n_r; ++ir) {
        double acc = 0;
        for (std::size_t ia = 0; ia < ps.n_a; ++ia) acc += std::norm(ps.v[ir * ps.n_a + ia]);
        out.profile[ir] = acc / double(ps.n_a);
    }
    const double top = *std::max_element(out.profile.begin(), out.profile.end());
    if (!(top > 0)) return out;
    const auto& y = out.profile;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        const bool left = i == 0 || y[i] > y[i - 1];
        if (!(left && y[i] >= y[i + 1])) continue;
        if (y[i] < s.ring_threshold * top) continue;
        out.radii.push_back(ps.r[i]);
        out.heights.push_back(y[i] / top);
    }
    out.count = int(out.radii.size());
    if (out.count > 0)
        out.outer_brightest = out.heights.back() >= *std::max_element(out.heights.begin(), out.heights.end());
    return out;
}

LobeGrid count_lobes(const ExtractedOrder& e, const AnalysisSettings& s) {
    const long W = long(e.field.grid.n);
    const auto I = optics::intensity(e.field);
    double m = 0, cxx = 0, cyy = 0, cxy = 0;
    for (long r = 0; r < W; ++r)
        for (long c = 0; c < W; ++c) {
            const double v = I[std::size_t(r * W + c)];
            const double dx = double(c) - e.cx, dy = double(r) - e.cy;
            m += v; cxx += v * dx * dx; cyy += v * dy * dy; cxy += v * dx * dy;
        }
    LobeGrid out;
    if (!(m > 0)) {
        out.ambiguous = true;
        out.warnings.push_back("empty field");
        return out;
    }
    cxx /= m; cyy /= m; cxy /= m;
    const double tr = cxx + cyy, det = cxx * cyy - cxy * cxy;
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    const double l1 = 0.5 * tr + disc, l2 = 0.5 * tr - disc;
    const double theta = 0.5 * std::atan2(2 * cxy, cxx - cyy);
    const double ux = std::cos(theta), uy = std::sin(theta);

    const double step = 0.25;
    const double hw = 0.5 * double(W - 1);
    const long ns = long(std::floor(2 * hw / step)) + 1;
    const double sigma = double(W) / 51.0 / step;
    const double thr = s.lobe_threshold;

    int counts[2] = {0, 0};
    double contrast = 1e300;
    for (int axis = 0; axis < 2; ++axis) {
        const double ax = axis == 0 ? ux : -uy, ay = axis == 0 ? uy : ux;
        const double bx = -ay, by = ax;
        std::vector<double> prof(std::size_t(ns + 2), 0.0);
        for (long i = 0; i < ns; ++i) {
            const double si = -hw + double(i) * step;
            double acc = 0;
            for (long j = 0; j < ns; ++j) {
                const double tj = -hw + double(j) * step;
                acc += bilinear(I, W, e.cy + si * ay + tj * by, e.cx + si * ax + tj * bx);
            }
            prof[std::size_t(i + 1)] = acc;
        }
        prof = gaussian_smooth(prof, sigma);
        prof.front() = 0.0;
        prof.back() = 0.0;
        const double top = *std::max_element(prof.begin(), prof.end());
        for (const auto& pk : find_peaks(prof)) {
            const double h = pk.height / top;
            if (h >= thr / 1.3 && h <= thr * 1.3) out.ambiguous = true;
            if (h < thr || pk.prominence < 0.05 * top) continue;
            ++counts[axis];
            contrast = std::min(contrast, pk.prominence / top);
        }
    }
    out.rows = std::min(counts[0], counts[1]);
    out.cols = std::max(counts[0], counts[1]);
    out.contrast = contrast == 1e300 ? 0.0 : contrast;
    if (l1 > 0 && l2 / l1 > 0.9) {
        out.ambiguous = true;
        out.warnings.push_back("near-isotropic intensity, principal axes ill-defined");
    }
    if (out.ambiguous && out.warnings.empty()) out.warnings.push_back("lobe peak near threshold");
    return out;
}

int best_contrast(const std::vector<LobeGrid>& sweep) {
    int best = -1;
    for (std::size_t i = 0; i < sweep.size(); ++i)
        if (best < 0 || sweep[i].contrast > sweep[std::size_t(best)].contrast) best = int(i);
    return best;
}

OrderReport analyze_order(const ExtractedOrder& e, const BeamParams& beam, const AnalysisSettings& s) {
    OrderReport rep;
    rep.h = e.h;
    rep.warnings = e.warnings;
    for (const auto& v : e.field.values) rep.integrated_intensity += std::norm(v);
    const auto oam = oam_spectrum(e, s);
    rep.oam_mean = oam.mean;
    rep.oam_spectrum = oam.weights;
    const auto rad = radial_decompose(e, oam.dominant, beam, s.max_p, s);
    rep.radial_weights = rad.weights;
    rep.dominant_mode = ModeIndex{rad.dominant, oam.dominant};
    rep.purity = oam.weights.at(oam.dominant) * (rad.weights.empty() ? 0.0 : rad.weights[std::size_t(rad.dominant)]);
    for (const auto& w : rad.warnings) rep.warnings.push_back(w);
    const auto rings = count_rings(e, s);
    rep.ring_count = rings.count;
    rep.outer_ring_brightest = rings.outer_brightest;
    return rep;
}

EvenOddVerdict even_odd_report(const HologramMask& mask, const std::vector<OrderReport>& orders,
                               double odd_purity, double even_purity) {
    EvenOddVerdict v;
    v.source = mask.source_mode;
    std::map<int, double> intensity;
    for (const auto& o : orders) {
        if (o.h < 1) continue;
        intensity[o.h] = o.integrated_intensity;
        EvenOddEntry e;
        e.h = o.h;
        const bool odd = (o.h % 2) != 0;
        e.expected = ModeIndex{odd ? mask.source_mode.p : 0, o.h * mask.source_mode.l};
        e.measured = o.dominant_mode;
        e.purity = o.purity;
        const double need = odd ? odd_purity : even_purity;
        e.pass = e.expected == e.measured && o.purity >= need;
        if (!(e.expected == e.measured)) e.notes.push_back("dominant mode differs from rule");
        if (o.purity < need) e.notes.push_back("purity " + std::to_string(o.purity) + " below " + std::to_string(need));
        for (const auto& w : o.warnings) e.notes.push_back(w);
        v.all_pass = v.all_pass && e.pass;
        v.entries.push_back(std::move(e));
    }
    // Duty near 0.4 predicts an envelope dip around h = 3.
    const double duty = mask.duty_estimate;
    if (intensity.count(2) && intensity.count(3) && intensity.count(4)) {
        const bool dip = intensity[3] < intensity[2] && intensity[3] < intensity[4];
        const double pred = square_wave_power(3, duty) / square_wave_power(1, duty);
        v.notes.push_back(std::string("envelope at duty ") + std::to_string(duty) + ": predicted I3/I1 " +
                          std::to_string(pred) + ", measured " +
                          std::to_string(intensity.count(1) ? intensity[3] / intensity[1] : 0.0) +
                          (dip ? ", local minimum at h=3" : ", no minimum at h=3"));
    }
    return v;
}

OrderEfficiencies order_efficiencies(const HologramMask& mask, int h_fit) {
    const ApertureGrid& g = mask.grid;
    const double period_px = mask.grating.period(mask.rho_max) / g.pitch;
    h_fit = std::min(h_fit, int(std::floor(period_px / 2.0)) - 1);
    if (h_fit < 1) throw std::invalid_argument("order_efficiencies: fringe period too coarse for a fit");
    const double kx0 = mask.grating.k_x0(mask.rho_max);
    const std::size_t n = g.n;
    std::vector<double> cols(n, 0.0), open(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const double y = g.coord(r);
        for (std::size_t c = 0; c < n; ++c) {
            if (std::hypot(g.coord(c), y) > mask.rho_max) continue;
            cols[c] += 1.0;
            open[c] += mask.at(r, c);
        }
    }
    const int K = 2 * h_fit + 1;
    // Gram entries depend only on h2 - h1, so tabulate the 4 h_fit + 1 sums once.
    std::vector<cplx> gsum(std::size_t(4 * h_fit + 1));
    for (int dh = -2 * h_fit; dh <= 2 * h_fit; ++dh) {
        cplx s{};
        for (std::size_t c = 0; c < n; ++c)
            if (cols[c] > 0) s += cols[c] * std::polar(1.0, dh * kx0 * g.coord(c));
        gsum[std::size_t(dh + 2 * h_fit)] = s;
    }
    Eigen::MatrixXcd G(K, K);
    Eigen::VectorXcd b(K);
    for (int i = 0; i < K; ++i) {
        const int h1 = i - h_fit;
        for (int j = 0; j < K; ++j) G(i, j) = gsum[std::size_t((j - h_fit) - h1 + 2 * h_fit)];
        cplx s{};
        for (std::size_t c = 0; c < n; ++c)
            if (open[c] > 0) s += open[c] * std::polar(1.0, -h1 * kx0 * g.coord(c));
        b(i) = s;
    }
    const Eigen::VectorXcd coef = G.partialPivLu().solve(b);
    OrderEfficiencies out;
    out.dc = coef(h_fit).real();
    for (int i = 0; i < K; ++i) out.power[i - h_fit] = std::norm(coef(i));
    return out;
}

double square_wave_power(int h, double duty) {
    if (h == 0) return duty * duty;
    const double c = 2.0 / (h * std::numbers::pi) * std::sin(h * std::numbers::pi * duty);
    return c * c;
}

} // namespace vh::analysis
