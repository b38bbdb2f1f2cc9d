#include "vh/hologram.hpp"

#include "vh/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vh {

double GratingSpec::k_x0(double rho_max) const { return periods * std::numbers::pi / rho_max; }
double GratingSpec::period(double rho_max) const { return 2.0 * rho_max / periods; }

void validate(const GratingSpec& g, const ApertureGrid& grid, double rho_max) {
    if (g.periods < 8) throw std::invalid_argument("grating: need at least 8 periods across the aperture");
    if (!(g.alpha > 0.0 && g.alpha < 1.0)) throw std::invalid_argument("grating: alpha must lie in (0,1)");
    if (g.period(rho_max) < 4.0 * grid.pitch) throw std::invalid_argument("grating: fringe spans < 4 samples");
}

ComplexField HologramMask::as_field() const {
    ComplexField f;
    f.grid = grid;
    f.plane = Plane::aperture;
    f.values.resize(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) f.values[i] = bits[i] ? 1.0 : 0.0;
    return f;
}

namespace hologram {
namespace {

RealField inside_template(const ApertureGrid& grid) {
    RealField t;
    t.grid = grid;
    t.values.assign(grid.n * grid.n, 0.0);
    return t;
}

// Each row's [first, last] column inside the aperture, or first > last when empty.
std::pair<long, long> row_span(const ApertureGrid& grid, std::size_t r, double rho_max) {
    const double y = grid.coord(r);
    if (std::abs(y) > rho_max) return {1, 0};
    const double half = std::sqrt(rho_max * rho_max - y * y);
    long first = long(std::ceil(half / -grid.pitch + grid.center() - 1e-9));
    long last = long(std::floor(half / grid.pitch + grid.center() + 1e-9));
    first = std::max(first, 0L);
    last = std::min(last, long(grid.n) - 1);
    while (first <= last && std::hypot(grid.coord(std::size_t(first)), y) > rho_max) ++first;
    while (last >= first && std::hypot(grid.coord(std::size_t(last)), y) > rho_max) --last;
    return {first, last};
}

} // namespace

RealField transmission_exact(const ModeIndex& m, const BeamParams& beam, const GratingSpec& g,
                             const ApertureGrid& grid) {
    validate(m);
    validate(g, grid, beam.rho_max);
    const double rho = beam.rho_max;
    const double kp = modes::k_perp(m, rho);
    const double kx0 = g.k_x0(rho);
    RealField amp = inside_template(grid);
    double peak = 0;
    for (std::size_t r = 0; r < grid.n; ++r) {
        const double y = grid.coord(r);
        for (std::size_t c = 0; c < grid.n; ++c) {
            const double rr = std::hypot(grid.coord(c), y);
            if (rr > rho) continue;
            const double a = specfun::bessel_j(m.l, kp * rr);
            amp.at(r, c) = a;
            peak = std::max(peak, std::abs(a));
        }
    }
    RealField t = inside_template(grid);
    for (std::size_t r = 0; r < grid.n; ++r) {
        const double y = grid.coord(r);
        for (std::size_t c = 0; c < grid.n; ++c) {
            const double x = grid.coord(c);
            if (std::hypot(x, y) > rho) continue;
            const double f = amp.at(r, c) / peak;
            t.at(r, c) = f * f + 1.0 + 2.0 * f * std::cos(m.l * std::atan2(y, x) + kx0 * x);
        }
    }
    return t;
}

double measure_duty(const std::vector<std::uint8_t>& bits, const ApertureGrid& grid, double rho_max,
                    double period) {
    const double period_px = period / grid.pitch;
    double width_sum = 0;
    long runs = 0, open = 0, total = 0;
    for (std::size_t r = 0; r < grid.n; ++r) {
        auto [first, last] = row_span(grid, r, rho_max);
        if (first > last) continue;
        const std::uint8_t* row = &bits[r * grid.n];
        for (long c = first; c <= last; ++c) open += row[c];
        total += last - first + 1;
        if (double(last - first + 1) < period_px) continue;
        long c = first;
        while (c <= last) {
            if (!row[c]) { ++c; continue; }
            long s = c;
            while (c <= last && row[c]) ++c;
            if (s != first && c != last + 1) {
                width_sum += double(c - s);
                ++runs;
            }
        }
    }
    if (runs > 0) return width_sum / runs / period_px;
    return total > 0 ? double(open) / double(total) : 0.0;
}

HologramMask binarize(const RealField& t, double alpha, const ModeIndex& source, const GratingSpec& g,
                      double rho_max) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("binarize: alpha must lie in (0,1)");
    const double tmax = *std::max_element(t.values.begin(), t.values.end());
    const double cut = alpha * tmax;
    HologramMask m;
    m.grid = t.grid;
    m.source_mode = source;
    m.grating = g;
    m.grating.alpha = alpha;
    m.rho_max = rho_max;
    m.bits.resize(t.values.size());
    const std::size_t n = t.grid.n;
    std::size_t ones = 0, inside = 0;
    for (std::size_t r = 0; r < n; ++r) {
        const double y = t.grid.coord(r);
        for (std::size_t c = 0; c < n; ++c) {
            const bool in = std::hypot(t.grid.coord(c), y) <= rho_max;
            const std::uint8_t b = (in && t.values[r * n + c] >= cut) ? 1 : 0;
            m.bits[r * n + c] = b;
            ones += b;
            inside += in;
        }
    }
    if (ones == 0) m.warnings.push_back("mask is entirely closed");
    else if (ones == inside) m.warnings.push_back("mask is entirely open");
    m.duty_estimate = measure_duty(m.bits, m.grid, rho_max, g.period(rho_max));
    return m;
}

double calibrate_alpha(const RealField& t, double target, double rho_max, double period, int iterations) {
    if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("calibrate_alpha: target must lie in (0,1)");
    const double tmax = *std::max_element(t.values.begin(), t.values.end());
    const std::size_t n = t.grid.n;
    std::vector<std::uint8_t> bits(t.values.size());
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double cut = mid * tmax;
        for (std::size_t r = 0; r < n; ++r) {
            const double y = t.grid.coord(r);
            for (std::size_t c = 0; c < n; ++c)
                bits[r * n + c] = (t.values[r * n + c] >= cut && std::hypot(t.grid.coord(c), y) <= rho_max);
        }
        if (measure_duty(bits, t.grid, rho_max, period) > target) lo = mid;
        else hi = mid;
    }
    return hi;
}

ZoneReport fringe_shift_check(const HologramMask& mask) {
    const ModeIndex& m = mask.source_mode;
    const double rho = mask.rho_max;
    const double d = mask.grating.period(rho);
    const double kx0 = mask.grating.k_x0(rho);
    const auto inner_nodes = modes::zone_boundaries(m, rho);

    ZoneReport rep;
    double prev = 0;
    for (std::size_t q = 0; q <= inner_nodes.size(); ++q) {
        rep.inner_radius.push_back(prev);
        const double outer = q < inner_nodes.size() ? inner_nodes[q] : rho;
        rep.outer_radius.push_back(outer);
        const double width = prev == 0 ? 2.0 * outer : outer - prev;
        if (width < 2.0 * d) throw std::runtime_error("fringe_shift_check: zone narrower than two fringes");
        prev = outer;
    }

    const ApertureGrid& grid = mask.grid;
    const std::size_t nz = rep.outer_radius.size();
    std::vector<cplx> acc(nz);
    std::vector<cplx> row_acc(nz), row_carrier(nz);
    std::vector<double> row_sum(nz), row_cnt(nz);
    for (std::size_t r = 0; r < grid.n; ++r) {
        const double y = grid.coord(r);
        std::fill(row_acc.begin(), row_acc.end(), cplx{});
        std::fill(row_carrier.begin(), row_carrier.end(), cplx{});
        std::fill(row_sum.begin(), row_sum.end(), 0.0);
        std::fill(row_cnt.begin(), row_cnt.end(), 0.0);
        for (std::size_t c = 0; c < grid.n; ++c) {
            const double x = grid.coord(c);
            const double rr = std::hypot(x, y);
            if (rr > rho) continue;
            std::size_t z = 0;
            while (z + 1 < nz && rr > rep.outer_radius[z]) ++z;
            const double b = mask.at(r, c);
            const cplx e = std::polar(1.0, -(m.l * std::atan2(y, x) + kx0 * x));
            row_acc[z] += b * e;
            row_carrier[z] += e;
            row_sum[z] += b;
            row_cnt[z] += 1;
        }
        // first-harmonic coefficient of each row segment with its mean removed
        for (std::size_t z = 0; z < nz; ++z) {
            if (row_cnt[z] < d / grid.pitch) continue;
            acc[z] += row_acc[z] - row_sum[z] / row_cnt[z] * row_carrier[z];
        }
    }
    for (std::size_t z = 0; z < nz; ++z) rep.phase.push_back(std::arg(acc[z]));
    for (std::size_t z = 1; z < nz; ++z) {
        double s = std::remainder(rep.phase[z] - rep.phase[z - 1], 2.0 * std::numbers::pi);
        rep.step.push_back(s);
        if (std::abs(std::abs(s) - std::numbers::pi) > 0.2) rep.complementary = false;
    }
    return rep;
}

HologramMask plain_grating(const GratingSpec& g, const ApertureGrid& grid, double rho_max) {
    validate(g, grid, rho_max);
    const double kx0 = g.k_x0(rho_max);
    RealField t = inside_template(grid);
    for (std::size_t r = 0; r < grid.n; ++r) {
        const double y = grid.coord(r);
        for (std::size_t c = 0; c < grid.n; ++c) {
            const double x = grid.coord(c);
            if (std::hypot(x, y) <= rho_max) t.at(r, c) = 2.0 * (1.0 + std::cos(kx0 * x));
        }
    }
    return binarize(t, g.alpha, ModeIndex{0, 0}, g, rho_max);
}

double plain_alpha_for_duty(double duty) {
    if (!(duty > 0.0 && duty < 1.0)) throw std::invalid_argument("plain_alpha_for_duty: duty must lie in (0,1)");
    return 0.5 * (1.0 + std::cos(std::numbers::pi * duty));
}

} // namespace hologram
} // namespace vh
