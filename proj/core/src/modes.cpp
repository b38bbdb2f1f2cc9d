#include "vh/modes.hpp"

#include "vh/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vh {

std::string ModeIndex::str() const { return std::to_string(p) + "," + std::to_string(l); }

void validate(const ModeIndex& m) {
    if (m.p < 0) throw std::invalid_argument("mode: radial index must be >= 0");
    if (std::abs(m.l) > 64) throw std::invalid_argument("mode: |l| must be <= 64");
}

double electron_wavelength(double energy_eV) {
    constexpr double h = 6.62607015e-34;
    constexpr double m0 = 9.1093837015e-31;
    constexpr double e = 1.602176634e-19;
    constexpr double c = 299792458.0;
    const double eV = e * energy_eV;
    return h / std::sqrt(2.0 * m0 * eV * (1.0 + eV / (2.0 * m0 * c * c)));
}

BeamParams BeamParams::from_energy(double energy_eV, double rho_max) {
    if (!(energy_eV > 0)) throw std::invalid_argument("beam: energy must be positive");
    if (!(rho_max > 0)) throw std::invalid_argument("beam: rho_max must be positive");
    BeamParams b;
    b.kinetic_energy = energy_eV;
    b.wavelength = electron_wavelength(energy_eV);
    b.k0 = 2.0 * std::numbers::pi / b.wavelength;
    b.rho_max = rho_max;
    return b;
}

ApertureGrid ApertureGrid::for_aperture(std::size_t n, double rho_max, int periods, double span) {
    if (n < 16 || (n & (n - 1)) != 0) throw std::invalid_argument("grid: n must be a power of two >= 16");
    if (periods < 1) throw std::invalid_argument("grid: periods must be positive");
    const double rho_px = span * 0.5 * double(n);
    int fringe_px = 2 * int(std::floor(rho_px / periods));
    if (fringe_px < 4) throw std::invalid_argument("grid: fewer than 4 samples per fringe");
    ApertureGrid g;
    g.n = n;
    g.pitch = 2.0 * rho_max / (double(periods) * fringe_px);
    return g;
}

const char* plane_name(Plane p) { return p == Plane::aperture ? "aperture" : "diffraction"; }

double ComplexField::energy() const {
    double s = 0;
    for (const auto& v : values) s += std::norm(v);
    return s;
}

namespace modes {

double k_perp(const ModeIndex& m, double rho_max) {
    return specfun::bessel_zero(std::abs(m.l), m.p) / rho_max;
}

double tbb_normalization(const ModeIndex& m, double rho_max) {
    validate(m);
    const int l = std::abs(m.l);
    const double xi = specfun::bessel_zero(l, m.p);
    return 1.0 / (std::sqrt(std::numbers::pi) * rho_max * std::abs(specfun::bessel_j(l + 1, xi)));
}

ComplexField tbb_field(const ModeIndex& m, const BeamParams& beam, const ApertureGrid& grid) {
    validate(m);
    const double rho = beam.rho_max;
    if (!(grid.extent() > 2.0 * rho)) throw std::invalid_argument("tbb_field: aperture exceeds grid");
    const double kp = k_perp(m, rho);
    if (std::numbers::pi / kp < 4.0 * grid.pitch)
        throw std::invalid_argument("tbb_field: radial oscillation under-sampled");

    ComplexField f;
    f.grid = grid;
    f.plane = Plane::aperture;
    f.values.assign(grid.n * grid.n, cplx{});
    double sum = 0;
    for (std::size_t r = 0; r < grid.n; ++r) {
        const double y = grid.coord(r);
        for (std::size_t c = 0; c < grid.n; ++c) {
            const double x = grid.coord(c);
            const double rr = std::hypot(x, y);
            if (rr > rho) continue;
            const double a = specfun::bessel_j(m.l, kp * rr);
            const cplx v = std::polar(a, m.l * std::atan2(y, x));
            f.at(r, c) = v;
            sum += std::norm(v);
        }
    }
    const double s = 1.0 / std::sqrt(sum * grid.pitch * grid.pitch);
    for (auto& v : f.values) v *= s;
    return f;
}

double ft_tbb_radial(const ModeIndex& m, double rho_max, double k) {
    const double xi = specfun::bessel_zero(std::abs(m.l), m.p);
    const double kp = xi / rho_max;
    if (std::abs(k - kp) < 1e-6 * kp) {
        // d/dk of the denominator is -2k; numerator derivative is rho J'_l(xi)
        return -rho_max * specfun::bessel_j_prime(m.l, xi) / (2.0 * kp);
    }
    return specfun::bessel_j(m.l, k * rho_max) / (kp * kp - k * k);
}

ComplexField ft_tbb_field(const ModeIndex& m, const BeamParams& beam, const ApertureGrid& grid) {
    validate(m);
    const double rho = beam.rho_max;
    const double xi = specfun::bessel_zero(std::abs(m.l), m.p);
    const cplx il = std::pow(cplx(0, 1), m.l);
    const cplx pref = il * xi * specfun::bessel_j_prime(m.l, xi);
    const double dk = 2.0 * std::numbers::pi / grid.extent();
    const std::size_t n = grid.n;

    ComplexField f;
    f.grid = grid;
    f.plane = Plane::diffraction;
    f.angular_pitch = beam.wavelength / grid.extent();
    f.values.resize(n * n);
    double sum = 0;
    for (std::size_t r = 0; r < n; ++r) {
        const double ky = (double(r) - double(n / 2)) * dk;
        for (std::size_t c = 0; c < n; ++c) {
            const double kx = (double(c) - double(n / 2)) * dk;
            const double k = std::hypot(kx, ky);
            const cplx v = pref * ft_tbb_radial(m, rho, k) * std::polar(1.0, m.l * std::atan2(ky, kx));
            f.at(r, c) = v;
            sum += std::norm(v);
        }
    }
    const double s = 1.0 / std::sqrt(sum);
    for (auto& v : f.values) v *= s;
    return f;
}

double radial_phase(const ModeIndex& m, double rho, double rho_max) {
    const double kp = k_perp(m, rho_max);
    return specfun::bessel_j(std::abs(m.l), kp * rho) < 0.0 ? std::numbers::pi : 0.0;
}

std::vector<double> zone_boundaries(const ModeIndex& m, double rho_max) {
    const int l = std::abs(m.l);
    const double xi = specfun::bessel_zero(l, m.p);
    std::vector<double> out;
    for (int q = 0; q < m.p; ++q) out.push_back(specfun::bessel_zero(l, q) / xi * rho_max);
    return out;
}

} // namespace modes
} // namespace vh
