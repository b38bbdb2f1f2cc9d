#pragma once
// Truncated Bessel modes on the aperture plane and their analytic far field.

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace vh {

using cplx = std::complex<double>;

struct ModeIndex {
    int p = 0;
    int l = 0;
    bool operator==(const ModeIndex&) const = default;
    std::string str() const;   // "p,l"
};

// Throws std::invalid_argument when p < 0 or |l| > 64.
void validate(const ModeIndex& m);

struct BeamParams {
    double kinetic_energy = 200e3;  // eV
    double wavelength = 0;          // m
    double k0 = 0;                  // rad/m
    double rho_max = 2e-6;          // m

    static BeamParams from_energy(double energy_eV, double rho_max);
};

// Relativistic de Broglie wavelength for an electron of the given kinetic energy.
double electron_wavelength(double energy_eV);

// Square sampling grid. The optical axis sits on the pixel corner at the
// middle, so x_i = (i - (n-1)/2) * pitch.
struct ApertureGrid {
    std::size_t n = 0;
    double pitch = 0;

    double center() const { return 0.5 * double(n - 1); }
    double coord(std::size_t i) const { return (double(i) - center()) * pitch; }
    double extent() const { return double(n) * pitch; }

    // Grid where ``periods`` fringes span the aperture diameter and each
    // fringe is an even whole number of pixels. The aperture then covers
    // close to (but not more than) ``span`` of the half-width.
    static ApertureGrid for_aperture(std::size_t n, double rho_max, int periods, double span = 0.4);
};

enum class Plane { aperture, diffraction };
const char* plane_name(Plane p);

struct ComplexField {
    ApertureGrid grid;           // for diffraction fields: source aperture grid padded to n
    Plane plane = Plane::aperture;
    double angular_pitch = 0;    // rad/sample, diffraction plane only
    std::vector<cplx> values;    // row-major, row index is y

    cplx& at(std::size_t row, std::size_t col) { return values[row * grid.n + col]; }
    const cplx& at(std::size_t row, std::size_t col) const { return values[row * grid.n + col]; }
    double energy() const;
};

struct RealField {
    ApertureGrid grid;
    std::vector<double> values;
    double& at(std::size_t row, std::size_t col) { return values[row * grid.n + col]; }
    double at(std::size_t row, std::size_t col) const { return values[row * grid.n + col]; }
};

namespace modes {

// Transverse wavenumber xi_pl / rho_max.
double k_perp(const ModeIndex& m, double rho_max);

double tbb_normalization(const ModeIndex& m, double rho_max);

// N J_l(k rho) e^{i l phi} inside the aperture, zero outside; sum |psi|^2 pitch^2 = 1.
ComplexField tbb_field(const ModeIndex& m, const BeamParams& beam, const ApertureGrid& grid);

// Radial factor of the far-field mode at transverse wavenumber k, without
// the constant prefactor: J_l(k rho_max) / (k_p^2 - k^2) with its limit at k_p.
double ft_tbb_radial(const ModeIndex& m, double rho_max, double k);

// Analytic far field sampled on the centered DFT grid of ``grid``
// (k_j = 2 pi (j - n/2) / (n pitch)); unit-normalized over the samples.
ComplexField ft_tbb_field(const ModeIndex& m, const BeamParams& beam, const ApertureGrid& grid);

// 0 where J_l(k_p rho) >= 0, pi where negative.
double radial_phase(const ModeIndex& m, double rho, double rho_max);

// Radii of the interior nodes of the mode, ascending (p entries).
std::vector<double> zone_boundaries(const ModeIndex& m, double rho_max);

} // namespace modes
} // namespace vh
