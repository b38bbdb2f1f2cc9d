#pragma once
// Forked amplitude holograms: exact interference transmission, binarization,
// and the plain rectangular grating used as a control.

#include "vh/modes.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vh {

struct GratingSpec {
    int periods = 20;      // fringes across the aperture diameter
    double alpha = 0.5;    // threshold parameter

    double k_x0(double rho_max) const;
    double period(double rho_max) const;   // d = 2 pi / k_x0
};

// Throws std::invalid_argument if the spec violates the sampling rules on ``grid``.
void validate(const GratingSpec& g, const ApertureGrid& grid, double rho_max);

struct HologramMask {
    ApertureGrid grid;
    std::vector<std::uint8_t> bits;   // 0 or 1, row-major
    ModeIndex source_mode;
    GratingSpec grating;
    double rho_max = 0;
    double duty_estimate = 0;         // open fraction a/d read from the fringes
    std::vector<std::string> warnings;

    std::uint8_t at(std::size_t r, std::size_t c) const { return bits[r * grid.n + c]; }
    ComplexField as_field() const;    // unit-amplitude illumination of the mask
};

namespace hologram {

RealField transmission_exact(const ModeIndex& m, const BeamParams& beam, const GratingSpec& g,
                             const ApertureGrid& grid);

// Pointwise threshold at alpha * max(t). The mask records the source mode,
// grating and rho_max passed along for provenance.
HologramMask binarize(const RealField& t, double alpha, const ModeIndex& source,
                      const GratingSpec& g, double rho_max);

// Mean width of the open runs that do not touch the aperture rim, in units
// of the fringe period. Falls back to the open area fraction when a mask
// has no interior runs.
double measure_duty(const std::vector<std::uint8_t>& bits, const ApertureGrid& grid, double rho_max,
                    double period);

// Smallest alpha whose mask duty does not exceed ``target`` (bisection).
double calibrate_alpha(const RealField& t, double target, double rho_max, double period,
                       int iterations = 40);

struct ZoneReport {
    std::vector<double> inner_radius;
    std::vector<double> outer_radius;
    std::vector<double> phase;        // fringe phase per zone, radians in (-pi, pi]
    std::vector<double> step;         // wrapped phase step between neighbours
    bool complementary = true;        // every step within 0.2 rad of pi
};

ZoneReport fringe_shift_check(const HologramMask& mask);

HologramMask plain_grating(const GratingSpec& g, const ApertureGrid& grid, double rho_max);

// Analytic alpha at which the thresholded plain-grating cosine opens a
// fraction ``duty`` of each period.
double plain_alpha_for_duty(double duty);

} // namespace hologram
} // namespace vh
