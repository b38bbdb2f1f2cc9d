#pragma once
// Far-field propagation, astigmatic transform and per-order extraction.

#include "vh/modes.hpp"

#include <string>
#include <vector>

namespace vh {

struct OrderCenter {
    int h = 0;
    double bin = 0;     // refined column position on the pattern
    double theta = 0;   // angle from the optical axis, radians
    double power = 0;   // fraction of total intensity in the window
};

struct DiffractionPattern {
    ComplexField field;
    double theta_pitch = 0;
    double order_spacing = 0;   // bins between adjacent orders, 0 without a grating
    std::vector<OrderCenter> order_centers;
};

struct AstigParams {
    double strength = 0;     // peak quadratic phase at the aperture rim, radians
    double axis_angle = 0;
};

struct ExtractedOrder {
    int h = 0;
    ComplexField field;       // square window, diffraction plane
    double cx = 0, cy = 0;    // intensity centroid in window pixels
    double k_pitch = 0;       // transverse wavenumber per window pixel
    double overlap = 0;       // energy fraction near the window edges
    std::vector<std::string> warnings;
};

struct ParsevalStats {
    std::size_t calls = 0;
    double max_rel_error = 0;
};

namespace optics {

// Centered unitary DFT of an aperture-plane field zero-padded by ``pad``.
// ``period`` is the grating period in meters; pass 0 to skip order finding.
DiffractionPattern propagate(const ComplexField& f, const BeamParams& beam, double period, int pad = 1);

DiffractionPattern astig_transform(const ComplexField& f, const AstigParams& a, const BeamParams& beam,
                                   double period, int pad = 1);

// Window of width lambda/d around order h, re-centred on its intensity centroid.
// Throws std::out_of_range when the window leaves the sampled band.
ExtractedOrder extract_order(const DiffractionPattern& pat, int h, const BeamParams& beam);

// Rebuild an extraction record from a stored window (centroid recomputed).
ExtractedOrder wrap_window(const ComplexField& window, int h, const BeamParams& beam);

// Largest order whose extraction window stays inside the band.
int max_order(const DiffractionPattern& pat);

std::vector<double> intensity(const ComplexField& f);

ParsevalStats parseval_stats();
void reset_parseval_stats();

} // namespace optics
} // namespace vh
