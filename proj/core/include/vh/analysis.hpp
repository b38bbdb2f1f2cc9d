#pragma once
// Mode analysis of extracted diffraction orders.

#include "vh/hologram.hpp"
#include "vh/optics.hpp"

#include <map>
#include <string>
#include <vector>

namespace vh {

struct PolarSamples {
    std::size_t n_r = 0, n_a = 0;
    std::vector<double> r;       // radius of each ring, window pixels
    std::vector<cplx> v;         // v[ir * n_a + ia]
};

struct OamSpectrum {
    std::map<int, double> weights;   // sums to 1
    double mean = 0;
    int dominant = 0;
};

struct RadialDecomposition {
    std::vector<double> weights;     // index p, sums to 1
    double captured = 0;             // share of the component energy in the subspace
    int dominant = 0;
    std::vector<std::string> warnings;
};

struct RingCount {
    int count = 0;
    std::vector<double> radii;       // window pixels
    std::vector<double> heights;     // relative to the profile maximum
    bool outer_brightest = false;
    std::vector<double> profile;
};

struct LobeGrid {
    int rows = 0, cols = 0;
    double contrast = 0;             // smallest relative prominence among counted lobes
    bool ambiguous = false;
    std::vector<std::string> warnings;
    ModeIndex as_mode() const { return {rows - 1, cols - rows}; }
};

struct AnalysisSettings {
    std::size_t polar_radial = 128;
    std::size_t polar_azimuthal = 256;
    int max_p = 4;
    double ring_threshold = 0.15;
    double lobe_threshold = 0.20;
};

struct OrderReport {
    int h = 0;
    double oam_mean = 0;
    std::map<int, double> oam_spectrum;
    ModeIndex dominant_mode;
    double purity = 0;
    std::vector<double> radial_weights;
    int ring_count = 0;
    bool outer_ring_brightest = false;
    int lobe_rows = 0, lobe_cols = 0;
    double best_c = 0;
    double integrated_intensity = 0;
    std::vector<std::string> warnings;
};

struct EvenOddEntry {
    int h = 0;
    ModeIndex expected;
    ModeIndex measured;
    double purity = 0;
    bool pass = false;
    std::vector<std::string> notes;
};

struct EvenOddVerdict {
    ModeIndex source;
    std::vector<EvenOddEntry> entries;
    bool all_pass = true;
    std::vector<std::string> notes;
};

struct OrderEfficiencies {
    double dc = 0;                    // zeroth coefficient, equals a/d for a square wave
    std::map<int, double> power;      // |c_h|^2
};

namespace analysis {

PolarSamples polar_resample(const ExtractedOrder& e, std::size_t n_r = 128, std::size_t n_a = 256);

OamSpectrum oam_spectrum(const ExtractedOrder& e, const AnalysisSettings& s = {});

RadialDecomposition radial_decompose(const ExtractedOrder& e, int l_fixed, const BeamParams& beam, int max_p,
                                     const AnalysisSettings& s = {});

RingCount count_rings(const ExtractedOrder& e, const AnalysisSettings& s = {});

LobeGrid count_lobes(const ExtractedOrder& e, const AnalysisSettings& s = {});

// Index of the entry with the highest lobe contrast, -1 when empty.
int best_contrast(const std::vector<LobeGrid>& sweep);

OrderReport analyze_order(const ExtractedOrder& e, const BeamParams& beam, const AnalysisSettings& s = {});

EvenOddVerdict even_odd_report(const HologramMask& mask, const std::vector<OrderReport>& orders,
                               double odd_purity = 0.7, double even_purity = 0.6);

// Joint least-squares fit of the mask's column profile to the grating
// harmonics e^{i h k_x0 x} over the aperture. Unaffected by far-field
// crosstalk between neighbouring orders.
OrderEfficiencies order_efficiencies(const HologramMask& mask, int h_fit = 19);

// [(2/h pi) sin(h pi duty)]^2
double square_wave_power(int h, double duty);

} // namespace analysis
} // namespace vh
