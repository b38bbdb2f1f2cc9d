#pragma once
// Run configuration: flat "key = value" text, '#' comments, comma lists.

#include "vh/modes.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace vh {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    double energy_eV = 200e3;
    double rho_max_m = 2e-6;
    std::size_t grid_n = 2048;
    int periods = 20;
    bool fixed_alpha = false;       // false: calibrate to duty_target
    double alpha = 0.5;
    double duty_target = 0.4;
    std::vector<ModeIndex> modes{{0, 1}, {1, 1}, {2, 1}};
    int h_max = 5;
    std::vector<double> astig_sweep{2, 4, 8, 16};
    double astig_angle = 0.78539816339744828;
    int pad_factor = 1;
    int max_p = 4;
    double ring_threshold = 0.15;
    double lobe_threshold = 0.20;
    bool plain_grating = true;
    double plain_duty = 0.5;
    std::vector<std::string> required;   // subset of {even_odd, oam, rings, lobes, suppression}
    std::string output_dir = "out";

    // Re-check every invariant; throws ConfigError.
    void validate() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize(const RunConfig& cfg);

} // namespace vh
