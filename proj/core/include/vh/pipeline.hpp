#pragma once
// Orchestration behind the command-line verbs.

#include "vh/analysis.hpp"
#include "vh/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace vh::pipeline {

enum ExitCode : int { ok = 0, failure = 1, config_error = 2, missing_artifact = 3, assertion_failed = 4 };

struct Options {
    RunConfig cfg;
    std::filesystem::path out;   // overrides cfg.output_dir when non-empty
    bool force = false;
    std::ostream* log = nullptr; // progress messages, may be null
};

std::string mode_tag(const ModeIndex& m);

BeamParams beam_for(const RunConfig& cfg);
ApertureGrid grid_for(const RunConfig& cfg);
GratingSpec grating_for(const RunConfig& cfg);

// Exact transmission and its binarized mask for one mode.
HologramMask build_mask(const RunConfig& cfg, const ModeIndex& m, RealField* exact = nullptr);
HologramMask build_plain_grating(const RunConfig& cfg);

// Pearson correlation of the first-order intensity windows produced by the
// exact transmission and by the binary mask.
double first_order_similarity(const RealField& exact, const HologramMask& mask, const BeamParams& beam);

int cmd_mask(const Options& o);
int cmd_simulate(const Options& o);
int cmd_astig(const Options& o);
int cmd_analyze(const Options& o);
int cmd_all(const Options& o);

// Runs ``fn`` and maps exceptions onto the exit-code contract.
int guarded(const Options& o, int (*fn)(const Options&));

} // namespace vh::pipeline
