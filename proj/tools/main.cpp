// vortexholo: binary vortex holograms, far-field simulation and mode analysis.

#include "vh/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int run(const std::string& verb, const std::string& config_path, const std::string& out, bool force) {
    using namespace vh::pipeline;
    Options o;
    try {
        if (!config_path.empty()) o.cfg = vh::load_config(config_path);
        else o.cfg.validate();
    } catch (const vh::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    }
    o.out = out;
    o.force = force;
    o.log = &std::cout;
    if (verb == "mask") return guarded(o, cmd_mask);
    if (verb == "simulate") return guarded(o, cmd_simulate);
    if (verb == "astig") return guarded(o, cmd_astig);
    if (verb == "analyze") return guarded(o, cmd_analyze);
    return guarded(o, cmd_all);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Binary vortex holograms: masks, far-field simulation, astigmatic transforms, mode analysis"};
    app.require_subcommand(1);
    std::string config, out;
    bool force = false;
    app.add_option("--config", config, "run configuration (key = value)")->check(CLI::ExistingFile);
    app.add_option("--out", out, "output directory (overrides output_dir)");
    app.add_flag("--force", force, "overwrite existing outputs");

    std::string verb;
    for (const char* name : {"mask", "simulate", "astig", "analyze", "all"}) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();
        sub->callback([&verb, name] { verb = name; });
    }
    app.get_subcommand("mask")->description("write binary mask PGMs and metadata");
    app.get_subcommand("simulate")->description("far-field patterns, order dumps, binary-vs-exact metric");
    app.get_subcommand("astig")->description("astigmatic sweep and lobe counts per order");
    app.get_subcommand("analyze")->description("order reports CSV and even-odd verdict");
    app.get_subcommand("all")->description("mask, simulate, astig, analyze");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : vh::pipeline::config_error;
    }
    return run(verb, config, out, force);
}
