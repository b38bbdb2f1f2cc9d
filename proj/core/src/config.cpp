#include "vh/config.hpp"

#include "vh/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace vh {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
    }
}

long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long i = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + " expects an integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: " + key + " expects true/false, got '" + v + "'");
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void RunConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
    if (!(energy_eV > 0)) fail("energy_eV must be positive");
    if (!(rho_max_m > 0)) fail("rho_max_m must be positive");
    if (grid_n < 64 || (grid_n & (grid_n - 1)) != 0) fail("grid_n must be a power of two >= 64");
    if (periods < 8) fail("periods must be >= 8");
    try {
        (void)ApertureGrid::for_aperture(grid_n, rho_max_m, periods);
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    if (fixed_alpha && !(alpha > 0 && alpha < 1)) fail("alpha must lie in (0,1)");
    if (!fixed_alpha && !(duty_target > 0 && duty_target < 1)) fail("duty_target must lie in (0,1)");
    if (modes.empty()) fail("modes must list at least one p:l pair");
    for (const auto& m : modes) {
        if (m.p < 0 || std::abs(m.l) > 64) fail("mode " + m.str() + " out of range");
    }
    if (h_max < 1) fail("h_max must be >= 1");
    for (double c : astig_sweep)
        if (!(c >= 0)) fail("astig_sweep entries must be >= 0");
    if (pad_factor < 1 || pad_factor > 4) fail("pad_factor must be in [1,4]");
    if (max_p < 0) fail("max_p must be >= 0");
    if (!(ring_threshold > 0 && ring_threshold < 1)) fail("ring_threshold must lie in (0,1)");
    if (!(lobe_threshold > 0 && lobe_threshold < 1)) fail("lobe_threshold must lie in (0,1)");
    if (!(plain_duty > 0 && plain_duty < 1)) fail("plain_duty must lie in (0,1)");
    static const std::set<std::string> known{"even_odd", "oam", "rings", "lobes", "suppression"};
    for (const auto& r : required)
        if (!known.count(r)) fail("unknown required assertion '" + r + "'");
    if (output_dir.empty()) fail("output_dir must not be empty");
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    bool saw_alpha = false, saw_duty = false;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!seen.insert(key).second) throw ConfigError("config: duplicate key " + key);

        if (key == "energy_eV") cfg.energy_eV = to_double(key, val);
        else if (key == "rho_max_m") cfg.rho_max_m = to_double(key, val);
        else if (key == "grid_n") {
            long v = to_int(key, val);
            if (v <= 0) throw ConfigError("config: grid_n must be positive");
            cfg.grid_n = std::size_t(v);
        } else if (key == "periods") cfg.periods = int(to_int(key, val));
        else if (key == "alpha") { cfg.alpha = to_double(key, val); cfg.fixed_alpha = true; saw_alpha = true; }
        else if (key == "duty_target") { cfg.duty_target = to_double(key, val); saw_duty = true; }
        else if (key == "modes") {
            cfg.modes.clear();
            for (const auto& item : split_list(val)) {
                const auto colon = item.find(':');
                if (colon == std::string::npos) throw ConfigError("config: mode '" + item + "' must be p:l");
                cfg.modes.push_back({int(to_int(key, trim(item.substr(0, colon)))),
                                     int(to_int(key, trim(item.substr(colon + 1))))});
            }
        } else if (key == "h_max") cfg.h_max = int(to_int(key, val));
        else if (key == "astig_sweep") {
            cfg.astig_sweep.clear();
            for (const auto& item : split_list(val)) cfg.astig_sweep.push_back(to_double(key, item));
        } else if (key == "astig_angle") cfg.astig_angle = to_double(key, val);
        else if (key == "pad_factor") cfg.pad_factor = int(to_int(key, val));
        else if (key == "max_p") cfg.max_p = int(to_int(key, val));
        else if (key == "ring_threshold") cfg.ring_threshold = to_double(key, val);
        else if (key == "lobe_threshold") cfg.lobe_threshold = to_double(key, val);
        else if (key == "plain_grating") cfg.plain_grating = to_bool(key, val);
        else if (key == "plain_duty") cfg.plain_duty = to_double(key, val);
        else if (key == "required") cfg.required = split_list(val);
        else if (key == "output_dir") cfg.output_dir = val;
        else throw ConfigError("config: unknown key '" + key + "'");
    }
    if (saw_alpha && saw_duty) throw ConfigError("config: alpha and duty_target are mutually exclusive");
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("config: file not found: " + path.string());
    return parse_config(io::read_text(path));
}

std::string serialize(const RunConfig& cfg) {
    std::ostringstream os;
    os << "energy_eV = " << num(cfg.energy_eV) << "\n";
    os << "rho_max_m = " << num(cfg.rho_max_m) << "\n";
    os << "grid_n = " << cfg.grid_n << "\n";
    os << "periods = " << cfg.periods << "\n";
    if (cfg.fixed_alpha) os << "alpha = " << num(cfg.alpha) << "\n";
    else os << "duty_target = " << num(cfg.duty_target) << "\n";
    os << "modes = ";
    for (std::size_t i = 0; i < cfg.modes.size(); ++i)
        os << (i ? ", " : "") << cfg.modes[i].p << ':' << cfg.modes[i].l;
    os << "\nh_max = " << cfg.h_max << "\n";
    os << "astig_sweep = ";
    for (std::size_t i = 0; i < cfg.astig_sweep.size(); ++i) os << (i ? ", " : "") << num(cfg.astig_sweep[i]);
    os << "\nastig_angle = " << num(cfg.astig_angle) << "\n";
    os << "pad_factor = " << cfg.pad_factor << "\n";
    os << "max_p = " << cfg.max_p << "\n";
    os << "ring_threshold = " << num(cfg.ring_threshold) << "\n";
    os << "lobe_threshold = " << num(cfg.lobe_threshold) << "\n";
    os << "plain_grating = " << (cfg.plain_grating ? "true" : "false") << "\n";
    os << "plain_duty = " << num(cfg.plain_duty) << "\n";
    os << "required = ";
    for (std::size_t i = 0; i < cfg.required.size(); ++i) os << (i ? ", " : "") << cfg.required[i];
    os << "\noutput_dir = " << cfg.output_dir << "\n";
    return os.str();
}

} // namespace vh
