#include "vh/pipeline.hpp"

#include "vh/io.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

namespace vh::pipeline {
namespace fs = std::filesystem;

namespace {

struct OverwriteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fs::path out_dir(const Options& o) { return o.out.empty() ? fs::path(o.cfg.output_dir) : o.out; }

void guard(const Options& o, const fs::path& p) {
    if (!o.force && fs::exists(p)) throw OverwriteError("refusing to overwrite " + p.string() + " (use --force)");
}

void say(const Options& o, const std::string& msg) {
    if (o.log) *o.log << msg << '\n';
}

std::string g(double v, const char* f = "%.10g") {
    char buf[48];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string order_name(int h) { return h < 0 ? "m" + std::to_string(-h) : std::to_string(h); }

std::map<std::string, std::string> read_kv(const fs::path& p) {
    std::map<std::string, std::string> kv;
    std::istringstream is(io::read_text(p));
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto key = line.substr(0, eq), val = line.substr(eq + 1);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(key)] = trim(val);
    }
    return kv;
}

std::string sidecar(const HologramMask& m, const RunConfig& cfg) {
    std::ostringstream os;
    os << "p = " << m.source_mode.p << "\nl = " << m.source_mode.l << "\nalpha = " << g(m.grating.alpha, "%.17g")
       << "\nduty = " << g(m.duty_estimate, "%.17g") << "\nperiods = " << m.grating.periods
       << "\nk_x0 = " << g(m.grating.k_x0(m.rho_max), "%.17g") << "\nrho_max = " << g(m.rho_max, "%.17g")
       << "\npitch = " << g(m.grid.pitch, "%.17g") << "\nn = " << m.grid.n
       << "\nenergy_eV = " << g(cfg.energy_eV, "%.17g") << "\n";
    for (const auto& w : m.warnings) os << "# warning: " << w << "\n";
    return os.str();
}

// Loads a mask written by cmd_mask, or builds it when absent.
HologramMask obtain_mask(const Options& o, const ModeIndex& m, RealField* exact) {
    const fs::path pgm = out_dir(o) / "masks" / (mode_tag(m) + ".pgm");
    const fs::path txt = out_dir(o) / "masks" / (mode_tag(m) + ".txt");
    if (!fs::exists(pgm) || !fs::exists(txt) || exact) {
        HologramMask mask = build_mask(o.cfg, m, exact);
        return mask;
    }
    const auto img = io::read_pgm(pgm);
    const auto kv = read_kv(txt);
    HologramMask mask;
    mask.grid = grid_for(o.cfg);
    if (img.width != mask.grid.n || img.height != mask.grid.n)
        throw ConfigError("mask " + pgm.string() + " does not match grid_n");
    mask.source_mode = m;
    mask.grating = grating_for(o.cfg);
    mask.grating.alpha = std::stod(kv.at("alpha"));
    mask.rho_max = o.cfg.rho_max_m;
    mask.duty_estimate = std::stod(kv.at("duty"));
    mask.bits.resize(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) mask.bits[i] = img.pixels[i] ? 1 : 0;
    return mask;
}

void parse_lobes_csv(const fs::path& p, std::map<int, std::pair<LobeGrid, double>>& out) {
    std::istringstream is(io::read_text(p));
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() < 7 || f[6] != "1") continue;
        LobeGrid lg;
        lg.rows = std::stoi(f[2]);
        lg.cols = std::stoi(f[3]);
        lg.contrast = std::stod(f[4]);
        lg.ambiguous = f[5] == "1";
        out[std::stoi(f[0])] = {lg, std::stod(f[1])};
    }
}

} // namespace

std::string mode_tag(const ModeIndex& m) {
    return "mode_p" + std::to_string(m.p) + "_l" + (m.l < 0 ? "m" + std::to_string(-m.l) : std::to_string(m.l));
}

BeamParams beam_for(const RunConfig& cfg) { return BeamParams::from_energy(cfg.energy_eV, cfg.rho_max_m); }

ApertureGrid grid_for(const RunConfig& cfg) {
    return ApertureGrid::for_aperture(cfg.grid_n, cfg.rho_max_m, cfg.periods);
}

GratingSpec grating_for(const RunConfig& cfg) {
    GratingSpec gs;
    gs.periods = cfg.periods;
    gs.alpha = cfg.fixed_alpha ? cfg.alpha : 0.5;
    return gs;
}

HologramMask build_mask(const RunConfig& cfg, const ModeIndex& m, RealField* exact) {
    const auto beam = beam_for(cfg);
    const auto grid = grid_for(cfg);
    auto gs = grating_for(cfg);
    RealField t = hologram::transmission_exact(m, beam, gs, grid);
    const double alpha = cfg.fixed_alpha
                             ? cfg.alpha
                             : hologram::calibrate_alpha(t, cfg.duty_target, beam.rho_max, gs.period(beam.rho_max));
    auto mask = hologram::binarize(t, alpha, m, gs, beam.rho_max);
    if (exact) *exact = std::move(t);
    return mask;
}

HologramMask build_plain_grating(const RunConfig& cfg) {
    auto gs = grating_for(cfg);
    gs.alpha = hologram::plain_alpha_for_duty(cfg.plain_duty);
    return hologram::plain_grating(gs, grid_for(cfg), cfg.rho_max_m);
}

double first_order_similarity(const RealField& exact, const HologramMask& mask, const BeamParams& beam) {
    ComplexField fe;
    fe.grid = exact.grid;
    fe.plane = Plane::aperture;
    fe.values.assign(exact.values.begin(), exact.values.end());
    const double d = mask.grating.period(mask.rho_max);
    const auto pe = optics::propagate(fe, beam, d);
    const auto pb = optics::propagate(mask.as_field(), beam, d);
    // identical fixed window for both patterns
    const long N = long(pe.field.grid.n);
    long W = long(std::floor(pe.order_spacing));
    if ((W & 1) == 0) --W;
    const long hw = W / 2, r0 = N / 2, c0 = N / 2 + std::lround(pe.order_spacing);
    std::vector<double> a, b;
    for (long r = r0 - hw; r <= r0 + hw; ++r)
        for (long c = c0 - hw; c <= c0 + hw; ++c) {
            a.push_back(std::norm(pe.field.at(std::size_t(r), std::size_t(c))));
            b.push_back(std::norm(pb.field.at(std::size_t(r), std::size_t(c))));
        }
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) { ma += a[i]; mb += b[i]; }
    ma /= double(a.size());
    mb /= double(b.size());
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

int cmd_mask(const Options& o) {
    const fs::path dir = out_dir(o) / "masks";
    for (const auto& m : o.cfg.modes) {
        const auto pgm = dir / (mode_tag(m) + ".pgm"), txt = dir / (mode_tag(m) + ".txt");
        guard(o, pgm);
        guard(o, txt);
        const auto mask = build_mask(o.cfg, m);
        io::write_mask_pgm(pgm, mask);
        io::write_text(txt, sidecar(mask, o.cfg));
        say(o, "mask " + m.str() + ": alpha " + g(mask.grating.alpha, "%.6f") + ", duty " +
                   g(mask.duty_estimate, "%.4f"));
    }
    if (o.cfg.plain_grating) {
        const auto pgm = dir / "plain_grating.pgm", txt = dir / "plain_grating.txt";
        guard(o, pgm);
        guard(o, txt);
        const auto mask = build_plain_grating(o.cfg);
        io::write_mask_pgm(pgm, mask);
        io::write_text(txt, sidecar(mask, o.cfg));
        say(o, "plain grating: duty " + g(mask.duty_estimate, "%.4f"));
    }
    return ok;
}

int cmd_simulate(const Options& o) {
    const auto beam = beam_for(o.cfg);
    for (const auto& m : o.cfg.modes) {
        const fs::path dir = out_dir(o) / "simulate" / mode_tag(m);
        guard(o, dir / "pattern.pgm");
        RealField exact;
        const auto mask = obtain_mask(o, m, &exact);
        const double d = mask.grating.period(mask.rho_max);
        const auto pat = optics::propagate(mask.as_field(), beam, d, o.cfg.pad_factor);
        const std::size_t N = pat.field.grid.n;
        io::write_intensity_pgm(dir / "pattern.pgm", optics::intensity(pat.field), N, N);

        std::ostringstream log;
        const int hmax_band = optics::max_order(pat);
        for (int h = -o.cfg.h_max; h <= o.cfg.h_max; ++h) {
            if (std::abs(h) > hmax_band) {
                log << "order " << h << ": skipped, outside the sampled band\n";
                continue;
            }
            const auto e = optics::extract_order(pat, h, beam);
            for (const auto& w : e.warnings) log << "order " << h << ": " << w << "\n";
            const auto p = dir / ("order_h" + order_name(h) + ".cfld");
            guard(o, p);
            io::write_complex(p, e.field);
        }
        std::ostringstream cmp;
        const double ncc = first_order_similarity(exact, mask, beam);
        cmp << "first_order_correlation = " << g(ncc) << "\n";
        cmp << "theta_pitch_urad = " << g(pat.theta_pitch * 1e6) << "\n";
        for (const auto& oc : pat.order_centers)
            if (std::abs(oc.h) <= o.cfg.h_max)
                cmp << "order_center_urad_h" << order_name(oc.h) << " = " << g(oc.theta * 1e6) << "\n";
        io::write_text(dir / "comparison.txt", cmp.str());
        io::write_text(dir / "run.log", log.str());
        say(o, "simulate " + m.str() + ": first-order correlation " + g(ncc, "%.5f"));
    }
    return ok;
}

int cmd_astig(const Options& o) {
    const auto beam = beam_for(o.cfg);
    AnalysisSettings s;
    s.lobe_threshold = o.cfg.lobe_threshold;
    for (const auto& m : o.cfg.modes) {
        const fs::path dir = out_dir(o) / "astig" / mode_tag(m);
        guard(o, dir / "lobes.csv");
        const auto mask = obtain_mask(o, m, nullptr);
        const double d = mask.grating.period(mask.rho_max);
        const auto field = mask.as_field();
        std::map<int, std::vector<std::pair<double, LobeGrid>>> per_h;
        for (double c : o.cfg.astig_sweep) {
            const auto pat = optics::astig_transform(field, AstigParams{c, o.cfg.astig_angle}, beam, d, o.cfg.pad_factor);
            const int band = optics::max_order(pat);
            for (int h = 1; h <= std::min(o.cfg.h_max, band); ++h) {
                const auto e = optics::extract_order(pat, h, beam);
                const std::string stem = "c" + g(c, "%g") + "_h" + order_name(h);
                io::write_intensity_pgm(dir / (stem + ".pgm"), optics::intensity(e.field), e.field.grid.n,
                                        e.field.grid.n);
                io::write_complex(dir / (stem + ".cfld"), e.field);
                per_h[h].push_back({c, analysis::count_lobes(e, s)});
            }
        }
        std::ostringstream csv;
        csv << "h,c,rows,cols,contrast,ambiguous,selected\n";
        for (auto& [h, entries] : per_h) {
            std::vector<LobeGrid> cand;
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < entries.size(); ++i)
                if (entries[i].first > 0) { cand.push_back(entries[i].second); idx.push_back(i); }
            const int b = analysis::best_contrast(cand);
            const std::size_t sel = b >= 0 ? idx[std::size_t(b)] : entries.size();
            for (std::size_t i = 0; i < entries.size(); ++i) {
                const auto& [c, lg] = entries[i];
                csv << h << ',' << g(c, "%g") << ',' << lg.rows << ',' << lg.cols << ',' << g(lg.contrast, "%.6f")
                    << ',' << (lg.ambiguous ? 1 : 0) << ',' << (i == sel ? 1 : 0) << "\n";
            }
            if (sel < entries.size())
                say(o, "astig " + m.str() + " h=" + std::to_string(h) + ": c=" + g(entries[sel].first, "%g") +
                           " lobes " + std::to_string(entries[sel].second.rows) + "x" +
                           std::to_string(entries[sel].second.cols));
        }
        io::write_text(dir / "lobes.csv", csv.str());
    }
    return ok;
}

int cmd_analyze(const Options& o) {
    const auto beam = beam_for(o.cfg);
    AnalysisSettings s;
    s.max_p = o.cfg.max_p;
    s.ring_threshold = o.cfg.ring_threshold;
    s.lobe_threshold = o.cfg.lobe_threshold;
    const fs::path dir = out_dir(o) / "analysis";
    guard(o, dir / "orders.csv");

    auto required = [&](const std::string& k) {
        for (const auto& r : o.cfg.required)
            if (r == k) return true;
        return false;
    };
    bool failed = false;
    std::ostringstream csv, summary;
    csv << "mask,h,oam_mean,dominant_p,dominant_l,purity,ring_count,lobe_rows,lobe_cols,intensity,warnings\n";

    for (const auto& m : o.cfg.modes) {
        const std::string tag = mode_tag(m);
        const auto side = read_kv(out_dir(o) / "masks" / (tag + ".txt"));
        HologramMask meta;
        meta.source_mode = m;
        meta.duty_estimate = std::stod(side.at("duty"));

        std::map<int, std::pair<LobeGrid, double>> lobes;
        parse_lobes_csv(out_dir(o) / "astig" / tag / "lobes.csv", lobes);

        std::vector<OrderReport> reports;
        for (int h = 1; h <= o.cfg.h_max; ++h) {
            const auto p = out_dir(o) / "simulate" / tag / ("order_h" + order_name(h) + ".cfld");
            const auto e = optics::wrap_window(io::read_complex(p), h, beam);
            auto rep = analysis::analyze_order(e, beam, s);
            if (auto it = lobes.find(h); it != lobes.end()) {
                rep.lobe_rows = it->second.first.rows;
                rep.lobe_cols = it->second.first.cols;
                rep.best_c = it->second.second;
                if (it->second.first.ambiguous) rep.warnings.push_back("ambiguous lobe count");
            }
            std::string warn;
            for (const auto& w : rep.warnings) warn += (warn.empty() ? "" : "; ") + w;
            for (auto& ch : warn)
                if (ch == ',') ch = ' ';
            csv << tag << ',' << h << ',' << g(rep.oam_mean, "%.6f") << ',' << rep.dominant_mode.p << ','
                << rep.dominant_mode.l << ',' << g(rep.purity, "%.6f") << ',' << rep.ring_count << ','
                << rep.lobe_rows << ',' << rep.lobe_cols << ',' << g(rep.integrated_intensity, "%.8e") << ',' << warn
                << "\n";

            const double target = double(h * m.l);
            if (required("oam") && target != 0 && std::abs(rep.oam_mean / target - 1.0) > 0.05) failed = true;
            if (required("rings") && h == 1 && rep.ring_count != m.p + 1) failed = true;
            if (required("lobes") && h == 1 && (rep.lobe_rows != m.p + 1 || rep.lobe_cols != m.p + std::abs(m.l) + 1))
                failed = true;
            reports.push_back(std::move(rep));
        }
        const auto verdict = analysis::even_odd_report(meta, reports);
        summary << "mask " << m.str() << " (duty " << g(meta.duty_estimate, "%.4f") << ")\n";
        for (const auto& e : verdict.entries) {
            summary << "  h=" << e.h << " expected (" << e.expected.str() << ") measured (" << e.measured.str()
                    << ") purity " << g(e.purity, "%.3f") << (e.pass ? " PASS" : " FAIL");
            for (const auto& n : e.notes) summary << " [" << n << "]";
            summary << "\n";
        }
        for (const auto& n : verdict.notes) summary << "  note: " << n << "\n";
        if (required("even_odd") && !verdict.all_pass) failed = true;
    }

    if (o.cfg.plain_grating) {
        const auto pgm = out_dir(o) / "masks" / "plain_grating.pgm";
        const auto img = io::read_pgm(pgm);
        HologramMask mask;
        mask.grid = grid_for(o.cfg);
        if (img.width != mask.grid.n) throw ConfigError("plain grating mask does not match grid_n");
        mask.grating = grating_for(o.cfg);
        mask.rho_max = o.cfg.rho_max_m;
        mask.bits.resize(img.pixels.size());
        for (std::size_t i = 0; i < img.pixels.size(); ++i) mask.bits[i] = img.pixels[i] ? 1 : 0;
        const auto eff = analysis::order_efficiencies(mask);
        std::ostringstream gcsv;
        gcsv << "h,ratio_to_h1,theory_ratio,suppressed\n";
        const double p1 = eff.power.at(1);
        for (int h = 1; h <= o.cfg.h_max; ++h) {
            const double r = eff.power.at(h) / p1;
            const double th = analysis::square_wave_power(h, eff.dc) / analysis::square_wave_power(1, eff.dc);
            const bool sup = r < 1e-3;
            gcsv << h << ',' << g(r, "%.6e") << ',' << g(th, "%.6e") << ',' << (sup ? 1 : 0) << "\n";
            if (required("suppression") && h % 2 == 0 && std::abs(o.cfg.plain_duty - 0.5) < 1e-12 && !sup)
                failed = true;
        }
        io::write_text(dir / "grating.csv", gcsv.str());
        summary << "plain grating: fitted duty " << g(eff.dc, "%.4f") << "\n";
    }
    io::write_text(dir / "orders.csv", csv.str());
    io::write_text(dir / "even_odd.txt", summary.str());
    say(o, summary.str());
    return failed ? assertion_failed : ok;
}

int cmd_all(const Options& o) {
    for (auto fn : {cmd_mask, cmd_simulate, cmd_astig}) {
        const int rc = fn(o);
        if (rc != ok) return rc;
    }
    return cmd_analyze(o);
}

int guarded(const Options& o, int (*fn)(const Options&)) {
    try {
        return fn(o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    } catch (const OverwriteError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    } catch (const io::MissingArtifact& e) {
        std::cerr << "error: " << e.what() << '\n';
        return missing_artifact;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
}

} // namespace vh::pipeline
