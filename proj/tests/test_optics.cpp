#include "vh/analysis.hpp"
#include "vh/hologram.hpp"
#include "vh/optics.hpp"
#include "vh/pipeline.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace vh;

namespace {

const RunConfig cfg{};
const BeamParams beam = pipeline::beam_for(cfg);
const ApertureGrid grid = pipeline::grid_for(cfg);
const double rho = cfg.rho_max_m;

ComplexField aperture_field(std::size_t n, double pitch) {
    ComplexField f;
    f.grid = ApertureGrid{n, pitch};
    f.values.assign(n * n, cplx{});
    return f;
}

HologramMask plain(double duty) {
    GratingSpec g;
    g.periods = cfg.periods;
    g.alpha = hologram::plain_alpha_for_duty(duty);
    return hologram::plain_grating(g, grid, rho);
}

} // namespace

TEST_CASE("propagate matches a direct centred DFT on a small grid") {
    const std::size_t n = 12;
    auto f = aperture_field(n, 1e-9);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (auto& v : f.values) v = {nd(rng), nd(rng)};

    for (int pad : {1, 2}) {
        const auto pat = optics::propagate(f, beam, 0, pad);
        const std::size_t N = n * std::size_t(pad);
        REQUIRE(pat.field.grid.n == N);
        const double xc = 0.5 * double(n - 1);
        double worst = 0;
        for (std::size_t u = 0; u < N; ++u)
            for (std::size_t v = 0; v < N; ++v) {
                cplx acc{};
                for (std::size_t r = 0; r < n; ++r)
                    for (std::size_t c = 0; c < n; ++c) {
                        const double arg = -2 * std::numbers::pi *
                                           ((double(u) - double(N / 2)) * (double(r) - xc) +
                                            (double(v) - double(N / 2)) * (double(c) - xc)) /
                                           double(N);
                        acc += f.at(r, c) * std::polar(1.0, arg);
                    }
                acc /= double(N);
                worst = std::max(worst, std::abs(acc - pat.field.at(u, v)));
            }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("Parseval holds on every call and is tracked") {
    optics::reset_parseval_stats();
    auto f = aperture_field(64, 1e-9);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ud(-1, 1);
    for (int k = 0; k < 5; ++k) {
        for (auto& v : f.values) v = {ud(rng), ud(rng)};
        const auto pat = optics::propagate(f, beam, 0, 1 + k % 3);
        CHECK(std::abs(pat.field.energy() / f.energy() - 1) < 1e-12);
    }
    const auto st = optics::parseval_stats();
    CHECK(st.calls == 5);
    CHECK(st.max_rel_error < 1e-10);
}

TEST_CASE("uniform disc gives the Airy pattern and its first dark ring") {
    const std::size_t n = 256;
    const double pitch = 1e-8, radius_px = 50;
    auto f = aperture_field(n, pitch);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (std::hypot(f.grid.coord(r), f.grid.coord(c)) <= radius_px * pitch) f.at(r, c) = 1.0;
    const auto pat = optics::propagate(f, beam, 0, 4);
    const std::size_t N = pat.field.grid.n, mid = N / 2;

    // analytic Airy along the central row
    const double a = radius_px * pitch;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t c = mid; c < mid + 40; ++c) {
        const double theta = (double(c) - double(mid)) * pat.theta_pitch;
        const double v = 2 * std::numbers::pi * a * theta / beam.wavelength;
        const double airy = v == 0 ? 1.0 : std::pow(2 * boost::math::cyl_bessel_j(1, v) / v, 2);
        const double meas = std::norm(pat.field.at(mid, c));
        sxy += airy * meas;
        sxx += airy * airy;
        syy += meas * meas;
    }
    CHECK(sxy / std::sqrt(sxx * syy) > 0.999);

    std::size_t cmin = mid + 1;
    while (std::norm(pat.field.at(mid, cmin + 1)) < std::norm(pat.field.at(mid, cmin))) ++cmin;
    const double expected_theta = boost::math::cyl_bessel_j_zero(1.0, 1) / (2 * std::numbers::pi) *
                                  beam.wavelength / a;   // 1.22 lambda / D
    const double expected_bin = expected_theta / pat.theta_pitch;
    CHECK(std::abs(double(cmin - mid) - expected_bin) <= 1.0);
}

TEST_CASE("grating orders follow sin(theta) = h lambda / d") {
    const auto m = plain(0.3);   // every |h| <= 5 carries power at this duty
    const double d = m.grating.period(rho);
    const auto pat = optics::propagate(m.as_field(), beam, d);
    double sh = 0, shh = 0, sht = 0;
    int used = 0;
    for (const auto& o : pat.order_centers) {
        if (std::abs(o.h) > 5) continue;
        CHECK(o.power > 1e-3);
        sht += o.h * o.theta;
        shh += double(o.h) * o.h;
        sh += o.h;
        ++used;
    }
    REQUIRE(used == 11);
    CHECK(sh == 0);
    const double slope = sht / shh;
    CHECK(std::abs(slope / (beam.wavelength / d) - 1) < 5e-3);
    CHECK(pat.order_spacing == doctest::Approx(double(grid.n) * grid.pitch / d).epsilon(1e-12));
}

TEST_CASE("suppressed orders are not reported at sidelobe positions") {
    const auto m = plain(0.5);
    const auto pat = optics::propagate(m.as_field(), beam, m.grating.period(rho));
    for (const auto& o : pat.order_centers) {
        if (std::abs(o.h) > 6) continue;
        const double expect = double(pat.field.grid.n / 2) + o.h * pat.order_spacing;
        CHECK(std::abs(o.bin - expect) < 0.25 * pat.order_spacing);
    }
}

TEST_CASE("zero order carries the open-area fraction") {
    for (double duty : {0.5, 0.4}) {
        const auto m = plain(duty);
        const auto pat = optics::propagate(m.as_field(), beam, m.grating.period(rho));
        const auto e0 = optics::extract_order(pat, 0, beam);
        double open = 0;
        for (auto b : m.bits) open += b;
        // |c0|^2 / sum |c_h|^2 = duty^2 / duty for a 0/1 square wave
        CHECK(e0.field.energy() / pat.field.energy() == doctest::Approx(duty).epsilon(0.02));
        CHECK(pat.field.energy() == doctest::Approx(open).epsilon(1e-10));
    }
}

TEST_CASE("zero astigmatism is bit-identical to plain propagation") {
    const auto mask = pipeline::build_mask(cfg, {0, 1});
    const auto f = mask.as_field();
    const double d = mask.grating.period(rho);
    const auto a = optics::propagate(f, beam, d);
    const auto b = optics::astig_transform(f, {0.0, std::numbers::pi / 4}, beam, d);
    REQUIRE(a.field.values.size() == b.field.values.size());
    CHECK(std::equal(a.field.values.begin(), a.field.values.end(), b.field.values.begin()));
    CHECK_THROWS_AS(optics::astig_transform(f, {-1.0, 0.0}, beam, d), std::invalid_argument);

    // a quadratic phase leaves the energy unchanged but reshapes the pattern
    const auto c = optics::astig_transform(f, {4.0, std::numbers::pi / 4}, beam, d);
    CHECK(c.field.energy() == doctest::Approx(a.field.energy()).epsilon(1e-10));
    CHECK_FALSE(std::equal(a.field.values.begin(), a.field.values.end(), c.field.values.begin()));
}

TEST_CASE("first orders of the l = 1 mask are doughnuts") {
    const auto mask = pipeline::build_mask(cfg, {0, 1});
    const auto pat = optics::propagate(mask.as_field(), beam, mask.grating.period(rho));
    const auto up = optics::extract_order(pat, 1, beam);
    const auto dn = optics::extract_order(pat, -1, beam);
    CHECK(up.field.energy() == doctest::Approx(dn.field.energy()).epsilon(0.1));
    for (const auto* e : {&up, &dn}) {
        const std::size_t w = e->field.grid.n, mid = w / 2;
        double peak = 0;
        for (const auto& v : e->field.values) peak = std::max(peak, std::norm(v));
        CHECK(std::norm(e->field.at(mid, mid)) < 0.05 * peak);
        CHECK(e->overlap < 0.05);
        CHECK(std::abs(e->cx - 0.5 * double(w - 1)) < 1.0);
    }
    CHECK(analysis::oam_spectrum(up).mean > 0.5);
    CHECK(analysis::oam_spectrum(dn).mean < -0.5);
}

TEST_CASE("extraction outside the band throws; max_order is the last valid order") {
    const auto m = plain(0.5);
    const auto pat = optics::propagate(m.as_field(), beam, m.grating.period(rho));
    const int hm = optics::max_order(pat);
    CHECK(hm >= 5);
    CHECK_NOTHROW(optics::extract_order(pat, hm, beam));
    CHECK_NOTHROW(optics::extract_order(pat, -hm, beam));
    CHECK_THROWS_AS(optics::extract_order(pat, hm + 1, beam), std::out_of_range);
    CHECK_THROWS_AS(optics::extract_order(pat, -hm - 1, beam), std::out_of_range);
}

TEST_CASE("padding refines sampling without moving the orders") {
    const auto mask = pipeline::build_mask(cfg, {0, 1});
    const auto f = mask.as_field();
    const double d = mask.grating.period(rho);
    const auto p1 = optics::propagate(f, beam, d, 1);
    const auto p2 = optics::propagate(f, beam, d, 2);
    CHECK(p2.order_spacing == doctest::Approx(2 * p1.order_spacing));
    CHECK(p2.theta_pitch == doctest::Approx(0.5 * p1.theta_pitch));
    const auto e1 = optics::extract_order(p1, 1, beam);
    const auto e2 = optics::extract_order(p2, 1, beam);
    // the wider pad resolves the same angular window with twice the samples
    CHECK(e2.field.grid.n >= 2 * e1.field.grid.n - 1);
    CHECK(e2.field.energy() == doctest::Approx(e1.field.energy()).epsilon(0.02));
    CHECK_THROWS_AS(optics::propagate(f, beam, d, 0), std::invalid_argument);
    CHECK_THROWS_AS(optics::propagate(p1.field, beam, d), std::invalid_argument);
}
