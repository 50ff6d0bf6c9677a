#include <doctest.h>

#include <cmath>

#include "mfgclaw/claw.hpp"
#include "mfgclaw/errors.hpp"
#include "test_support.hpp"

using namespace mfgclaw;

namespace {

const double kSqrt3 = std::sqrt(3.0);

ReducedFlux burgers_flux() { return ReducedFlux::polynomial({0.0, 1.0}, {1.0}); }
ReducedFlux cubic_flux() { return ReducedFlux::polynomial({0.0, 0.0, 1.0}, {1.0}); }
ReducedFlux quartic_flux() {
    return ReducedFlux::polynomial({0.0, -1.0, 0.0, 1.0 / 3.0}, {1.0}, {-2.0, 2.0});
}

double burgers_exact(double t, double y) {
    if (y <= 0.0) return 0.0;
    if (y >= t) return 1.0;
    return y / t;
}

double cubic_exact(double t, double y) {
    if (y <= t / 4.0) return -1.0;
    if (y >= t) return 1.0;
    return std::sqrt(y / t);
}

} // namespace

TEST_CASE("riemann_exact: Burgers rarefaction branches") {
    auto flux = burgers_flux();
    for (double t : {0.5, 1.0, 2.0})
        for (int i = 0; i <= 1000; ++i) {
            const double y = -2.0 + 4.0 * i / 1000;
            CHECK(riemann_exact(flux, 0.0, 1.0, y / t) ==
                  doctest::Approx(burgers_exact(t, y)).epsilon(1e-12));
        }
}

TEST_CASE("riemann_exact: cubic shock-then-fan branches") {
    auto flux = cubic_flux();
    auto fan = riemann_fan(flux, -1.0, 1.0);
    REQUIRE(fan.waves.size() == 2);
    CHECK(fan.waves[0].type == Wave::Type::Shock);
    CHECK(fan.waves[0].speed_lo == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(fan.waves[0].state_lo == doctest::Approx(-1.0));
    CHECK(fan.waves[0].state_hi == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(fan.waves[1].type == Wave::Type::Rarefaction);
    CHECK(fan.waves[1].speed_hi == doctest::Approx(1.0).epsilon(1e-10));

    for (double t : {0.7, 1.0})
        for (int i = 0; i <= 400; ++i) {
            const double y = -1.5 + 3.0 * i / 400;
            CHECK(fan.value(flux, y / t) ==
                  doctest::Approx(cubic_exact(t, y)).epsilon(1e-6));
        }
}

TEST_CASE("riemann_exact: quartic fan-to-tangency then contact shock") {
    auto flux = quartic_flux();
    auto fan = riemann_fan(flux, -kSqrt3, 1.0);
    REQUIRE(fan.waves.size() == 2);
    CHECK(fan.waves[0].type == Wave::Type::Rarefaction);
    CHECK(fan.waves[0].speed_lo == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(fan.waves[0].state_hi == doctest::Approx(-5.0 / 3.0).epsilon(1e-9));
    CHECK(fan.waves[1].type == Wave::Type::Shock);
    CHECK(fan.waves[1].speed_lo == doctest::Approx(10.0 / 81.0).epsilon(1e-9));
    // Rankine-Hugoniot against F'(r1): tangential contact.
    CHECK(fan.waves[1].speed_lo ==
          doctest::Approx(flux.fbar(fan.waves[0].state_hi)).epsilon(1e-9));
}

TEST_CASE("riemann fan invariants: speeds ordered, RH and Oleinik conditions") {
    auto gen = mfgtest::rng(41);
    std::uniform_real_distribution<double> ud(-1.8, 1.8);
    auto check_fan = [](const ReducedFlux& flux, double sl, double sr) {
        auto fan = riemann_fan(flux, sl, sr);
        double prev = -1e300;
        for (const auto& w : fan.waves) {
            CHECK(w.speed_lo >= prev - 1e-12);
            CHECK(w.speed_hi >= w.speed_lo - 1e-12);
            prev = w.speed_hi;
            if (w.type == Wave::Type::Shock) {
                const double rh = (flux.primitive(w.state_hi) - flux.primitive(w.state_lo)) /
                                  (w.state_hi - w.state_lo);
                CHECK(w.speed_lo == doctest::Approx(rh).epsilon(1e-10));
                // Oleinik chord condition at 64 intermediate states: the
                // chord slope from the left state dominates the shock speed
                // in both orientations.
                for (int k = 1; k < 64; ++k) {
                    const double u =
                        w.state_lo + (w.state_hi - w.state_lo) * k / 64.0;
                    const double chord =
                        (flux.primitive(u) - flux.primitive(w.state_lo)) /
                        (u - w.state_lo);
                    CHECK(rh <= chord + 1e-9);
                }
            }
        }
    };
    for (int rep = 0; rep < 12; ++rep) {
        const double a = ud(gen), b = ud(gen);
        check_fan(quartic_flux(), a, b);
        check_fan(cubic_flux(), a, b);
    }
}

TEST_CASE("riemann_exact is self-similar") {
    auto flux = quartic_flux();
    for (double xi : {-0.4, 0.05, 0.123, 0.5}) {
        const double v1 = riemann_exact(flux, -kSqrt3, 1.0, xi);
        for (double t : {0.3, 1.0, 2.7}) {
            const double x = xi * t;
            CHECK(riemann_exact(flux, -kSqrt3, 1.0, x / t) ==
                  doctest::Approx(v1).epsilon(1e-12));
        }
    }
}

TEST_CASE("lax_oleinik: limits, Burgers fan, characteristics oracle") {
    auto flux = burgers_flux();
    Profile1D tanhp = Profile1D::tanh_profile();
    CHECK(lax_oleinik(flux, tanhp, 0.0, 0.4) == doctest::Approx(std::tanh(0.4)));

    Profile1D stepp = Profile1D::step(0.0, 1.0);
    for (double x : {0.1, 0.4, 0.9})
        CHECK(lax_oleinik(flux, stepp, 1.0, x) == doctest::Approx(x).epsilon(1e-9));
    CHECK(lax_oleinik(flux, stepp, 1.0, -0.5) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(lax_oleinik(flux, stepp, 1.0, 1.5) == doctest::Approx(1.0).epsilon(1e-9));

    // Pre-shock smooth data: sigma solves sigma = tanh(x - t sigma).
    const double t = 0.25;
    for (double x : {-0.8, -0.1, 0.3, 1.2}) {
        const double oracle = mfgtest::characteristic_solution(
            [](double y) { return std::tanh(y); }, [](double s) { return s; }, t, x, -1.0,
            1.0);
        CHECK(lax_oleinik(flux, tanhp, t, x) == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("lax_oleinik matches riemann_exact on convex-flux Riemann data") {
    auto flux = burgers_flux();
    Profile1D stepp = Profile1D::step(-0.5, 0.75, 0.0);
    auto fan = riemann_fan(flux, -0.5, 0.75);
    for (double t : {0.4, 1.3})
        for (int i = 0; i <= 60; ++i) {
            const double x = -1.5 + 3.0 * i / 60;
            CHECK(lax_oleinik(flux, stepp, t, x) ==
                  doctest::Approx(fan.value(flux, x / t)).epsilon(1e-6));
        }
    // Decreasing step: a single shock at the Rankine-Hugoniot speed.
    Profile1D down = Profile1D::step(1.0, 0.0, 0.0);
    for (double t : {0.5, 1.0}) {
        CHECK(lax_oleinik(flux, down, t, 0.5 * t - 0.05) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(lax_oleinik(flux, down, t, 0.5 * t + 0.05) == doctest::Approx(0.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(lax_oleinik(cubic_flux(), stepp, 0.5, 0.0), NonconvexFlux);
}

TEST_CASE("godunov: exact on constants, correct on the cubic problem") {
    auto flux = cubic_flux();
    Grid1D grid(-2.0, 2.0, 1000);
    std::vector<double> constant(grid.n_cells, 0.7);
    auto cf = godunov(flux, grid, constant, 1.0);
    for (double v : cf.values.back()) CHECK(v == doctest::Approx(0.7).epsilon(1e-14));

    auto field = godunov(flux, grid, cell_averages(Profile1D::step(-1.0, 1.0), grid), 1.0);
    const double err = l1_distance_to(
        field.values.back(), grid, [](double y) { return cubic_exact(1.0, y); }, -2.0, 2.0);
    CHECK(err <= 0.02);
}

TEST_CASE("godunov interface flux equals the exact Riemann value at xi = 0") {
    auto gen = mfgtest::rng(55);
    std::uniform_real_distribution<double> ud(-1.7, 1.7);
    for (const auto& flux : {burgers_flux(), cubic_flux(), quartic_flux()}) {
        auto stats = flux.stationary_points(-2.0, 2.0);
        for (int rep = 0; rep < 40; ++rep) {
            const double a = ud(gen), b = ud(gen);
            const double via_minmax = godunov_interface_flux(flux, a, b, stats);
            const double via_riemann = flux.primitive(riemann_exact(flux, a, b, 0.0));
            CHECK(via_minmax == doctest::Approx(via_riemann).epsilon(1e-9));
        }
    }
}

TEST_CASE("godunov converges on Riemann data under grid refinement") {
    auto flux = burgers_flux();
    Profile1D stepp = Profile1D::step(0.0, 1.0);
    double prev_err = 0.0;
    for (int level = 0; level < 4; ++level) {
        const int n = 125 << level;
        Grid1D grid(-2.0, 2.0, n);
        auto field = godunov(flux, grid, cell_averages(stepp, grid), 1.0);
        const double err = l1_distance_to(
            field.values.back(), grid, [](double y) { return burgers_exact(1.0, y); }, -2.0,
            2.0);
        if (level > 0) CHECK(prev_err / err >= 1.3);
        prev_err = err;
    }
}

TEST_CASE("godunov is TVD and obeys the maximum principle on random data") {
    auto gen = mfgtest::rng(77);
    std::uniform_real_distribution<double> ud(-1.0, 1.5);
    auto flux = quartic_flux();
    Grid1D grid(-1.0, 1.0, 200);
    std::vector<double> init(grid.n_cells);
    for (double& v : init) v = ud(gen);
    double mn = 1e300, mx = -1e300;
    for (double v : init) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    std::vector<double> rec{0.0, 0.1, 0.25, 0.5};
    auto field = godunov(flux, grid, init, 0.5, 0.9, rec);
    double prev_tv = total_variation(field.values.front());
    for (std::size_t k = 1; k < field.values.size(); ++k) {
        const double tv = total_variation(field.values[k]);
        CHECK(tv <= prev_tv + 1e-10);
        prev_tv = tv;
        for (double v : field.values[k]) {
            CHECK(v >= mn - 1e-10);
            CHECK(v <= mx + 1e-10);
        }
    }
}

TEST_CASE("godunov L1 contraction between two initial profiles") {
    auto gen = mfgtest::rng(78);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    auto flux = cubic_flux();
    Grid1D grid(-1.0, 1.0, 160);
    std::vector<double> a(grid.n_cells), b(grid.n_cells);
    for (int i = 0; i < grid.n_cells; ++i) {
        a[i] = ud(gen);
        b[i] = ud(gen);
    }
    auto fa = godunov(flux, grid, a, 0.4);
    auto fb = godunov(flux, grid, b, 0.4);
    CHECK(l1_distance(fa.values.back(), fb.values.back(), grid.h()) <=
          l1_distance(a, b, grid.h()) + 1e-10);
}

TEST_CASE("godunov input validation") {
    auto flux = burgers_flux();
    Grid1D grid(-1.0, 1.0, 10);
    CHECK_THROWS_AS(godunov(flux, grid, std::vector<double>(5, 0.0), 1.0), BadInput);
    CHECK_THROWS_AS(godunov(flux, grid, std::vector<double>(10, std::nan("")), 1.0),
                    BadInput);
    CHECK_THROWS_AS(godunov(flux, grid, std::vector<double>(10, 0.0), 1.0, 1.5), BadInput);
}

TEST_CASE("cell_averages uses the exact antiderivative for steps") {
    Grid1D grid(-1.0, 1.0, 8); // h = 0.25, jump at 0.1 inside cell 4
    auto u = cell_averages(Profile1D::step(0.0, 1.0, 0.1), grid);
    CHECK(u[0] == doctest::Approx(0.0));
    CHECK(u[7] == doctest::Approx(1.0));
    CHECK(u[4] == doctest::Approx((0.25 - 0.1) / 0.25 * 1.0 * 0.0 + 0.15 / 0.25).epsilon(1e-13));
}

TEST_CASE("build_section433_profile: exact landmarks and construction identities") {
    auto sp = build_section433_profile(2.0, 2000);
    const auto& lm = sp.landmarks;
    const auto& s0 = sp.profile;

    CHECK(s0(2.0 / 3.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s0(-2.0 / 3.0) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(s0(1.0) == doctest::Approx(kSqrt3).epsilon(1e-10));
    CHECK(s0(2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s0(3.5) == 1.0);

    CHECK(lm.t_xi == doctest::Approx(1.5));
    CHECK(lm.s1_initial_speed == 0.0);
    CHECK(lm.s2_initial_speed == doctest::Approx(-1.0 / (3.0 * (kSqrt3 - 1.0))).epsilon(1e-12));
    CHECK(lm.r1 == doctest::Approx(-5.0 / 3.0).epsilon(1e-8));
    CHECK(lm.s3_speed == doctest::Approx(10.0 / 81.0).epsilon(1e-8));

    // Characteristics from [-2/3, 2/3] focus at (x, t) = (0, 1).
    for (int i = 1; i < 20; ++i) {
        const double x0 = -2.0 / 3.0 + (4.0 / 3.0) * i / 20;
        CHECK(std::abs(x0 + 1.0 * sp.flux.fbar(s0(x0))) <= 1e-9);
    }
    // Characteristics from [2/3, 1] reach x = 0 at t0 = x0 / (2 - 2 x0).
    for (double x0 : {0.7, 0.8, 0.9}) {
        const double t0 = x0 / (2.0 - 2.0 * x0);
        CHECK(std::abs(x0 + t0 * sp.flux.fbar(s0(x0))) <= 1e-9);
    }

    // Collision data: t* beyond t_xi, x* consistent, sigma* = s0(x*).
    CHECK(lm.t_star > lm.t_xi);
    CHECK(lm.x_star == doctest::Approx(-2.0 * lm.t_star / (1.0 + 2.0 * lm.t_star)));
    CHECK(s0(lm.x_star - 0.1) == doctest::Approx(lm.sigma_star).epsilon(1e-12));
    CHECK_THROWS_AS(build_section433_profile(0.9), BadInput);
}

TEST_CASE("track_fronts: cubic shock follows x = t/4 with valid RH data") {
    auto flux = cubic_flux();
    Grid1D grid(-2.0, 2.0, 2000);
    std::vector<double> rec;
    for (double t = 0.0; t <= 1.0 + 1e-9; t += 0.02) rec.push_back(t);
    auto field = godunov(flux, grid, cell_averages(Profile1D::step(-1.0, 1.0), grid), 1.0,
                         0.9, rec);
    auto tracks = track_fronts(field, flux);
    REQUIRE(tracks.size() >= 1);
    const FrontTrack* shock = nullptr;
    for (const auto& tr : tracks)
        if (tr.t.size() > 10) shock = &tr;
    REQUIRE(shock != nullptr);
    for (std::size_t i = 0; i < shock->t.size(); ++i) {
        if (shock->t[i] < 0.3) continue; // let the front sharpen first
        CHECK(shock->x[i] == doctest::Approx(shock->t[i] / 4.0).epsilon(0.05));
        // Pointwise RH residual of the measured states vs the curve slope.
        if (i > 2 && i + 2 < shock->t.size()) {
            const double slope =
                (shock->x[i + 2] - shock->x[i - 2]) / (shock->t[i + 2] - shock->t[i - 2]);
            CHECK(std::abs(slope - shock->rh_speed[i]) <= 0.02);
        }
    }
}

TEST_CASE("trace_characteristics: Burgers step has no shocks, cubic terminates lines") {
    auto bf = burgers_flux();
    Grid1D grid(-2.0, 2.0, 1000);
    std::vector<double> rec;
    for (double t = 0.0; t <= 1.0 + 1e-9; t += 0.05) rec.push_back(t);
    Profile1D stepb = Profile1D::step(0.0, 1.0);
    auto fieldb = godunov(bf, grid, cell_averages(stepb, grid), 1.0, 0.9, rec);
    auto fanb = riemann_fan(bf, 0.0, 1.0);
    std::vector<RarefactionWedge> wedges{{0.0, 0.0, fanb.waves[0].speed_lo,
                                          fanb.waves[0].speed_hi}};
    auto diag = trace_characteristics(stepb, bf, fieldb, {-1.0, -0.5, 0.5, 1.5}, wedges);
    CHECK(diag.shocks.empty());
    REQUIRE(diag.rarefactions.size() == 1);
    CHECK(diag.rarefactions[0].speed_lo == doctest::Approx(0.0));
    CHECK(diag.rarefactions[0].speed_hi == doctest::Approx(1.0));
    for (const auto& line : diag.characteristics) CHECK(line.t_end == fieldb.times.back());

    // Cubic: the line from x0 = -0.3 (slope 1) must hit the shock x = t/4.
    auto cf = cubic_flux();
    Profile1D stepc = Profile1D::step(-1.0, 1.0);
    auto fieldc = godunov(cf, grid, cell_averages(stepc, grid), 1.0, 0.9, rec);
    auto diagc = trace_characteristics(stepc, cf, fieldc, {-0.3, -1.5}, {});
    REQUIRE(diagc.characteristics.size() == 2);
    CHECK(diagc.characteristics[0].t_end < fieldc.times.back());
    CHECK(diagc.characteristics[0].t_end == doctest::Approx(0.4).epsilon(0.15));
    CHECK(diagc.characteristics[1].t_end == fieldc.times.back());
}

TEST_CASE("front detection flags two opposing fronts it cannot separate") {
    // A two-cell spike: jumps +1 and -1 two interfaces apart with equal
    // magnitude cannot be attributed to distinct fronts.
    auto flux = burgers_flux();
    Grid1D grid(0.0, 1.0, 40);
    EntropyField field;
    field.grid = grid;
    field.times = {0.0};
    std::vector<double> u(40, 0.0);
    u[19] = 1.0;
    u[20] = 1.0;
    field.values = {u};
    CHECK_THROWS_AS(track_fronts(field, flux), RefineGrid);
}

TEST_CASE("backward_reachability classifies fan points and characteristic points") {
    auto bf = burgers_flux();
    Profile1D stepb = Profile1D::step(0.0, 1.0);
    std::vector<RarefactionWedge> fans{{0.0, 0.0, 0.0, 1.0}};

    auto in_fan = backward_reachability(stepb, bf, 1.0, 0.5, 0.5, fans, 1e-6);
    CHECK(in_fan.kind == ReachabilityKind::Rarefaction);
    CHECK(in_fan.residual == doctest::Approx(0.5).epsilon(1e-9));

    auto left = backward_reachability(stepb, bf, 1.0, -0.5, 0.0, fans, 1e-6);
    CHECK(left.kind == ReachabilityKind::Reached);
    REQUIRE(left.origins.size() == 1);
    CHECK(left.origins[0] == doctest::Approx(-0.5));

    auto cf = cubic_flux();
    Profile1D stepc = Profile1D::step(-1.0, 1.0);
    std::vector<RarefactionWedge> fansc{{0.0, 0.0, 0.25, 1.0}};
    auto mid = backward_reachability(stepc, cf, 1.0, 0.5, std::sqrt(0.5), fansc, 1e-6);
    CHECK(mid.kind == ReachabilityKind::Rarefaction);

    // Smooth increasing data pre-shock: reached with the unique foot.
    Profile1D tanhp = Profile1D::tanh_profile();
    const double t = 0.25, x = 0.3;
    const double sig = mfgtest::characteristic_solution(
        [](double y) { return std::tanh(y); }, [](double s) { return s; }, t, x, -1.0, 1.0);
    auto reach = backward_reachability(tanhp, bf, t, x, sig, {}, 1e-6);
    CHECK(reach.kind == ReachabilityKind::Reached);
    REQUIRE(reach.origins.size() == 1);
    CHECK(reach.origins[0] == doctest::Approx(x - t * sig).epsilon(1e-10));

    auto nowhere = backward_reachability(stepb, bf, 1.0, 0.5, 0.5, {}, 1e-6);
    CHECK(nowhere.kind == ReachabilityKind::Ambiguous);
}
