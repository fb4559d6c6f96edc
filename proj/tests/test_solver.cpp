#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "swemed1/errors.hpp"
#include "swemed1/model.hpp"
#include "swemed1/solver.hpp"

using namespace swemed1;

namespace {

double max_diff(const Field& a, const Field& b) {
    double d = 0.0;
    for (int i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < 5; ++k) d = std::max(d, std::abs(a[i].w[k] - b[i].w[k]));
    return d;
}

bool bitwise_equal(const Field& a, const Field& b) {
    for (int i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i])) return false;
    return true;
}

Field uniform_field(const Grid& g, const State& s) {
    Field f(g);
    for (int i = 0; i < g.n_cells; ++i) f[i] = s;
    fill_ghosts(f);
    return f;
}

Field piecewise_linear_lake(const Grid& g) {
    return init_lake_at_rest(g, 2.0, [](double x) {
        if (x < 0.0) return 0.2;
        if (x < 1.0) return 0.2 + 0.6 * x;
        return 0.8 - 0.3 * (x - 1.0);
    });
}

// 2x2 helpers for the splitting surrogate
using M2 = linalg::Mat<double, 2>;
using V2 = linalg::Vec<double, 2>;

M2 expm(const M2& a) {
    // scaling and squaring with a Taylor series
    const int squarings = 12;
    const M2 s = a * std::ldexp(1.0, -squarings);
    M2 term = M2::identity(), sum = M2::identity();
    for (int k = 1; k <= 20; ++k) {
        term = term * s * (1.0 / k);
        sum = sum + term;
    }
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    return sum;
}

double split_error(Splitting sp, int steps) {
    const M2 a{{0.0, 1.0}, {-1.0, 0.0}};
    const M2 b{{-1.0, 0.0}, {0.5, -2.0}};
    const double t = 1.0, dt = t / steps;
    V2 y{1.0, 0.5};
    auto transport = [&](const V2& v, double d) { return expm(a * d) * v; };
    auto source = [&](const V2& v, double d) { return expm(b * d) * v; };
    for (int k = 0; k < steps; ++k) y = compose_split(y, dt, sp, transport, source);
    const V2 exact = expm((a + b) * t) * V2{1.0, 0.5};
    return std::max(std::abs(y[0] - exact[0]), std::abs(y[1] - exact[1]));
}

}  // namespace

TEST_CASE("paper initial data") {
    const Field f = init_paper_scenario(300);
    const Grid& g = f.grid;
    CHECK(g.dx() == doctest::Approx(0.01));

    const int left = probe_cell(g, -0.5);
    const int right = probe_cell(g, 0.5);
    CHECK(g.center(left) < 0.0);
    CHECK(g.center(right) > 0.0);
    const Vector5 wl{1.5, 0.075, -0.015, 0.015, 0.0};
    const Vector5 wr{1.0, 0.05, -0.01, 0.0, 0.0};
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(f[left].w[k] == doctest::Approx(wl[k]).epsilon(1e-15));
        CHECK(f[right].w[k] == doctest::Approx(wr[k]).epsilon(1e-15));
    }

    const Diagnostics d = diagnose(f, Parameters{});
    CHECK(d.total_surface == doctest::Approx(3.5).epsilon(1e-14));
    CHECK(d.eq1_max == doctest::Approx(0.06).epsilon(1e-14));

    // no cell center falls on x = 0 for the default grid
    for (int i = 0; i < g.n_cells; ++i) CHECK(g.center(i) != 0.0);
}

TEST_CASE("grid validation") {
    Grid g;
    g.n_cells = 3;
    CHECK_THROWS_AS(g.validate(), ValidationError);
    g.n_cells = 10;
    g.x_right = g.x_left;
    CHECK_THROWS_AS(g.validate(), ValidationError);
    CHECK_THROWS_AS(init_paper_scenario(2), ValidationError);
}

TEST_CASE("ghost cells follow the boundary policy") {
    Grid g;
    g.n_cells = 6;
    Field f(g);
    for (int i = 0; i < 6; ++i) f[i] = State::from_primitive(1.0 + i, 0, 0, 0, 0);
    fill_ghosts(f);
    CHECK(f[-1].h() == 1.0);
    CHECK(f[-2].h() == 1.0);
    CHECK(f[6].h() == 6.0);
    CHECK(f[7].h() == 6.0);

    f.grid.boundary = Boundary::Periodic;
    fill_ghosts(f);
    CHECK(f[-1].h() == 6.0);
    CHECK(f[-2].h() == 5.0);
    CHECK(f[6].h() == 1.0);
    CHECK(f[7].h() == 2.0);
}

TEST_CASE("probe cell ties go left") {
    Grid g;  // centers at +-0.005 around x = 0
    const int i = probe_cell(g, 0.0);
    CHECK(g.center(i) == doctest::Approx(-0.005));
    CHECK(probe_cell(g, -10.0) == 0);
    CHECK(probe_cell(g, 10.0) == g.n_cells - 1);

    const auto u = velocity_probe(State::from_primitive(1.0, 0.05, -0.01, 0.0, 0.0));
    REQUIRE(u.size() == 51);
    CHECK(u.front() == doctest::Approx(0.04));
    CHECK(u.back() == doctest::Approx(0.06));
    CHECK(u[25] == doctest::Approx(0.05));
}

TEST_CASE("cfl time step") {
    const Parameters p;
    Grid g;
    g.n_cells = 50;
    const Field lake = uniform_field(g, State::from_primitive(1.0, 0, 0, 0, 0));
    CHECK(cfl_dt(lake, p, 0.45) == doctest::Approx(0.45 * g.dx() / std::sqrt(9.81)).epsilon(1e-12));

    const Field deep = uniform_field(g, State::from_primitive(2.0, 0, 0, 0, 0));
    CHECK(cfl_dt(lake, p, 0.45) / cfl_dt(deep, p, 0.45) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(cfl_dt(lake, p, 0.0), ValidationError);
    CHECK_THROWS_AS(cfl_dt(lake, p, -1.0), ValidationError);

    Field dry = lake;
    dry[7].w[kH] = 0.0;
    CHECK_THROWS_AS(cfl_dt(dry, p, 0.45), NumericalError);
}

TEST_CASE("uniform field is a fixed point of transport") {
    const Parameters p;
    Grid g;
    g.n_cells = 40;
    const Field f = uniform_field(g, State::from_primitive(1.3, 0.4, -0.1, 0.02, 0.3));
    const Field out = transport_step(f, p, cfl_dt(f, p, 0.45));
    CHECK(bitwise_equal(f, out));
}

TEST_CASE("lake at rest over a piecewise linear bed stays at rest") {
    const Parameters p;
    for (Boundary b : {Boundary::Open, Boundary::Periodic}) {
        Grid g;
        g.n_cells = 60;
        g.boundary = b;
        const Field f0 = piecewise_linear_lake(g);
        const double dt = cfl_dt(f0, p, 0.45);

        Field f = f0;
        for (int k = 0; k < 1000; ++k) f = step(f, p, dt, StepOptions{});
        CHECK(max_diff(f, f0) <= 1e-12);

        // the transport operator alone is exact to rounding in every step
        CHECK(max_diff(transport_step(f0, p, dt), f0) <= 1e-13);
    }
}

TEST_CASE("periodic transport of a concentration bump preserves its mean") {
    const Parameters p;
    Grid g;
    g.n_cells = 80;
    g.boundary = Boundary::Periodic;
    Field f(g);
    for (int i = 0; i < g.n_cells; ++i) {
        const double x = g.center(i);
        const double bump = 0.05 * std::exp(-40.0 * (x - 0.5) * (x - 0.5));
        f[i] = State::from_primitive(1.0, 0.5, 0.0, bump, 0.0);
    }
    fill_ghosts(f);

    auto totals = [&](const Field& x) {
        double hc = 0.0, mass = 0.0;
        for (int i = 0; i < x.size(); ++i) {
            hc += x[i].hc();
            mass += x[i].h() + x[i].h_b();
        }
        return std::pair{hc, mass};
    };
    const auto [hc0, mass0] = totals(f);
    for (int k = 0; k < 200; ++k) f = transport_step(f, p, cfl_dt(f, p, 0.45));
    const auto [hc1, mass1] = totals(f);
    CHECK(std::abs(hc1 - hc0) / hc0 <= 1e-12);
    CHECK(std::abs(mass1 - mass0) / mass0 <= 1e-12);
}

TEST_CASE("transport reports the failing cell") {
    Parameters p;
    Grid g;
    g.n_cells = 20;
    Field f = uniform_field(g, State::from_primitive(1.0, 0, 0, 0, 0));
    f[9] = State::from_primitive(1e-6, 0.0, 0.0, 0.0, 0.0);
    fill_ghosts(f);
    try {
        (void)transport_step(f, p, 0.5);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("cell") != std::string::npos);
    }
}

TEST_CASE("source step is a fixed point at settled rest") {
    const Parameters p;
    const Model m(p);
    int its = -1;
    const Vector5 w{1.7, 0.0, 0.0, 0.0, -0.4};
    const Vector5 out = implicit_source_update(m, w, 0.1, NewtonSettings{}, SourceTreatment::Full, &its);
    CHECK(its == 0);
    CHECK(out == w);
}

TEST_CASE("moment relaxation follows scalar implicit Euler") {
    Parameters p;
    p.epsilon = 0.0;  // no bottom friction
    p.c_D = 0.0;      // no entrainment
    const Model m(p);
    for (double h : {0.5, 1.0, 2.5}) {
        for (double dt : {1e-3, 1e-2, 0.3}) {
            const double a = 0.07;
            const Vector5 w{h, 0.0, h * a, 0.0, 0.0};
            const Vector5 out = implicit_source_update(m, w, dt, NewtonSettings{}, SourceTreatment::Full);
            const double expected = a / (1.0 + 12.0 * p.nu * dt / (h * h));
            CHECK(out[kHa] / out[kH] == doctest::Approx(expected).epsilon(1e-10));
            CHECK(out[kH] == h);
            CHECK(out[kHu] == doctest::Approx(0.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("deposition matches a scalar root find") {
    const Parameters p;
    const Model m(p);
    const double omega = m.closures().omega_0 * m.closures().S_b;
    const double por = 1.0 - p.psi;

    for (double dt : {1e-3, 0.05, 0.5}) {
        const double h0 = 1.2, c0 = 0.03, hb0 = 0.1;
        // c h(c) = hc0 - dt omega c with h(c) = h0 - dt omega c / (1 - psi)
        auto g = [&](double c) { return c * (h0 - dt * omega * c / por) + dt * omega * c - h0 * c0; };
        double lo = 0.0, hi = c0;
        for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) < 0.0 ? lo : hi) = mid;
        }
        const double c = 0.5 * (lo + hi);
        const double h = h0 - dt * omega * c / por;

        const Vector5 w{h0, 0.0, 0.0, h0 * c0, hb0};
        const Vector5 out = implicit_source_update(m, w, dt, NewtonSettings{}, SourceTreatment::Full);
        CHECK(out[kH] == doctest::Approx(h).epsilon(1e-11));
        CHECK(out[kHc] / out[kH] == doctest::Approx(c).epsilon(1e-10));
        CHECK(out[kHb] == doctest::Approx(hb0 + dt * omega * c / por).epsilon(1e-11));
    }
}

TEST_CASE("source step conserves surface and sediment up to Newton tolerance") {
    const Parameters p;
    const Field f = init_paper_scenario(120);
    SourceStats stats;
    const NewtonSettings newton;
    const Field out = source_step(f, p, 0.05, newton, &stats);
    const Diagnostics a = diagnose(f, p), b = diagnose(out, p);
    const double bound = f.size() * newton.tol * f.grid.dx() * 10.0;
    CHECK(std::abs(a.total_surface - b.total_surface) <= bound);
    CHECK(std::abs(a.total_sediment - b.total_sediment) <= bound);
    CHECK(stats.cells == 120);
    CHECK(stats.newton_iterations > 0);
    CHECK(stats.clamp_events == 0);

    // the split treatment with delta = 1 solves the same equations
    const Field split = source_step(f, p, 0.05, newton, nullptr, SourceTreatment::FastSlow);
    CHECK(max_diff(out, split) <= 1e-10);
}

TEST_CASE("Newton non-convergence names the cell") {
    const Parameters p;
    const Field f = init_paper_scenario(20);
    NewtonSettings newton;
    newton.max_iter = 1;
    try {
        (void)source_step(f, p, 1.0, newton);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("cell 0") != std::string::npos);
    }
}

TEST_CASE("disabled operators reduce step to the other half") {
    const Parameters p;
    const Field f = init_paper_scenario(60);
    const double dt = cfl_dt(f, p, 0.45);

    StepOptions transport_only;
    transport_only.source_enabled = false;
    CHECK(bitwise_equal(step(f, p, dt, transport_only), transport_step(f, p, dt)));

    StepOptions source_only;
    source_only.transport_enabled = false;
    CHECK(bitwise_equal(step(f, p, dt, source_only), source_step(f, p, dt, NewtonSettings{})));

    const Field g = step(f, p, dt, StepOptions{});
    CHECK(g.t == doctest::Approx(f.t + dt));
}

TEST_CASE("Lie splitting is first order and Strang second order") {
    const double lie1 = split_error(Splitting::Lie, 40), lie2 = split_error(Splitting::Lie, 80);
    const double str1 = split_error(Splitting::Strang, 40), str2 = split_error(Splitting::Strang, 80);
    CHECK(std::log2(lie1 / lie2) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::log2(str1 / str2) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("Lie and Strang runs converge to each other linearly in dt") {
    const Parameters p;
    auto final_field = [&](Splitting sp, double cfl) {
        RunSettings s;
        s.grid.n_cells = 100;
        s.cfl = cfl;
        s.snapshot_times = {0.0, 1.0};
        s.step.splitting = sp;
        return run(p, s).final_field;
    };
    double prev = 0.0;
    for (double cfl : {0.4, 0.2, 0.1}) {
        const double d = max_diff(final_field(Splitting::Lie, cfl), final_field(Splitting::Strang, cfl));
        CHECK(d > 0.0);
        if (prev > 0.0) CHECK(prev / d == doctest::Approx(2.0).epsilon(0.15));
        prev = d;
    }
}

TEST_CASE("results do not depend on the worker count") {
    const Parameters p;
    Field a = init_paper_scenario(64);
    Field b = a;
    StepOptions one, two;
    two.threads = 2;
    for (int k = 0; k < 20; ++k) {
        const double dt = cfl_dt(a, p, 0.45);
        a = step(a, p, dt, one);
        b = step(b, p, dt, two);
    }
    CHECK(bitwise_equal(a, b));
}

TEST_CASE("run hits snapshot times exactly") {
    const Parameters p;
    RunSettings s;
    s.grid.n_cells = 40;
    s.snapshot_times = {0.5, 0.0, 0.25};
    const RunResult r = run(p, s);
    REQUIRE(r.snapshots.size() == 3);
    CHECK(r.snapshots[0].t == 0.0);
    CHECK(r.snapshots[1].t == 0.25);
    CHECK(r.snapshots[2].t == 0.5);
    CHECK(r.series.size() == 6);
    CHECK(r.series.back().t == 0.5);
    CHECK(r.final_field.t == 0.5);
    REQUIRE(r.snapshots[1].cells.size() == 40);
    CHECK(r.snapshots[1].profile.size() == 51);

    RunSettings bad = s;
    bad.cfl = 0.0;
    CHECK_THROWS_AS(run(p, bad), ValidationError);
}

TEST_CASE("periodic run conserves surface and sediment") {
    const Parameters p;
    RunSettings s;
    s.grid.n_cells = 100;
    s.grid.boundary = Boundary::Periodic;
    s.snapshot_times = {0.0, 1000.0};
    s.max_steps = 500;
    const RunResult r = run(p, s);
    CHECK(r.steps == 500);
    const Diagnostics& a = r.series.front();
    const Diagnostics b = diagnose(r.final_field, p);
    CHECK(std::abs(b.total_surface - a.total_surface) / a.total_surface <= 1e-8);
    CHECK(std::abs(b.total_sediment - a.total_sediment) / a.total_sediment <= 1e-8);
}

TEST_CASE("paper preset stays admissible on a coarse grid") {
    const Parameters p;
    RunSettings s;
    s.grid.n_cells = 100;
    const RunResult r = run(p, s);
    REQUIRE(r.snapshots.size() == 7);
    const Diagnostics& d60 = r.snapshots[5].diagnostics;
    const Diagnostics& d100 = r.snapshots[6].diagnostics;
    CHECK(d100.eq1_max <= d60.eq1_max);
    CHECK(d100.max_c_m > 0.0);
    CHECK(d100.max_c_m < 0.01);
    CHECK(d100.min_h > 0.5);
}
