#include <cmath>
#include <limits>

#include "conic/duhamel.hpp"
#include "conic/errors.hpp"
#include "conic/heat_solver.hpp"
#include "conic/mode_kernel.hpp"
#include "doctest.h"

using namespace conic;

namespace {

std::shared_ptr<const ConeModel> s2_model(double lam_max = 30) {
    return std::make_shared<const ConeModel>(
        make_cone_model(3, std::make_shared<const LinkSpectrum>(sphere_spectrum(3, 1.0, lam_max)), 4.0));
}

double max_error(const ModeSolution& s, const Manufactured& man) {
    double err = 0;
    for (int i = 0; i <= s.time.K; ++i)
        for (int j = 0; j <= s.grid.J(); ++j)
            err = std::max(err, std::fabs(s.v[i][j] - man.exact(s.time.t(i), s.grid.r[j])));
    return err;
}

double max_abs(const ModeSolution& s) {
    double m = 0;
    for (const auto& row : s.v)
        for (double x : row) m = std::max(m, std::fabs(x));
    return m;
}

int nearest_node(const RadialGrid& g, double r) {
    int best = 1;
    for (int j = 1; j <= g.J(); ++j)
        if (std::fabs(std::log(g.r[j] / r)) < std::fabs(std::log(g.r[best] / r))) best = j;
    return best;
}

}  // namespace

TEST_CASE("graded and composite grids") {
    auto g = RadialGrid::graded(4.0, 100, 3);
    CHECK(g.r.front() == 0);
    CHECK(g.R_out() == 4.0);
    CHECK(g.J() == 100);
    CHECK(g.r[50] == doctest::Approx(0.5).epsilon(1e-14));
    for (int j = 0; j < g.J(); ++j) CHECK(g.r[j + 1] > g.r[j]);

    auto c = RadialGrid::composite(4.0, 100, 3, 8.0);
    for (int j = 0; j <= 100; ++j) CHECK(c.r[j] == g.r[j]);
    CHECK(c.R_out() == doctest::Approx(8.0).epsilon(1e-14));
    const double h = g.r[100] - g.r[99];
    for (int j = 101; j < c.J(); ++j) CHECK(c.r[j] - c.r[j - 1] == doctest::Approx(h).epsilon(1e-9));
    CHECK(RadialGrid::composite(4.0, 100, 3, 4.0).r == g.r);

    CHECK_THROWS_AS(RadialGrid::graded(4.0, 1, 2), ConfigError);
    CHECK_THROWS_AS(RadialGrid::graded(-1.0, 10, 2), ConfigError);
    CHECK_THROWS_AS(RadialGrid::composite(4.0, 10, 2, 3.0), ConfigError);
}

TEST_CASE("cell integrals of tip powers are exact") {
    auto g = RadialGrid::graded(2.0, 40, 2);
    for (double p : {-2.5, -0.5, 0.0, 1.7}) {
        SourceExpr e;
        e.terms.push_back({1.0, 0, p, 0.0, false});
        auto s = compile_source(e, Cutoff{4.0});
        auto c = cell_source(s, g, 3, 0.0, 0.0);
        double sum = 0;
        for (double x : c) sum += x;
        // cells close at the midpoint below R_out; the Dirichlet node has no cell
        double top = 0.5 * (g.r[g.J() - 1] + g.r[g.J()]);
        CHECK(sum == doctest::Approx(std::pow(top, 3 + p) / (3 + p)).epsilon(1e-11));
    }
    SourceExpr bad;
    bad.terms.push_back({1.0, 0, -3.5, 0.0, false});
    CHECK_THROWS_AS(cell_source(compile_source(bad, Cutoff{4.0}), g, 3, 0.0, 0.0), ConfigError);
}

TEST_CASE("zero forcing gives the zero solution") {
    for (double lam : {0.0, 2.0, 6.0}) {
        auto s = solve_mode(make_mode_problem(lam, 3, {}), RadialGrid::graded(4.0, 60, 2), TimeGrid{1.0, 20});
        CHECK(max_abs(s) == 0);
        for (double e : s.energy) CHECK(e == 0);
        CHECK(mode_residual(s, {}) == 0);
    }
}

TEST_CASE("manufactured solutions converge at fourth order with q = 4") {
    Cutoff chi{4.0};
    for (double lam : {0.0, 2.0}) {
        auto man = manufactured_solution(lam, 3, chi);
        auto pr = make_mode_problem(lam, 3, man.source);
        double e1 = max_error(solve_mode(pr, RadialGrid::graded(4.0, 160, 4), TimeGrid{1.0, 40}), man);
        double e2 = max_error(solve_mode(pr, RadialGrid::graded(4.0, 320, 4), TimeGrid{1.0, 80}), man);
        CAPTURE(lam);
        CAPTURE(e1);
        CAPTURE(e2);
        CHECK(e1 < 5e-3);
        CHECK(e1 / e2 > 3.5);
    }
}

TEST_CASE("solver agrees with the Duhamel-Bessel oracle") {
    // f = chi r^{-1/2} on mode 0
    Cutoff chi{4.0};
    auto src = compile_source(parse_source_expr("chi*r^(-1/2)"), chi);
    auto grid = RadialGrid::composite(4.0, 400, 3, 8.0);
    auto s = solve_mode(make_mode_problem(0, 3, src), grid, TimeGrid{1.0, 200});
    auto k0 = make_mode_kernel(0, 3);
    RadialKernelFn h = [&](double tau, double r, double xi) { return mode_heat_kernel(k0, tau, r, xi); };
    RadialSourceFn f{[&](double, double xi) { return chi(xi) * std::pow(xi, -0.5); }, {1.0, 2.0}, 2.0};
    DuhamelSpec spec;
    spec.rel_tol = 1e-8;
    for (double t : {0.2, 1.0})
        for (double rt : {0.05, 0.5}) {
            int j = nearest_node(grid, rt);
            int i = static_cast<int>(std::lround(t * 200));
            double o = duhamel_radial(h, f, 3, t, grid.r[j], spec).value;
            CAPTURE(t);
            CAPTURE(rt);
            CHECK(std::fabs(s.v[i][j] - o) / o < 1e-3);
        }
}

TEST_CASE("solver is linear in the forcing") {
    Cutoff chi{4.0};
    auto f = compile_source(parse_source_expr("chi*r^(-1/2)"), chi);
    auto g = compile_source(parse_source_expr("t*chi*rho^2 - 0.3*chi"), chi);
    auto grid = RadialGrid::graded(4.0, 120, 3);
    TimeGrid time{1.0, 30};
    for (double lam : {0.0, 2.0}) {
        auto a = solve_mode(make_mode_problem(lam, 3, f), grid, time);
        auto b = solve_mode(make_mode_problem(lam, 3, g), grid, time);
        auto c = solve_mode(make_mode_problem(lam, 3, 2.5 * f + (-1.5) * g), grid, time);
        double scale = std::max(max_abs(a), max_abs(b));
        double worst = 0;
        for (int i = 0; i <= time.K; ++i)
            for (int j = 0; j <= grid.J(); ++j)
                worst = std::max(worst, std::fabs(c.v[i][j] - (2.5 * a.v[i][j] - 1.5 * b.v[i][j])));
        CHECK(worst < 1e-10 * scale);
    }
}

TEST_CASE("modes decouple and threading does not change results") {
    auto model = s2_model();
    Cutoff chi{4.0};
    std::vector<ModeForcing> f = {{0, compile_source(parse_source_expr("chi*r^(-1/2)"), chi)},
                                  {1, compile_source(parse_source_expr("t*chi*r"), chi)},
                                  {2, compile_source(parse_source_expr("chi*r^2"), chi)}};
    auto grid = RadialGrid::graded(4.0, 80, 3);
    TimeGrid time{0.5, 20};
    auto one = solve_cauchy(model, f, 1.5, grid, time, 1);
    auto three = solve_cauchy(model, f, 1.5, grid, time, 3);
    REQUIRE(one.modes.size() == 3);
    for (std::size_t k = 0; k < f.size(); ++k) {
        auto alone = solve_mode(make_mode_problem(model->spectrum->entries[f[k].entry].lambda, 3, f[k].source), grid, time);
        CHECK(one.modes[k].v == alone.v);
        CHECK(three.modes[k].v == alone.v);
    }
    // phi_0 = 1: synthesis of a mode-0 solution is the radial profile
    auto only0 = solve_cauchy(model, {f[0]}, 1.5, grid, time);
    CHECK(only0.synthesize(10, model->geometry->pole(), 30) == doctest::Approx(only0.modes[0].v[10][30]).epsilon(1e-14));
}

TEST_CASE("solve_cauchy weight and mode validation") {
    auto model = s2_model();
    Cutoff chi{4.0};
    std::vector<ModeForcing> f = {{0, compile_source(parse_source_expr("chi"), chi)}};
    auto grid = RadialGrid::graded(4.0, 40, 2);
    TimeGrid time{0.1, 5};
    // gamma = 1 is alpha_plus of lambda = 2 on S^2
    try {
        solve_cauchy(model, f, 1.0, grid, time);
        FAIL("expected ExceptionalWeight");
    } catch (const ExceptionalWeight& e) {
        CHECK(e.cone_index() == 0);
        CHECK(e.nearest() == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(solve_cauchy(model, f, 0.0, grid, time), ExceptionalWeight);
    CHECK_THROWS_AS(solve_cauchy(model, f, -1.0, grid, time), ConfigError);
    CHECK_THROWS_AS(solve_cauchy(model, {{99, f[0].source}}, 1.5, grid, time), ConfigError);
    CHECK_NOTHROW(solve_cauchy(model, f, -0.5, grid, time));
}

TEST_CASE("energy never increases without forcing") {
    auto grid = RadialGrid::graded(4.0, 100, 3);
    TimeGrid time{1.0, 50};
    for (double lam : {0.0, 2.0, 6.0, 12.0}) {
        auto pr = make_mode_problem(lam, 3, {});
        pr.initial_w = [](double r) { return Cutoff{4.0}(r) * (1 + r - r * r); };
        for (bool ran : {true, false}) {
            auto s = solve_mode(pr, grid, time, SchemeParams{ran});
            REQUIRE(s.energy.size() == 51u);
            CHECK(s.energy[0] > 0);
            for (std::size_t i = 0; i + 1 < s.energy.size(); ++i) CHECK(s.energy[i + 1] <= s.energy[i] * (1 + 1e-14));
            CHECK(s.energy.back() < s.energy.front());
        }
    }
}

TEST_CASE("Crank-Nicolson residual") {
    Cutoff chi{4.0};
    auto man = manufactured_solution(2.0, 3, chi, 2.0);
    auto pr = make_mode_problem(2.0, 3, man.source);
    double r1 = mode_residual(solve_mode(pr, RadialGrid::graded(4.0, 80, 1), TimeGrid{1.0, 20}), man.source);
    double r2 = mode_residual(solve_mode(pr, RadialGrid::graded(4.0, 160, 1), TimeGrid{1.0, 40}), man.source);
    CAPTURE(r1);
    CAPTURE(r2);
    CHECK(r2 < r1);
    CHECK(r1 / r2 > 1.8);
}

TEST_CASE("source expressions") {
    Cutoff chi{4.0};
    auto e = parse_source_expr("chi*r^(-1/2) + 2*t*rho^-0.5 - 3*t^2");
    REQUIRE(e.terms.size() == 3u);
    CHECK(e.terms[0].chi);
    CHECK(e.terms[0].r_power == -0.5);
    CHECK(e.terms[1].coef == 2);
    CHECK(e.terms[1].t_power == 1);
    CHECK(e.terms[1].rho_power == -0.5);
    CHECK(e.terms[2].coef == -3);
    CHECK(e.terms[2].t_power == 2);
    for (double t : {0.0, 0.4})
        for (double r : {0.3, 1.5, 1.8}) {
            double want = chi(r) / std::sqrt(r) + 2 * t / std::sqrt(std::min(r, 1.0)) - 3 * t * t;
            CHECK(evaluate_source(e, chi, t, r) == doctest::Approx(want).epsilon(1e-14));
        }
    CHECK(evaluate_source(parse_source_expr("0"), chi, 0.5, 0.5) == 0);
    for (const char* bad : {"chi*chi", "t^0.5", "t^-1", "foo", "r^", "2 +", "r^(1/2", "(r)"})
        CHECK_THROWS_AS(parse_source_expr(bad), ConfigError);
}

TEST_CASE("Duhamel quadrature basics") {
    auto k0 = make_mode_kernel(0, 3);
    RadialKernelFn h = [&](double tau, double r, double xi) { return mode_heat_kernel(k0, tau, r, xi); };
    RadialSourceFn one{[](double, double) { return 1.0; }, {}, std::numeric_limits<double>::infinity()};
    RadialSourceFn zero{[](double, double) { return 0.0; }, {}, std::numeric_limits<double>::infinity()};
    for (double r : {0.1, 1.0, 3.0}) CHECK(std::fabs(duhamel_radial(h, one, 3, 0.7, r).value - 0.7) < 1e-6);
    CHECK(duhamel_radial(h, zero, 3, 0.7, 0.5).value == 0);
    CHECK(duhamel_radial(h, one, 3, 0.0, 0.5).value == 0);

    // time-dependent source s: H*s = t^2/2 for the stochastically complete kernel
    RadialSourceFn lin{[](double s, double) { return s; }, {}, std::numeric_limits<double>::infinity()};
    CHECK(std::fabs(duhamel_radial(h, lin, 3, 0.8, 0.4).value - 0.32) < 1e-6);

    Cutoff chi{4.0};
    RadialSourceFn a{[&](double, double xi) { return chi(xi); }, {1.0, 2.0}, 2.0};
    RadialSourceFn b{[&](double, double xi) { return chi(xi) * xi; }, {1.0, 2.0}, 2.0};
    RadialSourceFn ab{[&](double, double xi) { return chi(xi) * (2 * xi - 3); }, {1.0, 2.0}, 2.0};
    double va = duhamel_radial(h, a, 3, 0.5, 0.8).value, vb = duhamel_radial(h, b, 3, 0.5, 0.8).value;
    CHECK(duhamel_radial(h, ab, 3, 0.5, 0.8).value == doctest::Approx(2 * vb - 3 * va).epsilon(1e-9));
    // monotone for nonnegative data: chi <= 1
    CHECK(va > 0);
    CHECK(va < 0.5);
}
