#include <cmath>
#include <memory>
#include <random>

#include "conic/errors.hpp"
#include "conic/indicial.hpp"
#include "doctest.h"

using namespace conic;

namespace {

std::shared_ptr<const LinkSpectrum> sphere(int m, double a, double lam) {
    return std::make_shared<const LinkSpectrum>(sphere_spectrum(m, a, lam));
}

// Direct count from the spectrum: quadratic formula solved independently.
double root_plus(double lam, int m) { return (-(m - 2) + std::sqrt((m - 2.0) * (m - 2.0) + 4 * lam)) / 2; }
double root_minus(double lam, int m) { return (-(m - 2) - std::sqrt((m - 2.0) * (m - 2.0) + 4 * lam)) / 2; }

int oracle_M(const LinkSpectrum& s, int m, double d) {
    int c = 0;
    for (const auto& e : s.entries) {
        double ap = root_plus(e.lambda, m), am = root_minus(e.lambda, m);
        for (double a : {ap, am}) {
            if (d >= 0 && a >= 0 && a < d) c += e.multiplicity;
            if (d < 0 && a > d && a < 0) c -= e.multiplicity;
        }
    }
    return c;
}

int oracle_N(const LinkSpectrum& s, int m, double d) {
    if (d < 0) return oracle_M(s, m, d);
    int c = 0;
    for (const auto& e : s.entries) {
        double ap = root_plus(e.lambda, m);
        for (int k = 0; ap + 2 * k < d; ++k) c += e.multiplicity;
    }
    return c;
}

}  // namespace

TEST_CASE("indicial roots examples") {
    auto r = indicial_roots(0, 3);
    CHECK(r.alpha_minus == -1.0);
    CHECK(r.alpha_plus == 0.0);
    r = indicial_roots(2, 3);
    CHECK(r.alpha_minus == -2.0);
    CHECK(r.alpha_plus == 1.0);
    r = indicial_roots(0, 7);
    CHECK(r.alpha_minus == -5.0);
    CHECK(r.alpha_plus == 0.0);
}

TEST_CASE("roots reproduce eigenvalues and bracket the gap") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> L(0, 500);
    for (int i = 0; i < 500; ++i) {
        int m = 3 + i % 6;
        double lam = L(rng);
        auto r = indicial_roots(lam, m);
        for (double a : {r.alpha_minus, r.alpha_plus})
            CHECK(std::fabs(a * (a + m - 2) - lam) <= 1e-12 * std::max(1.0, lam));
        CHECK(r.alpha_plus >= 0);
        CHECK(r.alpha_minus <= 2 - m);
    }
}

TEST_CASE("exceptional set examples") {
    auto p = exceptional_set_D(sphere(3, 1, 20), 3, {-3, 3});
    std::vector<std::pair<double, int>> want = {{-3, 5}, {-2, 3}, {-1, 1}, {0, 1}, {1, 3}, {2, 5}};
    REQUIRE(p.roots.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(p.roots[i].alpha == want[i].first);
        CHECK(p.roots[i].mult == want[i].second);
    }

    auto q = exceptional_set_D(sphere(5, 1, 50), 5, {std::nextafter(-3.0, 0.0), 0});
    CHECK(q.roots.empty());

    // S^2 of radius 2: lambda = k(k+1)/4; roots in [0,1) come from k = 0, 1, 2
    auto s = exceptional_set_D(sphere(3, 2, 10), 3, {0, 1});
    REQUIRE(s.roots.size() == 3);
    CHECK(s.roots[0].alpha == 0.0);
    CHECK(s.roots[1].alpha == doctest::Approx((-1 + std::sqrt(3.0)) / 2).epsilon(1e-15));
    CHECK(s.roots[1].mult == 3);
    CHECK(s.roots[2].alpha == doctest::Approx(-0.5 + std::sqrt(1.75)).epsilon(1e-15));
    CHECK(s.roots[2].mult == 5);
}

TEST_CASE("insufficient cutoff names the required value") {
    try {
        exceptional_set_D(sphere(3, 1, 5), 3, {-3, 3});
        FAIL("expected throw");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("required cutoff 12") != std::string::npos);
    }
}

TEST_CASE("index function M examples and the exceptional zero") {
    auto p = exceptional_set_D(sphere(3, 1, 100), 3, {-6, 6});
    CHECK(index_function_M(p, 1.5) == 4);
    CHECK(index_function_M(p, -0.5) == 0);
    CHECK(index_function_M(p, -1.5) == -1);
    CHECK_THROWS_AS(index_function_M(p, 0.0), ExceptionalWeight);
    CHECK_THROWS_AS(index_function_M(p, 1.0 + 1e-10), ExceptionalWeight);
    CHECK_NOTHROW(index_function_M(p, 1.0 + 1e-8));
    CHECK_THROWS_AS(index_function_M(p, 7.0), ConfigError);
}

TEST_CASE("extended set and n examples") {
    auto p = exceptional_set_D(sphere(3, 1, 100), 3, {-6, 6});
    auto e = extended_set_E(p);
    CHECK(multiplicity_n(e, 2) == 6);
    CHECK(multiplicity_n(e, 1) == 3);
    CHECK(multiplicity_n(e, 0.5) == 0);
    for (const auto& x : e.elements)
        if (x.beta < 2) CHECK(x.n == multiplicity_m(p, x.beta));
}

TEST_CASE("index function N examples") {
    auto p = exceptional_set_D(sphere(3, 1, 100), 3, {-6, 6});
    auto e = extended_set_E(p);
    CHECK(index_function_N(e, 2.5) == 10);
    CHECK(index_function_N(e, 1.5) == 4);
    CHECK(index_function_N(e, 0.5) == 1);
}

TEST_CASE("M and N agree with direct counting and satisfy the shift identity") {
    std::mt19937_64 rng(11);
    struct Case {
        std::shared_ptr<const LinkSpectrum> s;
        int m;
    };
    std::vector<Case> cases = {{sphere(3, 1, 200), 3},
                               {sphere(3, 2, 400), 3},
                               {sphere(4, 1, 200), 4},
                               {sphere(4, 0.7, 200), 4},
                               {std::make_shared<const LinkSpectrum>(torus_spectrum({{1, 0}, {0, 1}}, 400)), 3}};
    for (const auto& c : cases) {
        auto p = exceptional_set_D(c.s, c.m, {-9.0 - c.m, 9.0});
        auto e = extended_set_E(p);
        std::uniform_real_distribution<double> U(2.0 - c.m, 8.0);
        int tested = 0;
        while (tested < 200) {
            double d = U(rng);
            bool near = false;
            for (const auto& x : e.elements)
                if (std::fabs(x.beta - d) < 1e-6 || std::fabs(x.beta - (d - 2)) < 1e-6) near = true;
            if (near) continue;
            ++tested;
            CHECK(index_function_M(p, d) == oracle_M(*c.s, c.m, d));
            CHECK(index_function_N(e, d) == oracle_N(*c.s, c.m, d));
            if (d > 2) CHECK(index_function_M(p, d) == index_function_N(e, d) - index_function_N(e, d - 2));
            if (d <= 2) CHECK(index_function_M(p, d) == index_function_N(e, d));
        }
    }
}

TEST_CASE("monotonicity of M and N") {
    auto p = exceptional_set_D(sphere(3, 1, 200), 3, {-10, 10});
    auto e = extended_set_E(p);
    double prevM = -1e9, prevN = -1e9;
    for (double d = -9.93; d < 9.9; d += 0.1) {
        int M = index_function_M(p, d), N = index_function_N(e, d);
        CHECK(M >= prevM);
        CHECK(N >= prevN);
        prevM = M;
        prevN = N;
    }
}

TEST_CASE("gamma plus/minus") {
    auto e = extended_set_E(exceptional_set_D(sphere(3, 1, 100), 3, {-6, 6}));
    auto b = gamma_plus_minus(e, 1.5);
    CHECK(b.gamma_minus == 1.0);
    CHECK(b.gamma_plus == 2.0);
    b = gamma_plus_minus(e, 1.0);
    CHECK(b.gamma_minus == 0.0);
    CHECK(b.gamma_plus == 1.0);
    b = gamma_plus_minus(e, 0.5);
    CHECK(b.gamma_minus == 0.0);
    CHECK(b.gamma_plus == 1.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-5, 5);
    for (int i = 0; i < 200; ++i) {
        double g = U(rng);
        auto gb = gamma_plus_minus(e, g);
        CHECK(gb.gamma_minus < g);
        CHECK(gb.gamma_plus >= g);
    }
    CHECK_THROWS_AS(gamma_plus_minus(e, 5.5), ConfigError);
}

TEST_CASE("fredholm index") {
    auto p = exceptional_set_D(sphere(3, 1, 100), 3, {-6, 6});
    CHECK(fredholm_index({p}, WeightVector{{1.5}}) == -4);
    CHECK(fredholm_index({p}, WeightVector{{-0.5}}) == 0);
    CHECK(fredholm_index({p, p}, WeightVector{{1.5, -0.5}}) == -4);
    CHECK(fredholm_index({p, p}, WeightVector{{1.5, 2.5}}) == -4 - 9);
    try {
        fredholm_index({p, p}, WeightVector{{1.5, 1.0}});
        FAIL("expected throw");
    } catch (const ExceptionalWeight& ex) {
        CHECK(ex.cone_index() == 1);
        CHECK(ex.nearest() == 1.0);
    }
    CHECK_THROWS_AS(fredholm_index({p}, WeightVector{{1.5, 0.5}}), ConfigError);
}

TEST_CASE("model space dimensions") {
    auto e = extended_set_E(exceptional_set_D(sphere(3, 1, 100), 3, {-6, 6}));
    auto d = model_space_dims(e, 2.5);
    CHECK(d.dim_H == 9);
    CHECK(d.dim_V == 10);
    d = model_space_dims(e, 1.5);
    CHECK(d.dim_H == 4);
    CHECK(d.dim_V == 4);
    d = model_space_dims(e, -0.5);
    CHECK(d.dim_H == 0);
    CHECK(d.dim_V == 0);
}

TEST_CASE("weight vectors compare componentwise") {
    WeightVector a{{1, 2}}, b{{1, 3}}, c{{0, 4}};
    CHECK(a <= b);
    CHECK_FALSE(b <= a);
    CHECK_FALSE(a <= c);
    CHECK(a.shifted(1).gammas == std::vector<double>{2, 3});
}
