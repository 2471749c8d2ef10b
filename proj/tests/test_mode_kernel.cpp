#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "conic/errors.hpp"
#include "conic/mode_kernel.hpp"
#include "doctest.h"

using namespace conic;

namespace {

constexpr double kPi = std::numbers::pi;

double gaussian3(double t, double d2) { return std::pow(4 * kPi * t, -1.5) * std::exp(-d2 / (4 * t)); }

// mode-0 part of the R^3 heat kernel: spherical average of the Gaussian
double radial_average_oracle(double t, double r, double rp) {
    auto f = [&](double th) { return 2 * kPi * std::sin(th) * gaussian3(t, r * r + rp * rp - 2 * r * rp * std::cos(th)); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, kPi, 20, 1e-15);
}

ConeModel r3_model(double lam_max = 4000) {
    return make_cone_model(3, std::make_shared<const LinkSpectrum>(sphere_spectrum(3, 1.0, lam_max)), 4.0);
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST_CASE("mode kernel parameters") {
    for (int m : {3, 4, 7})
        for (double lam : {0.0, 0.3, 2.0, 17.5, 900.0}) {
            auto k = make_mode_kernel(lam, m);
            double a = 0.5 * (m - 2);
            CHECK(rel(k.nu * k.nu, a * a + lam) < 1e-14);
            CHECK(k.alpha_plus == indicial_roots(lam, m).alpha_plus);
        }
    CHECK_THROWS_AS(make_mode_kernel(-1, 3), ConfigError);
}

TEST_CASE("mode kernel closed form and spherical average") {
    auto k = make_mode_kernel(0, 3);
    CHECK(rel(mode_heat_kernel(k, 1, 1, 1), std::exp(-0.5) * std::sinh(0.5) / std::sqrt(kPi)) < 1e-14);
    for (double t : {0.05, 0.3, 1.0, 4.0})
        for (double r : {0.1, 0.7, 2.0})
            for (double rp : {0.2, 1.0, 3.0}) CHECK(rel(mode_heat_kernel(k, t, r, rp), radial_average_oracle(t, r, rp)) < 1e-12);
}

TEST_CASE("mode kernel scaling law") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> N(0, 60), S(0.3, 3), L(-3, 2);
    std::uniform_int_distribution<int> M(3, 8);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        int m = M(rng);
        double nu = N(rng), a = 0.5 * (m - 2);
        auto k = make_mode_kernel(std::max(nu * nu - a * a, 0.0), m);
        double s = S(rng), t = std::exp(L(rng)), r = std::exp(L(rng)), rp = std::exp(L(rng));
        double h = mode_heat_kernel(k, t, r, rp);
        if (h == 0) continue;
        worst = std::max(worst, rel(mode_heat_kernel(k, s * s * t, s * r, s * rp), std::pow(s, -m) * h));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("mode kernel small-r limit and envelope") {
    auto k = make_mode_kernel(6, 3);
    double a = mode_heat_kernel(k, 1, 1e-4, 1) * std::pow(1e-4, -k.alpha_plus);
    double b = mode_heat_kernel(k, 1, 1e-6, 1) * std::pow(1e-6, -k.alpha_plus);
    CHECK(a > 0);
    CHECK(rel(a, b) < 1e-7);
    CHECK(rel(b, kernel_asymptotic_coefficient(k, 0, 1, 1)) < 1e-10);
    auto huge = make_mode_kernel(6000.0 * 6000.0, 3);
    CHECK_THROWS_AS(mode_heat_kernel(huge, 1, 1, 1), NumericError);
    CHECK_THROWS_AS(mode_heat_kernel(k, 0, 1, 1), ConfigError);
}

TEST_CASE("assembled kernel reproduces the Euclidean heat kernel") {
    auto c = r3_model();
    const auto& G = *c.geometry;
    ConePoint x{G.pole(), 1.0};
    auto s = assemble_kernel_adaptive(c, 1.0, x, x);
    CHECK_FALSE(s.tail_warning);
    CHECK(std::fabs(s.value - std::pow(4 * kPi, -1.5)) < 1e-6 * std::pow(4 * kPi, -1.5));
    double worst = 0;
    for (double t : {0.1, 0.5, 2.0})
        for (double r : {0.1, 0.9, 2.0})
            for (double th : {0.0, 1.0, 2.5, kPi}) {
                ConePoint a{G.pole(), r}, b{G.point_at_distance(th), 1.0};
                auto v = assemble_kernel_adaptive(c, t, a, b);
                CHECK_FALSE(v.tail_warning);
                double d2 = r * r + 1 - 2 * r * std::cos(th);
                worst = std::max(worst, rel(v.value, gaussian3(t, d2)));
            }
    CHECK(worst < 1e-6);
}

TEST_CASE("assembled kernel symmetry, positivity and tail flag") {
    auto c = r3_model(400);
    const auto& G = *c.geometry;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.1, 2), A(0, kPi), T(0.2, 2);
    for (int i = 0; i < 200; ++i) {
        ConePoint x{G.point_at_distance(A(rng)), U(rng)}, y{G.point_at_distance(A(rng)), U(rng)};
        double t = T(rng);
        int n = static_cast<int>(c.spectrum->entries.size());
        CHECK(assemble_kernel(c, t, x, y, n).value == assemble_kernel(c, t, y, x, n).value);
        CHECK(assemble_kernel(c, t, x, y, n).value > 0);
    }
    ConePoint x{G.pole(), 1.0};
    CHECK(assemble_kernel(c, 0.05, x, x, 2).tail_warning);
    CHECK_THROWS_AS(assemble_kernel(c, 1, x, x, 10000), ConfigError);
}

TEST_CASE("asymptotic coefficients") {
    auto k0 = make_mode_kernel(0, 3);
    double lim = mode_heat_kernel(k0, 1, 1e-6, 1);
    CHECK(rel(kernel_asymptotic_coefficient(k0, 0, 1, 1), lim) < 1e-6);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> S(0.3, 3), L(-2, 1);
    for (double lam : {0.0, 2.0, 6.0, 12.0})
        for (int j = 0; j < 4; ++j) {
            auto k = make_mode_kernel(lam, 3);
            double aj = k.alpha_plus + 2 * j;
            for (int i = 0; i < 20; ++i) {
                double s = S(rng), t = std::exp(L(rng)), rp = std::exp(L(rng));
                double c = kernel_asymptotic_coefficient(k, j, t, rp);
                CHECK(rel(kernel_asymptotic_coefficient(k, j, s * s * t, s * rp), std::pow(s, -3 - aj) * c) < 1e-11);
            }
        }

    // expansion reproduces the kernel at small r
    auto k = make_mode_kernel(2, 3);
    double r = 1e-2, sum = 0;
    for (int j = 0; j < 6; ++j) sum += kernel_asymptotic_coefficient(k, j, 0.5, 0.8) * std::pow(r, k.alpha_plus + 2 * j);
    CHECK(rel(sum, mode_heat_kernel(k, 0.5, r, 0.8)) < 1e-14);
}

TEST_CASE("asymptotic coefficient bound is uniform on a log grid") {
    auto sup_on = [](const ModeKernel& k, int j, int n) {
        double best = 0, aj = k.alpha_plus + 2 * j;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double t = std::pow(10.0, -4 + 5.0 * a / (n - 1)), rp = std::pow(10.0, -3 + 3.0 * b / (n - 1));
                best = std::max(best, std::fabs(kernel_asymptotic_coefficient(k, j, t, rp)) * std::pow(t + rp * rp, 0.5 * (3 + aj)));
            }
        return best;
    };
    for (double lam : {0.0, 2.0})
        for (int j = 0; j < 3; ++j) {
            auto k = make_mode_kernel(lam, 3);
            double c1 = sup_on(k, j, 41), c2 = sup_on(k, j, 81);
            CHECK(std::isfinite(c2));
            CHECK(rel(c1, c2) < 0.05);
        }
}

TEST_CASE("remainder series agrees with subtraction") {
    auto k = make_mode_kernel(2, 3);
    for (double r : {0.05, 0.2, 0.5}) {
        double t = 0.7, rp = 0.9;
        double direct = mode_kernel_remainder(k, 2, t, r, rp);
        double sub = mode_heat_kernel(k, t, r, rp) - kernel_asymptotic_coefficient(k, 0, t, rp) * std::pow(r, 1.0) -
                     kernel_asymptotic_coefficient(k, 1, t, rp) * std::pow(r, 3.0);
        CHECK(std::fabs(direct - sub) < 1e-13 * mode_heat_kernel(k, t, r, rp));
    }
    CHECK(mode_kernel_remainder(k, 0, 1, 0.3, 1) == mode_heat_kernel(k, 1, 0.3, 1));
    CHECK(expansion_terms_below(k, 1.5) == 1);
    CHECK(expansion_terms_below(make_mode_kernel(0, 3), 2.5) == 2);
}

TEST_CASE("kernel remainder bound check") {
    auto c = r3_model(kernel_spectrum_requirement(3, 1e-3, 0.1, 0.9));
    RemainderGrid g;
    g.t = {1e-3, 1e-2, 0.1, 1.0};
    g.r_levels = {1e-1, 1e-2, 1e-3, 1e-4};
    g.r_per_band = 4;
    g.r_prime = {0.05, 0.3, 0.9};
    g.link_distance = {0.0, 1.5, kPi};
    auto rep = kernel_remainder_check(c, 1.5, g);
    CHECK_FALSE(rep.tail_warning);
    REQUIRE(rep.band_sup.size() == 3);
    CHECK(std::isfinite(rep.sup));
    for (int i = 0; i + 1 < 3; ++i) CHECK(rep.band_sup[i + 1] <= rep.band_sup[i]);

    auto neg = kernel_remainder_check(c, -0.5, g);
    CHECK(std::isfinite(neg.sup));
    CHECK(neg.sup < 10);

    // pointwise scaling invariance of the ratio on the pure cone
    const auto& G = *c.geometry;
    for (double th : {0.0, 1.0, 3.0}) {
        ConePoint x{G.point_at_distance(th), 0.03}, y{G.pole(), 0.2};
        ConePoint xs{x.sigma, 0.06}, ys{y.sigma, 0.4};
        double q = assemble_kernel_remainder(c, 1.5, 0.01, x, y, true).value / remainder_bound(c, 1.5, 0.01, x, y, true);
        double qs = assemble_kernel_remainder(c, 1.5, 0.04, xs, ys, true).value / remainder_bound(c, 1.5, 0.04, xs, ys, true);
        CHECK(rel(qs, q) < 1e-9);
    }
}

TEST_CASE("Chapman-Kolmogorov and mass") {
    for (double nu : {0.5, 1.5, 2.5}) {
        auto k = make_mode_kernel(nu * nu - 0.25, 3);
        for (double r : {0.5, 1.0, 2.0})
            for (double rp : {0.5, 1.0, 2.0}) {
                double lhs = chapman_kolmogorov_integral(k, 0.3, 0.7, r, rp);
                CHECK(rel(lhs, mode_heat_kernel(k, 1.0, r, rp)) < 1e-8);
            }
    }
    auto k0 = make_mode_kernel(0, 3);
    for (double t : {0.01, 0.5, 3.0})
        for (double r : {0.1, 1.0, 2.0}) {
            double m = mode_mass(k0, t, r);
            CHECK(m <= 1 + 1e-8);
            CHECK(std::fabs(m - 1) < 1e-10);
        }
    // m = 4 cone over S^3(1) is R^4: mass one as well
    CHECK(std::fabs(mode_mass(make_mode_kernel(0, 4), 0.5, 0.7) - 1) < 1e-10);
}
