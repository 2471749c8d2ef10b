#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_gegenbauer.h>
#include <gsl/gsl_sf_legendre.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "conic/errors.hpp"
#include "conic/special_functions.hpp"
#include "doctest.h"

using namespace conic;

namespace {

// closed forms for half-integer orders
double ie_half(double z) { return std::sqrt(2 / (std::numbers::pi * z)) * 0.5 * (-std::expm1(-2 * z)); }
double ie_three_halves(double z) {
    double c = 0.5 * (1 + std::exp(-2 * z)), s = 0.5 * (-std::expm1(-2 * z));
    return std::sqrt(2 / (std::numbers::pi * z)) * (c - s / z);
}

double gsl_ie(double nu, double z) {
    gsl_sf_result r;
    int status = gsl_sf_bessel_Inu_scaled_e(nu, z, &r);
    return status == GSL_SUCCESS ? r.val : std::nan("");
}

double ie_reference(double nu, double z) {
    using mp = boost::multiprecision::cpp_bin_float_50;
    mp v = boost::math::cyl_bessel_i(mp(nu), mp(z)) * exp(-mp(z));
    return v.convert_to<double>();
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace

TEST_CASE("half-integer closed forms") {
    double worst = 0;
    for (double z = 1e-4; z < 2000; z *= 1.07) {
        worst = std::max(worst, rel(bessel_ie(0.5, z), ie_half(z)));
        if (z > 0.05) worst = std::max(worst, rel(bessel_ie(1.5, z), ie_three_halves(z)));
    }
    MESSAGE("half-integer worst relative error " << worst);
    CHECK(worst < 1e-13);
}

TEST_CASE("agreement with a 50-digit reference across every branch") {
    double worst[4] = {0, 0, 0, 0};
    for (double nu = 0; nu <= 200; nu += (nu < 30 ? 0.77 : 13.3)) {
        for (double z = 1e-2; z < 3000; z *= 1.4) {
            double ref = ie_reference(nu, z);
            if (ref < 1e-250) continue;
            int br = static_cast<int>(bessel_branch(nu, z));
            worst[br] = std::max(worst[br], rel(bessel_ie(nu, z), ref));
        }
    }
    MESSAGE("series " << worst[1] << " hankel " << worst[2] << " debye " << worst[3]);
    CHECK(worst[1] < 1e-13);
    CHECK(worst[2] < 1e-13);
    CHECK(worst[3] < 1e-12);
}

TEST_CASE("loose cross-check against GSL") {
    gsl_set_error_handler_off();
    double worst = 0;
    for (double nu = 0; nu <= 400; nu += 3.7)
        for (double z = 1e-3; z < 5e4; z *= 1.3) {
            double ref = gsl_ie(nu, z);
            if (!std::isfinite(ref) || ref < 1e-250) continue;
            worst = std::max(worst, rel(bessel_ie(nu, z), ref));
        }
    MESSAGE("GSL worst " << worst);
    CHECK(worst < 1e-8);
}

TEST_CASE("large orders against the reference") {
    double worst = 0;
    for (double nu : {30.0, 100.0, 500.0, 2000.0, 4999.0})
        for (double z : {1.0, 30.0, 300.0, 3000.0, 3e4, 1e6}) {
            double a = bessel_ie(nu, z);
            if (a < 1e-250) continue;
            worst = std::max(worst, rel(a, ie_reference(nu, z)));
        }
    MESSAGE("large order worst " << worst);
    CHECK(worst < 1e-12);
}

TEST_CASE("envelope and argument errors") {
    CHECK(bessel_ie(0, 0) == 1.0);
    CHECK(bessel_ie(2, 0) == 0.0);
    CHECK_THROWS_AS(bessel_ie(kBesselMaxOrder * 1.01, 1.0), NumericError);
    CHECK_THROWS_AS(bessel_ie(-1, 1.0), NumericError);
    CHECK_THROWS_AS(bessel_ie(1, -1.0), NumericError);
}

TEST_CASE("continuity across branch switches") {
    for (double nu : {0.0, 3.3, 10.0, 24.999}) {
        double zs = std::max(25.0, 0.5 * nu * nu);
        double a = bessel_ie(nu, zs * (1 - 1e-12)), b = bessel_ie(nu, zs);
        CHECK(rel(a, b) < 1e-12);
    }
    double a = bessel_ie(25.0 - 1e-12, 30.0), b = bessel_ie(25.0, 30.0);
    CHECK(rel(a, b) < 1e-12);
}

TEST_CASE("Debye polynomials: known low orders") {
    const auto& u1 = debye_polynomial(1);
    REQUIRE(u1.size() == 4);
    CHECK(u1[1] == doctest::Approx(3.0 / 24));
    CHECK(u1[3] == doctest::Approx(-5.0 / 24));
    const auto& u2 = debye_polynomial(2);
    CHECK(u2[2] == doctest::Approx(81.0 / 1152));
    CHECK(u2[4] == doctest::Approx(-462.0 / 1152));
    CHECK(u2[6] == doctest::Approx(385.0 / 1152));
}

TEST_CASE("normalized Gegenbauer values against GSL") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> X(-1, 1);
    for (int trial = 0; trial < 50; ++trial) {
        double x = X(rng);
        auto P = gegenbauer_normalized(40, 0.5, x);
        for (int k = 0; k <= 40; ++k) CHECK(P[k] == doctest::Approx(gsl_sf_legendre_Pl(k, x)).epsilon(1e-12));
        for (double a : {1.0, 1.5, 2.5}) {
            auto Q = gegenbauer_normalized(30, a, x);
            for (int k = 0; k <= 30; ++k) {
                double num = gsl_sf_gegenpoly_n(k, a, x), den = gsl_sf_gegenpoly_n(k, a, 1.0);
                CHECK(Q[k] == doctest::Approx(num / den).epsilon(1e-11).scale(1.0));
            }
        }
    }
}
