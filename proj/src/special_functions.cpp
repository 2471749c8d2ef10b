#include "conic/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "conic/errors.hpp"

namespace conic {

namespace {

constexpr double kDebyeOrder = 25.0;
constexpr double kHankelMinArg = 25.0;

double lgam(double x) {
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

std::vector<std::vector<double>> build_debye() {
    std::vector<std::vector<double>> U(kDebyeTerms);
    U[0] = {1.0};
    for (int k = 0; k + 1 < kDebyeTerms; ++k) {
        const auto& u = U[k];
        std::vector<double> next(u.size() + 3, 0.0);
        // 1/2 p^2 (1 - p^2) U'
        for (std::size_t j = 1; j < u.size(); ++j) {
            double d = j * u[j];
            next[j + 1] += 0.5 * d;
            next[j + 3] -= 0.5 * d;
        }
        // 1/8 int_0^p (1 - 5 t^2) U(t) dt
        for (std::size_t j = 0; j < u.size(); ++j) {
            next[j + 1] += 0.125 * u[j] / (j + 1);
            next[j + 3] -= 0.625 * u[j] / (j + 3);
        }
        while (next.size() > 1 && next.back() == 0.0) next.pop_back();
        U[k + 1] = std::move(next);
    }
    return U;
}

const std::vector<std::vector<double>>& debye_table() {
    static const auto table = build_debye();
    return table;
}

double poly(const std::vector<double>& c, double p) {
    double s = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * p + *it;
    return s;
}

double ie_series(double nu, double z) {
    const double q = 0.25 * z * z;
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 100000; ++k) {
        term *= q / ((k + 1.0) * (nu + k + 1.0));
        sum += term;
        if (term < 1e-17 * sum && k + 1 > 0.5 * z) break;
    }
    double logt0 = nu * std::log(0.5 * z) - lgam(nu + 1.0) - z;
    return std::exp(logt0 + std::log(sum));
}

double ie_hankel(double nu, double z) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0, prev = 1.0;
    for (int k = 0; k < 200; ++k) {
        double odd = 2.0 * k + 1.0;
        term *= -(mu - odd * odd) / (8.0 * (k + 1.0) * z);
        if (std::fabs(term) > std::fabs(prev) && k > 2) break;
        sum += term;
        prev = term;
        if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

double ie_debye(double nu, double z) {
    const double x = z / nu;
    const double s = std::sqrt(1.0 + x * x);
    const double p = 1.0 / s;
    double L;
    if (x > 1.0)
        L = -std::log1p(1.0 / x + 1.0 / (x * (s + x)));
    else
        L = std::log(x / (1.0 + s));
    const double expo = nu * (1.0 / (s + x) + L);
    const auto& U = debye_table();
    double sum = 0.0, inv = 1.0;
    for (int k = 0; k < kDebyeTerms; ++k) {
        sum += poly(U[k], p) * inv;
        inv /= nu;
    }
    return std::exp(expo) * sum / (std::sqrt(2.0 * std::numbers::pi * nu) * std::sqrt(s));
}

}  // namespace

const std::vector<double>& debye_polynomial(int k) { return debye_table().at(k); }

BesselBranch bessel_branch(double nu, double z) {
    if (z == 0.0) return BesselBranch::Zero;
    if (nu >= kDebyeOrder) return BesselBranch::Debye;
    if (z >= std::max(kHankelMinArg, 0.5 * nu * nu)) return BesselBranch::Hankel;
    return BesselBranch::Series;
}

double bessel_ie(double nu, double z) {
    if (!(nu >= 0.0) || !(z >= 0.0) || !std::isfinite(z)) {
        std::ostringstream os;
        os << "bessel_ie: invalid arguments nu=" << nu << " z=" << z;
        throw NumericError(os.str());
    }
    if (nu > kBesselMaxOrder) {
        std::ostringstream os;
        os << "bessel_ie: order " << nu << " outside the validated envelope (max " << kBesselMaxOrder << ")";
        throw NumericError(os.str());
    }
    switch (bessel_branch(nu, z)) {
        case BesselBranch::Zero:
            return nu == 0.0 ? 1.0 : 0.0;
        case BesselBranch::Debye:
            return ie_debye(nu, z);
        case BesselBranch::Hankel:
            return ie_hankel(nu, z);
        case BesselBranch::Series:
            break;
    }
    return ie_series(nu, z);
}

std::vector<double> gegenbauer_normalized(int kmax, double a, double x) {
    std::vector<double> P(std::max(kmax, 0) + 1);
    P[0] = 1.0;
    if (kmax >= 1) P[1] = x;
    for (int n = 1; n < kmax; ++n) P[n + 1] = (2.0 * x * (n + a) * P[n] - n * P[n - 1]) / (n + 2.0 * a);
    return P;
}

}  // namespace conic
