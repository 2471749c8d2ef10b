#pragma once

#include <vector>

namespace conic {

// Largest order accepted by bessel_ie; beyond it the uniform expansion has
// not been validated.
inline constexpr double kBesselMaxOrder = 5000.0;

// e^{-z} I_nu(z) for nu >= 0, z >= 0.
double bessel_ie(double nu, double z);

// Which branch bessel_ie uses at (nu, z); exposed for tests.
enum class BesselBranch { Zero, Series, Hankel, Debye };
BesselBranch bessel_branch(double nu, double z);

// C_k^{(a)}(x) / C_k^{(a)}(1) for k = 0..kmax, a > 0.
std::vector<double> gegenbauer_normalized(int kmax, double a, double x);

// Coefficients of the Debye polynomial U_k(p), lowest degree first.
const std::vector<double>& debye_polynomial(int k);
inline constexpr int kDebyeTerms = 14;

}  // namespace conic
