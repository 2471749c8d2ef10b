#pragma once

#include <functional>
#include <limits>
#include <vector>

namespace conic {

// k(tau, r, xi): radial kernel at elapsed time tau
using RadialKernelFn = std::function<double(double, double, double)>;

struct RadialSourceFn {
    std::function<double(double, double)> eval;   // f(s, xi)
    std::vector<double> breakpoints;              // kinks in xi
    double support = std::numeric_limits<double>::infinity();
};

struct DuhamelSpec {
    double rel_tol = 1e-10;
    // kernels are taken as negligible beyond window * sqrt(tau) from both r and 0
    double window = 40;
    // xi integration starts here (tip-excised majorants)
    double xi_min = 0;
};

struct QuadResult {
    double value = 0;
    double error = 0;
    double abs_integral = 0;   // estimate of the integral of |integrand|
};

// int_0^t int_0^inf k(t-s, r, xi) f(s, xi) xi^{m-1} dxi ds with s = t - sigma^2.
// Throws NumericError when the error estimate stays above 1e3 * rel_tol relative to
// the integral of |integrand|.
QuadResult duhamel_radial(const RadialKernelFn& k, const RadialSourceFn& f, int m, double t, double r,
                          const DuhamelSpec& spec = {});

}  // namespace conic
