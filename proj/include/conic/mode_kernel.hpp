#pragma once

#include <vector>

#include "conic/cone_model.hpp"

namespace conic {

struct ModeKernel {
    double nu = 0.5;
    int m = 3;
    double alpha_plus = 0;
    double lambda = 0;
};

ModeKernel make_mode_kernel(double lambda, int m);

// h_nu(t,r,r') = (r r')^{-(m-2)/2} (2t)^{-1} exp(-(r^2+r'^2)/4t) I_nu(r r'/2t)
double mode_heat_kernel(const ModeKernel& k, double t, double r, double r_prime);

// Coefficient c_j(t, r') of r^{alpha_plus + 2j} in the small-r expansion of h_nu.
double kernel_asymptotic_coefficient(const ModeKernel& k, int j, double t, double r_prime);

// h_nu minus chi * sum_{j < n_terms} c_j r^{alpha_plus + 2j}
double mode_kernel_remainder(const ModeKernel& k, int n_terms, double t, double r, double r_prime, double chi = 1.0);

// Number of expansion terms with alpha_plus + 2j < gamma (0 when alpha_plus < 0).
int expansion_terms_below(const ModeKernel& k, double gamma);

struct KernelSum {
    double value = 0;
    int modes_used = 0;
    double last_term = 0;    // bound |h| mult/vol on the last included entry
    bool tail_warning = false;
};

inline constexpr double kKernelTailTol = 1e-10;

// Sum over the first k_max spectrum entries in ascending lambda.
KernelSum assemble_kernel(const ConeModel& model, double t, const ConePoint& x, const ConePoint& y, int k_max);

// Adds entries until the tail bound stays below tol relative to the partial sum.
KernelSum assemble_kernel_adaptive(const ConeModel& model, double t, const ConePoint& x, const ConePoint& y,
                                   double tol = kKernelTailTol);

// Smallest lambda_max that lets assemble_kernel_adaptive converge at (t, r, r').
double kernel_spectrum_requirement(int m, double t, double r, double r_prime);

// Full-kernel remainder H - sum_j psi^j(x) H^j(t, y) for weight gamma.
// pure_cone drops the cutoff in psi^j.
KernelSum assemble_kernel_remainder(const ConeModel& model, double gamma, double t, const ConePoint& x,
                                    const ConePoint& y, bool pure_cone = false, double tol = kKernelTailTol);

struct RemainderGrid {
    std::vector<double> t;
    std::vector<double> r_levels;   // decreasing band edges toward the tip
    int r_per_band = 6;
    std::vector<double> r_prime;
    std::vector<double> link_distance;
};

struct RemainderReport {
    double gamma = 0;
    std::vector<double> band_sup;   // sup of |remainder| / bound per r band
    double sup = 0;
    bool tail_warning = false;
    int samples = 0;
};

// (t + d^2)^{-m/2} (rho_x^2 / (rho_x^2 + rho_y^2))^{gamma^+/2}
double remainder_bound(const ConeModel& model, double gamma, double t, const ConePoint& x, const ConePoint& y,
                       bool pure_cone = false);

RemainderReport kernel_remainder_check(const ConeModel& model, double gamma, const RemainderGrid& grid,
                                       bool pure_cone = false);

// int_0^inf h(t,r,xi) h(s,xi,r') xi^{m-1} dxi
double chapman_kolmogorov_integral(const ModeKernel& k, double t, double s, double r, double r_prime);

// int_0^inf h(t,r,xi) xi^{m-1} dxi
double mode_mass(const ModeKernel& k, double t, double r);

}  // namespace conic
