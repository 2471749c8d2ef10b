#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conic/cone_model.hpp"
#include "conic/duhamel.hpp"
#include "conic/heat_solver.hpp"
#include "conic/mode_kernel.hpp"

namespace conic {

// Radial samples u(r_j); nodes with r = 0 are ignored by the norms.
struct RadialField {
    std::vector<double> r;
    std::vector<double> u;
};

RadialField mode_slice(const ModeSolution& s, int time_index);

enum class NormKind { SupWeighted, LpWeighted, Parabolic };

struct WeightedNormReport {
    NormKind kind = NormKind::SupWeighted;
    double value = 0;
    double gamma = 0;
    std::optional<double> p;
    double r_min = 0, r_max = 0;
    int nodes = 0;
    bool tail_flag = false;
    double tail_estimate = 0;   // extrapolated integral over (0, r_min)
};

// max_j rho^{-gamma}|u| (+ max rho^{1-gamma}|u'| when j_max = 1)
WeightedNormReport weighted_sup_norm(const RadialField& u, double gamma, int j_max = 0, bool pure_cone = false);

// (link_measure * int |rho^{-gamma} u|^p rho^{-m} r^{m-1} dr)^{1/p}, trapezoid plus a power-law tip tail
WeightedNormReport weighted_lp_norm(const RadialField& u, double gamma, double p, int m, double link_measure = 1.0,
                                    bool pure_cone = false);

// int_0^R g(r) dr for samples of g on r > 0, trapezoid plus tip extrapolation g ~ C r^{s-1}
struct TipIntegral {
    double value = 0;
    double tail = 0;
    double exponent = 0;   // fitted s
    bool tail_flag = false;
};
TipIntegral integrate_with_tip(const std::vector<double>& r, const std::vector<double>& g);

// least-squares slope of log|y| against log x
struct SlopeFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};
SlopeFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y);

// fit on the nodes nearest to `samples` log-spaced points of [lo, hi]
SlopeFit decay_exponent_fit(const RadialField& u, double lo, double hi, int samples = 40);

struct FitWindow {
    double lo = 0, hi = 0;
};

// [10 r_1, min(0.1, R_out/40)] with r_1 the first positive node
FitWindow default_fit_window(const RadialField& u);

struct ProjectionOptions {
    // adds c r^p with p in (max exponent + 0.02, max exponent + 4] to absorb the leading remainder
    bool augment = true;
    double max_condition = 1e12;
    int samples = 40;       // log-spaced targets on the window
    int min_samples = 20;
};

struct AsymptoticsDecomposition {
    std::vector<double> exponents;
    std::vector<double> coefficients;
    double augment_exponent = 0;
    double augment_coefficient = 0;
    double condition = 0;
    FitWindow window;
    RadialField remainder;   // u - sum_j a_j r^{e_j} on every node
};

AsymptoticsDecomposition asymptotics_projection(const RadialField& u, const std::vector<double>& exponents,
                                                const FitWindow& window, const ProjectionOptions& opt = {});

// exponents alpha + 2k of the elements of `basis` that belong to spectrum entry `entry`
std::vector<double> mode_exponents(const AsymptoticsBasis& basis, int entry);

QuadResult duhamel_convolution(const RadialKernelFn& G, const RadialSourceFn& f, int m, double t, double r,
                               const DuhamelSpec& spec = {});

RadialSourceFn rho_power_source(double w, bool pure_cone = false);
RadialSourceFn chi_rho_power_source(const Cutoff& chi, double w);

struct TrendReport {
    std::vector<double> r_min;
    std::vector<double> sup;          // cumulative sup over r >= r_min
    std::vector<double> variation;    // sup[i+1]/sup[i] - 1
    bool stable = false;              // every variation below the threshold
    double threshold = 0.2;
};

struct EstimateGrid {
    std::vector<double> t = {0.01, 0.1, 1.0};
    std::vector<double> r_min = {1e-2, 1e-3, 1e-4};
    double r_max = 1.0;
    int per_decade = 2;
    double rel_tol = 1e-7;
};

// sup over the grid of |((H - sum psi^j H^j) * rho^{gamma-2})(t, r)| / rho(r)^gamma for a radial source
TrendReport estimate_one_check(const ConeModel& model, const ExtendedProfile& profile, double gamma,
                               const EstimateGrid& grid = {}, bool pure_cone = false);
// the single-point ratio used by estimate_one_check
double estimate_one_ratio(const ConeModel& model, double gamma, double t, double r, bool pure_cone = false,
                          double rel_tol = 1e-7);

// sup_t int_0^t int_{xi >= r_min} |c_k(tau, xi)| rho^{gamma-2} xi^{m-1} for the element (lambda, k)
TrendReport estimate_two_check(const ConeModel& model, double lambda, int k, double gamma,
                               const EstimateGrid& grid = {}, double growth_threshold = 0.2);

struct YoungExponents {
    double p = 2, delta = 0, epsilon = 0;
    double alpha1 = 0, alpha2 = 0, beta1 = 0, beta2 = 0;
};

// alpha1/p + alpha2(1 - 1/p) = 0 and beta1/p + beta2(1 - 1/p) = epsilon + m/p, each to 1e-12
void validate_young_exponents(const YoungExponents& e, int m);
// fills alpha1 and beta1 from the remaining exponents
YoungExponents solve_young_exponents(double p, double delta, double epsilon, double alpha2, double beta2, int m);
// finiteness conditions of both sup factors for the mode-0 kernel
std::vector<std::string> young_feasibility_violations(const YoungExponents& e, int m);

struct YoungReport {
    double lhs = 0;
    double f_norm = 0;
    double sup_a = 0;   // sup_r rho^{alpha2} D_{beta2}(T, r)
    double sup_b = 0;   // sup_r rho^{beta1} D_{alpha1 - delta p - m}(T, r)
    double rhs = 0;
    bool holds = false;
    double slack = 0;   // rhs / lhs
    bool tail_flag = false;
};

struct YoungSetup {
    double T = 1.0;
    double kappa = 0;            // probe f = scale * chi rho^kappa
    double scale = 1.0;
    double chi_R = 4.0;
    std::vector<double> sup_r;   // r samples for the sup factors; log grid on [1e-3, 8] when empty
    double rel_tol = 1e-7;       // Duhamel tolerance for the sup factors
    int J_core = 800;
    double q = 3;
    double R_out = 8;
    int K = 400;
    double tolerance = 0.01;
};

YoungReport young_bound_check(const ConeModel& model, const YoungExponents& e, const YoungSetup& setup);

}  // namespace conic
