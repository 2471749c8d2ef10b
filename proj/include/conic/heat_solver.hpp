#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "conic/cone_model.hpp"

namespace conic {

// Nodes 0 = r_0 < r_1 < ... < r_J = R_out. The tip node carries the regular
// value w(0) of w = v / r^{alpha_plus}.
struct RadialGrid {
    std::vector<double> r;

    // r_j = R_out (j/J)^q
    static RadialGrid graded(double R_out, int J, double q);
    // graded on [0, R_core] with J_core intervals, then steps of the last graded
    // spacing out to R_out (the final step absorbs the remainder)
    static RadialGrid composite(double R_core, int J_core, double q, double R_out);

    int J() const { return static_cast<int>(r.size()) - 1; }
    double R_out() const { return r.back(); }
};

struct TimeGrid {
    double T = 1.0;
    int K = 100;

    double dt() const { return T / K; }
    double t(int i) const { return T * i / K; }
};

// coef * t^t_power * profile(r). On (0, tip_edge] the profile equals r^tip_power.
struct RadialTerm {
    double coef = 1.0;
    int t_power = 0;
    std::function<double(double)> profile;
    double tip_power = 0;
    double tip_edge = 0;
    std::vector<double> breakpoints;

    double operator()(double t, double r) const;
};

struct ModeSource {
    std::vector<RadialTerm> terms;

    double operator()(double t, double r) const;
    bool empty() const { return terms.empty(); }
};

ModeSource operator+(ModeSource a, const ModeSource& b);
ModeSource operator*(double c, ModeSource a);

struct ModeProblem {
    double lambda = 0;
    int m = 3;
    double alpha_plus = 0;
    ModeSource source;
    std::function<double(double)> initial_w;   // w(0, r); zero when empty
};

ModeProblem make_mode_problem(double lambda, int m, ModeSource source);

struct SchemeParams {
    bool rannacher = true;
};

struct ModeSolution {
    double lambda = 0;
    double alpha_plus = 0;
    int m = 3;
    RadialGrid grid;
    TimeGrid time;
    std::vector<std::vector<double>> v;   // v[i][j] = v(t_i, r_j)
    std::vector<double> energy;           // sum_j V_j w_j^2 per time step

    double w(int i, int j) const;
};

ModeSolution solve_mode(const ModeProblem& problem, const RadialGrid& grid, const TimeGrid& time,
                        const SchemeParams& scheme = {});

// Finite-volume cell weights V_j = (r_{j+1/2}^d - r_{j-1/2}^d)/d, d = m + 2 alpha_plus.
std::vector<double> cell_volumes(const RadialGrid& grid, double d);

// int over cell j of r^{m-1+alpha} g(t, r) dr for each unknown node
std::vector<double> cell_source(const ModeSource& s, const RadialGrid& grid, int m, double alpha, double t);

// Link profile phi_e(sigma) = sqrt(vol) * zonal eigenfunction about the pole; phi_0 = 1.
double link_profile(const ConeModel& model, int entry, const LinkPoint& sigma);

struct ModeForcing {
    int entry = 0;
    ModeSource source;
};

struct HeatSolution {
    std::shared_ptr<const ConeModel> model;
    std::vector<int> entries;
    std::vector<ModeSolution> modes;

    // u(t_i, sigma, r_j) = sum_e v_e(t_i, r_j) phi_e(sigma)
    double synthesize(int i, const LinkPoint& sigma, int j) const;
};

HeatSolution solve_cauchy(std::shared_ptr<const ConeModel> model, const std::vector<ModeForcing>& f, double gamma,
                          const RadialGrid& grid, const TimeGrid& time, int threads = 1,
                          const SchemeParams& scheme = {});

struct ResidualReport {
    std::vector<double> max_residual;   // per mode, interior nodes j >= 2
    double max = 0;
};

// Crank-Nicolson residual (v^{n+1}-v^n)/dt - (L v^{n+1} + L v^n)/2 - (f^{n+1} + f^n)/2 by
// three-point differences; steps n >= 1.
ResidualReport residual_check(const HeatSolution& sol, const std::vector<ModeForcing>& f);
double mode_residual(const ModeSolution& s, const ModeSource& f);

// v* = t chi(r) r^{alpha_plus + 1/2} and its forcing
struct Manufactured {
    ModeSource source;
    std::function<double(double, double)> exact;
};
Manufactured manufactured_solution(double lambda, int m, const Cutoff& chi, double extra_power = 0.5);

// Source expressions: sums of products of numbers, t^n, r^p, rho^p and chi.
struct SeparableTerm {
    double coef = 1.0;
    int t_power = 0;
    double r_power = 0;
    double rho_power = 0;
    bool chi = false;
};

struct SourceExpr {
    std::vector<SeparableTerm> terms;
    std::string text;
};

SourceExpr parse_source_expr(const std::string& text);
ModeSource compile_source(const SourceExpr& e, const Cutoff& chi);
double evaluate_source(const SourceExpr& e, const Cutoff& chi, double t, double r);

}  // namespace conic
