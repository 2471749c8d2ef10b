// conic: command-line harness for the cone heat-kernel library.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "conic/acceptance.hpp"
#include "conic/errors.hpp"
#include "conic/heat_solver.hpp"
#include "conic/io_util.hpp"
#include "conic/mode_kernel.hpp"
#include "conic/weighted_analysis.hpp"
#include "json.hpp"

#ifndef CONIC_VERSION
#define CONIC_VERSION "dev"
#endif

using json = nlohmann::ordered_json;
using namespace conic;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

enum Exit { kOk = 0, kCheckFailed = 1, kConfig = 2, kExceptional = 3, kNumeric = 4, kIo = 5 };

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

// ---- config access ----

void allow_keys(const json& j, const std::set<std::string>& keys, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [k, v] : j.items())
        if (!keys.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
T get_or(const json& j, const char* key, T def) {
    if (!j.contains(key)) return def;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("key '") + key + "' has the wrong type");
    }
}

template <class T>
T require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    return get_or<T>(j, key, T{});
}

const json& block(const json& cfg, const char* name) {
    static const json empty = json::object();
    return cfg.contains(name) ? cfg.at(name) : empty;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// ---- model ----

struct Model {
    std::shared_ptr<const ConeModel> cone;
    std::string link_type;
    double radius = 0;
};

Model parse_model(const json& cfg) {
    if (!cfg.contains("model")) throw ConfigError("missing 'model' block");
    const json& j = cfg.at("model");
    allow_keys(j, {"link", "m", "lambda_max", "R_out"}, "model");
    const json& l = j.contains("link") ? j.at("link") : throw ConfigError("model: missing 'link'");
    std::string type = require<std::string>(l, "type", "model.link");
    double lam = get_or(j, "lambda_max", 200.0);
    double R = get_or(j, "R_out", 4.0);
    Model out;
    out.link_type = type;
    std::shared_ptr<const LinkSpectrum> sp;
    int m = 0;
    if (type == "sphere") {
        allow_keys(l, {"type", "radius"}, "model.link");
        out.radius = get_or(l, "radius", 1.0);
        m = get_or(j, "m", 3);
        sp = std::make_shared<const LinkSpectrum>(sphere_spectrum(m, out.radius, lam));
    } else if (type == "torus") {
        allow_keys(l, {"type", "lattice"}, "model.link");
        auto lattice = require<std::vector<std::vector<double>>>(l, "lattice", "model.link");
        m = static_cast<int>(lattice.size()) + 1;
        if (j.contains("m") && get_or(j, "m", 0) != m) throw ConfigError("model: m must equal lattice dimension + 1");
        sp = std::make_shared<const LinkSpectrum>(torus_spectrum(lattice, lam));
    } else if (type == "file") {
        allow_keys(l, {"type", "path", "link_dim"}, "model.link");
        int d = require<int>(l, "link_dim", "model.link");
        m = d + 1;
        if (j.contains("m") && get_or(j, "m", 0) != m) throw ConfigError("model: m must equal link_dim + 1");
        sp = std::make_shared<const LinkSpectrum>(load_spectrum(require<std::string>(l, "path", "model.link"), d));
    } else {
        throw ConfigError("model.link: unknown type '" + type + "'");
    }
    out.cone = std::make_shared<const ConeModel>(make_cone_model(m, sp, R));
    return out;
}

double first_weight(const json& cfg) {
    auto w = get_or(cfg, "weights", std::vector<double>{});
    if (w.size() != 1) throw ConfigError("'weights' must hold exactly one weight for a single-cone model");
    return w[0];
}

RadialGrid parse_grid(const json& j, double R_out) {
    allow_keys(j, {"R_core", "J", "q", "R_out"}, "grid");
    double Rc = get_or(j, "R_core", R_out), Ro = get_or(j, "R_out", R_out);
    int J = get_or(j, "J", 200);
    double q = get_or(j, "q", 2.0);
    if (J < 2 || q < 1 || Rc <= 0 || Ro < Rc) throw ConfigError("grid: need J >= 2, q >= 1, 0 < R_core <= R_out");
    return Ro > Rc ? RadialGrid::composite(Rc, J, q, Ro) : RadialGrid::graded(Ro, J, q);
}

TimeGrid parse_time(const json& j) {
    TimeGrid t{get_or(j, "T", 1.0), get_or(j, "K", 100)};
    if (!(t.T > 0) || t.K < 1) throw ConfigError("time grid: need T > 0 and K >= 1");
    return t;
}

ModeSource parse_source(const std::string& text, const Cutoff& chi) {
    if (text.empty() || text == "0") return ModeSource{};
    return compile_source(parse_source_expr(text), chi);
}

// ---- results ----

struct Check {
    std::string name;
    double measured = 0;
    std::string relation;
    double threshold = 0;
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

struct Outcome {
    std::vector<Check> checks;
    std::vector<std::pair<std::string, std::string>> artifacts;   // file name, body
    json summary = json::object();
    int error_code = kOk;
};

Check make_check(std::string name, double measured, std::string rel, double thr, bool pass, std::string detail = {}) {
    return {std::move(name), measured, std::move(rel), thr, pass, false, std::move(detail)};
}

struct Context {
    json cfg;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string config_path;
};

// ---- commands ----

Outcome cmd_spectrum(const Context& c) {
    allow_keys(c.cfg, {"command", "seed", "model"}, "config");
    auto m = parse_model(c.cfg);
    const auto& s = *m.cone->spectrum;
    Outcome o;
    std::ostringstream csv;
    csv << "lambda,multiplicity\n";
    for (const auto& e : s.entries) csv << num(e.lambda) << ',' << e.multiplicity << '\n';
    o.artifacts = {{"spectrum.csv", csv.str()}, {"spectrum.txt", format_spectrum(s)}};
    o.checks.push_back(make_check("entries", static_cast<double>(s.size()), ">=", 1, s.size() >= 1,
                                  s.disconnected_warning ? "lowest eigenvalue is not a simple zero" : ""));
    o.summary["cutoff"] = s.cutoff;
    return o;
}

Outcome cmd_index(const Context& c) {
    allow_keys(c.cfg, {"command", "seed", "model", "weights", "index"}, "config");
    auto m = parse_model(c.cfg);
    const json& b = block(c.cfg, "index");
    allow_keys(b, {"delta_lo", "delta_hi", "step", "skip_integers"}, "index");
    double lo = get_or(b, "delta_lo", -3.0), hi = get_or(b, "delta_hi", 3.0), step = get_or(b, "step", 0.25);
    bool skip_int = get_or(b, "skip_integers", true);
    if (!(step > 0) || !(hi >= lo)) throw ConfigError("index: need step > 0 and delta_hi >= delta_lo");
    int dim = m.cone->m;
    auto p = exceptional_set_D(m.cone->spectrum, dim, {std::min(-9.0 - dim, lo - 2), std::max(9.0, hi + 1)});
    auto e = extended_set_E(p);
    auto near_E = [&](double d) {
        for (const auto& x : e.elements)
            if (std::fabs(x.beta - d) < 1e-9) return true;
        return false;
    };
    std::ostringstream csv;
    csv << "delta,M,N,N_minus_2,identity_check\n";
    int bad = 0, rows = 0;
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int i = 0; i <= n; ++i) {
        double d = lo + i * step;
        if (skip_int && d == std::round(d)) continue;
        if (near_E(d) || near_E(d - 2)) continue;
        int M = index_function_M(p, d), N = index_function_N(e, d);
        int Ns = d > 2 ? index_function_N(e, d - 2) : 0;
        bool ok = M == N - Ns;
        bad += !ok;
        ++rows;
        csv << num(d) << ',' << M << ',' << N << ',' << Ns << ',' << (ok ? "true" : "false") << '\n';
    }
    Outcome o;
    o.artifacts = {{"index.csv", csv.str()}};
    o.checks.push_back(make_check("index identity", bad, "==", 0, bad == 0, std::to_string(rows) + " weights"));
    if (c.cfg.contains("weights")) {
        auto w = get_or(c.cfg, "weights", std::vector<double>{});
        std::vector<IndexProfile> ps(w.size(), p);
        int idx = fredholm_index(ps, WeightVector{w});
        o.summary["fredholm_index"] = idx;
    }
    return o;
}

Outcome cmd_basis(const Context& c) {
    allow_keys(c.cfg, {"command", "seed", "model", "weights"}, "config");
    auto m = parse_model(c.cfg);
    double g = first_weight(c.cfg);
    int dim = m.cone->m;
    auto p = exceptional_set_D(m.cone->spectrum, dim, {2.0 - dim, std::max(g, 0.0) + 1});
    auto e = extended_set_E(p);
    auto basis = asymptotics_basis(*m.cone, e, g);
    auto harm = harmonic_basis(*m.cone, p, g);
    std::ostringstream csv;
    csv << "alpha,k,entry,mode_id,lambda,order\n";
    for (const auto& el : basis.elements)
        csv << num(el.alpha) << ',' << el.k << ',' << el.entry << ',' << el.mode_id << ',' << num(el.lambda) << ','
            << num(el.order()) << '\n';
    Outcome o;
    o.artifacts = {{"basis.csv", csv.str()}};
    int N = index_function_N(e, g);
    o.checks.push_back(make_check("dim V equals N", static_cast<double>(basis.elements.size()), "==", N,
                                  static_cast<int>(basis.elements.size()) == N));
    o.summary["dim_H"] = harm.elements.size();
    o.summary["dim_V"] = basis.elements.size();
    return o;
}

Outcome cmd_kernel_check(const Context& c) {
    allow_keys(c.cfg, {"command", "seed", "model", "kernel-check"}, "config");
    auto m = parse_model(c.cfg);
    const json& b = block(c.cfg, "kernel-check");
    allow_keys(b, {"t", "r", "theta", "r_prime", "oracle", "threshold", "tail_tol"}, "kernel-check");
    auto ts = get_or(b, "t", std::vector<double>{0.1, 0.5, 2.0});
    auto rs = get_or(b, "r", std::vector<double>{0.1, 0.9, 2.0});
    auto ths = get_or(b, "theta", std::vector<double>{0.0, 1.0, 2.5, kPi});
    double rp = get_or(b, "r_prime", 1.0), thr = get_or(b, "threshold", 1e-6);
    double tol = get_or(b, "tail_tol", kKernelTailTol);
    std::string oracle = get_or<std::string>(b, "oracle", "none");
    if (oracle != "none" && oracle != "euclidean") throw ConfigError("kernel-check: oracle must be none or euclidean");
    if (oracle == "euclidean" && !(m.link_type == "sphere" && m.radius == 1.0 && m.cone->m == 3))
        throw ConfigError("kernel-check: the Euclidean oracle needs the S^2(1) link with m = 3");
    const auto& G = *m.cone->geometry;
    std::ostringstream csv;
    csv << "t,r,theta,r_prime,kernel,oracle,rel_err,modes,tail_warning\n";
    double worst = 0;
    int tails = 0;
    for (double t : ts)
        for (double r : rs)
            for (double th : ths) {
                ConePoint x{G.pole(), r}, y{G.point_at_distance(th), rp};
                auto v = assemble_kernel_adaptive(*m.cone, t, x, y, tol);
                tails += v.tail_warning;
                csv << num(t) << ',' << num(r) << ',' << num(th) << ',' << num(rp) << ',' << num(v.value);
                if (oracle == "euclidean") {
                    double d2 = r * r + rp * rp - 2 * r * rp * std::cos(th);
                    double g = std::pow(4 * kPi * t, -1.5) * std::exp(-d2 / (4 * t));
                    double e = std::fabs(v.value - g) / g;
                    worst = std::max(worst, e);
                    csv << ',' << num(g) << ',' << num(e);
                } else {
                    csv << ",,";
                }
                csv << ',' << v.modes_used << ',' << (v.tail_warning ? "true" : "false") << '\n';
            }
    Outcome o;
    o.artifacts = {{"kernel.csv", csv.str()}};
    o.checks.push_back(make_check("mode-sum tail converged", tails, "==", 0, tails == 0));
    if (oracle == "euclidean")
        o.checks.push_back(make_check("Euclidean reconstruction", worst, "<", thr, worst < thr));
    return o;
}

Outcome cmd_solve(const Context& c) {
    allow_keys(c.cfg, {"command", "seed", "model", "weights", "solve"}, "config");
    auto m = parse_model(c.cfg);
    double g = first_weight(c.cfg);
    const json& b = block(c.cfg, "solve");
    allow_keys(b, {"source", "entries", "grid", "T", "K", "rannacher", "output_times"}, "solve");
    auto src = parse_source(get_or<std::string>(b, "source", "0"), m.cone->chi);
    auto entries = get_or(b, "entries", std::vector<int>{0});
    std::vector<ModeForcing> f;
    for (int e : entries) {
        if (e < 0 || e >= static_cast<int>(m.cone->spectrum->size()))
            throw ConfigError("solve: entry " + std::to_string(e) + " is outside the spectrum");
        f.push_back({e, src});
    }
    auto grid = parse_grid(block(b, "grid"), m.cone->R_out);
    auto time = parse_time(b);
    auto outs = get_or(b, "output_times", std::vector<double>{time.T});
    auto sol = solve_cauchy(m.cone, f, g, grid, time, c.threads, SchemeParams{get_or(b, "rannacher", true)});
    double maxu = 0;
    bool finite = true;
    for (const auto& s : sol.modes)
        for (const auto& row : s.v)
            for (double v : row) {
                finite = finite && std::isfinite(v);
                maxu = std::max(maxu, std::fabs(v));
            }
    std::ostringstream csv;
    csv << "entry,lambda,t,r,v\n";
    for (double t : outs) {
        int i = static_cast<int>(std::lround(t / time.dt()));
        if (i < 0 || i > time.K) throw ConfigError("solve: output time outside [0, T]");
        for (std::size_t k = 0; k < sol.modes.size(); ++k)
            for (int j = 0; j <= grid.J(); ++j)
                csv << sol.entries[k] << ',' << num(sol.modes[k].lambda) << ',' << num(time.t(i)) << ','
                    << num(grid.r[j]) << ',' << num(sol.modes[k].v[i][j]) << '\n';
    }
    Outcome o;
    o.artifacts = {{"solution.csv", csv.str()}};
    o.checks.push_back(make_check("solution finite", maxu, "finite", 0, finite));
    o.summary["max_abs_u"] = maxu;
    if (!f[0].source.empty()) o.summary["max_residual"] = residual_check(sol, f).max;
    return o;
}

Outcome cmd_verify_decay(const Context& c) {
    allow_keys(c.cfg, {"command", "seed", "model", "weights", "verify-decay"}, "config");
    auto m = parse_model(c.cfg);
    double g = first_weight(c.cfg);
    const json& b = block(c.cfg, "verify-decay");
    allow_keys(b, {"entry", "grid", "T", "K", "times", "window", "tolerance"}, "verify-decay");
    int entry = get_or(b, "entry", 0);
    if (entry < 0 || entry >= static_cast<int>(m.cone->spectrum->size()))
        throw ConfigError("verify-decay: entry outside the spectrum");
    auto grid = parse_grid(block(b, "grid"), m.cone->R_out);
    auto time = parse_time(b);
    auto times = get_or(b, "times", std::vector<double>{0.1 * time.T, 0.5 * time.T, time.T});
    double tol = get_or(b, "tolerance", 0.05);
    SourceExpr e;
    e.terms.push_back({1.0, 0, g - 2, 0.0, true});
    auto sol = solve_cauchy(m.cone, {{entry, compile_source(e, m.cone->chi)}}, g, grid, time, c.threads);
    int dim = m.cone->m;
    auto ext = extended_set_E(exceptional_set_D(m.cone->spectrum, dim, {2.0 - dim, std::max(g, 0.0) + 1}));
    std::vector<double> removed;
    if (g > 0) removed = mode_exponents(asymptotics_basis(*m.cone, ext, g), entry);
    double ap = sol.modes[0].alpha_plus;
    double predicted = std::min(g, ap + 2.0 * static_cast<double>(removed.size()));
    std::ostringstream csv;
    csv << "t,removed,predicted,fitted,r2,window_lo,window_hi\n";
    double worst = 0;
    bool above = true;
    for (double t : times) {
        int i = static_cast<int>(std::lround(t / time.dt()));
        if (i < 1 || i > time.K) throw ConfigError("verify-decay: times must lie in (0, T]");
        RadialField u = mode_slice(sol.modes[0], i);
        FitWindow w = default_fit_window(u);
        if (b.contains("window")) {
            auto v = get_or(b, "window", std::vector<double>{});
            if (v.size() != 2 || !(v[0] > 0 && v[1] > v[0])) throw ConfigError("verify-decay: window is [lo, hi]");
            w = {v[0], v[1]};
        }
        RadialField target = removed.empty() ? u : asymptotics_projection(u, removed, w).remainder;
        auto fit = decay_exponent_fit(target, w.lo, w.hi);
        worst = std::max(worst, std::fabs(fit.slope - predicted));
        above = above && fit.slope >= g - tol;
        std::string rem;
        for (double x : removed) rem += (rem.empty() ? "" : " ") + num(x);
        csv << num(time.t(i)) << ',' << rem << ',' << num(predicted) << ',' << num(fit.slope) << ',' << num(fit.r2)
            << ',' << num(w.lo) << ',' << num(w.hi) << '\n';
    }
    Outcome o;
    o.artifacts = {{"decay.csv", csv.str()}};
    o.checks.push_back(make_check("decay exponent matches prediction", worst, "<=", tol, worst <= tol));
    o.checks.push_back(make_check("decay exponent at least gamma - tol", above ? 1 : 0, "==", 1, above));
    o.summary["measured_constant"] = worst;
    o.summary["trend_ratio"] = nullptr;
    o.summary["pass"] = worst <= tol && above;
    return o;
}

Outcome cmd_estimate_check(const Context& c) {
    allow_keys(c.cfg, {"command", "seed", "model", "weights", "estimate-check"}, "config");
    auto m = parse_model(c.cfg);
    double g = first_weight(c.cfg);
    const json& b = block(c.cfg, "estimate-check");
    allow_keys(b, {"kind", "lambda", "k", "t", "r_min", "r_max", "per_decade", "rel_tol", "pure_cone", "threshold",
                   "expect", "growth_factor"},
               "estimate-check");
    EstimateGrid grid;
    grid.t = get_or(b, "t", grid.t);
    grid.r_min = get_or(b, "r_min", grid.r_min);
    grid.r_max = get_or(b, "r_max", grid.r_max);
    grid.per_decade = get_or(b, "per_decade", grid.per_decade);
    grid.rel_tol = get_or(b, "rel_tol", grid.rel_tol);
    if (grid.r_min.size() < 2) throw ConfigError("estimate-check: need at least two r_min levels");
    std::string kind = get_or<std::string>(b, "kind", "remainder");
    std::string expect = get_or<std::string>(b, "expect", "stable");
    double thr = get_or(b, "threshold", 0.2), growth = get_or(b, "growth_factor", 2.0);
    if (expect != "stable" && expect != "growth") throw ConfigError("estimate-check: expect is stable or growth");
    TrendReport t;
    if (kind == "remainder") {
        int dim = m.cone->m;
        auto ext = extended_set_E(exceptional_set_D(m.cone->spectrum, dim, {std::min(g, 0.0) - 1, std::max(g, 0.0) + 2}));
        t = estimate_one_check(*m.cone, ext, g, grid, get_or(b, "pure_cone", false));
    } else if (kind == "coefficient") {
        t = estimate_two_check(*m.cone, require<double>(b, "lambda", "estimate-check"), get_or(b, "k", 0), g, grid,
                               thr);
    } else {
        throw ConfigError("estimate-check: kind is remainder or coefficient");
    }
    std::ostringstream csv;
    csv << "r_min,sup,variation\n";
    for (std::size_t i = 0; i < t.sup.size(); ++i)
        csv << num(t.r_min[i]) << ',' << num(t.sup[i]) << ',' << (i ? num(t.variation[i - 1]) : "") << '\n';
    Outcome o;
    o.artifacts = {{"estimate.csv", csv.str()}};
    double trend;
    bool pass;
    if (expect == "stable") {
        trend = 0;
        for (double v : t.variation) trend = std::max(trend, std::fabs(v));
        pass = trend < thr;
        o.checks.push_back(make_check("sup stable across refinements", trend, "<", thr, pass));
    } else {
        trend = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < t.sup.size(); ++i) trend = std::min(trend, t.sup[i] / t.sup[i - 1]);
        pass = trend > growth;
        o.checks.push_back(make_check("sup grows per refinement", trend, ">", growth, pass));
    }
    o.summary["measured_constant"] = t.sup.back();
    o.summary["trend_ratio"] = trend;
    o.summary["pass"] = pass;
    return o;
}

Outcome cmd_young_check(const Context& c) {
    allow_keys(c.cfg, {"command", "seed", "model", "young-check"}, "config");
    auto m = parse_model(c.cfg);
    const json& b = block(c.cfg, "young-check");
    allow_keys(b, {"p", "delta", "epsilon", "alpha1", "alpha2", "beta1", "beta2", "kappa", "scale", "T", "chi_R",
                   "sup_r", "rel_tol", "J_core", "q", "R_out", "K", "tolerance"},
               "young-check");
    const std::string w = "young-check";
    int dim = m.cone->m;
    YoungExponents e = solve_young_exponents(require<double>(b, "p", w), require<double>(b, "delta", w),
                                             require<double>(b, "epsilon", w), require<double>(b, "alpha2", w),
                                             require<double>(b, "beta2", w), dim);
    if (b.contains("alpha1")) e.alpha1 = get_or(b, "alpha1", 0.0);
    if (b.contains("beta1")) e.beta1 = get_or(b, "beta1", 0.0);
    validate_young_exponents(e, dim);
    auto viol = young_feasibility_violations(e, dim);
    if (!viol.empty()) throw ConfigError("young-check: " + viol.front());
    YoungSetup s;
    s.kappa = require<double>(b, "kappa", w);
    s.scale = get_or(b, "scale", s.scale);
    s.T = get_or(b, "T", s.T);
    s.chi_R = get_or(b, "chi_R", s.chi_R);
    s.sup_r = get_or(b, "sup_r", s.sup_r);
    s.rel_tol = get_or(b, "rel_tol", s.rel_tol);
    s.J_core = get_or(b, "J_core", s.J_core);
    s.q = get_or(b, "q", s.q);
    s.R_out = get_or(b, "R_out", s.R_out);
    s.K = get_or(b, "K", s.K);
    s.tolerance = get_or(b, "tolerance", s.tolerance);
    auto r = young_bound_check(*m.cone, e, s);
    std::ostringstream csv;
    csv << "p,delta,epsilon,alpha1,alpha2,beta1,beta2,kappa,lhs,f_norm,sup_a,sup_b,rhs,slack,tail_flag\n";
    csv << num(e.p) << ',' << num(e.delta) << ',' << num(e.epsilon) << ',' << num(e.alpha1) << ',' << num(e.alpha2)
        << ',' << num(e.beta1) << ',' << num(e.beta2) << ',' << num(s.kappa) << ',' << num(r.lhs) << ','
        << num(r.f_norm) << ',' << num(r.sup_a) << ',' << num(r.sup_b) << ',' << num(r.rhs) << ',' << num(r.slack)
        << ',' << (r.tail_flag ? "true" : "false") << '\n';
    Outcome o;
    o.artifacts = {{"young.csv", csv.str()}};
    double ratio = r.rhs > 0 ? r.lhs / r.rhs : (r.lhs == 0 ? 0 : std::numeric_limits<double>::infinity());
    o.checks.push_back(make_check("lhs <= rhs (1 + tol)", ratio, "<=", 1 + s.tolerance, r.holds,
                                  r.tail_flag ? "tail flag raised" : ""));
    o.summary["measured_constant"] = r.slack;
    o.summary["trend_ratio"] = nullptr;
    o.summary["pass"] = r.holds;
    return o;
}

int code_for(const std::exception& e) {
    if (dynamic_cast<const ExceptionalWeight*>(&e)) return kExceptional;
    if (dynamic_cast<const ConfigError*>(&e)) return kConfig;
    if (dynamic_cast<const NumericError*>(&e)) return kNumeric;
    if (dynamic_cast<const IoError*>(&e)) return kIo;
    return kNumeric;
}

std::string describe(const std::exception& e) {
    if (auto x = dynamic_cast<const ExceptionalWeight*>(&e))
        return "exceptional weight at cone index " + std::to_string(x->cone_index()) + ": weight " +
               num(x->weight()) + ", nearest exceptional value " + num(x->nearest()) + " (" + e.what() + ")";
    return e.what();
}

Outcome cmd_acceptance(const Context& c) {
    allow_keys(c.cfg, {"command", "seed", "criteria", "solver_gammas", "decay_window"}, "suite");
    AcceptanceSettings s;
    s.seed = c.seed;
    s.threads = c.threads;
    s.solver_gammas = get_or(c.cfg, "solver_gammas", s.solver_gammas);
    if (c.cfg.contains("decay_window")) {
        auto w = get_or(c.cfg, "decay_window", std::vector<double>{});
        if (w.size() != 2 || !(w[0] > 0 && w[1] > w[0])) throw ConfigError("suite: decay_window is [lo, hi]");
        s.decay_lo = w[0];
        s.decay_hi = w[1];
    }
    std::vector<int> ids;
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
    ids = get_or(c.cfg, "criteria", ids);
    Outcome o;
    for (int id : ids) {
        criterion_name(id);
        CheckResult r;
        try {
            r = run_criterion(id, s);
        } catch (const std::exception& e) {
            r.id = id;
            r.name = criterion_name(id);
            r.metric = "error";
            r.detail = describe(e);
            if (o.error_code == kOk) o.error_code = code_for(e);
        }
        std::cout << format_check_line(r) << std::endl;
        char file[64];
        std::snprintf(file, sizeof file, "criterion_%02d.csv", id);
        if (!r.csv.empty()) o.artifacts.emplace_back(file, r.csv);
        Check ch{std::to_string(id) + " " + r.name, r.measured, r.relation, r.threshold, r.pass, r.skipped,
                 r.metric + (r.detail.empty() ? "" : "; " + r.detail)};
        o.checks.push_back(ch);
    }
    return o;
}

json load_config(const std::string& path, const std::string& command, std::string& resolved) {
    if (path.empty()) throw ConfigError("--config is required");
    fs::path p(path);
    if (command == "acceptance" && fs::is_directory(p)) p /= "suite.json";
    resolved = p.string();
    std::string text;
    try {
        text = read_file(resolved);
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw IoError(e.what());
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(resolved + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(resolved + ": top level must be an object");
    if (j.contains("command") && get_or<std::string>(j, "command", "") != command)
        throw ConfigError(resolved + ": config is for command '" + get_or<std::string>(j, "command", "") + "'");
    return j;
}

json report_json(const std::string& command, const std::string& hash, const Context& c, const Outcome& o,
                 double seconds, int exit_code, const std::string& error) {
    json r;
    r["command"] = command;
    r["config"] = c.config_path;
    r["config_hash"] = hash;
    r["seed"] = c.seed;
    r["tool_version"] = CONIC_VERSION;
    json checks = json::array();
    for (const auto& ch : o.checks) {
        json x;
        x["name"] = ch.name;
        x["measured"] = ch.measured;
        x["relation"] = ch.relation;
        if (ch.relation == "finite")
            x["threshold"] = nullptr;
        else
            x["threshold"] = ch.threshold;
        x["pass"] = ch.pass;
        x["status"] = ch.skipped ? "SKIP" : ch.pass ? "PASS" : "FAIL";
        if (!ch.detail.empty()) x["detail"] = ch.detail;
        checks.push_back(x);
    }
    r["checks"] = checks;
    if (!o.summary.empty()) r["summary"] = o.summary;
    if (!error.empty()) r["error"] = error;
    r["exit_code"] = exit_code;
    r["wall_time_s"] = seconds;
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heat kernels, weighted spaces and model solves on cones"};
    app.set_version_flag("--version", CONIC_VERSION);
    std::string config, out = "conic_out";
    std::int64_t seed = -1;
    int threads = 1;
    app.add_option("--config", config, "experiment config (JSON); a suite directory for acceptance");
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", seed, "seed for randomized sampling (overrides the config)");
    app.add_option("--threads", threads, "worker threads for mode solves")->check(CLI::Range(1, 256));
    app.require_subcommand(1);
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"spectrum", "tabulate the link spectrum"},
        {"index", "index functions M, N and the shift identity on a weight grid"},
        {"basis", "enumerate the discrete asymptotics basis"},
        {"kernel-check", "assemble the cone heat kernel and compare with an oracle"},
        {"solve", "solve the Cauchy problem mode by mode"},
        {"verify-decay", "tip decay exponents of a solve after removing asymptotics"},
        {"estimate-check", "refinement trends of the kernel remainder and coefficient bounds"},
        {"young-check", "weighted Young inequality for the mode-0 kernel"},
        {"acceptance", "run the acceptance suite"}};
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kConfig;
    }
    std::string command = app.get_subcommands().front()->get_name();

    auto t0 = std::chrono::steady_clock::now();
    Context c;
    c.threads = threads;
    Outcome o;
    std::string hash, error;
    int code = kOk;
    bool have_config = false;
    try {
        c.cfg = load_config(config, command, c.config_path);
        have_config = true;
        std::int64_t cfg_seed = get_or<std::int64_t>(c.cfg, "seed", 20240611);
        c.seed = static_cast<std::uint64_t>(seed >= 0 ? seed : cfg_seed);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(fnv1a(command + "\n" + c.cfg.dump() + "\nseed=" +
                                                            std::to_string(c.seed))));
        hash = buf;
        if (command == "spectrum") o = cmd_spectrum(c);
        else if (command == "index") o = cmd_index(c);
        else if (command == "basis") o = cmd_basis(c);
        else if (command == "kernel-check") o = cmd_kernel_check(c);
        else if (command == "solve") o = cmd_solve(c);
        else if (command == "verify-decay") o = cmd_verify_decay(c);
        else if (command == "estimate-check") o = cmd_estimate_check(c);
        else if (command == "young-check") o = cmd_young_check(c);
        else o = cmd_acceptance(c);
        code = o.error_code;
        if (code == kOk)
            for (const auto& ch : o.checks)
                if (!ch.pass && !ch.skipped) code = kCheckFailed;
    } catch (const std::exception& e) {
        code = code_for(e);
        error = describe(e);
        std::cerr << "error: " << error << '\n';
    }
    if (command != "acceptance")
        for (const auto& ch : o.checks)
            std::cout << (ch.skipped ? "SKIP" : ch.pass ? "PASS" : "FAIL") << "  " << ch.name << ": " << num(ch.measured)
                      << " (pass if " << ch.relation << (ch.relation == "finite" ? "" : " " + num(ch.threshold)) << ')'
                      << (ch.detail.empty() ? "" : "; " + ch.detail) << '\n';

    if (have_config) {
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        try {
            fs::create_directories(out);
            for (const auto& [name, body] : o.artifacts) write_file_atomic((fs::path(out) / name).string(), body);
            write_file_atomic((fs::path(out) / "report.json").string(),
                              report_json(command, hash, c, o, sec, code, error).dump(2) + "\n");
        } catch (const std::exception& e) {
            std::cerr << "error: cannot write artifacts: " << e.what() << '\n';
            return kIo;
        }
    }
    return code;
}
