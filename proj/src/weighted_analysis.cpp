#include "conic/weighted_analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "conic/errors.hpp"
#include "conic/summation.hpp"

namespace conic {

namespace {

double rho_of(double r, bool pure_cone) { return pure_cone ? r : std::min(r, 1.0); }

std::vector<double> log_grid(double lo, double hi, int per_decade) {
    std::vector<double> out;
    const int n = std::max(1, static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade - 1e-9)));
    for (int i = 0; i <= n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / n));
    return out;
}

TrendReport make_trend(std::vector<double> r_min, std::vector<double> sup, double threshold) {
    TrendReport rep;
    rep.r_min = std::move(r_min);
    rep.sup = std::move(sup);
    rep.threshold = threshold;
    rep.stable = rep.sup.size() >= 2;
    for (std::size_t i = 0; i + 1 < rep.sup.size(); ++i) {
        double v = rep.sup[i + 1] / rep.sup[i] - 1;
        rep.variation.push_back(v);
        if (!(std::abs(v) < threshold)) rep.stable = false;
    }
    return rep;
}

// nodes nearest (in log r) to n log-spaced targets on the window
std::vector<std::size_t> log_sample(const std::vector<double>& r, double lo, double hi, int n) {
    std::vector<std::size_t> in;
    for (std::size_t j = 0; j < r.size(); ++j)
        if (r[j] > 0 && r[j] >= lo && r[j] <= hi) in.push_back(j);
    if (in.empty() || n < 2) return in;
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    for (int i = 0; i < n; ++i) {
        const double target = std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1);
        while (pos + 1 < in.size() && std::abs(std::log(r[in[pos + 1]]) - target) <= std::abs(std::log(r[in[pos]]) - target))
            ++pos;
        if (out.empty() || out.back() != in[pos]) out.push_back(in[pos]);
    }
    return out;
}

}  // namespace

RadialField mode_slice(const ModeSolution& s, int time_index) {
    if (time_index < 0 || time_index >= static_cast<int>(s.v.size())) throw ConfigError("mode_slice: time index out of range");
    return {s.grid.r, s.v[time_index]};
}

WeightedNormReport weighted_sup_norm(const RadialField& u, double gamma, int j_max, bool pure_cone) {
    if (j_max < 0 || j_max > 1) throw ConfigError("weighted_sup_norm: derivative order must be 0 or 1");
    if (u.r.size() != u.u.size()) throw ConfigError("weighted_sup_norm: field size mismatch");
    WeightedNormReport rep;
    rep.kind = NormKind::SupWeighted;
    rep.gamma = gamma;
    double s0 = 0, s1 = 0;
    const std::size_t n = u.r.size();
    for (std::size_t j = 0; j < n; ++j) {
        if (!(u.r[j] > 0)) continue;
        if (rep.nodes == 0) rep.r_min = u.r[j];
        rep.r_max = u.r[j];
        ++rep.nodes;
        s0 = std::max(s0, std::pow(rho_of(u.r[j], pure_cone), -gamma) * std::abs(u.u[j]));
        if (j_max == 1 && j >= 1 && j + 1 < n && u.r[j - 1] > 0) {
            double hm = u.r[j] - u.r[j - 1], hp = u.r[j + 1] - u.r[j];
            double d = (-hp / (hm * (hm + hp))) * u.u[j - 1] + ((hp - hm) / (hm * hp)) * u.u[j] +
                       (hm / (hp * (hm + hp))) * u.u[j + 1];
            s1 = std::max(s1, std::pow(rho_of(u.r[j], pure_cone), 1 - gamma) * std::abs(d));
        }
    }
    rep.value = s0 + s1;
    return rep;
}

TipIntegral integrate_with_tip(const std::vector<double>& r, const std::vector<double>& g) {
    if (r.size() != g.size() || r.size() < 2) throw ConfigError("integrate_with_tip: need at least two samples");
    TipIntegral out;
    CompensatedSum body;
    double first_cell = 0;
    for (std::size_t j = 0; j + 1 < r.size(); ++j) {
        double c = 0.5 * (r[j + 1] - r[j]) * (g[j] + g[j + 1]);
        if (j == 0) first_cell = c;
        body.add(c);
    }
    const std::size_t nfit = std::min<std::size_t>(8, r.size());
    std::vector<double> x, y;
    for (std::size_t j = 0; j < nfit; ++j)
        if (g[j] != 0) {
            x.push_back(r[j]);
            y.push_back(g[j]);
        }
    if (x.size() >= 3) {
        SlopeFit f = log_log_fit(x, y);
        out.exponent = f.slope + 1;
        if (out.exponent > 0.02)
            out.tail = g[0] * r[0] / out.exponent;
        else
            out.tail_flag = true;
    } else if (g[0] != 0) {
        out.tail_flag = true;
    }
    out.value = body.value() + out.tail;
    if (!out.tail_flag && (std::abs(out.tail) > 0.1 * std::abs(out.value) || std::abs(first_cell) > 0.1 * std::abs(out.value)))
        out.tail_flag = true;
    return out;
}

WeightedNormReport weighted_lp_norm(const RadialField& u, double gamma, double p, int m, double link_measure,
                                    bool pure_cone) {
    if (!(p >= 1) || !std::isfinite(p)) throw ConfigError("weighted_lp_norm: p must lie in [1, inf)");
    if (u.r.size() != u.u.size()) throw ConfigError("weighted_lp_norm: field size mismatch");
    WeightedNormReport rep;
    rep.kind = NormKind::LpWeighted;
    rep.gamma = gamma;
    rep.p = p;
    std::vector<double> r, g;
    for (std::size_t j = 0; j < u.r.size(); ++j) {
        if (!(u.r[j] > 0)) continue;
        double rh = rho_of(u.r[j], pure_cone);
        r.push_back(u.r[j]);
        g.push_back(std::pow(std::pow(rh, -gamma) * std::abs(u.u[j]), p) * std::pow(rh, -m) * std::pow(u.r[j], m - 1));
    }
    rep.nodes = static_cast<int>(r.size());
    if (r.size() < 2) throw ConfigError("weighted_lp_norm: fewer than two positive nodes");
    rep.r_min = r.front();
    rep.r_max = r.back();
    TipIntegral I = integrate_with_tip(r, g);
    rep.tail_flag = I.tail_flag;
    rep.tail_estimate = I.tail;
    rep.value = std::pow(link_measure * I.value, 1 / p);
    return rep;
}

SlopeFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("log_log_fit: need at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || y[i] == 0) throw ConfigError("log_log_fit: nonpositive abscissa or zero ordinate");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(std::abs(y[i])));
        sx += lx.back();
        sy += ly.back();
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 0)) throw ConfigError("log_log_fit: degenerate abscissae");
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

SlopeFit decay_exponent_fit(const RadialField& u, double lo, double hi, int samples) {
    std::vector<double> x, y;
    for (std::size_t j : log_sample(u.r, lo, hi, samples))
        if (u.u[j] != 0) {
            x.push_back(u.r[j]);
            y.push_back(u.u[j]);
        }
    if (x.size() < 3) throw ConfigError("decay_exponent_fit: fewer than three usable nodes in the window");
    return log_log_fit(x, y);
}

FitWindow default_fit_window(const RadialField& u) {
    double r1 = 0;
    for (double r : u.r)
        if (r > 0) {
            r1 = r;
            break;
        }
    if (!(r1 > 0) || u.r.empty()) throw ConfigError("default_fit_window: field has no positive nodes");
    return {10 * r1, std::min(0.1, u.r.back() / 40)};
}

AsymptoticsDecomposition asymptotics_projection(const RadialField& u, const std::vector<double>& exponents,
                                                const FitWindow& window, const ProjectionOptions& opt) {
    AsymptoticsDecomposition out;
    out.exponents = exponents;
    out.window = window;
    std::vector<double> r, y;
    for (std::size_t j : log_sample(u.r, window.lo, window.hi, opt.samples)) {
        r.push_back(u.r[j]);
        y.push_back(u.u[j]);
    }
    if (static_cast<int>(r.size()) < opt.min_samples)
        throw ConfigError("asymptotics_projection: " + std::to_string(r.size()) + " nodes in the fit window, need " +
                          std::to_string(opt.min_samples));

    const bool augment = opt.augment && !exponents.empty();
    const int nb = static_cast<int>(exponents.size());
    const int n = static_cast<int>(r.size());
    Eigen::Map<const Eigen::VectorXd> rhs(y.data(), n);

    struct Fit {
        Eigen::VectorXd coef;
        double cond = 0;
        double rss = 0;
    };
    auto fit = [&](std::optional<double> extra) {
        const int nc = nb + (extra ? 1 : 0);
        Fit res;
        if (nc == 0) {
            res.rss = rhs.squaredNorm();
            return res;
        }
        Eigen::MatrixXd A(n, nc);
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < nb; ++c) A(i, c) = std::pow(r[i], exponents[c]);
            if (extra) A(i, nb) = std::pow(r[i], *extra);
        }
        Eigen::VectorXd scale = A.colwise().norm().transpose();
        for (int c = 0; c < nc; ++c) A.col(c) /= scale[c];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& s = svd.singularValues();
        res.cond = s[nc - 1] > 0 ? s[0] / s[nc - 1] : std::numeric_limits<double>::infinity();
        if (res.cond > opt.max_condition) return res;
        res.coef = svd.solve(rhs);
        res.rss = (A * res.coef - rhs).squaredNorm();
        res.coef = res.coef.cwiseQuotient(scale);
        return res;
    };

    Fit best;
    if (augment) {
        const double emax = *std::max_element(exponents.begin(), exponents.end());
        auto obj = [&](double pw) {
            Fit f = fit(pw);
            return f.cond > opt.max_condition ? std::numeric_limits<double>::max() : f.rss;
        };
        auto mn = boost::math::tools::brent_find_minima(obj, emax + 0.02, emax + 4.0, 40);
        out.augment_exponent = mn.first;
        best = fit(out.augment_exponent);
    } else {
        best = fit(std::nullopt);
    }
    out.condition = best.cond;
    if (best.cond > opt.max_condition) {
        std::ostringstream os;
        os << "asymptotics_projection: ill-conditioned fit, condition number " << best.cond;
        throw NumericError(os.str());
    }
    for (int c = 0; c < nb; ++c) out.coefficients.push_back(best.coef[c]);
    if (augment) out.augment_coefficient = best.coef[nb];

    out.remainder.r = u.r;
    out.remainder.u = u.u;
    for (std::size_t j = 0; j < u.r.size(); ++j)
        for (int c = 0; c < nb; ++c) {
            double e = exponents[c];
            double b = u.r[j] > 0 ? std::pow(u.r[j], e) : (e == 0 ? 1.0 : e > 0 ? 0.0 : std::nan(""));
            out.remainder.u[j] -= out.coefficients[c] * b;
        }
    return out;
}

std::vector<double> mode_exponents(const AsymptoticsBasis& basis, int entry) {
    std::vector<double> e;
    for (const auto& el : basis.elements)
        if (el.entry == entry && std::find(e.begin(), e.end(), el.order()) == e.end()) e.push_back(el.order());
    std::sort(e.begin(), e.end());
    return e;
}

QuadResult duhamel_convolution(const RadialKernelFn& G, const RadialSourceFn& f, int m, double t, double r,
                               const DuhamelSpec& spec) {
    return duhamel_radial(G, f, m, t, r, spec);
}

RadialSourceFn rho_power_source(double w, bool pure_cone) {
    RadialSourceFn f;
    f.eval = [w, pure_cone](double, double xi) { return std::pow(rho_of(xi, pure_cone), w); };
    if (!pure_cone) f.breakpoints = {1.0};
    return f;
}

RadialSourceFn chi_rho_power_source(const Cutoff& chi, double w) {
    RadialSourceFn f;
    f.eval = [chi, w](double, double xi) { return chi(xi) * std::pow(std::min(xi, 1.0), w); };
    f.breakpoints = {1.0, chi.inner(), chi.outer()};
    f.support = chi.outer();
    return f;
}

double estimate_one_ratio(const ConeModel& model, double gamma, double t, double r, bool pure_cone, double rel_tol) {
    const ModeKernel k = make_mode_kernel(model.spectrum->entries.at(0).lambda, model.m);
    const int n = expansion_terms_below(k, gamma);
    const double chi = pure_cone ? 1.0 : model.chi(r);
    RadialKernelFn G = [&](double tau, double x, double xi) { return mode_kernel_remainder(k, n, tau, x, xi, chi); };
    DuhamelSpec spec;
    spec.rel_tol = rel_tol;
    QuadResult I = duhamel_radial(G, rho_power_source(gamma - 2, pure_cone), model.m, t, r, spec);
    return std::abs(I.value) / std::pow(rho_of(r, pure_cone), gamma);
}

TrendReport estimate_one_check(const ConeModel& model, const ExtendedProfile& profile, double gamma,
                               const EstimateGrid& grid, bool pure_cone) {
    if (!(gamma > 2 - model.m)) throw ConfigError("estimate_one_check: gamma must exceed 2-m");
    require_off_E(profile, gamma);
    std::vector<double> levels = grid.r_min;
    std::sort(levels.begin(), levels.end(), std::greater<>());
    if (levels.empty()) throw ConfigError("estimate_one_check: empty refinement list");
    std::vector<double> sup;
    double running = 0, upper = grid.r_max;
    for (double lv : levels) {
        for (double r : log_grid(lv, upper, grid.per_decade)) {
            if (r >= upper && !sup.empty()) continue;
            for (double t : grid.t) running = std::max(running, estimate_one_ratio(model, gamma, t, r, pure_cone, grid.rel_tol));
        }
        upper = lv;
        sup.push_back(running);
    }
    return make_trend(levels, sup, 0.2);
}

TrendReport estimate_two_check(const ConeModel& model, double lambda, int k, double gamma, const EstimateGrid& grid,
                               double growth_threshold) {
    const ModeKernel K = make_mode_kernel(lambda, model.m);
    RadialKernelFn G = [&](double tau, double, double xi) { return std::abs(kernel_asymptotic_coefficient(K, k, tau, xi)); };
    std::vector<double> levels = grid.r_min;
    std::sort(levels.begin(), levels.end(), std::greater<>());
    if (levels.empty()) throw ConfigError("estimate_two_check: empty refinement list");
    std::vector<double> sup;
    for (double lv : levels) {
        DuhamelSpec spec;
        spec.xi_min = lv;
        spec.rel_tol = grid.rel_tol;
        double s = 0;
        for (double t : grid.t) s = std::max(s, duhamel_radial(G, rho_power_source(gamma - 2), model.m, t, 0.0, spec).value);
        sup.push_back(s);
    }
    return make_trend(levels, sup, growth_threshold);
}

void validate_young_exponents(const YoungExponents& e, int m) {
    if (!(e.p >= 1) || !std::isfinite(e.p)) throw ConfigError("young exponents: p must lie in [1, inf)");
    const double r1 = e.alpha1 / e.p + e.alpha2 * (1 - 1 / e.p);
    const double r2 = e.beta1 / e.p + e.beta2 * (1 - 1 / e.p) - (e.epsilon + m / e.p);
    std::ostringstream os;
    os.precision(3);
    if (std::abs(r1) > 1e-12) {
        os << "young exponents: alpha relation violated by " << r1;
        throw ConfigError(os.str());
    }
    if (std::abs(r2) > 1e-12) {
        os << "young exponents: beta relation violated by " << r2;
        throw ConfigError(os.str());
    }
}

YoungExponents solve_young_exponents(double p, double delta, double epsilon, double alpha2, double beta2, int m) {
    if (!(p >= 1) || !std::isfinite(p)) throw ConfigError("young exponents: p must lie in [1, inf)");
    YoungExponents e;
    e.p = p;
    e.delta = delta;
    e.epsilon = epsilon;
    e.alpha2 = alpha2;
    e.beta2 = beta2;
    e.alpha1 = -alpha2 * (p - 1);
    e.beta1 = p * (epsilon + m / p - beta2 * (1 - 1 / p));
    return e;
}

std::vector<std::string> young_feasibility_violations(const YoungExponents& e, int m) {
    std::vector<std::string> v;
    const double wa = e.beta2, wb = e.alpha1 - e.delta * e.p - m;
    if (!(wa + m > 0)) v.push_back("beta2 + m <= 0: first factor diverges at the tip");
    if (!(e.alpha2 + std::min(wa + 2, 0.0) >= 0)) v.push_back("alpha2 + min(beta2 + 2, 0) < 0: first factor unbounded");
    if (!(wb + m > 0)) v.push_back("alpha1 - delta p <= 0: second factor diverges at the tip");
    if (!(e.beta1 + std::min(wb + 2, 0.0) >= 0))
        v.push_back("beta1 + min(alpha1 - delta p - m + 2, 0) < 0: second factor unbounded");
    return v;
}

YoungReport young_bound_check(const ConeModel& model, const YoungExponents& e, const YoungSetup& setup) {
    const int m = model.m;
    validate_young_exponents(e, m);
    auto bad = young_feasibility_violations(e, m);
    if (!bad.empty()) throw ConfigError("young_bound_check: " + bad.front());
    if (!(setup.kappa > e.epsilon)) throw ConfigError("young_bound_check: probe exponent must exceed epsilon");
    if (!(setup.T > 0)) throw ConfigError("young_bound_check: need T > 0");

    const double p = e.p;
    const double lambda0 = model.spectrum->entries.at(0).lambda;
    const ModeKernel k0 = make_mode_kernel(lambda0, m);
    const Cutoff chi{setup.chi_R};
    YoungReport rep;

    // ||f||: t-independent, so the time integral contributes T
    {
        const double a = std::min(1.0, chi.inner());
        const double s = (setup.kappa - e.epsilon) * p;
        double I = std::pow(a, s) / s;
        auto g = [&](double r) {
            return std::pow(chi(r) * std::pow(std::min(r, 1.0), setup.kappa - e.epsilon), p) *
                   std::pow(std::min(r, 1.0), -m) * std::pow(r, m - 1);
        };
        std::vector<double> cuts = {a, 1.0, chi.inner(), chi.outer()};
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            if (cuts[i + 1] > cuts[i] && cuts[i] >= a)
                I += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, cuts[i], cuts[i + 1], 10, 1e-13);
        rep.f_norm = std::abs(setup.scale) * std::pow(setup.T * I, 1 / p);
    }

    // LHS from the mode-0 solve
    if (setup.scale != 0) {
        SourceExpr src;
        src.terms.push_back({1.0, 0, 0.0, setup.kappa, true});
        ModeSource ms = setup.scale * compile_source(src, chi);
        RadialGrid grid = RadialGrid::composite(setup.chi_R, setup.J_core, setup.q, setup.R_out);
        TimeGrid time{setup.T, setup.K};
        ModeSolution sol = solve_mode(make_mode_problem(lambda0, m, ms), grid, time);
        std::vector<double> per_t(time.K + 1, 0.0);
        for (int i = 1; i <= time.K; ++i) {
            std::vector<double> r, g;
            for (int j = 1; j <= grid.J(); ++j) {
                double rh = std::min(grid.r[j], 1.0);
                r.push_back(grid.r[j]);
                g.push_back(std::pow(std::pow(rh, -e.delta) * std::abs(sol.v[i][j]), p) * std::pow(rh, -m) *
                            std::pow(grid.r[j], m - 1));
            }
            TipIntegral I = integrate_with_tip(r, g);
            rep.tail_flag = rep.tail_flag || I.tail_flag;
            per_t[i] = I.value;
        }
        CompensatedSum acc;
        for (int i = 0; i < time.K; ++i) acc.add(0.5 * time.dt() * (per_t[i] + per_t[i + 1]));
        rep.lhs = std::pow(acc.value(), 1 / p);
    }

    std::vector<double> rs = setup.sup_r;
    if (rs.empty()) rs = log_grid(1e-3, 8.0, 3);
    DuhamelSpec spec;
    spec.rel_tol = setup.rel_tol;
    RadialKernelFn G = [&](double tau, double r, double xi) { return mode_heat_kernel(k0, tau, r, xi); };
    auto sup_factor = [&](double w, double outer_power) {
        RadialSourceFn f = rho_power_source(w);
        double s = 0;
        for (double r : rs)
            s = std::max(s, std::pow(std::min(r, 1.0), outer_power) * duhamel_radial(G, f, m, setup.T, r, spec).value);
        return s;
    };
    rep.sup_a = sup_factor(e.beta2, e.alpha2);
    rep.sup_b = sup_factor(e.alpha1 - e.delta * p - m, e.beta1);
    rep.rhs = rep.f_norm * std::pow(rep.sup_a, 1 - 1 / p) * std::pow(rep.sup_b, 1 / p);
    rep.holds = rep.lhs <= rep.rhs * (1 + setup.tolerance);
    rep.slack = rep.lhs > 0 ? rep.rhs / rep.lhs : std::numeric_limits<double>::infinity();
    return rep;
}

}  // namespace conic
