#include "conic/indicial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "conic/errors.hpp"

namespace conic {

namespace {

std::string num(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

void check_in_window(const Window& w, double delta, double tol, const char* what) {
    if (!(delta > w.lo + tol && delta < w.hi - tol))
        throw ConfigError(std::string(what) + ": " + num(delta) + " outside query window [" + num(w.lo) + ", " +
                          num(w.hi) + ")");
}

bool same_value(double a, double b) { return std::fabs(a - b) <= 1e-10 * std::max(1.0, std::fabs(a)); }

}  // namespace

double indicial_nu(double lambda, int m) {
    double h = 0.5 * (m - 2);
    return std::sqrt(h * h + lambda);
}

IndicialRoots indicial_roots(double lambda, int m) {
    if (m < 3) throw ConfigError("indicial_roots: m must be >= 3");
    if (!(lambda >= 0)) throw ConfigError("indicial_roots: lambda must be nonnegative");
    double h = 0.5 * (2 - m);
    double nu = indicial_nu(lambda, m);
    return {h - nu, h + nu};
}

double required_cutoff(int m, Window w) {
    double need = 0.0;
    if (w.hi > 0) need = std::max(need, w.hi * (w.hi + m - 2));
    if (w.lo < 2 - m) need = std::max(need, w.lo * (w.lo + m - 2));
    return need;
}

namespace {

// Spectra hold every eigenvalue strictly below the cutoff. Roots below hi need
// lambda < hi(hi+m-2); roots at or above lo need lambda <= lo(lo+m-2).
bool cutoff_sufficient(double cutoff, int m, Window w) {
    if (w.hi > 0 && cutoff < w.hi * (w.hi + m - 2)) return false;
    if (w.lo < 2 - m && !(cutoff > w.lo * (w.lo + m - 2))) return false;
    return true;
}

}  // namespace

IndexProfile exceptional_set_D(std::shared_ptr<const LinkSpectrum> spectrum, int m, Window w, double tol) {
    if (!spectrum) throw ConfigError("exceptional_set_D: missing spectrum");
    if (!(w.lo < w.hi) || !std::isfinite(w.lo) || !std::isfinite(w.hi))
        throw ConfigError("exceptional_set_D: window must be bounded and nonempty");
    if (!(tol > 0)) throw ConfigError("exceptional_set_D: tol must be positive");
    double need = required_cutoff(m, w);
    if (!cutoff_sufficient(spectrum->cutoff, m, w))
        throw ConfigError("spectrum cutoff " + num(spectrum->cutoff) + " insufficient for window [" + num(w.lo) +
                          ", " + num(w.hi) + "): required cutoff " + num(need));
    IndexProfile p;
    p.m = m;
    p.spectrum = spectrum;
    p.window = w;
    p.tol = tol;
    for (std::size_t i = 0; i < spectrum->entries.size(); ++i) {
        const auto& e = spectrum->entries[i];
        auto r = indicial_roots(e.lambda, m);
        for (double a : {r.alpha_minus, r.alpha_plus})
            if (a >= w.lo && a < w.hi) p.roots.push_back({a, e.multiplicity, static_cast<int>(i)});
    }
    std::sort(p.roots.begin(), p.roots.end(), [](const Root& a, const Root& b) { return a.alpha < b.alpha; });
    return p;
}

ExtendedProfile extended_set_E(const IndexProfile& profile) {
    struct Contribution {
        double beta;
        int mult;
        bool direct;
    };
    std::vector<Contribution> c;
    for (const auto& r : profile.roots) {
        c.push_back({r.alpha, r.mult, true});
        if (r.alpha < 0) continue;
        for (int k = 1; r.alpha + 2.0 * k < profile.window.hi; ++k) c.push_back({r.alpha + 2.0 * k, r.mult, false});
    }
    std::stable_sort(c.begin(), c.end(), [](const Contribution& a, const Contribution& b) { return a.beta < b.beta; });
    ExtendedProfile e;
    e.base = profile;
    for (const auto& x : c) {
        if (!e.elements.empty() && same_value(e.elements.back().beta, x.beta)) {
            e.elements.back().n += x.mult;
            if (x.direct) e.elements.back().m_direct += x.mult;
        } else {
            e.elements.push_back({x.beta, x.mult, x.direct ? x.mult : 0});
        }
    }
    return e;
}

void require_off_D(const IndexProfile& p, double gamma, int cone_index) {
    for (const auto& r : p.roots)
        if (std::fabs(r.alpha - gamma) <= p.tol)
            throw ExceptionalWeight(cone_index, gamma, r.alpha,
                                    "weight " + num(gamma) + " on cone " + std::to_string(cone_index) +
                                        " is within tolerance of the exceptional value " + num(r.alpha));
}

void require_off_E(const ExtendedProfile& e, double gamma, int cone_index) {
    for (const auto& x : e.elements)
        if (std::fabs(x.beta - gamma) <= e.base.tol)
            throw ExceptionalWeight(cone_index, gamma, x.beta,
                                    "weight " + num(gamma) + " on cone " + std::to_string(cone_index) +
                                        " is within tolerance of the exceptional value " + num(x.beta));
}

int index_function_M(const IndexProfile& p, double delta, int cone_index) {
    check_in_window(p.window, delta, p.tol, "index_function_M");
    require_off_D(p, delta, cone_index);
    int s = 0;
    if (delta < 0) {
        for (const auto& r : p.roots)
            if (r.alpha > delta && r.alpha < 0) s -= r.mult;
    } else {
        for (const auto& r : p.roots)
            if (r.alpha >= 0 && r.alpha < delta) s += r.mult;
    }
    return s;
}

int index_function_N(const ExtendedProfile& e, double delta, int cone_index) {
    check_in_window(e.base.window, delta, e.base.tol, "index_function_N");
    require_off_E(e, delta, cone_index);
    int s = 0;
    if (delta < 0) {
        for (const auto& x : e.elements)
            if (x.beta > delta && x.beta < 0) s -= x.n;
    } else {
        for (const auto& x : e.elements)
            if (x.beta >= 0 && x.beta < delta) s += x.n;
    }
    return s;
}

int multiplicity_m(const IndexProfile& p, double beta) {
    for (const auto& r : p.roots)
        if (same_value(r.alpha, beta)) return r.mult;
    return 0;
}

int multiplicity_n(const ExtendedProfile& e, double beta) {
    for (const auto& x : e.elements)
        if (same_value(x.beta, beta)) return x.n;
    return 0;
}

GammaBracket gamma_plus_minus(const ExtendedProfile& e, double gamma) {
    const double tol = e.base.tol;
    double plus = std::numeric_limits<double>::quiet_NaN();
    double minus = std::numeric_limits<double>::quiet_NaN();
    for (const auto& x : e.elements) {
        if (x.beta >= gamma - tol) {
            if (std::isnan(plus)) plus = x.beta;
        } else {
            minus = x.beta;
        }
    }
    if (std::isnan(plus) || std::isnan(minus))
        throw ConfigError("gamma_plus_minus: window [" + num(e.base.window.lo) + ", " + num(e.base.window.hi) +
                          ") does not bracket " + num(gamma));
    return {minus, plus};
}

WeightVector WeightVector::shifted(double a) const {
    WeightVector w = *this;
    for (auto& g : w.gammas) g += a;
    return w;
}

bool WeightVector::operator<=(const WeightVector& o) const {
    if (gammas.size() != o.gammas.size()) throw ConfigError("weight vectors of different length");
    for (std::size_t i = 0; i < gammas.size(); ++i)
        if (!(gammas[i] <= o.gammas[i])) return false;
    return true;
}

int fredholm_index(const std::vector<IndexProfile>& profiles, const WeightVector& gamma) {
    if (profiles.size() != gamma.size())
        throw ConfigError("fredholm_index: " + std::to_string(profiles.size()) + " profiles but " +
                          std::to_string(gamma.size()) + " weights");
    int idx = 0;
    for (std::size_t i = 0; i < profiles.size(); ++i)
        idx -= index_function_M(profiles[i], gamma.gammas[i], static_cast<int>(i));
    return idx;
}

ModelDims model_space_dims(const ExtendedProfile& e, double gamma) {
    if (gamma < 2 - e.base.m) throw ConfigError("model_space_dims: gamma below 2-m");
    require_off_E(e, gamma);
    return {index_function_M(e.base, gamma), index_function_N(e, gamma)};
}

}  // namespace conic
