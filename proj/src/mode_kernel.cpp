#include "conic/mode_kernel.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "conic/errors.hpp"
#include "conic/special_functions.hpp"
#include "conic/summation.hpp"

namespace conic {

namespace {

double lgam(double x) {
    int sign;
    return lgamma_r(x, &sign);
}

void require_positive(double t, double r, double rp) {
    if (!(t > 0) || !(r > 0) || !(rp > 0)) throw ConfigError("mode kernel: t, r, r' must be positive");
}

// log|C| with C = r'^{-(m-2)/2} (2t)^{-1} exp(-r'^2/4t)
double log_prefactor(const ModeKernel& k, double t, double rp) {
    return -0.5 * (k.m - 2) * std::log(rp) - std::log(2 * t) - rp * rp / (4 * t);
}

// c_j r^{alpha_plus + 2j} = C (r'/4t)^nu (-1/4t)^j L_j^{(nu)}(r'^2/4t) / Gamma(nu+j+1) r^{alpha_plus + 2j},
// with log r supplied so that r = 1 yields c_j
double expansion_term(const ModeKernel& k, int j, double t, double rp, double log_r) {
    const double x = rp * rp / (4 * t);
    double l0 = 1, l1 = 1 + k.nu - x;
    double L = j == 0 ? l0 : l1;
    for (int n = 1; n < j; ++n) {
        L = ((2 * n + 1 + k.nu - x) * l1 - (n + k.nu) * l0) / (n + 1);
        l0 = l1;
        l1 = L;
    }
    if (L == 0) return 0.0;
    double l = log_prefactor(k, t, rp) + k.nu * std::log(rp / (4 * t)) - j * std::log(4 * t) - lgam(k.nu + j + 1.0) +
               (k.alpha_plus + 2.0 * j) * log_r + std::log(std::fabs(L));
    double v = std::exp(l);
    return ((j % 2) != (L < 0)) ? -v : v;
}

const LinkGeometry& geometry_of(const ConeModel& model) {
    if (!model.geometry) throw ConfigError("kernel assembly needs a catalogued link geometry");
    return *model.geometry;
}

template <class Term>
KernelSum adaptive_sum(const ConeModel& model, double t, const ConePoint& x, const ConePoint& y, double tol,
                       Term term) {
    const auto& G = geometry_of(model);
    const auto& entries = model.spectrum->entries;
    const int n = static_cast<int>(entries.size());
    auto phi = G.eigenspace_kernels(n, x.sigma, y.sigma);
    const double z = x.r * y.r / (2 * t);
    CompensatedSum s;
    KernelSum out;
    int quiet = 0;
    for (int e = 0; e < n; ++e) {
        ModeKernel k = make_mode_kernel(entries[e].lambda, model.m);
        double h = term(k);
        s.add(h * phi[e]);
        out.modes_used = e + 1;
        out.last_term = std::fabs(h) * entries[e].multiplicity / G.volume();
        if (k.nu * k.nu > z && out.last_term <= tol * std::fabs(s.value()))
            ++quiet;
        else
            quiet = 0;
        if (quiet >= 3) break;
    }
    out.value = s.value();
    out.tail_warning = quiet < 3;
    return out;
}

double upper_limit(double r, double t) { return r + std::sqrt(300.0 * t); }

template <class F>
double integrate_pieces(F f, std::vector<double> cuts) {
    std::sort(cuts.begin(), cuts.end());
    CompensatedSum s;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        s.add(boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 20, 1e-14));
    }
    return s.value();
}

}  // namespace

ModeKernel make_mode_kernel(double lambda, int m) {
    if (!(lambda >= 0)) throw ConfigError("mode kernel: lambda must be nonnegative");
    auto roots = indicial_roots(lambda, m);
    return {indicial_nu(lambda, m), m, roots.alpha_plus, lambda};
}

double mode_heat_kernel(const ModeKernel& k, double t, double r, double rp) {
    require_positive(t, r, rp);
    if (k.nu > kBesselMaxOrder) throw NumericError("mode kernel: order beyond the validated Bessel range");
    const double z = r * rp / (2 * t);
    if (z < 1e-8) {
        // leading series term, relative error below z^2/4
        double l = -0.5 * (k.m - 2) * (std::log(r) + std::log(rp)) - std::log(2 * t) - (r * r + rp * rp) / (4 * t) +
                   k.nu * (std::log(r) + std::log(rp) - std::log(4 * t)) - lgam(k.nu + 1);
        return std::exp(l);
    }
    const double d = r - rp;
    return std::pow(r * rp, -0.5 * (k.m - 2)) / (2 * t) * std::exp(-d * d / (4 * t)) * bessel_ie(k.nu, z);
}

double kernel_asymptotic_coefficient(const ModeKernel& k, int j, double t, double rp) {
    require_positive(t, 1.0, rp);
    if (j < 0) throw ConfigError("asymptotic coefficient: negative index");
    return expansion_term(k, j, t, rp, 0.0);
}

int expansion_terms_below(const ModeKernel& k, double gamma) {
    if (k.alpha_plus < 0) return 0;
    int n = 0;
    while (k.alpha_plus + 2.0 * n < gamma) ++n;
    return n;
}

double mode_kernel_remainder(const ModeKernel& k, int n_terms, double t, double r, double rp, double chi) {
    require_positive(t, r, rp);
    if (n_terms <= 0) return mode_heat_kernel(k, t, r, rp);
    const double lr = std::log(r);
    CompensatedSum head;
    for (int j = 0; j < n_terms; ++j) head.add(expansion_term(k, j, t, rp, lr));
    const double z = r * rp / (2 * t);
    double tail;
    if (z <= 1 && r * r / (4 * t) <= 1) {
        CompensatedSum s;
        double prev = INFINITY;
        for (int j = n_terms; j < n_terms + 400; ++j) {
            double v = expansion_term(k, j, t, rp, lr);
            s.add(v);
            double a = std::fabs(v);
            if (j > n_terms + 2 && a <= 1e-17 * std::fabs(s.value()) && a <= prev) break;
            prev = a;
        }
        tail = s.value();
    } else {
        tail = mode_heat_kernel(k, t, r, rp) - head.value();
    }
    return tail + (1 - chi) * head.value();
}

KernelSum assemble_kernel(const ConeModel& model, double t, const ConePoint& x, const ConePoint& y, int k_max) {
    const auto& G = geometry_of(model);
    const auto& entries = model.spectrum->entries;
    if (k_max < 1 || k_max > static_cast<int>(entries.size()))
        throw ConfigError("assemble_kernel: k_max outside the spectrum cutoff");
    auto phi = G.eigenspace_kernels(k_max, x.sigma, y.sigma);
    CompensatedSum s;
    KernelSum out;
    for (int e = 0; e < k_max; ++e) {
        double h = mode_heat_kernel(make_mode_kernel(entries[e].lambda, model.m), t, x.r, y.r);
        s.add(h * phi[e]);
        out.last_term = h * entries[e].multiplicity / G.volume();
    }
    out.value = s.value();
    out.modes_used = k_max;
    out.tail_warning = out.last_term > kKernelTailTol * std::fabs(out.value);
    return out;
}

KernelSum assemble_kernel_adaptive(const ConeModel& model, double t, const ConePoint& x, const ConePoint& y,
                                   double tol) {
    require_positive(t, x.r, y.r);
    return adaptive_sum(model, t, x, y, tol, [&](const ModeKernel& k) { return mode_heat_kernel(k, t, x.r, y.r); });
}

double kernel_spectrum_requirement(int m, double t, double r, double rp) {
    double z = r * rp / (2 * t);
    double nu = std::sqrt(80 * z) + 30;
    double a = 0.5 * (m - 2);
    return nu * nu - a * a;
}

KernelSum assemble_kernel_remainder(const ConeModel& model, double gamma, double t, const ConePoint& x,
                                    const ConePoint& y, bool pure_cone, double tol) {
    require_positive(t, x.r, y.r);
    const double chi = pure_cone ? 1.0 : model.chi(x.r);
    return adaptive_sum(model, t, x, y, tol, [&](const ModeKernel& k) {
        return mode_kernel_remainder(k, expansion_terms_below(k, gamma), t, x.r, y.r, chi);
    });
}

double remainder_bound(const ConeModel& model, double gamma, double t, const ConePoint& x, const ConePoint& y,
                       bool pure_cone) {
    double d = cone_distance(model, x, y);
    double rx = pure_cone ? x.r : model.rho(x.r), ry = pure_cone ? y.r : model.rho(y.r);
    double gp = std::max(gamma, 0.0);
    return std::pow(t + d * d, -0.5 * model.m) * std::pow(rx * rx / (rx * rx + ry * ry), 0.5 * gp);
}

RemainderReport kernel_remainder_check(const ConeModel& model, double gamma, const RemainderGrid& grid,
                                       bool pure_cone) {
    const auto& G = geometry_of(model);
    if (grid.r_levels.size() < 2) throw ConfigError("remainder check: need at least two r levels");
    RemainderReport rep;
    rep.gamma = gamma;
    ConePoint y0{G.pole(), 1.0};
    for (std::size_t b = 0; b + 1 < grid.r_levels.size(); ++b) {
        double hi = grid.r_levels[b], lo = grid.r_levels[b + 1];
        if (!(lo > 0 && lo < hi)) throw ConfigError("remainder check: r levels must decrease toward 0");
        double sup = 0;
        for (int i = 0; i < grid.r_per_band; ++i) {
            double r = lo * std::pow(hi / lo, (i + 0.5) / grid.r_per_band);
            for (double dist : grid.link_distance) {
                ConePoint x{G.point_at_distance(dist), r};
                for (double rp : grid.r_prime)
                    for (double t : grid.t) {
                        ConePoint y{y0.sigma, rp};
                        auto s = assemble_kernel_remainder(model, gamma, t, x, y, pure_cone);
                        rep.tail_warning = rep.tail_warning || s.tail_warning;
                        sup = std::max(sup, std::fabs(s.value) / remainder_bound(model, gamma, t, x, y, pure_cone));
                        ++rep.samples;
                    }
            }
        }
        rep.band_sup.push_back(sup);
        rep.sup = std::max(rep.sup, sup);
    }
    return rep;
}

double chapman_kolmogorov_integral(const ModeKernel& k, double t, double s, double r, double rp) {
    require_positive(t, r, rp);
    require_positive(s, r, rp);
    auto f = [&](double xi) {
        if (xi <= 0) return 0.0;
        return mode_heat_kernel(k, t, r, xi) * mode_heat_kernel(k, s, xi, rp) * std::pow(xi, k.m - 1);
    };
    double U = std::max(upper_limit(r, t), upper_limit(rp, s));
    return integrate_pieces(f, {0.0, std::min(r, rp), std::max(r, rp), 0.5 * (std::max(r, rp) + U), U});
}

double mode_mass(const ModeKernel& k, double t, double r) {
    require_positive(t, r, 1.0);
    auto f = [&](double xi) { return xi <= 0 ? 0.0 : mode_heat_kernel(k, t, r, xi) * std::pow(xi, k.m - 1); };
    double U = upper_limit(r, t);
    return integrate_pieces(f, {0.0, r, 0.5 * (r + U), U});
}

}  // namespace conic
