#include "conic/duhamel.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <sstream>

#include "conic/errors.hpp"
#include "conic/summation.hpp"

namespace conic {

QuadResult duhamel_radial(const RadialKernelFn& k, const RadialSourceFn& f, int m, double t, double r,
                          const DuhamelSpec& spec) {
    if (!(t > 0)) return {};
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    boost::math::quadrature::tanh_sinh<double> ts;
    const double inner_tol = spec.rel_tol * 1e-2;
    // (sigma, 2 sigma int |g|) at every outer node, for the absolute-value integral
    std::vector<std::pair<double, double>> abs_samples;

    auto inner = [&](double sigma) {
        // the excised sigma < 1e-10 sqrt(t) piece is below 1e-15 relative for integrands O(sigma^{1/2})
        if (!(sigma > 1e-10 * std::sqrt(t))) return 0.0;
        const double tau = sigma * sigma, s = t - tau;
        const double w = spec.window * sigma;
        const double lo = spec.xi_min;
        const double hi = std::min(f.support, r + w);
        if (!(hi > lo)) return 0.0;
        std::vector<double> cuts = {lo, hi};
        for (double c : f.breakpoints) cuts.push_back(c);
        for (double a : {4.0, 12.0}) {
            cuts.push_back(r - a * sigma);
            cuts.push_back(r + a * sigma);
            cuts.push_back(a * sigma);
        }
        cuts.push_back(r);
        std::vector<double> pts;
        for (double c : cuts)
            if (c >= lo && c <= hi) pts.push_back(c);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        auto g = [&](double xi) {
            // integrable tip singularities: the excised piece is below 1e-49
            if (xi <= 1e-100) return 0.0;
            double fv = f.eval(s, xi);
            if (fv == 0) return 0.0;
            return k(tau, r, xi) * fv * std::pow(xi, m - 1);
        };
        CompensatedSum acc;
        double abs_sum = 0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            double a = pts[i], b = pts[i + 1];
            if (!(b > a)) continue;
            double e = 0, l1 = 0;
            if (i == 0 && a == 0)
                acc.add(ts.integrate(g, a, b, inner_tol, &e, &l1));
            else
                acc.add(GK::integrate(g, a, b, 12, inner_tol, &e, &l1));
            abs_sum += l1;
        }
        abs_samples.emplace_back(sigma, 2 * sigma * abs_sum);
        return 2 * sigma * acc.value();
    };

    // the sigma profile changes scale near sigma ~ r and sigma ~ |r - b|
    const double st = std::sqrt(t);
    std::vector<double> outer = {0.0, st};
    for (double c : {0.25 * r, r, 4 * r}) outer.push_back(c);
    for (double b : f.breakpoints) outer.push_back(std::abs(r - b));
    std::vector<double> sp;
    for (double c : outer)
        if (c >= 0 && c <= st) sp.push_back(c);
    std::sort(sp.begin(), sp.end());
    sp.erase(std::unique(sp.begin(), sp.end()), sp.end());

    QuadResult res;
    CompensatedSum val;
    double L1 = 0;
    for (std::size_t i = 0; i + 1 < sp.size(); ++i) {
        if (!(sp[i + 1] > sp[i] * (1 + 1e-12))) continue;
        double e = 0, l1 = 0;
        // subtracted kernels leave an algebraic sigma^a factor at sigma = 0
        if (i == 0)
            val.add(ts.integrate(inner, sp[i], sp[i + 1], spec.rel_tol, &e, &l1));
        else
            val.add(GK::integrate(inner, sp[i], sp[i + 1], 12, spec.rel_tol, &e, &l1));
        res.error += e;
        L1 += l1;
    }
    res.value = val.value();
    std::sort(abs_samples.begin(), abs_samples.end());
    for (std::size_t i = 0; i + 1 < abs_samples.size(); ++i)
        res.abs_integral += 0.5 * (abs_samples[i + 1].first - abs_samples[i].first) *
                            (abs_samples[i].second + abs_samples[i + 1].second);
    // cancellation in the xi integral limits the attainable relative accuracy
    L1 = std::max(L1, res.abs_integral);
    if (!std::isfinite(res.value) || res.error > 1e3 * spec.rel_tol * std::max(L1, 1e-300))
    {
        std::ostringstream os;
        os << "duhamel_radial: quadrature did not converge at t = " << t << ", r = " << r << " (value " << res.value
           << ", error " << res.error << ", L1 " << L1 << ")";
        throw NumericError(os.str());
    }
    return res;
}

}  // namespace conic
