#include "conic/cone_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "conic/errors.hpp"
#include "conic/special_functions.hpp"

namespace conic {

namespace {

constexpr double kPi = std::numbers::pi;

void require_basis_weight(const ConeModel& model, const std::vector<double>& nonneg_exceptional, double gamma,
                          double tol, double window_hi) {
    if (gamma < 2 - model.m) throw ConfigError("basis: gamma below 2-m");
    if (!(gamma < window_hi)) throw ConfigError("basis: profile window does not cover [0, gamma)");
    for (double e : nonneg_exceptional)
        if (std::fabs(e - gamma) <= tol) {
            std::ostringstream os;
            os << "basis: weight " << gamma << " is within tolerance of the exceptional value " << e;
            throw ExceptionalWeight(0, gamma, e, os.str());
        }
}

}  // namespace

Jet Cutoff::jet(double r) const {
    const double a = inner(), b = outer();
    if (r <= a) return Jet::constant(1.0);
    if (r >= b) return Jet::constant(0.0);
    const double w = b - a;
    // 1 - S(s) = S(1 - s) keeps full relative accuracy as chi -> 0
    const double u = (b - r) / w;
    const double u2 = u * u;
    const double S = u2 * u * (10 - 15 * u + 6 * u2);
    const double S1 = 30 * u2 * (1 - u) * (1 - u);
    const double S2 = 60 * u * (1 - u) * (1 - 2 * u);
    return {std::min(S, 1.0), -S1 / w, S2 / (w * w)};
}

double LinkGeometry::zonal(int entry, const LinkPoint& pole, const LinkPoint& p) const {
    double diag = eigenspace_kernel(entry, pole, pole);
    return eigenspace_kernel(entry, p, pole) / std::sqrt(diag);
}

SphereLink::SphereLink(int m, double radius) : m_(m), a_(radius) {
    if (m < 3) throw ConfigError("SphereLink: m must be >= 3");
    volume_ = 2 * std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m) * std::pow(radius, m - 1);
}

double SphereLink::distance(const LinkPoint& p, const LinkPoint& q) const {
    double d = 0;
    for (int i = 0; i < m_; ++i) d += p[i] * q[i];
    return a_ * std::acos(std::clamp(d, -1.0, 1.0));
}

std::vector<double> SphereLink::eigenspace_kernels(int n_entries, const LinkPoint& p, const LinkPoint& q) const {
    double c = 0;
    for (int i = 0; i < m_; ++i) c += p[i] * q[i];
    c = std::clamp(c, -1.0, 1.0);
    auto P = gegenbauer_normalized(n_entries - 1, 0.5 * (m_ - 2), c);
    std::vector<double> out(n_entries);
    for (int k = 0; k < n_entries; ++k)
        out[k] = static_cast<double>(sphere_harmonic_dim(m_, k)) / volume_ * P[k];
    return out;
}

LinkPoint SphereLink::pole() const {
    LinkPoint p(m_, 0.0);
    p[m_ - 1] = 1.0;
    return p;
}

LinkPoint SphereLink::point_at_distance(double d) const {
    LinkPoint p(m_, 0.0);
    double th = d / a_;
    p[0] = std::sin(th);
    p[m_ - 1] = std::cos(th);
    return p;
}

TorusLink::TorusLink(const std::vector<std::vector<double>>& lattice, double lambda_max)
    : d_(static_cast<int>(lattice.size())), B_(lattice) {
    Eigen::MatrixXd B(d_, d_);
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) B(i, j) = lattice[i][j];
    volume_ = std::fabs(B.determinant());
    Eigen::MatrixXd Bi = B.inverse();
    Binv_.assign(d_, std::vector<double>(d_));
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) Binv_[i][j] = Bi(i, j);
    xi_ = torus_wavevectors(lattice, lambda_max);
}

double TorusLink::distance(const LinkPoint& p, const LinkPoint& q) const {
    // coefficients w with (p - q) = w B, reduced to [-1/2, 1/2)
    std::vector<double> w(d_, 0.0);
    for (int j = 0; j < d_; ++j)
        for (int i = 0; i < d_; ++i) w[j] += (p[i] - q[i]) * Binv_[i][j];
    for (auto& x : w) x -= std::floor(x + 0.5);
    double best = INFINITY;
    std::vector<int> c(d_, -1);
    for (;;) {
        double s = 0;
        for (int i = 0; i < d_; ++i) {
            double comp = 0;
            for (int j = 0; j < d_; ++j) comp += (w[j] + c[j]) * B_[j][i];
            s += comp * comp;
        }
        best = std::min(best, s);
        int i = 0;
        while (i < d_ && c[i] == 1) c[i++] = -1;
        if (i == d_) break;
        ++c[i];
    }
    return std::sqrt(best);
}

std::vector<double> TorusLink::eigenspace_kernels(int n_entries, const LinkPoint& p, const LinkPoint& q) const {
    if (n_entries > static_cast<int>(xi_.size())) throw ConfigError("TorusLink: entry beyond spectrum cutoff");
    std::vector<double> out(n_entries, 0.0);
    for (int e = 0; e < n_entries; ++e) {
        double s = 0;
        for (const auto& xi : xi_[e]) {
            double ph = 0;
            for (int i = 0; i < d_; ++i) ph += xi[i] * (p[i] - q[i]);
            s += std::cos(2 * kPi * ph);
        }
        out[e] = s / volume_;
    }
    return out;
}

LinkPoint TorusLink::point_at_distance(double d) const {
    double n = 0;
    for (double x : B_[0]) n += x * x;
    n = std::sqrt(n);
    LinkPoint p(d_);
    for (int i = 0; i < d_; ++i) p[i] = d * B_[0][i] / n;
    return p;
}

std::shared_ptr<const LinkGeometry> make_geometry(const LinkSpectrum& s) {
    if (auto sp = std::get_if<RoundSphere>(&s.source)) return std::make_shared<SphereLink>(s.link_dim + 1, sp->radius);
    if (auto t = std::get_if<FlatTorus>(&s.source)) return std::make_shared<TorusLink>(t->lattice, s.cutoff);
    return nullptr;
}

ConeModel make_cone_model(int m, std::shared_ptr<const LinkSpectrum> spectrum, double R_out) {
    if (m < 3) throw ConfigError("cone model: m must be >= 3");
    if (!spectrum) throw ConfigError("cone model: missing spectrum");
    if (spectrum->link_dim != 0 && spectrum->link_dim != m - 1)
        throw ConfigError("cone model: link dimension " + std::to_string(spectrum->link_dim) + " does not match m-1");
    if (!(R_out > 0)) throw ConfigError("cone model: R_out must be positive");
    ConeModel c;
    c.m = m;
    c.spectrum = spectrum;
    c.R_out = R_out;
    c.chi = Cutoff{R_out};
    c.geometry = make_geometry(*spectrum);
    return c;
}

double cone_distance(const ConeModel& model, const ConePoint& x, const ConePoint& y) {
    if (!model.geometry) throw ConfigError("cone_distance: link geometry unavailable for this spectrum source");
    double dh = std::min(model.geometry->distance(x.sigma, y.sigma), kPi);
    double d2 = x.r * x.r + y.r * y.r - 2 * x.r * y.r * std::cos(dh);
    return std::sqrt(std::max(d2, 0.0));
}

AsymptoticsBasis harmonic_basis(const ConeModel& model, const IndexProfile& profile, double gamma) {
    std::vector<double> nonneg;
    for (const auto& r : profile.roots)
        if (r.alpha >= 0) nonneg.push_back(r.alpha);
    require_basis_weight(model, nonneg, gamma, profile.tol, profile.window.hi);
    AsymptoticsBasis b;
    b.gamma = gamma;
    for (const auto& r : profile.roots) {
        if (r.alpha < 0 || !(r.alpha < gamma)) continue;
        double lam = profile.spectrum->entries[r.entry].lambda;
        for (int id = 0; id < r.mult; ++id) b.elements.push_back({r.alpha, 0, r.entry, id, lam, 1.0});
    }
    return b;
}

AsymptoticsBasis asymptotics_basis(const ConeModel& model, const ExtendedProfile& profile, double gamma) {
    std::vector<double> nonneg;
    for (const auto& x : profile.elements)
        if (x.beta >= 0) nonneg.push_back(x.beta);
    require_basis_weight(model, nonneg, gamma, profile.base.tol, profile.base.window.hi);
    AsymptoticsBasis b;
    b.gamma = gamma;
    for (const auto& r : profile.base.roots) {
        if (r.alpha < 0) continue;
        double lam = profile.base.spectrum->entries[r.entry].lambda;
        for (int k = 0; r.alpha + 2.0 * k < gamma; ++k)
            for (int id = 0; id < r.mult; ++id) b.elements.push_back({r.alpha, k, r.entry, id, lam, 1.0});
    }
    std::stable_sort(b.elements.begin(), b.elements.end(),
                     [](const BasisElement& x, const BasisElement& y) { return x.order() < y.order(); });
    return b;
}

std::vector<BasisTerm> cone_laplacian_on_basis(const BasisElement& e, int m) {
    if (e.k == 0) return {};
    BasisElement t = e;
    t.k = e.k - 1;
    double c = 2.0 * e.k * (2.0 * e.alpha + 2.0 * e.k + m - 2);
    return {{t, c}};
}

Jet cutoff_extension_jet(const ConeModel& model, const BasisElement& e, double r) {
    return model.chi.jet(r) * pow(Jet::variable(r), e.order());
}

std::function<double(double)> cutoff_extension(const ConeModel& model, const BasisElement& e, double phi_value) {
    Cutoff chi = model.chi;
    double p = e.order();
    return [chi, p, phi_value](double r) { return chi(r) * std::pow(r, p) * phi_value; };
}

BoundaryDefiningFunctions evaluate_bdf(const ConeModel& model, double t, const ConePoint& x, const ConePoint& y) {
    if (!(t >= 0)) throw ConfigError("evaluate_bdf: t must be nonnegative");
    double rx = model.rho(x.r), ry = model.rho(y.r);
    double d = cone_distance(model, x, y);
    BoundaryDefiningFunctions b;
    b.bff = std::sqrt(t + rx * rx + ry * ry);
    b.tf = std::sqrt(t + d * d) / b.bff;
    b.lb = rx / b.bff;
    b.rb = ry / b.bff;
    if (t + d * d > 0) b.tb = std::sqrt(t) / std::sqrt(t + d * d);
    return b;
}

}  // namespace conic
