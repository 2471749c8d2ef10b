#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "conic/indicial.hpp"
#include "conic/jet.hpp"
#include "conic/link_spectra.hpp"

namespace conic {

// rho = min(r, 1). Derivatives at r = 1 are the one-sided values from r >= 1.
struct RadiusFunction {
    double operator()(double r) const { return r < 1.0 ? r : 1.0; }
    Jet jet(double r) const { return r < 1.0 ? Jet::variable(r) : Jet::constant(1.0); }
    double pow(double r, double g) const { return std::pow((*this)(r), g); }
};

// C^2 quintic step: 1 on [0, R/4], 0 on [R/2, inf).
struct Cutoff {
    double R_out = 1.0;

    double inner() const { return 0.25 * R_out; }
    double outer() const { return 0.5 * R_out; }
    double operator()(double r) const { return jet(r).v; }
    Jet jet(double r) const;
};

using LinkPoint = std::vector<double>;

class LinkGeometry {
public:
    virtual ~LinkGeometry() = default;
    virtual double distance(const LinkPoint& p, const LinkPoint& q) const = 0;
    virtual double volume() const = 0;
    // sum over an orthonormal basis of entry's eigenspace of phi(p) phi(q)
    virtual std::vector<double> eigenspace_kernels(int n_entries, const LinkPoint& p, const LinkPoint& q) const = 0;
    virtual int dim() const = 0;
    virtual LinkPoint pole() const = 0;
    // point at link distance d from the pole along a fixed geodesic
    virtual LinkPoint point_at_distance(double d) const = 0;

    double eigenspace_kernel(int entry, const LinkPoint& p, const LinkPoint& q) const {
        return eigenspace_kernels(entry + 1, p, q)[entry];
    }
    // L^2-unit zonal eigenfunction Phi(p, pole) / sqrt(Phi(pole, pole))
    double zonal(int entry, const LinkPoint& pole, const LinkPoint& p) const;
};

// Round S^{m-1}(a); points are unit vectors in R^m.
class SphereLink : public LinkGeometry {
public:
    SphereLink(int m, double radius);
    double distance(const LinkPoint& p, const LinkPoint& q) const override;
    double volume() const override { return volume_; }
    std::vector<double> eigenspace_kernels(int n_entries, const LinkPoint& p, const LinkPoint& q) const override;
    int dim() const override { return m_ - 1; }
    LinkPoint pole() const override;
    LinkPoint point_at_distance(double d) const override;
    double radius() const { return a_; }

private:
    int m_;
    double a_;
    double volume_;
};

// Flat torus R^d / lattice; points are Cartesian coordinates.
class TorusLink : public LinkGeometry {
public:
    TorusLink(const std::vector<std::vector<double>>& lattice, double lambda_max);
    double distance(const LinkPoint& p, const LinkPoint& q) const override;
    double volume() const override { return volume_; }
    std::vector<double> eigenspace_kernels(int n_entries, const LinkPoint& p, const LinkPoint& q) const override;
    int dim() const override { return d_; }
    LinkPoint pole() const override { return LinkPoint(d_, 0.0); }
    LinkPoint point_at_distance(double d) const override;

private:
    int d_;
    std::vector<std::vector<double>> B_, Binv_;
    double volume_;
    std::vector<std::vector<std::vector<double>>> xi_;
};

// Geometry for catalogued links; nullptr for user-file spectra.
std::shared_ptr<const LinkGeometry> make_geometry(const LinkSpectrum& s);

struct ConeModel {
    int m = 3;
    std::shared_ptr<const LinkSpectrum> spectrum;
    double R_out = 4.0;
    Cutoff chi;
    RadiusFunction rho;
    std::shared_ptr<const LinkGeometry> geometry;
};

ConeModel make_cone_model(int m, std::shared_ptr<const LinkSpectrum> spectrum, double R_out);

struct ConePoint {
    LinkPoint sigma;
    double r = 0;
};

// d^2 = r^2 + r'^2 - 2 r r' cos(min(d_h, pi))
double cone_distance(const ConeModel& model, const ConePoint& x, const ConePoint& y);

// r^{alpha + 2k} phi_{mode_id}, phi in the eigenspace of spectrum entry `entry`
struct BasisElement {
    double alpha = 0;
    int k = 0;
    int entry = 0;
    int mode_id = 0;
    double lambda = 0;
    double normalization = 1.0;

    double order() const { return alpha + 2.0 * k; }
    bool operator==(const BasisElement& o) const {
        return alpha == o.alpha && k == o.k && entry == o.entry && mode_id == o.mode_id;
    }
};

struct AsymptoticsBasis {
    double gamma = 0;
    std::vector<BasisElement> elements;
};

AsymptoticsBasis harmonic_basis(const ConeModel& model, const IndexProfile& profile, double gamma);
AsymptoticsBasis asymptotics_basis(const ConeModel& model, const ExtendedProfile& profile, double gamma);

struct BasisTerm {
    BasisElement element;
    double coefficient;
};

// Delta(r^{alpha+2k} phi) = 2k(2 alpha + 2k + m - 2) r^{alpha+2k-2} phi; empty for k = 0.
std::vector<BasisTerm> cone_laplacian_on_basis(const BasisElement& e, int m);

// r -> chi(r) r^{alpha+2k} phi_value
std::function<double(double)> cutoff_extension(const ConeModel& model, const BasisElement& e, double phi_value = 1.0);
Jet cutoff_extension_jet(const ConeModel& model, const BasisElement& e, double r);

struct BoundaryDefiningFunctions {
    double bff, tf, lb, rb;
    std::optional<double> tb;  // undefined at t = 0 on the diagonal
};

BoundaryDefiningFunctions evaluate_bdf(const ConeModel& model, double t, const ConePoint& x, const ConePoint& y);

}  // namespace conic
