#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "conic/link_spectra.hpp"

namespace conic {

struct IndicialRoots {
    double alpha_minus;
    double alpha_plus;
};

IndicialRoots indicial_roots(double lambda, int m);

// nu = sqrt(((m-2)/2)^2 + lambda)
double indicial_nu(double lambda, int m);

struct Root {
    double alpha;
    int mult;
    int entry;  // spectrum entry that generated it
};

// Half-open window [lo, hi).
struct Window {
    double lo;
    double hi;
};

struct IndexProfile {
    int m = 3;
    std::shared_ptr<const LinkSpectrum> spectrum;
    std::vector<Root> roots;  // D within the window, ascending
    Window window{0, 0};
    double tol = 1e-9;
};

struct ExtendedElement {
    double beta;
    int n;  // n(beta)
    int m_direct;  // m(beta), zero when beta is only a shift
};

struct ExtendedProfile {
    IndexProfile base;
    std::vector<ExtendedElement> elements;  // E within the window, ascending
};

// Smallest spectrum cutoff that makes the root list on w complete.
double required_cutoff(int m, Window w);

IndexProfile exceptional_set_D(std::shared_ptr<const LinkSpectrum> spectrum, int m, Window w, double tol = 1e-9);
ExtendedProfile extended_set_E(const IndexProfile& profile);

int index_function_M(const IndexProfile& p, double delta, int cone_index = 0);
int index_function_N(const ExtendedProfile& e, double delta, int cone_index = 0);

// m(beta) / n(beta); zero off the sets.
int multiplicity_m(const IndexProfile& p, double beta);
int multiplicity_n(const ExtendedProfile& e, double beta);

struct GammaBracket {
    double gamma_minus;
    double gamma_plus;
};
GammaBracket gamma_plus_minus(const ExtendedProfile& e, double gamma);

struct WeightVector {
    std::vector<double> gammas;

    std::size_t size() const { return gammas.size(); }
    WeightVector shifted(double a) const;
    bool operator<=(const WeightVector& o) const;
};

int fredholm_index(const std::vector<IndexProfile>& profiles, const WeightVector& gamma);

struct ModelDims {
    int dim_H;
    int dim_V;
};
ModelDims model_space_dims(const ExtendedProfile& e, double gamma);

// Throws ExceptionalWeight when gamma is within tol of an element of E.
void require_off_E(const ExtendedProfile& e, double gamma, int cone_index = 0);
void require_off_D(const IndexProfile& p, double gamma, int cone_index = 0);

}  // namespace conic
