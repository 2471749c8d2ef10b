#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "conic/rational.hpp"

namespace conic {

struct SpectrumEntry {
    double lambda = 0.0;
    int multiplicity = 1;
    // lambda == exact * exact_scale when present
    std::optional<Rational> exact;
};

struct RoundSphere {
    double radius = 1.0;
};

struct FlatTorus {
    std::vector<std::vector<double>> lattice;  // basis rows
};

struct UserFile {
    std::string path;
};

using SpectrumSource = std::variant<RoundSphere, FlatTorus, UserFile>;

struct LinkSpectrum {
    int link_dim = 0;
    std::vector<SpectrumEntry> entries;
    double cutoff = 0.0;
    double exact_scale = 1.0;
    SpectrumSource source;
    bool disconnected_warning = false;

    int ambient_dim() const { return link_dim + 1; }
    std::size_t size() const { return entries.size(); }
    // Index of the entry matching lambda to relative tolerance, or -1.
    int find(double lambda, double rel_tol = 1e-12) const;
};

// Spherical-harmonic dimension of degree k on S^{n}, n = m-1.
long long sphere_harmonic_dim(int m, int k);

LinkSpectrum sphere_spectrum(int m, double radius, double lambda_max);
LinkSpectrum torus_spectrum(const std::vector<std::vector<double>>& lattice, double lambda_max);

// link_dim is not recorded in the file format and must be supplied.
LinkSpectrum load_spectrum(const std::string& path, int link_dim = 0);
LinkSpectrum parse_spectrum(const std::string& text, const std::string& origin, int link_dim = 0);
void save_spectrum(const LinkSpectrum& s, const std::string& path);
std::string format_spectrum(const LinkSpectrum& s);

// Dual-lattice vectors xi with |2 pi xi|^2 <= lambda_max, grouped by eigenvalue
// in the same order as torus_spectrum(lattice, lambda_max).entries.
std::vector<std::vector<std::vector<double>>> torus_wavevectors(
    const std::vector<std::vector<double>>& lattice, double lambda_max);

}  // namespace conic
