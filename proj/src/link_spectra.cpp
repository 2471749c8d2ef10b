#include "conic/link_spectra.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <limits>
#include <sstream>

#include "conic/errors.hpp"
#include "conic/io_util.hpp"

namespace conic {

int LinkSpectrum::find(double lambda, double rel_tol) const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        double e = entries[i].lambda;
        if (std::fabs(e - lambda) <= rel_tol * std::max(1.0, std::fabs(lambda))) return static_cast<int>(i);
    }
    return -1;
}

long long sphere_harmonic_dim(int m, int k) {
    // (2k+m-2)(k+m-3)! / (k!(m-2)!)
    if (k == 0) return 1;
    long double binom = 1.0L;  // C(k+m-3, k)
    for (int i = 1; i <= k; ++i) binom = binom * (m - 3 + i) / i;
    long double d = binom * (2.0L * k + m - 2) / (m - 2);
    return std::llround(d);
}

LinkSpectrum sphere_spectrum(int m, double radius, double lambda_max) {
    if (m < 3) throw ConfigError("sphere_spectrum: m must be >= 3");
    if (!(radius > 0)) throw ConfigError("sphere_spectrum: radius must be positive");
    if (!(lambda_max > 0)) throw ConfigError("sphere_spectrum: lambda_max must be positive");
    LinkSpectrum s;
    s.link_dim = m - 1;
    s.cutoff = lambda_max;
    s.source = RoundSphere{radius};
    std::optional<Rational> inv_a2;
    if (auto a2 = to_rational(radius * radius, 1'000'000)) {
        try {
            inv_a2 = Rational(1) / *a2;
        } catch (const NumericError&) {
        }
    }
    for (long long k = 0;; ++k) {
        double kk = static_cast<double>(k) * static_cast<double>(k + m - 2);
        double lam = kk / (radius * radius);
        if (!(lam < lambda_max)) break;
        SpectrumEntry e;
        e.lambda = lam;
        e.multiplicity = static_cast<int>(sphere_harmonic_dim(m, static_cast<int>(k)));
        if (inv_a2) {
            try {
                e.exact = Rational(k * (k + m - 2)) * *inv_a2;
                e.lambda = e.exact->to_double();
            } catch (const NumericError&) {
                e.exact.reset();
            }
        }
        s.entries.push_back(e);
    }
    return s;
}

namespace {

struct LatticeData {
    int d = 0;
    Eigen::MatrixXd B;
    Eigen::MatrixXd Ginv;
    std::optional<std::vector<std::vector<Rational>>> Ginv_exact;
};

std::optional<std::vector<std::vector<Rational>>> exact_inverse(const Eigen::MatrixXd& G) {
    const int d = static_cast<int>(G.rows());
    std::vector<std::vector<Rational>> a(d, std::vector<Rational>(2 * d));
    try {
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                auto r = to_rational(G(i, j), 1'000'000);
                if (!r) return std::nullopt;
                a[i][j] = *r;
            }
            a[i][d + i] = Rational(1);
        }
        for (int c = 0; c < d; ++c) {
            int piv = -1;
            for (int r = c; r < d; ++r)
                if (a[r][c].num() != 0) {
                    piv = r;
                    break;
                }
            if (piv < 0) return std::nullopt;
            std::swap(a[c], a[piv]);
            Rational inv = Rational(1) / a[c][c];
            for (auto& x : a[c]) x = x * inv;
            for (int r = 0; r < d; ++r) {
                if (r == c || a[r][c].num() == 0) continue;
                Rational f = a[r][c];
                for (int j = 0; j < 2 * d; ++j) a[r][j] = a[r][j] - f * a[c][j];
            }
        }
    } catch (const NumericError&) {
        return std::nullopt;
    }
    std::vector<std::vector<Rational>> out(d, std::vector<Rational>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out[i][j] = a[i][d + j];
    return out;
}

LatticeData lattice_data(const std::vector<std::vector<double>>& lattice) {
    LatticeData L;
    L.d = static_cast<int>(lattice.size());
    if (L.d == 0) throw ConfigError("torus_spectrum: empty lattice");
    L.B.resize(L.d, L.d);
    for (int i = 0; i < L.d; ++i) {
        if (static_cast<int>(lattice[i].size()) != L.d) throw ConfigError("torus_spectrum: lattice must be square");
        for (int j = 0; j < L.d; ++j) L.B(i, j) = lattice[i][j];
    }
    double det = L.B.determinant();
    double scale = std::pow(L.B.cwiseAbs().maxCoeff(), L.d);
    if (!(std::fabs(det) > 1e-12 * scale)) throw ConfigError("torus_spectrum: singular lattice");
    Eigen::MatrixXd G = L.B * L.B.transpose();
    L.Ginv = G.inverse();
    L.Ginv_exact = exact_inverse(G);
    return L;
}

struct TorusPoint {
    double lambda;
    std::optional<Rational> exact;
    std::vector<double> xi;
};

std::vector<TorusPoint> enumerate_torus(const LatticeData& L, double lambda_max) {
    const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
    const double bound = L.B.norm() * std::sqrt(lambda_max / four_pi2);
    const long long N = static_cast<long long>(std::ceil(bound));
    const Eigen::MatrixXd Binv = L.B.inverse();
    std::vector<TorusPoint> pts;
    std::vector<long long> n(L.d, -N);
    Eigen::VectorXd nv(L.d);
    for (;;) {
        for (int i = 0; i < L.d; ++i) nv(i) = static_cast<double>(n[i]);
        double q = nv.dot(L.Ginv * nv);
        std::optional<Rational> ex;
        if (L.Ginv_exact) {
            try {
                Rational acc(0);
                for (int i = 0; i < L.d; ++i)
                    for (int j = 0; j < L.d; ++j)
                        acc = acc + Rational(n[i]) * (*L.Ginv_exact)[i][j] * Rational(n[j]);
                ex = acc;
                q = acc.to_double();
            } catch (const NumericError&) {
                ex.reset();
            }
        }
        double lam = four_pi2 * q;
        if (lam < lambda_max) {
            Eigen::VectorXd xi = Binv * nv;
            pts.push_back({lam, ex, std::vector<double>(xi.data(), xi.data() + L.d)});
        }
        int i = 0;
        while (i < L.d && n[i] == N) n[i++] = -N;
        if (i == L.d) break;
        ++n[i];
    }
    return pts;
}

// Groups sorted lattice points into eigenvalues; exact rationals when every
// point has one, relative tolerance otherwise.
std::vector<std::vector<TorusPoint>> group_torus(std::vector<TorusPoint> pts) {
    bool all_exact = std::all_of(pts.begin(), pts.end(), [](const TorusPoint& p) { return p.exact.has_value(); });
    std::stable_sort(pts.begin(), pts.end(), [&](const TorusPoint& a, const TorusPoint& b) {
        if (all_exact) return *a.exact < *b.exact;
        return a.lambda < b.lambda;
    });
    std::vector<std::vector<TorusPoint>> groups;
    for (auto& p : pts) {
        bool same = false;
        if (!groups.empty()) {
            const auto& g = groups.back().front();
            if (all_exact)
                same = *g.exact == *p.exact;
            else
                same = std::fabs(g.lambda - p.lambda) <= 1e-10 * std::max(1.0, p.lambda);
        }
        if (same)
            groups.back().push_back(std::move(p));
        else
            groups.push_back({std::move(p)});
    }
    if (!all_exact)
        for (auto& g : groups)
            for (auto& p : g) p.exact.reset();
    return groups;
}

}  // namespace

LinkSpectrum torus_spectrum(const std::vector<std::vector<double>>& lattice, double lambda_max) {
    if (!(lambda_max > 0)) throw ConfigError("torus_spectrum: lambda_max must be positive");
    LatticeData L = lattice_data(lattice);
    auto groups = group_torus(enumerate_torus(L, lambda_max));
    LinkSpectrum s;
    s.link_dim = L.d;
    s.cutoff = lambda_max;
    s.exact_scale = 4.0 * std::numbers::pi * std::numbers::pi;
    s.source = FlatTorus{lattice};
    for (const auto& g : groups) {
        SpectrumEntry e;
        e.lambda = g.front().lambda;
        e.multiplicity = static_cast<int>(g.size());
        e.exact = g.front().exact;
        s.entries.push_back(e);
    }
    return s;
}

std::vector<std::vector<std::vector<double>>> torus_wavevectors(
    const std::vector<std::vector<double>>& lattice, double lambda_max) {
    LatticeData L = lattice_data(lattice);
    auto groups = group_torus(enumerate_torus(L, lambda_max));
    std::vector<std::vector<std::vector<double>>> out;
    for (const auto& g : groups) {
        std::vector<std::vector<double>> v;
        for (const auto& p : g) v.push_back(p.xi);
        out.push_back(std::move(v));
    }
    return out;
}

LinkSpectrum parse_spectrum(const std::string& text, const std::string& origin, int link_dim) {
    std::map<double, std::pair<long long, std::optional<Rational>>> rows;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool any_inexact = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string a, b, extra;
        if (!(ls >> a)) continue;
        if (!(ls >> b) || (ls >> extra))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'lambda multiplicity'");
        std::optional<Rational> ex;
        double lam;
        if (a.find('/') != std::string::npos) {
            ex = parse_rational(a);
            if (!ex) throw ConfigError(origin + ":" + std::to_string(lineno) + ": bad rational '" + a + "'");
            lam = ex->to_double();
        } else {
            try {
                std::size_t used = 0;
                lam = std::stod(a, &used);
                if (used != a.size()) throw std::invalid_argument(a);
            } catch (const std::exception&) {
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": bad number '" + a + "'");
            }
            ex = to_rational(lam, 1'000'000);
        }
        if (!std::isfinite(lam)) throw ConfigError(origin + ":" + std::to_string(lineno) + ": non-finite eigenvalue");
        if (lam < 0) throw ConfigError(origin + ":" + std::to_string(lineno) + ": negative eigenvalue");
        long long mult;
        try {
            std::size_t used = 0;
            mult = std::stoll(b, &used);
            if (used != b.size()) throw std::invalid_argument(b);
        } catch (const std::exception&) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": bad multiplicity '" + b + "'");
        }
        if (mult <= 0) throw ConfigError(origin + ":" + std::to_string(lineno) + ": multiplicity must be positive");
        auto& slot = rows[lam];
        slot.first += mult;
        if (!ex) any_inexact = true;
        slot.second = ex;
    }
    LinkSpectrum s;
    s.link_dim = link_dim;
    s.source = UserFile{origin};
    for (const auto& [lam, v] : rows) {
        SpectrumEntry e;
        e.lambda = lam;
        if (v.first > std::numeric_limits<int>::max()) throw ConfigError(origin + ": multiplicity overflow");
        e.multiplicity = static_cast<int>(v.first);
        if (!any_inexact) e.exact = v.second;
        s.entries.push_back(e);
    }
    if (s.entries.empty()) throw ConfigError(origin + ": empty spectrum");
    s.cutoff = s.entries.back().lambda;
    s.disconnected_warning = !(s.entries.front().lambda == 0.0 && s.entries.front().multiplicity == 1);
    return s;
}

LinkSpectrum load_spectrum(const std::string& path, int link_dim) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open spectrum file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_spectrum(ss.str(), path, link_dim);
}

std::string format_spectrum(const LinkSpectrum& s) {
    std::string out = "# lambda multiplicity\n";
    char buf[64];
    for (const auto& e : s.entries) {
        if (e.exact && s.exact_scale == 1.0 && e.exact->to_double() == e.lambda)
            out += e.exact->str();
        else {
            std::snprintf(buf, sizeof buf, "%.17g", e.lambda);
            out += buf;
        }
        out += " " + std::to_string(e.multiplicity) + "\n";
    }
    return out;
}

void save_spectrum(const LinkSpectrum& s, const std::string& path) { write_file_atomic(path, format_spectrum(s)); }

}  // namespace conic
