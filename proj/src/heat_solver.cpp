#include "conic/heat_solver.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cctype>
#include <cmath>
#include <thread>

#include "conic/errors.hpp"
#include "conic/indicial.hpp"

namespace conic {

namespace {

double gk(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 10, 1e-12);
}

double ts(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate(f, a, b, 1e-13);
}

// int_a^b r^{m-1+alpha} term(r) dr, without coef or time factor
double cell_integral(const RadialTerm& term, double a, double b, int m, double alpha) {
    double total = 0;
    const double e = m - 1 + alpha;
    if (a < term.tip_edge) {
        double hi = std::min(b, term.tip_edge);
        double q = e + 1 + term.tip_power;
        if (!(q > 0)) throw ConfigError("source is not integrable at the tip (exponent " + std::to_string(q - 1) + ")");
        total += (std::pow(hi, q) - std::pow(a, q)) / q;
        a = hi;
    }
    if (!(b > a)) return total;
    std::vector<double> cuts = {a, b};
    for (double x : term.breakpoints)
        if (x > a && x < b) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    std::function<double(double)> f = [&](double r) { return r <= 0 ? 0.0 : std::pow(r, e) * term.profile(r); };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += cuts[i] == 0 ? ts(f, cuts[i], cuts[i + 1]) : gk(f, cuts[i], cuts[i + 1]);
    return total;
}

// Factored tridiagonal (V + c K) for repeated Thomas solves.
struct Tridiag {
    std::vector<double> lower, diag, upper;   // lower[j] couples j to j-1
    std::vector<double> cp, inv;

    void factor() {
        std::size_t n = diag.size();
        cp.assign(n, 0);
        inv.assign(n, 0);
        double den = diag[0];
        for (std::size_t j = 0; j < n; ++j) {
            if (j > 0) den = diag[j] - lower[j] * cp[j - 1];
            inv[j] = 1 / den;
            cp[j] = j + 1 < n ? upper[j] * inv[j] : 0;
        }
    }
    void solve(std::vector<double>& x) const {
        std::size_t n = diag.size();
        x[0] *= inv[0];
        for (std::size_t j = 1; j < n; ++j) x[j] = (x[j] - lower[j] * x[j - 1]) * inv[j];
        for (std::size_t j = n - 1; j-- > 0;) x[j] -= cp[j] * x[j + 1];
    }
};

}  // namespace

RadialGrid RadialGrid::graded(double R_out, int J, double q) {
    if (!(R_out > 0) || J < 2 || !(q >= 1)) throw ConfigError("RadialGrid: need R_out > 0, J >= 2, q >= 1");
    RadialGrid g;
    g.r.resize(J + 1);
    for (int j = 0; j <= J; ++j) g.r[j] = R_out * std::pow(double(j) / J, q);
    g.r[J] = R_out;
    return g;
}

RadialGrid RadialGrid::composite(double R_core, int J_core, double q, double R_out) {
    if (!(R_out >= R_core)) throw ConfigError("RadialGrid: R_out below the graded core");
    RadialGrid g = graded(R_core, J_core, q);
    double h = g.r[J_core] - g.r[J_core - 1];
    int extra = static_cast<int>(std::ceil((R_out - R_core) / h - 1e-9));
    for (int i = 1; i < extra; ++i) g.r.push_back(R_core + i * h);
    if (R_out > R_core) g.r.push_back(R_out);
    return g;
}

double RadialTerm::operator()(double t, double r) const {
    double tp = t_power == 0 ? 1.0 : std::pow(t, t_power);
    return coef * tp * profile(r);
}

double ModeSource::operator()(double t, double r) const {
    double s = 0;
    for (const auto& x : terms) s += x(t, r);
    return s;
}

ModeSource operator+(ModeSource a, const ModeSource& b) {
    a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
    return a;
}

ModeSource operator*(double c, ModeSource a) {
    for (auto& x : a.terms) x.coef *= c;
    return a;
}

ModeProblem make_mode_problem(double lambda, int m, ModeSource source) {
    ModeProblem p;
    p.lambda = lambda;
    p.m = m;
    p.alpha_plus = indicial_roots(lambda, m).alpha_plus;
    p.source = std::move(source);
    return p;
}

double ModeSolution::w(int i, int j) const {
    if (grid.r[j] == 0) return v[i][j];
    return v[i][j] / std::pow(grid.r[j], alpha_plus);
}

std::vector<double> cell_volumes(const RadialGrid& grid, double d) {
    const int J = grid.J();
    std::vector<double> V(J);
    for (int j = 0; j < J; ++j) {
        double a = j == 0 ? 0.0 : 0.5 * (grid.r[j - 1] + grid.r[j]);
        double b = 0.5 * (grid.r[j] + grid.r[j + 1]);
        V[j] = (std::pow(b, d) - std::pow(a, d)) / d;
    }
    return V;
}

std::vector<double> cell_source(const ModeSource& s, const RadialGrid& grid, int m, double alpha, double t) {
    const int J = grid.J();
    std::vector<double> F(J, 0.0);
    for (const auto& term : s.terms) {
        double tf = term.coef * (term.t_power == 0 ? 1.0 : std::pow(t, term.t_power));
        if (tf == 0) continue;
        for (int j = 0; j < J; ++j) {
            double a = j == 0 ? 0.0 : 0.5 * (grid.r[j - 1] + grid.r[j]);
            double b = 0.5 * (grid.r[j] + grid.r[j + 1]);
            F[j] += tf * cell_integral(term, a, b, m, alpha);
        }
    }
    return F;
}

ModeSolution solve_mode(const ModeProblem& p, const RadialGrid& grid, const TimeGrid& time, const SchemeParams& scheme) {
    if (std::fabs(p.alpha_plus - indicial_roots(p.lambda, p.m).alpha_plus) > 1e-12)
        throw ConfigError("solve_mode: alpha_plus inconsistent with lambda");
    if (time.K < 1 || !(time.T > 0)) throw ConfigError("solve_mode: need T > 0 and K >= 1");
    const int J = grid.J();
    if (J < 2 || grid.r[0] != 0) throw ConfigError("solve_mode: grid must start at the tip");
    for (int j = 0; j < J; ++j)
        if (!(grid.r[j + 1] > grid.r[j])) throw ConfigError("solve_mode: grid not strictly increasing");

    const double alpha = p.alpha_plus, d = p.m + 2 * alpha, dt = time.dt();
    auto V = cell_volumes(grid, d);
    std::vector<double> c(J);   // face j+1/2 coefficient
    for (int j = 0; j < J; ++j) c[j] = std::pow(0.5 * (grid.r[j] + grid.r[j + 1]), d - 1) / (grid.r[j + 1] - grid.r[j]);

    // K w: (Kw)_j = c_{j-1}(w_j - w_{j-1}) + c_j(w_j - w_{j+1}), w_J = 0
    auto apply_K = [&](const std::vector<double>& w, std::vector<double>& out) {
        for (int j = 0; j < J; ++j) {
            double s = c[j] * (w[j] - (j + 1 < J ? w[j + 1] : 0.0));
            if (j > 0) s += c[j - 1] * (w[j] - w[j - 1]);
            out[j] = s;
        }
    };
    // V + (dt/2) K serves both the CN step and the BE half steps
    Tridiag A;
    A.lower.assign(J, 0);
    A.diag.assign(J, 0);
    A.upper.assign(J, 0);
    for (int j = 0; j < J; ++j) {
        A.diag[j] = V[j] + 0.5 * dt * (c[j] + (j > 0 ? c[j - 1] : 0.0));
        if (j > 0) A.lower[j] = -0.5 * dt * c[j - 1];
        if (j + 1 < J) A.upper[j] = -0.5 * dt * c[j];
    }
    A.factor();

    // separable terms: cell integrals once, time factors per step
    std::vector<std::vector<double>> I;
    for (const auto& term : p.source.terms) {
        ModeSource one;
        one.terms = {term};
        one.terms[0].coef = 1;
        one.terms[0].t_power = 0;
        I.push_back(cell_source(one, grid, p.m, alpha, 0.0));
    }
    auto F_at = [&](double t) {
        std::vector<double> F(J, 0.0);
        for (std::size_t k = 0; k < I.size(); ++k) {
            const auto& term = p.source.terms[k];
            double tf = term.coef * (term.t_power == 0 ? 1.0 : std::pow(t, term.t_power));
            if (tf != 0)
                for (int j = 0; j < J; ++j) F[j] += tf * I[k][j];
        }
        return F;
    };

    ModeSolution out;
    out.lambda = p.lambda;
    out.alpha_plus = alpha;
    out.m = p.m;
    out.grid = grid;
    out.time = time;
    out.v.assign(time.K + 1, std::vector<double>(J + 1, 0.0));
    out.energy.assign(time.K + 1, 0.0);

    std::vector<double> w(J, 0.0), rhs(J), Kw(J);
    if (p.initial_w)
        for (int j = 0; j < J; ++j) w[j] = p.initial_w(grid.r[j]);
    auto store = [&](int i) {
        double e = 0;
        for (int j = 0; j < J; ++j) {
            if (!std::isfinite(w[j])) throw NumericError("solve_mode: non-finite value at step " + std::to_string(i));
            out.v[i][j] = (grid.r[j] == 0 ? (alpha == 0 ? 1.0 : 0.0) : std::pow(grid.r[j], alpha)) * w[j];
            e += V[j] * w[j] * w[j];
        }
        out.energy[i] = e;
    };
    store(0);
    if (!p.initial_w) out.v[0].assign(J + 1, 0.0);

    std::vector<double> F_old = F_at(0.0);
    for (int n = 0; n < time.K; ++n) {
        const double t1 = time.t(n + 1);
        std::vector<double> F_new = F_at(t1);
        if (n == 0 && scheme.rannacher) {
            std::vector<double> F_half = F_at(0.5 * (time.t(0) + t1));
            for (int j = 0; j < J; ++j) rhs[j] = V[j] * w[j] + 0.5 * dt * F_half[j];
            A.solve(rhs);
            w = rhs;
            for (int j = 0; j < J; ++j) rhs[j] = V[j] * w[j] + 0.5 * dt * F_new[j];
            A.solve(rhs);
            w = rhs;
        } else {
            apply_K(w, Kw);
            for (int j = 0; j < J; ++j) rhs[j] = V[j] * w[j] - 0.5 * dt * Kw[j] + 0.5 * dt * (F_old[j] + F_new[j]);
            A.solve(rhs);
            w = rhs;
        }
        store(n + 1);
        F_old = std::move(F_new);
    }
    return out;
}

double link_profile(const ConeModel& model, int entry, const LinkPoint& sigma) {
    if (!model.geometry) throw ConfigError("link_profile: link geometry unavailable for this spectrum source");
    const auto& G = *model.geometry;
    return std::sqrt(G.volume()) * G.zonal(entry, G.pole(), sigma);
}

double HeatSolution::synthesize(int i, const LinkPoint& sigma, int j) const {
    double u = 0;
    for (std::size_t k = 0; k < modes.size(); ++k) u += modes[k].v[i][j] * link_profile(*model, entries[k], sigma);
    return u;
}

HeatSolution solve_cauchy(std::shared_ptr<const ConeModel> model, const std::vector<ModeForcing>& f, double gamma,
                          const RadialGrid& grid, const TimeGrid& time, int threads, const SchemeParams& scheme) {
    if (!model) throw ConfigError("solve_cauchy: missing model");
    const int m = model->m;
    if (!(gamma > 2 - m)) throw ConfigError("solve_cauchy: gamma must exceed 2-m");
    auto ext = extended_set_E(exceptional_set_D(model->spectrum, m, {2.0 - m, std::max(gamma, 0.0) + 1}));
    require_off_E(ext, gamma);
    const auto& entries = model->spectrum->entries;
    for (const auto& x : f)
        if (x.entry < 0 || x.entry >= static_cast<int>(entries.size()))
            throw ConfigError("solve_cauchy: source mode " + std::to_string(x.entry) + " beyond the spectrum cutoff");

    HeatSolution sol;
    sol.model = model;
    sol.modes.resize(f.size());
    for (const auto& x : f) sol.entries.push_back(x.entry);

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(f.size());
    auto worker = [&] {
        for (std::size_t k; (k = next++) < f.size();) {
            try {
                sol.modes[k] = solve_mode(make_mode_problem(entries[f[k].entry].lambda, m, f[k].source), grid, time, scheme);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    int n = std::max(1, std::min<int>(threads, static_cast<int>(f.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return sol;
}

double mode_residual(const ModeSolution& s, const ModeSource& f) {
    const auto& r = s.grid.r;
    const int J = s.grid.J();
    const double dt = s.time.dt(), lam = s.lambda;
    auto L = [&](const std::vector<double>& v, int j) {
        double h1 = r[j] - r[j - 1], h2 = r[j + 1] - r[j];
        double d1 = (-h2 / (h1 * (h1 + h2))) * v[j - 1] + ((h2 - h1) / (h1 * h2)) * v[j] + (h1 / (h2 * (h1 + h2))) * v[j + 1];
        double d2 = 2 * (v[j - 1] / (h1 * (h1 + h2)) - v[j] / (h1 * h2) + v[j + 1] / (h2 * (h1 + h2)));
        return d2 + (s.m - 1) / r[j] * d1 - lam / (r[j] * r[j]) * v[j];
    };
    double worst = 0;
    for (int n = 1; n < s.time.K; ++n) {
        double t0 = s.time.t(n), t1 = s.time.t(n + 1);
        for (int j = 2; j < J; ++j) {
            double res = (s.v[n + 1][j] - s.v[n][j]) / dt - 0.5 * (L(s.v[n + 1], j) + L(s.v[n], j)) -
                         0.5 * (f(t0, r[j]) + f(t1, r[j]));
            worst = std::max(worst, std::fabs(res));
        }
    }
    return worst;
}

ResidualReport residual_check(const HeatSolution& sol, const std::vector<ModeForcing>& f) {
    if (f.size() != sol.modes.size()) throw ConfigError("residual_check: forcing does not match the solution modes");
    ResidualReport rep;
    for (std::size_t k = 0; k < f.size(); ++k) {
        rep.max_residual.push_back(mode_residual(sol.modes[k], f[k].source));
        rep.max = std::max(rep.max, rep.max_residual.back());
    }
    return rep;
}

Manufactured manufactured_solution(double lambda, int m, const Cutoff& chi, double extra_power) {
    const double alpha = indicial_roots(lambda, m).alpha_plus;
    const double beta = alpha + extra_power;
    const double c = beta * (beta + m - 2) - lambda;
    if (c == 0) throw ConfigError("manufactured_solution: profile is harmonic");
    std::vector<double> bp = {chi.inner(), chi.outer()};
    RadialTerm a;
    a.coef = 1;
    a.t_power = 0;
    a.profile = [chi, beta](double r) { return chi(r) * std::pow(r, beta); };
    a.tip_power = beta;
    a.tip_edge = chi.inner();
    a.breakpoints = bp;
    RadialTerm b;
    b.coef = -c;
    b.t_power = 1;
    b.profile = [chi, beta, c, m, lambda](double r) {
        return radial_laplacian(chi.jet(r) * pow(Jet::variable(r), beta), r, m, lambda) / c;
    };
    b.tip_power = beta - 2;
    b.tip_edge = chi.inner();
    b.breakpoints = bp;
    Manufactured out;
    out.source.terms = {a, b};
    out.exact = [chi, beta](double t, double r) { return t * chi(r) * std::pow(r, beta); };
    return out;
}

namespace {

struct Lexer {
    const std::string& s;
    std::size_t i = 0;

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool peek(char c) {
        skip();
        return i < s.size() && s[i] == c;
    }
    bool eat(char c) {
        if (!peek(c)) return false;
        ++i;
        return true;
    }
    bool done() {
        skip();
        return i >= s.size();
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("source expression '" + s + "': " + what + " at offset " + std::to_string(i));
    }
    double number() {
        skip();
        const char* begin = s.c_str() + i;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("expected a number");
        i += static_cast<std::size_t>(end - begin);
        return v;
    }
    std::string ident() {
        skip();
        std::size_t b = i;
        while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
        return s.substr(b, i - b);
    }
    double exponent() {
        if (eat('(')) {
            double sign = eat('-') ? -1.0 : 1.0;
            double v = sign * number();
            if (eat('/')) v /= number();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        double sign = eat('-') ? -1.0 : 1.0;
        return sign * number();
    }
};

}  // namespace

SourceExpr parse_source_expr(const std::string& text) {
    Lexer lx{text};
    SourceExpr out;
    out.text = text;
    double sign = 1;
    if (lx.eat('-'))
        sign = -1;
    else
        lx.eat('+');
    for (;;) {
        SeparableTerm term;
        term.coef = sign;
        for (;;) {
            lx.skip();
            if (lx.i < text.size() && (std::isdigit(static_cast<unsigned char>(text[lx.i])) || text[lx.i] == '.')) {
                term.coef *= lx.number();
            } else {
                std::string id = lx.ident();
                if (id == "t") {
                    int n = 1;
                    if (lx.eat('^')) {
                        double e = lx.exponent();
                        if (e < 0 || e != std::floor(e)) lx.fail("time powers must be nonnegative integers");
                        n = static_cast<int>(e);
                    }
                    term.t_power += n;
                } else if (id == "r") {
                    term.r_power += lx.eat('^') ? lx.exponent() : 1.0;
                } else if (id == "rho") {
                    term.rho_power += lx.eat('^') ? lx.exponent() : 1.0;
                } else if (id == "chi") {
                    if (term.chi) lx.fail("chi may appear once per product");
                    term.chi = true;
                } else {
                    lx.fail(id.empty() ? "unexpected character" : "unknown symbol '" + id + "'");
                }
            }
            if (!lx.eat('*')) break;
        }
        out.terms.push_back(term);
        if (lx.done()) break;
        if (lx.eat('+'))
            sign = 1;
        else if (lx.eat('-'))
            sign = -1;
        else
            lx.fail("expected '+', '-' or '*'");
    }
    return out;
}

ModeSource compile_source(const SourceExpr& e, const Cutoff& chi) {
    ModeSource s;
    RadiusFunction rho;
    for (const auto& x : e.terms) {
        if (x.coef == 0) continue;
        RadialTerm t;
        t.coef = x.coef;
        t.t_power = x.t_power;
        t.profile = [x, chi, rho](double r) {
            double v = std::pow(r, x.r_power);
            if (x.rho_power != 0) v *= rho.pow(r, x.rho_power);
            if (x.chi) v *= chi(r);
            return v;
        };
        t.tip_power = x.r_power + x.rho_power;
        t.tip_edge = x.chi ? std::min(1.0, chi.inner()) : 1.0;
        t.breakpoints = {1.0};
        if (x.chi) {
            t.breakpoints.push_back(chi.inner());
            t.breakpoints.push_back(chi.outer());
        }
        s.terms.push_back(std::move(t));
    }
    return s;
}

double evaluate_source(const SourceExpr& e, const Cutoff& chi, double t, double r) {
    return compile_source(e, chi)(t, r);
}

}  // namespace conic
