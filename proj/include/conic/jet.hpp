#pragma once

#include <cmath>

namespace conic {

// Value with first and second derivative in one variable.
struct Jet {
    double v = 0, d1 = 0, d2 = 0;

    static Jet constant(double c) { return {c, 0, 0}; }
    static Jet variable(double x) { return {x, 1, 0}; }
};

inline Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet operator-(Jet a) { return {-a.v, -a.d1, -a.d2}; }
inline Jet operator*(Jet a, Jet b) { return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2 * a.d1 * b.d1 + a.v * b.d2}; }
inline Jet operator*(double c, Jet a) { return {c * a.v, c * a.d1, c * a.d2}; }
inline Jet operator*(Jet a, double c) { return c * a; }
inline Jet operator+(Jet a, double c) { return {a.v + c, a.d1, a.d2}; }

// x^p for x > 0
inline Jet pow(Jet x, double p) {
    double f = std::pow(x.v, p);
    double f1 = p * std::pow(x.v, p - 1);
    double f2 = p * (p - 1) * std::pow(x.v, p - 2);
    return {f, f1 * x.d1, f2 * x.d1 * x.d1 + f1 * x.d2};
}

// v'' + (m-1)/r v' - lambda/r^2 v
inline double radial_laplacian(Jet f, double r, int m, double lambda) {
    return f.d2 + (m - 1) / r * f.d1 - lambda / (r * r) * f.v;
}

}  // namespace conic
