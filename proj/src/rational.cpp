#include "conic/rational.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "conic/errors.hpp"

namespace conic {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min() + 1)
        throw NumericError("rational overflow");
    return static_cast<std::int64_t>(v);
}

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational make(i128 n, i128 d) {
    if (d == 0) throw NumericError("rational division by zero");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    i128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    return Rational(narrow(n), narrow(d));
}

}  // namespace

Rational::Rational(std::int64_t n) : num_(n), den_(1) {}

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw NumericError("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    std::int64_t g = std::gcd(n, d);
    num_ = g > 1 ? n / g : n;
    den_ = g > 1 ? d / g : d;
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
}

Rational Rational::operator-() const { return Rational(-num_, den_); }

bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
}

std::optional<Rational> to_rational(double x, std::int64_t max_den) {
    if (!std::isfinite(x) || std::fabs(x) > 9e15) return std::nullopt;
    // continued-fraction convergents
    i128 p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    long double rem = static_cast<long double>(x);
    for (int it = 0; it < 64; ++it) {
        long double a = std::floor(rem);
        if (std::fabs(a) > 9e15L) return std::nullopt;
        i128 ai = static_cast<i128>(a);
        i128 p2 = ai * p1 + p0;
        i128 q2 = ai * q1 + q0;
        if (q2 > max_den) return std::nullopt;
        if (p2 > std::numeric_limits<std::int64_t>::max() || -p2 > std::numeric_limits<std::int64_t>::max())
            return std::nullopt;
        auto r = Rational(static_cast<std::int64_t>(p2), static_cast<std::int64_t>(q2));
        if (r.to_double() == x) return r;
        long double frac = rem - a;
        if (frac == 0) return std::nullopt;
        rem = 1.0L / frac;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    return std::nullopt;
}

std::optional<Rational> parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            long long n = std::stoll(s, &used);
            if (used != s.size()) return std::nullopt;
            return Rational(n);
        }
        std::string a = s.substr(0, slash), b = s.substr(slash + 1);
        long long n = std::stoll(a, &used);
        if (used != a.size()) return std::nullopt;
        long long d = std::stoll(b, &used);
        if (used != b.size() || d == 0) return std::nullopt;
        return Rational(n, d);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace conic
