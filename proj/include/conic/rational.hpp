#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace conic {

// Normalized int64 fraction; every operation is overflow-checked and throws
// NumericError rather than wrapping.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t n);  // NOLINT(google-explicit-constructor)
    Rational(std::int64_t n, std::int64_t d);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const;

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend bool operator<(const Rational& a, const Rational& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

// Shortest fraction p/q (q <= max_den) whose double conversion reproduces x
// bit for bit; nullopt when none exists.
std::optional<Rational> to_rational(double x, std::int64_t max_den = 1'000'000'000);

// Parses "p/q" or an integer literal.
std::optional<Rational> parse_rational(const std::string& s);

}  // namespace conic
