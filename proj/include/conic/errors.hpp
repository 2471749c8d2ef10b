#pragma once

#include <stdexcept>
#include <string>

namespace conic {

class ConicError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid input, schema violation or an unmet precondition.
class ConfigError : public ConicError {
public:
    using ConicError::ConicError;
};

// A weight sits within tolerance of an exceptional value.
class ExceptionalWeight : public ConicError {
public:
    ExceptionalWeight(int cone_index, double weight, double nearest, const std::string& what)
        : ConicError(what), cone_index_(cone_index), weight_(weight), nearest_(nearest) {}

    int cone_index() const { return cone_index_; }
    double weight() const { return weight_; }
    double nearest() const { return nearest_; }

private:
    int cone_index_;
    double weight_;
    double nearest_;
};

class NumericError : public ConicError {
public:
    using ConicError::ConicError;
};

class IoError : public ConicError {
public:
    using ConicError::ConicError;
};

}  // namespace conic
