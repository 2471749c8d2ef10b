#pragma once

#include <cmath>

namespace conic {

// Neumaier compensated sum.
struct CompensatedSum {
    double sum = 0, c = 0;

    void add(double x) {
        double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + c; }
};

}  // namespace conic
