#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace conic {

struct CheckResult {
    int id = 0;
    std::string name;
    std::string metric;
    double measured = 0;
    std::string relation;   // how measured compares with threshold when passing
    double threshold = 0;
    bool pass = false;
    bool skipped = false;
    std::string detail;
    std::string csv;        // sweep table, deterministic given the settings
};

struct AcceptanceSettings {
    std::uint64_t seed = 20240611;
    int threads = 1;
    // weights for the solver criteria (oracle agreement and decay)
    std::vector<double> solver_gammas = {-0.5, 1.5};
    double decay_lo = 1e-4;
    double decay_hi = 3e-3;
};

inline constexpr int kCriterionCount = 14;

std::string criterion_name(int id);

// Throws ExceptionalWeight when a configured weight is exceptional; other
// failures are reported in the result.
CheckResult run_criterion(int id, const AcceptanceSettings& s);

// "PASS  3 model-space dimensions: ..." (SKIP when skipped)
std::string format_check_line(const CheckResult& r);

}  // namespace conic
