// One line per acceptance criterion; exit status 1 when any criterion fails.
// Optional arguments select criteria by number.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <vector>

#include "conic/acceptance.hpp"

using namespace conic;

int main(int argc, char** argv) {
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    if (ids.empty())
        for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
    AcceptanceSettings settings;
    int failed = 0;
    for (int id : ids) {
        auto t0 = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = run_criterion(id, settings);
        } catch (const std::exception& e) {
            r.id = id;
            r.name = criterion_name(id);
            r.metric = "error";
            r.detail = e.what();
        }
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s [%.1f s]\n", format_check_line(r).c_str(), sec);
        std::fflush(stdout);
        failed += !r.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
    return failed ? 1 : 0;
}
