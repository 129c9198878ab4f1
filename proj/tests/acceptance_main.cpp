// Acceptance battery: runs every criterion at its pinned tolerance and
// prints one pass/fail line per criterion.

#include <cstdio>
#include <cstdlib>

#include "nc/suite.hpp"

int main(int argc, char** argv) {
    const uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 0;
    const std::vector<nc::CriterionResult> results = nc::run_acceptance_suite(seed);
    bool all = true;
    double total = 0.0;
    for (const nc::CriterionResult& r : results) {
        std::printf("criterion %02d [%s] %-38s %s [%.2fs]\n", r.id,
                    r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(), r.seconds);
        all = all && r.pass;
        total += r.seconds;
    }
    std::printf("acceptance: %s (%.1fs total)\n", all ? "all criteria passed" : "FAILURES",
                total);
    return all ? 0 : 1;
}
