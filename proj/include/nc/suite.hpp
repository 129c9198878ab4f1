#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nc {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double worst = 0.0;  // worst observed residual (or the decisive metric)
    double tol = 0.0;
    std::string detail;
    double seconds = 0.0;
};

// Runs the full acceptance battery. Tolerances are pinned here; the seed
// only varies the sampled points, never the thresholds.
std::vector<CriterionResult> run_acceptance_suite(uint64_t seed = 0);

}  // namespace nc
