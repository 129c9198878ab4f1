#include "nc/classify.hpp"
#include "nc/error.hpp"
#include "nc/evalad.hpp"

namespace nc {

ProbeVerdict probe_nondegenerate(const NcExpr& e, const std::vector<int>& sizes,
                                 int trials, uint64_t seed) {
    if (trials < 1) throw ValidationError("probe_nondegenerate: need trials >= 1");
    if (sizes.empty()) throw ValidationError("probe_nondegenerate: need at least one size");
    block_shape(e.root);  // reject structurally broken expressions up front

    ProbeVerdict v;
    std::string last;
    for (int n : sizes) {
        if (n < 1) throw ValidationError("probe_nondegenerate: sizes must be >= 1");
        for (int k = 0; k < trials; ++k) {
            MatrixTuple x = random_tuple(n, e.nvars, mix_seed(seed, static_cast<uint64_t>(n),
                                                              static_cast<uint64_t>(k)));
            ++v.trials_run;
            try {
                eval(e, x);
                v.ok = true;
                v.witness = std::move(x);
                v.note = "defined at a random point of size " + std::to_string(n);
                return v;
            } catch (const SingularError& err) {
                last = err.what();
            }
        }
    }
    v.ok = false;
    v.note = "degenerate-suspect: every trial hit a singular inverse (" +
             std::to_string(v.trials_run) + " trials; last: " + last + ")";
    return v;
}

}  // namespace nc
