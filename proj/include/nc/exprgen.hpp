#pragma once

#include "nc/expr.hpp"
#include "nc/rng.hpp"

namespace nc {

// Seeded random scalar expression over d variables with syntactic depth at
// most max_depth. Inverses and exponentials appear with moderate
// probability; exponential arguments are damped by a small constant factor
// to keep values in floating range. Used by equivalence sweeps and fuzz
// checks; callers retry when a draw is singular at their sample point.
NcExpr random_expr(Rng& rng, int d, int max_depth);

}  // namespace nc
