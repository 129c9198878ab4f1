#include "nc/numfmt.hpp"

#include <cstdio>

namespace nc {

std::string format_17g(double v) {
    if (v == 0.0) v = 0.0;  // normalize negative zero
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace nc
