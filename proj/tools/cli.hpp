#pragma once

#include <ostream>

namespace nc {

// Full command-line front end. Exit codes: 0 success/pass, 1 numerical
// failure (singularity or domain exit), 2 parse/validation error, 3 a
// requested check did not pass.
int nc_cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nc
