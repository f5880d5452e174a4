#pragma once

#include <ostream>

namespace becsq::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_warnings = 1;
inline constexpr int exit_error = 2;

/// Entry point of the `becsq` tool. Returns 0 on success, 1 when the run
/// finished with warnings and 2 on any error.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace becsq::cli
