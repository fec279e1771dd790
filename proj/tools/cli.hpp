#pragma once

#include <iosfwd>

namespace shearlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

// Entry point of the shearlab tool. Output root defaults to the config's
// output_dir, overridden by SHEARLAB_OUTPUT_ROOT, overridden by --output.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace shearlab::cli
