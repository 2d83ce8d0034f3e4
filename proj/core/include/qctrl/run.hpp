#pragma once

// Task dispatch: runs a parsed configuration and writes its declared
// outputs.  Exit codes: 0 success, 2 config error, 3 numeric failure,
// 4 I/O failure.

#include <iosfwd>
#include <string>

#include "qctrl/config.hpp"

namespace qctrl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIo = 4;

struct RunOptions {
    std::string out_dir;  // overrides config output.dir when non-empty
    bool verbose = false;
};

// Runs the task, writing outputs into the output directory; throws
// ConfigError / NumericError / IoError on failure.
void run_task(const RunConfig& cfg, const RunOptions& opts, std::ostream& out);

// Exception-mapping wrapper returning the documented exit code.
int run(const RunConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err);

} // namespace qctrl
