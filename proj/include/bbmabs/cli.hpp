#pragma once

namespace bbmabs::cli {

// Parses argv and runs the selected experiment.  Exit codes: 0 success,
// 2 invalid arguments, 3 runtime failure, 4 assertion violation (--assert).
int run_cli(int argc, const char* const* argv);

}  // namespace bbmabs::cli
