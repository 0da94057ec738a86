#pragma once

namespace qmimo {

/// `qaoa-mimo <mode> --config <path> [--seed N] [--out <path>]`.
/// Exit codes: 0 success, 1 config error, 2 runtime/numeric error,
/// 3 partial failure.
int run_cli(int argc, char** argv);

}  // namespace qmimo
