#pragma once

namespace korselt::cli {

/// Exit codes: 0 success/accepted, 1 rejected or verification failure,
/// 2 usage error, 3 internal or budget error.
int run(int argc, char** argv);

}  // namespace korselt::cli
