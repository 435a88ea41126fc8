#pragma once

namespace afc::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;
inline constexpr int exit_connectivity = 4;

/// Entry point of the `afc` binary. Maps errors to exit codes: 2 for
/// configuration, 3 for numerical failures, 4 for connectivity.
int run(int argc, char** argv);

}  // namespace afc::cli
