#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cebound::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

struct VerifyOptions {
  int dim_lo = 2;
  int dim_hi = 3;
  int trials = 10;
  std::uint64_t seed = 42;
  double tol = 1e-9;
};

struct VerifyOutcome {
  nlohmann::json summary;
  bool passed = false;
};

/// Runs every (d_P, d_Q) in [dim_lo, dim_hi]^2 for `trials` trials each.
/// Trial k uses derive_seed(seed, k); results are aggregated in trial order,
/// so the summary does not depend on `threads`.
[[nodiscard]] VerifyOutcome run_verify(const VerifyOptions& options, unsigned threads);

/// Thread cap from CEBOUND_THREADS (falls back to the hardware concurrency).
[[nodiscard]] unsigned thread_cap();

/// Parses "lo..hi" or a single integer.
void parse_dims(const std::string& text, int& lo, int& hi);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Returns 0 on success, 1 on a violated inequality and 2 on
/// invalid flags, unreadable input or infeasible parameters.
[[nodiscard]] int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cebound::cli
