#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dioph/approx.hpp"
#include "dioph/counter.hpp"
#include "dioph/manifold.hpp"

namespace dioph::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `dioph` invocation; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// A preset name ("paraboloid(2)") or a path to a JSON manifold file:
///   {"name": "saddle", "d": 2,
///    "coordinates": [[{"coeff": "1", "exp": [2, 0]}, {"coeff": "-1", "exp": [0, 2]}]]}
MongeMap load_manifold(const std::string& spec);

/// Shortest round-trip decimal form.
std::string format_double(double x);

struct ScanConfig {
  std::int64_t qmin = 2;
  std::int64_t qmax = 100;
  CountMethod method = CountMethod::pruned;
  CountOptions count;
  int threads = 1;
  bool timing = true;
};

inline constexpr const char* kScanHeader =
    "q,psi_q,A,heuristic,trivial,bound_rhs,ratio_A_over_heuristic,borderline,micros";

/// Rows over the support of ψ in [qmin, qmax], one count per q, assembled in
/// increasing q regardless of the worker count.
std::vector<CountReport> scan(const MongeMap& map, const ApproxFunction& psi, const Shift& theta,
                              const ScanConfig& config);

std::string scan_csv(const std::vector<CountReport>& rows, bool timing);

/// Property suite behind `dioph verify`. Prints one line per check and the
/// first counterexample of any failing check.
int run_verify(const std::string& suite, std::uint64_t seed, int threads, std::ostream& out);

}  // namespace dioph::cli
