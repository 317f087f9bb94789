#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dioph/approx.hpp"
#include "dioph/interval.hpp"
#include "dioph/manifold.hpp"

namespace dioph {

/// Σ_{q ≤ Q_max, q in the support} (ψ(q)/q)^{s+m} q^n with n = d + m.
struct SeriesSpec {
  ApproxFunction psi{PowerForm{Rational(1)}};
  Rational s_hausdorff{1};
  int d = 1;
  int m = 1;
  std::int64_t Q_max = 1000;

  [[nodiscard]] int n() const { return d + m; }
};

struct SeriesReport {
  double partial_sum = 0.0;
  double last_doubling = 0.0;      ///< contribution of q in (Q_max/2, Q_max]
  double previous_doubling = 0.0;  ///< contribution of q in (Q_max/4, Q_max/2]
  std::uint64_t terms = 0;         ///< support members summed
  /// Support members q ≤ min(Q_max, kThresholdScanLimit) where ψ(q) lies
  /// strictly between 0 and q^{-1/(2m+1)}(log q)^{2/(2m+1)}.
  std::uint64_t threshold_violations = 0;
  std::vector<std::int64_t> first_violations;  ///< at most 10

  /// last / previous, or 0 when the previous window is empty.
  [[nodiscard]] double doubling_ratio() const {
    return previous_doubling > 0.0 ? last_doubling / previous_doubling : 0.0;
  }
};

inline constexpr std::int64_t kThresholdScanLimit = 10'000'000;

/// Throws InputError for Q_max < 2 or s outside (0, d].
SeriesReport series_partial_sum(const SeriesSpec& spec, int threads = 0);

enum class Convergence { converges, diverges, boundary_log };

std::string to_string(Convergence c);

/// Exact exponent E = n − (s+m)(1+τ) of the series term q^E (log q)^{β(s+m)}.
Rational series_exponent(const SeriesSpec& spec);

/// Analytic verdict for power and power-log ψ (constants count as τ = 0) on
/// full or lacunary support. Full support converges iff E < −1, or E = −1 and
/// β(s+m) < −1. On {g^t} the terms behave like g^{tE} t^{β(s+m)}, so it
/// converges iff E < 0, or E = 0 and β(s+m) < −1. The exact tie
/// β(s+m) = −1 on the critical line is reported as boundary_log (divergent,
/// like Σ 1/(q log q)). Tables and explicit supports throw InputError.
Convergence classify_convergence(const SeriesSpec& spec);

struct CriticalExponents {
  int d = 0;
  int m = 0;
  int n = 0;
  Rational s0_monotonic;          ///< dm/(m+1) + (n+1)/(2(m+1))
  bool monotonic_applicable = false;  ///< d > (n+1)/2
  std::optional<Rational> s0_hypersurface;  ///< (n−1)/2 + (n+1)/(2n), m = 1
  bool hypersurface_applicable = false;     ///< m = 1 and n >= 3
  Rational s_lacunary;            ///< d − n/(2(m+1))
  std::optional<Rational> tau;
  std::optional<Rational> dim_bound;  ///< (n+1)/(τ+1) − m
  bool tau_in_range = false;          ///< 1/n <= τ <= 1/(2m+1)
  bool dim_bound_applicable = false;  ///< tau_in_range and d > (n+1)/2
};

/// Throws InputError unless d, m >= 1 and n = d + m.
CriticalExponents critical_exponents(int d, int m, int n, std::optional<Rational> tau = std::nullopt);

struct CoverCell {
  std::int64_t q = 0;
  std::vector<std::int64_t> a;
  std::vector<std::int64_t> b;
  std::vector<Interval> box;  ///< hull of the surviving subdivision boxes
  double diameter = 0.0;      ///< Euclidean diameter of `box`
  double s_power = 0.0;       ///< diameter^s
  bool witnessed = false;     ///< a sample point provably satisfies the system
};

struct CoverSummary {
  std::int64_t q = 0;
  double psi_q = 0.0;
  double c1 = 1.0;
  double c2 = 2.0;
  std::uint64_t count = 0;
  double sum_s_power = 0.0;
  std::uint64_t bound_count = 0;  ///< A(q, c₂ψ, θ) when computed
  bool bound_applicable = false;  ///< c₂ψ(q) < 1/2
  double diameter_limit = 0.0;    ///< 2√d ψ(q)/q
  std::vector<CoverCell> cells;
};

struct CoverOptions {
  int max_depth = 0;  ///< bisections per cell; 0 picks 10·d
  int grid_resolution = 64;
  int threads = 0;
};

/// σ cells {α ∈ U : |α_i − (a_i+λ̃_i)/q| < ψ/q, |f_j(α) − (b_j+γ̃_j)/q| < ψ/q}
/// for a ∈ Z(q). Emptiness is decided by interval branch-and-prune, which
/// may keep a cell that only touches the system within the last subdivision
/// width. Cells are ordered lexicographically by (a, b).
CoverSummary build_cover(const MongeMap& map, const PsiValue& psi_q, const Shift& theta, std::int64_t q,
                         const Rational& s_hausdorff, const CoverOptions& options = {});

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  double target = 0.0;  ///< (2ψ)^n
  double z_score = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
};

/// Continuous F : [0,1]^d → R^n evaluated into `out`.
using ContinuousMap = std::function<void(std::span<const double>, std::span<double>)>;

/// Volume of {(x, θ) ∈ [0,1]^{d+n} : ‖q F(x) − θ‖ < ψ} by uniform sampling.
/// Sample k consumes counters k(d+n) .. k(d+n)+d+n−1 of the stream.
McEstimate doubly_metric_mc(const ContinuousMap& F, int d, int n, double psi_q, std::int64_t q,
                            std::uint64_t samples, std::uint64_t seed, int threads = 0);

/// Uses the graph α ↦ (α, f(α)), so n = d + m.
McEstimate doubly_metric_mc(const MongeMap& map, double psi_q, std::int64_t q, std::uint64_t samples,
                            std::uint64_t seed, int threads = 0);

struct McInstance {
  std::string manifold;  ///< preset name
  std::int64_t q = 0;
  double psi_q = 0.0;
  std::uint64_t seed = 0;
};

/// The 20 fixed instances used by `verify` and the acceptance suite.
std::vector<McInstance> standard_mc_suite();

}  // namespace dioph
