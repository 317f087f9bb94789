#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

#include "dioph/approx.hpp"
#include "dioph/manifold.hpp"

namespace dioph {

/// Z(q) = ∏ [0, q_i] with q_i = q when λ̃_i = 0 and q - 1 otherwise.
class IndexSet {
 public:
  IndexSet(std::int64_t q, std::span<const Rational> lambda_tilde);

  [[nodiscard]] int dim() const { return static_cast<int>(extents_.size()); }
  /// Largest admissible index per coordinate (q_i).
  [[nodiscard]] const std::vector<std::int64_t>& extents() const { return extents_; }
  [[nodiscard]] std::uint64_t size() const;

  class iterator {
   public:
    using value_type = std::vector<std::int64_t>;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(const IndexSet* set, bool end);

    const value_type& operator*() const { return current_; }
    iterator& operator++();
    iterator operator++(int) {
      iterator tmp = *this;
      ++*this;
      return tmp;
    }
    bool operator==(const iterator& other) const { return done_ == other.done_ && (done_ || current_ == other.current_); }

   private:
    const IndexSet* set_ = nullptr;
    value_type current_;
    bool done_ = true;
  };

  [[nodiscard]] iterator begin() const { return iterator(this, false); }
  [[nodiscard]] iterator end() const { return iterator(this, true); }

 private:
  std::vector<std::int64_t> extents_;
};

IndexSet index_set_Z(std::int64_t q, std::span<const Rational> lambda_tilde);

enum class BoundKind { thm11, thm14 };

/// How per-point distances are decided. `hybrid` screens in double precision
/// and settles anything within the error band exactly; `rational` evaluates
/// every point in exact arithmetic. Both give the same A.
enum class Arithmetic { hybrid, rational };

struct CountOptions {
  int threads = 0;  ///< 0 = default_thread_count()
  Arithmetic arithmetic = Arithmetic::hybrid;
  BoundKind bound = BoundKind::thm11;
};

/// One row of counting output.
struct CountReport {
  std::int64_t q = 0;
  double psi_q = 0.0;
  std::uint64_t A = 0;
  double heuristic = 0.0;      ///< ψ(q)^m q^d
  std::uint64_t trivial = 0;   ///< (q+1)^d, saturating
  double bound_thm = 0.0;      ///< unscaled theorem right-hand side
  std::uint64_t borderline = 0;
  std::chrono::microseconds elapsed{0};
  bool support_miss = false;   ///< ψ(q) = 0
  bool psi_above_half = false; ///< the nearest-integer form was used with ψ(q) > 1/2
  std::uint64_t visited = 0;   ///< points whose distance was evaluated

  [[nodiscard]] double ratio_A_over_heuristic() const {
    return heuristic > 0.0 ? static_cast<double>(A) / heuristic : 0.0;
  }
};

/// Tolerance for the separately reported borderline hits.
inline constexpr double kBorderlineTolerance = 1e-9;

/// Decides ‖q f((a+λ̃)/q) − γ‖ < ψ for one index vector. Holds scratch
/// buffers, so use one instance per thread.
class PointTester {
 public:
  PointTester(const MongeMap& map, const Shift& reduced_theta, std::int64_t q, const PsiValue& psi,
              Arithmetic arithmetic = Arithmetic::hybrid);

  struct Outcome {
    bool hit = false;
    bool borderline = false;
  };

  Outcome test(std::span<const std::int64_t> a);

  [[nodiscard]] const MongeMap& map() const { return *map_; }

 private:
  Outcome test_rational(std::span<const std::int64_t> a);

  const MongeMap* map_;
  const Shift* theta_;
  std::int64_t q_;
  PsiValue psi_;
  Arithmetic arithmetic_;
  std::vector<double> lambda_;
  std::vector<double> gamma_;
  std::vector<double> alpha_;
  std::vector<double> dist_;
  std::vector<double> err_;
  std::vector<Rational> alpha_exact_;
  double err_scale_;
};

/// Full enumeration of Z(q).
CountReport count_A_exact(const MongeMap& map, const ApproxFunction& psi, const Shift& theta, std::int64_t q,
                          const CountOptions& options = {});

/// Interval-pruned subdivision of Z(q); leaves are enumerated with the same
/// per-point decision as count_A_exact, so A is identical.
CountReport count_A_pruned(const MongeMap& map, const ApproxFunction& psi, const Shift& theta, std::int64_t q,
                           const CountOptions& options = {});

enum class CountMethod { exact, pruned };

/// Counting at an explicitly supplied ψ(q) value (used for A(q, c·ψ, θ)).
CountReport count_at(const MongeMap& map, const PsiValue& psi_q, const Shift& theta, std::int64_t q,
                     CountMethod method, const CountOptions& options = {});

struct NReport {
  std::int64_t Q = 0;
  std::uint64_t N = 0;
  double heuristic_volume = 0.0;  ///< ψ(Q)^m Q^{d+1}
  std::vector<CountReport> rows;  ///< q ascending over the support in (Q, 2Q]
};

/// N(Q, ψ, θ) = Σ_{Q < q <= 2Q} A(q, ψ, θ).
NReport count_N(const MongeMap& map, const ApproxFunction& psi, const Shift& theta, std::int64_t Q,
                CountMethod method = CountMethod::pruned, const CountOptions& options = {});

/// ψ^m q^d
double heuristic_estimate(double psi_q, std::int64_t q, int d, int m);

}  // namespace dioph
