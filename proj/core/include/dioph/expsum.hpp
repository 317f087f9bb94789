#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dioph/approx.hpp"
#include "dioph/counter.hpp"
#include "dioph/manifold.hpp"

namespace dioph {

enum class Regime { main, trivial };

/// Choice of the Fejér truncation H. `full` is H = ⌊1/(2ψ)⌋; `half` is
/// H = ⌊1/(4ψ)⌋, which keeps every v counted by B inside the window
/// ‖x‖ <= 1/(2H) where the kernel is at least 4/π².
enum class FejerWindow { full, half };

/// Block decomposition parameters for one (q, ψ(q), C₁).
struct BlockParams {
  std::int64_t q = 0;
  double psi_q = 0.0;
  double C1 = 0.0;
  double delta = 0.0;          ///< 1/C₁
  std::int64_t r = 0;          ///< ⌊(δ q ψ)^{1/2}⌋, main regime only
  std::int64_t H = 0;          ///< Fejér truncation
  std::int64_t s_blocks = 0;   ///< ⌊q/r⌋, main regime only
  Regime regime = Regime::trivial;
  FejerWindow window = FejerWindow::full;
};

BlockParams block_params(std::int64_t q, double psi_q, double C1, FejerWindow window = FejerWindow::full);

struct Decomposition {
  std::vector<std::int64_t> u;
  std::vector<std::int64_t> v;
};

/// a = r·u + v with u_i = ⌊a_i/r⌋ and 0 <= v_i < r.
Decomposition decompose(std::span<const std::int64_t> a, std::int64_t r);

/// Members of A(q, ψ, θ) whose block index is u.
std::uint64_t count_A_u(const MongeMap& map, const PsiValue& psi_q, const Shift& theta, const BlockParams& params,
                        std::span<const std::int64_t> u);

/// #{v ∈ [0,r)^d : ‖F_j(u,v) − γ_j‖ < 2ψ for all j}, with
/// F_j(u,v) = q f_j((ru+λ̃)/q) + Σ_i v_i ∂f_j/∂α_i((ru+λ̃)/q). Decided exactly.
std::uint64_t count_B_u(const MongeMap& map, const PsiValue& psi_q, const Shift& theta, const BlockParams& params,
                        std::span<const std::int64_t> u);

struct BStarValue {
  double value = 0.0;          ///< Re Σ_h w(h) Σ_v e(h·(F − γ))
  double imag_residue = 0.0;   ///< |Im| of the same sum
  double fejer_product = 0.0;  ///< Σ_v ∏_j Fejér_H(F_j − γ_j), evaluated directly
  double majorant = 0.0;       ///< H^{-m} Σ_h ∏_i |Σ_{v<r} e(v ρ_i(h))|
};

inline constexpr double kDefaultWorkBudget = 1e8;

/// Fejér-weighted exponential sum B*(q, ψ, u). Throws BudgetError when
/// (2H+1)^m · r^d exceeds `work_budget`.
BStarValue eval_B_star_u(const MongeMap& map, const Shift& theta, const BlockParams& params,
                         std::span<const std::int64_t> u, double work_budget = kDefaultWorkBudget);

/// (sin πHx / (H sin πx))², equal to 1 at integers.
double fejer_kernel(double x, std::int64_t H);

/// |Σ_{v<r} e(vρ)| = |sin(πrρ)/sin(πρ)|, equal to r at integers.
double geometric_sum_magnitude(double rho, std::int64_t r);

/// ψ^m q^d + (qψ)^{-1/2} q^d max{1, log(qψ)}
double bound_thm11(std::int64_t q, double psi_q, int d, int m);

/// ψ q^d + (qψ)^{-d/2} q^d max{1, (log(qψ))^d}
double bound_thm14(std::int64_t q, double psi_q, int d);

/// ‖x‖, distance to the nearest integer.
double nearest_integer_distance(double x);

struct ChainReport {
  std::vector<std::int64_t> u;
  std::uint64_t A_u = 0;
  std::uint64_t B_u = 0;
  double B_star_u = 0.0;
  double fejer_slack = 0.0;    ///< B* − (4/π²)^m B_u; negative means the Fejér step failed
  double imag_residue = 0.0;
  double majorant = 0.0;
  bool chain_ok = false;
};

struct ChainOptions {
  FejerWindow window = FejerWindow::full;
  double work_budget = kDefaultWorkBudget;
  int threads = 0;
};

/// Per-instance check of the proof chain A = Σ_u A_u, A_u <= B_u,
/// B_u <= (π²/4)^m B*_u, plus B* <= majorant.
struct ChainSummary {
  BlockParams params;
  std::uint64_t A = 0;
  std::uint64_t sum_A_u = 0;
  double second_derivative_bound = 0.0;  ///< certified d² sup|f''|
  bool mvt_ok = false;                   ///< C₁ dominates the certified bound
  std::vector<ChainReport> rows;         ///< canonical lexicographic u order
  std::uint64_t inclusion_violations = 0;  ///< A_u > B_u
  std::uint64_t fejer_violations = 0;      ///< B_u > (π²/4)^m B* + 1e-8
  std::uint64_t residue_violations = 0;    ///< B* < −1e-9 or imaginary residue too large
  std::uint64_t majorant_violations = 0;   ///< B* > majorant

  [[nodiscard]] bool partition_ok() const { return A == sum_A_u; }
  [[nodiscard]] bool all_ok() const {
    return params.regime == Regime::trivial ||
           (mvt_ok && partition_ok() && inclusion_violations == 0 && fejer_violations == 0 &&
            residue_violations == 0 && majorant_violations == 0);
  }
};

ChainSummary run_chain(const MongeMap& map, const PsiValue& psi_q, const Shift& theta, std::int64_t q, double C1,
                       const ChainOptions& options = {});

}  // namespace dioph
