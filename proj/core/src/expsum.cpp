#include "dioph/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dioph/errors.hpp"
#include "dioph/parallel.hpp"

namespace dioph {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  [[nodiscard]] double value() const { return sum + carry; }
};

// Lexicographic odometer over [lo, hi] boxes.
bool advance(std::vector<std::int64_t>& x, std::int64_t lo, std::int64_t hi) {
  for (int pos = static_cast<int>(x.size()) - 1; pos >= 0; --pos) {
    auto& c = x[static_cast<size_t>(pos)];
    if (c < hi) {
      ++c;
      return true;
    }
    c = lo;
  }
  return false;
}

void require_main(const BlockParams& p) {
  if (p.regime != Regime::main) throw InputError("block quantities need the main regime (δqψ > 1)");
}

// Exact and approximate data at the block base point (ru + λ̃)/q.
struct BlockBase {
  std::vector<Rational> offset;               // q f_j(base) − γ_j, exact
  std::vector<std::vector<Rational>> grad;    // [j][i] ∂f_j/∂α_i(base), exact
  std::vector<double> offset_frac;            // fractional part of offset, as double
  std::vector<double> offset_abs;             // |offset| as double, for error bounds
  std::vector<std::vector<double>> grad_d;

  BlockBase(const MongeMap& map, const Shift& reduced, const BlockParams& p, std::span<const std::int64_t> u) {
    const int d = map.d();
    const int m = map.m();
    std::vector<Rational> base(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
      base[static_cast<size_t>(i)] =
          (Rational(p.r) * Rational(u[static_cast<size_t>(i)]) + reduced.lambda[static_cast<size_t>(i)]) / Rational(p.q);
    }
    for (int j = 0; j < m; ++j) {
      Rational off = Rational(p.q) * map.coordinate(j)(std::span<const Rational>(base)) - reduced.gamma[static_cast<size_t>(j)];
      off.canonicalize();
      offset_frac.push_back(to_double(fractional_part(off)));
      offset_abs.push_back(std::abs(to_double(off)));
      offset.push_back(std::move(off));
      std::vector<Rational> g;
      std::vector<double> gd;
      for (int i = 0; i < d; ++i) {
        g.push_back(map.gradient(j, i)(std::span<const Rational>(base)));
        gd.push_back(to_double(g.back()));
      }
      grad.push_back(std::move(g));
      grad_d.push_back(std::move(gd));
    }
  }

  // F_j(u, v) − γ_j reduced mod 1, in double precision.
  [[nodiscard]] double phase(int j, std::span<const std::int64_t> v) const {
    double x = offset_frac[static_cast<size_t>(j)];
    for (size_t i = 0; i < v.size(); ++i) x += static_cast<double>(v[i]) * grad_d[static_cast<size_t>(j)][i];
    return x - std::floor(x);
  }
};

}  // namespace

double nearest_integer_distance(double x) { return std::abs(x - std::nearbyint(x)); }

BlockParams block_params(std::int64_t q, double psi_q, double C1, FejerWindow window) {
  if (q < 1) throw InputError("block_params needs q >= 1");
  if (!(psi_q > 0.0)) throw InputError("block_params needs psi(q) > 0");
  if (psi_q > 0.5) throw InputError("block_params needs psi(q) <= 1/2 (H would be 0)");
  if (!(C1 > 0.0)) throw InputError("block_params needs C1 > 0");
  BlockParams p;
  p.q = q;
  p.psi_q = psi_q;
  p.C1 = C1;
  p.delta = 1.0 / C1;
  p.window = window;
  // Tolerances keep exact-looking products such as 1/(2·0.1) on the right side of the floor.
  const double h_arg = window == FejerWindow::full ? 1.0 / (2.0 * psi_q) : 1.0 / (4.0 * psi_q);
  p.H = static_cast<std::int64_t>(std::floor(h_arg * (1.0 + 1e-12)));
  const double dq = p.delta * static_cast<double>(q) * psi_q;
  if (dq <= 1.0 * (1.0 + 1e-12) || p.H < 1) {
    p.regime = Regime::trivial;
    return p;
  }
  p.regime = Regime::main;
  p.r = static_cast<std::int64_t>(std::floor(std::sqrt(dq) * (1.0 + 1e-12)));
  p.s_blocks = q / p.r;
  return p;
}

Decomposition decompose(std::span<const std::int64_t> a, std::int64_t r) {
  if (r < 1) throw InputError("decompose needs r >= 1");
  Decomposition out;
  for (auto x : a) {
    if (x < 0) throw InputError("decompose needs non-negative indices");
    out.u.push_back(x / r);
    out.v.push_back(x % r);
  }
  return out;
}

std::uint64_t count_A_u(const MongeMap& map, const PsiValue& psi_q, const Shift& theta, const BlockParams& params,
                        std::span<const std::int64_t> u) {
  require_main(params);
  if (psi_q.exact == 0) return 0;
  if (static_cast<int>(u.size()) != map.d()) throw InputError("block index has wrong dimension");
  const Shift reduced = reduce_shift(theta);
  const IndexSet z(params.q, reduced.lambda);
  std::vector<std::int64_t> lo(u.size());
  std::vector<std::int64_t> hi(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    if (u[i] < 0 || u[i] > params.s_blocks) return 0;
    lo[i] = params.r * u[i];
    hi[i] = std::min(lo[i] + params.r - 1, z.extents()[i]);
    if (hi[i] < lo[i]) return 0;
  }
  PointTester tester(map, reduced, params.q, psi_q);
  std::uint64_t count = 0;
  std::vector<std::int64_t> a = lo;
  while (true) {
    if (tester.test(a).hit) ++count;
    int pos = static_cast<int>(a.size()) - 1;
    while (pos >= 0 && a[static_cast<size_t>(pos)] == hi[static_cast<size_t>(pos)]) {
      a[static_cast<size_t>(pos)] = lo[static_cast<size_t>(pos)];
      --pos;
    }
    if (pos < 0) break;
    ++a[static_cast<size_t>(pos)];
  }
  return count;
}

namespace {

std::uint64_t count_B_with_base(const MongeMap& map, const PsiValue& psi_q, const BlockParams& params,
                                const BlockBase& base) {
  const int d = map.d();
  const int m = map.m();
  const double threshold = 2.0 * psi_q.value;
  const Rational threshold_exact = 2 * psi_q.exact;
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<std::int64_t> v(static_cast<size_t>(d), 0);
  std::uint64_t count = 0;
  do {
    bool hit = true;
    for (int j = 0; j < m && hit; ++j) {
      double x = base.offset_frac[static_cast<size_t>(j)];
      double scale = 1.0 + base.offset_abs[static_cast<size_t>(j)] * eps;
      for (int i = 0; i < d; ++i) {
        const double term = static_cast<double>(v[static_cast<size_t>(i)]) * base.grad_d[static_cast<size_t>(j)][static_cast<size_t>(i)];
        x += term;
        scale += std::abs(term);
      }
      const double dist = nearest_integer_distance(x);
      const double err = 16.0 * eps * (d + 2) * scale;
      if (dist < threshold - err) continue;
      if (dist > threshold + err) {
        hit = false;
        continue;
      }
      Rational exact = base.offset[static_cast<size_t>(j)];
      for (int i = 0; i < d; ++i) exact += Rational(v[static_cast<size_t>(i)]) * base.grad[static_cast<size_t>(j)][static_cast<size_t>(i)];
      if (distance_to_integer(exact) >= threshold_exact) hit = false;
    }
    if (hit) ++count;
  } while (advance(v, 0, params.r - 1));
  return count;
}

BStarValue b_star_with_base(const MongeMap& map, const BlockParams& params, const BlockBase& base,
                            double work_budget) {
  const int d = map.d();
  const int m = map.m();
  const double work = std::pow(2.0 * static_cast<double>(params.H) + 1.0, m) * std::pow(static_cast<double>(params.r), d);
  if (work > work_budget) {
    throw BudgetError("B* evaluation needs " + std::to_string(work) + " terms per block, over the budget of " +
                      std::to_string(work_budget) + "; use a smaller q");
  }
  const auto H = params.H;
  const double H2 = static_cast<double>(H) * static_cast<double>(H);

  // Phases x_j(v) for every v, in lexicographic v order.
  std::vector<std::vector<double>> phases;
  {
    std::vector<std::int64_t> v(static_cast<size_t>(d), 0);
    do {
      std::vector<double> x(static_cast<size_t>(m));
      for (int j = 0; j < m; ++j) x[static_cast<size_t>(j)] = base.phase(j, v);
      phases.push_back(std::move(x));
    } while (advance(v, 0, params.r - 1));
  }

  BStarValue out;
  CompensatedSum re;
  CompensatedSum im;
  CompensatedSum majorant;
  std::vector<std::int64_t> h(static_cast<size_t>(m), -H);
  do {
    double weight = 1.0;
    for (auto hj : h) weight *= static_cast<double>(H - std::abs(hj)) / H2;
    // ∏_i |Σ_{v<r} e(v ρ_i(h))| with ρ_i(h) = Σ_j h_j ∂f_j/∂α_i.
    double geom = 1.0;
    for (int i = 0; i < d; ++i) {
      double rho = 0.0;
      for (int j = 0; j < m; ++j) rho += static_cast<double>(h[static_cast<size_t>(j)]) * base.grad_d[static_cast<size_t>(j)][static_cast<size_t>(i)];
      geom *= geometric_sum_magnitude(rho, params.r);
    }
    majorant.add(geom);
    if (weight == 0.0) continue;
    for (const auto& x : phases) {
      double t = 0.0;
      for (int j = 0; j < m; ++j) t += static_cast<double>(h[static_cast<size_t>(j)]) * x[static_cast<size_t>(j)];
      t -= std::floor(t);
      re.add(weight * std::cos(kTwoPi * t));
      im.add(weight * std::sin(kTwoPi * t));
    }
  } while (advance(h, -H, H));

  CompensatedSum fejer;
  for (const auto& x : phases) {
    double prod = 1.0;
    for (int j = 0; j < m; ++j) prod *= fejer_kernel(x[static_cast<size_t>(j)], H);
    fejer.add(prod);
  }
  out.value = re.value();
  out.imag_residue = std::abs(im.value());
  out.fejer_product = fejer.value();
  out.majorant = majorant.value() / std::pow(static_cast<double>(H), m);
  return out;
}

}  // namespace

std::uint64_t count_B_u(const MongeMap& map, const PsiValue& psi_q, const Shift& theta, const BlockParams& params,
                        std::span<const std::int64_t> u) {
  require_main(params);
  if (static_cast<int>(u.size()) != map.d()) throw InputError("block index has wrong dimension");
  const BlockBase base(map, reduce_shift(theta), params, u);
  return count_B_with_base(map, psi_q, params, base);
}

BStarValue eval_B_star_u(const MongeMap& map, const Shift& theta, const BlockParams& params,
                         std::span<const std::int64_t> u, double work_budget) {
  require_main(params);
  if (static_cast<int>(u.size()) != map.d()) throw InputError("block index has wrong dimension");
  const BlockBase base(map, reduce_shift(theta), params, u);
  return b_star_with_base(map, params, base, work_budget);
}

double fejer_kernel(double x, std::int64_t H) {
  if (H < 1) throw InputError("fejer_kernel needs H >= 1");
  const double y = x - std::nearbyint(x);
  if (y == 0.0) return 1.0;
  const double s = std::sin(std::numbers::pi * y);
  const double ratio = std::sin(std::numbers::pi * static_cast<double>(H) * y) / (static_cast<double>(H) * s);
  return std::clamp(ratio * ratio, 0.0, 1.0);
}

double geometric_sum_magnitude(double rho, std::int64_t r) {
  if (r < 1) throw InputError("geometric_sum_magnitude needs r >= 1");
  const double y = rho - std::nearbyint(rho);
  const auto rd = static_cast<double>(r);
  if (y == 0.0) return rd;
  const double value = std::abs(std::sin(std::numbers::pi * rd * y) / std::sin(std::numbers::pi * y));
  return std::min(value, rd);
}

double bound_thm11(std::int64_t q, double psi_q, int d, int m) {
  if (!(psi_q > 0.0)) throw InputError("theorem bound needs psi(q) > 0");
  const auto qd = static_cast<double>(q);
  const double qpsi = qd * psi_q;
  const double qd_pow = std::pow(qd, d);
  return std::pow(psi_q, m) * qd_pow + std::pow(qpsi, -0.5) * qd_pow * std::max(1.0, std::log(qpsi));
}

double bound_thm14(std::int64_t q, double psi_q, int d) {
  if (!(psi_q > 0.0)) throw InputError("theorem bound needs psi(q) > 0");
  const auto qd = static_cast<double>(q);
  const double qpsi = qd * psi_q;
  const double qd_pow = std::pow(qd, d);
  const double log_term = std::pow(std::max(0.0, std::log(qpsi)), d);
  return psi_q * qd_pow + std::pow(qpsi, -0.5 * d) * qd_pow * std::max(1.0, log_term);
}

ChainSummary run_chain(const MongeMap& map, const PsiValue& psi_q, const Shift& theta, std::int64_t q, double C1,
                       const ChainOptions& options) {
  if (!(psi_q.exact > 0) || psi_q.exact > Rational(1, 2)) throw InputError("chain check needs 0 < psi(q) <= 1/2");
  ChainSummary summary;
  summary.params = block_params(q, psi_q.value, C1, options.window);
  const int threads = options.threads > 0 ? options.threads : default_thread_count();
  CountOptions count_options;
  count_options.threads = threads;
  summary.A = count_at(map, psi_q, theta, q, CountMethod::pruned, count_options).A;
  summary.second_derivative_bound = certify_second_derivative_bound(map);
  if (summary.params.regime == Regime::trivial) return summary;

  const auto& p = summary.params;
  summary.mvt_ok = C1 >= summary.second_derivative_bound * (1.0 - 1e-12) &&
                   C1 * static_cast<double>(p.r) * static_cast<double>(p.r) <= static_cast<double>(q) * psi_q.value * (1.0 + 1e-12);

  const int d = map.d();
  const Shift reduced = reduce_shift(theta);
  const IndexSet z(q, reduced.lambda);
  const auto side = static_cast<std::uint64_t>(p.s_blocks + 1);
  std::uint64_t blocks = 1;
  for (int i = 0; i < d; ++i) blocks *= side;

  // Bucket the members of A(q, ψ, θ) by block index u(a) = ⌊a/r⌋.
  std::vector<std::uint64_t> bucket(blocks, 0);
  {
    PointTester tester(map, reduced, q, psi_q);
    for (const auto& a : z) {
      if (!tester.test(a).hit) continue;
      std::uint64_t flat = 0;
      for (int i = 0; i < d; ++i) flat = flat * side + static_cast<std::uint64_t>(a[static_cast<size_t>(i)] / p.r);
      ++bucket[flat];
    }
  }
  for (auto c : bucket) summary.sum_A_u += c;

  const double fejer_constant = std::pow(std::numbers::pi * std::numbers::pi / 4.0, map.m());
  summary.rows.resize(blocks);
  parallel_for(blocks, threads, [&](std::size_t flat) {
    std::vector<std::int64_t> u(static_cast<size_t>(d));
    std::uint64_t rest = flat;
    for (int i = d - 1; i >= 0; --i) {
      u[static_cast<size_t>(i)] = static_cast<std::int64_t>(rest % side);
      rest /= side;
    }
    const BlockBase base(map, reduced, p, u);
    ChainReport row;
    row.u = u;
    row.A_u = bucket[flat];
    row.B_u = count_B_with_base(map, psi_q, p, base);
    const BStarValue bs = b_star_with_base(map, p, base, options.work_budget);
    row.B_star_u = bs.value;
    row.imag_residue = bs.imag_residue;
    row.majorant = bs.majorant;
    row.fejer_slack = bs.value - static_cast<double>(row.B_u) / fejer_constant;
    const bool inclusion = row.A_u <= row.B_u;
    const bool fejer = static_cast<double>(row.B_u) <= fejer_constant * bs.value + 1e-8;
    const bool residue = bs.value >= -1e-9 && bs.imag_residue <= 1e-9 * (1.0 + bs.value);
    const bool majorant = bs.value <= bs.majorant * (1.0 + 1e-12) + 1e-9;
    row.chain_ok = inclusion && fejer && residue && majorant;
    summary.rows[flat] = std::move(row);
  });
  for (const auto& row : summary.rows) {
    if (row.A_u > row.B_u) ++summary.inclusion_violations;
    if (static_cast<double>(row.B_u) > fejer_constant * row.B_star_u + 1e-8) ++summary.fejer_violations;
    if (row.B_star_u < -1e-9 || row.imag_residue > 1e-9 * (1.0 + row.B_star_u)) ++summary.residue_violations;
    if (row.B_star_u > row.majorant * (1.0 + 1e-12) + 1e-9) ++summary.majorant_violations;
  }
  return summary;
}

}  // namespace dioph
