#include "dioph/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "dioph/counter.hpp"
#include "dioph/errors.hpp"
#include "dioph/parallel.hpp"
#include "dioph/rng.hpp"

namespace dioph {

namespace {

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

struct SeriesChunk {
  CompensatedSum total;
  CompensatedSum last;
  CompensatedSum previous;
  std::uint64_t terms = 0;
  std::uint64_t violations = 0;
  std::vector<std::int64_t> first_violations;
};

// log ψ(q) for q in the support. Closed forms skip the exact-value path.
class LogPsi {
 public:
  explicit LogPsi(const ApproxFunction& psi) : psi_(psi) {
    if (const auto* p = std::get_if<PowerForm>(&psi.form())) {
      closed_ = true;
      tau_ = to_double(p->tau);
    } else if (const auto* p = std::get_if<PowerLogForm>(&psi.form())) {
      closed_ = true;
      tau_ = to_double(p->tau);
      beta_ = to_double(p->beta);
    }
    log_scale_ = std::log(to_double(psi.scale()));
  }

  [[nodiscard]] double operator()(std::int64_t q, double lq) const {
    if (!closed_) {
      const double v = psi_eval(psi_, q);
      return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
    }
    double out = log_scale_ - tau_ * lq;
    if (beta_ != 0.0) out += beta_ * std::log(lq);
    return out;
  }

 private:
  const ApproxFunction& psi_;
  bool closed_ = false;
  double tau_ = 0.0;
  double beta_ = 0.0;
  double log_scale_ = 0.0;
};

void check_series(const SeriesSpec& spec) {
  if (spec.d < 1 || spec.m < 1) throw InputError("series needs d >= 1 and m >= 1");
  if (spec.Q_max < 2) throw InputError("series needs Q_max >= 2");
  if (spec.s_hausdorff <= 0 || spec.s_hausdorff > spec.d) {
    throw InputError("series needs 0 < s <= d, got s = " + to_string(spec.s_hausdorff));
  }
}

}  // namespace

SeriesReport series_partial_sum(const SeriesSpec& spec, int threads) {
  check_series(spec);
  const bool full = std::holds_alternative<AllSupport>(spec.psi.support());
  std::vector<std::int64_t> members;
  if (!full) members = spec.psi.support_in(1, spec.Q_max);
  const std::uint64_t count = full ? static_cast<std::uint64_t>(spec.Q_max) : members.size();

  const double exponent = to_double(Rational(spec.s_hausdorff + spec.m));
  const double n = spec.n();
  const auto half = static_cast<double>(spec.Q_max) / 2.0;
  const auto quarter = static_cast<double>(spec.Q_max) / 4.0;
  const Threshold floor_kind = Threshold::cor12(spec.m);
  const LogPsi log_psi(spec.psi);

  constexpr std::uint64_t kChunk = 1 << 14;
  const std::uint64_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<SeriesChunk> parts(chunks);
  parallel_for(chunks, threads > 0 ? threads : default_thread_count(), [&](std::size_t c) {
    SeriesChunk& part = parts[c];
    const std::uint64_t hi = std::min<std::uint64_t>(count, (c + 1) * kChunk);
    for (std::uint64_t k = c * kChunk; k < hi; ++k) {
      const std::int64_t q = full ? static_cast<std::int64_t>(k) + 1 : members[k];
      if (full && !spec.psi.in_support(q)) continue;
      const double lq = std::log(static_cast<double>(q));
      const double lpsi = log_psi(q, lq);
      if (!(lpsi > -std::numeric_limits<double>::infinity())) continue;
      if (q >= 2 && q <= kThresholdScanLimit && std::exp(lpsi) < threshold_floor(floor_kind, q) * (1.0 - 1e-12)) {
        ++part.violations;
        if (part.first_violations.size() < 10) part.first_violations.push_back(q);
      }
      const double term = std::exp(exponent * (lpsi - lq) + n * lq);
      ++part.terms;
      part.total.add(term);
      const auto qd = static_cast<double>(q);
      if (qd > half) {
        part.last.add(term);
      } else if (qd > quarter) {
        part.previous.add(term);
      }
    }
  });

  SeriesReport report;
  CompensatedSum total;
  CompensatedSum last;
  CompensatedSum previous;
  for (const auto& part : parts) {
    total.add(part.total.value());
    last.add(part.last.value());
    previous.add(part.previous.value());
    report.terms += part.terms;
    report.threshold_violations += part.violations;
    for (auto q : part.first_violations) {
      if (report.first_violations.size() < 10) report.first_violations.push_back(q);
    }
  }
  report.partial_sum = total.value();
  report.last_doubling = last.value();
  report.previous_doubling = previous.value();
  return report;
}

std::string to_string(Convergence c) {
  switch (c) {
    case Convergence::converges: return "converges";
    case Convergence::diverges: return "diverges";
    case Convergence::boundary_log: return "boundary_log";
  }
  return "unknown";
}

namespace {

struct PowerData {
  Rational tau;
  Rational beta;
  bool zero = false;
};

PowerData power_data(const ApproxFunction& psi) {
  PowerData out;
  if (const auto* p = std::get_if<PowerForm>(&psi.form())) {
    out.tau = p->tau;
  } else if (const auto* pl = std::get_if<PowerLogForm>(&psi.form())) {
    out.tau = pl->tau;
    out.beta = pl->beta;
  } else if (const auto* c = std::get_if<ConstantForm>(&psi.form())) {
    out.zero = c->value == 0;
  } else {
    throw InputError("classification needs a power or power-log psi; use the partial sum for tables");
  }
  if (psi.scale() == 0) out.zero = true;
  return out;
}

}  // namespace

Rational series_exponent(const SeriesSpec& spec) {
  const PowerData p = power_data(spec.psi);
  Rational e = Rational(spec.n()) - (spec.s_hausdorff + spec.m) * (1 + p.tau);
  e.canonicalize();
  return e;
}

Convergence classify_convergence(const SeriesSpec& spec) {
  check_series(spec);
  const PowerData p = power_data(spec.psi);
  if (std::holds_alternative<ExplicitSupport>(spec.psi.support())) {
    throw InputError("classification needs full or lacunary support; use the partial sum for explicit sets");
  }
  if (p.zero) return Convergence::converges;
  const Rational e = series_exponent(spec);
  Rational log_power = p.beta * (spec.s_hausdorff + spec.m);
  log_power.canonicalize();
  const Rational critical = std::holds_alternative<LacunarySupport>(spec.psi.support()) ? Rational(0) : Rational(-1);
  if (e < critical) return Convergence::converges;
  if (e > critical) return Convergence::diverges;
  if (log_power < -1) return Convergence::converges;
  if (log_power == -1) return Convergence::boundary_log;
  return Convergence::diverges;
}

CriticalExponents critical_exponents(int d, int m, int n, std::optional<Rational> tau) {
  if (d < 1 || m < 1) throw InputError("critical exponents need d >= 1 and m >= 1");
  if (n != d + m) throw InputError("critical exponents need n = d + m");
  CriticalExponents out;
  out.d = d;
  out.m = m;
  out.n = n;
  out.s0_monotonic = Rational(d * m, m + 1) + Rational(n + 1, 2 * (m + 1));
  out.s0_monotonic.canonicalize();
  out.monotonic_applicable = Rational(d) > Rational(n + 1, 2);
  if (m == 1) {
    Rational s = Rational(n - 1, 2) + Rational(n + 1, 2 * n);
    s.canonicalize();
    out.s0_hypersurface = s;
    out.hypersurface_applicable = n >= 3;
  }
  out.s_lacunary = Rational(d) - Rational(n, 2 * (m + 1));
  out.s_lacunary.canonicalize();
  if (tau) {
    out.tau = *tau;
    Rational bound = Rational(n + 1) / (*tau + 1) - m;
    bound.canonicalize();
    out.dim_bound = bound;
    out.tau_in_range = *tau >= Rational(1, n) && *tau <= Rational(1, 2 * m + 1);
    out.dim_bound_applicable = out.tau_in_range && out.monotonic_applicable;
  }
  return out;
}

namespace {

using Box = std::vector<Interval>;

enum class Verdict { outside, inside, unknown };

// Where q f_j − γ̃_j − b_j sits relative to (−ψ, ψ) over a box.
Verdict classify_box(const MongeMap& map, const Box& box, std::int64_t q, const std::vector<double>& gamma,
                     std::span<const std::int64_t> b, double psi) {
  bool inside = true;
  const Interval qi(static_cast<double>(q));
  for (int j = 0; j < map.m(); ++j) {
    const Interval g = qi * map.coordinate(j)(std::span<const Interval>(box)) -
                       (Interval(gamma[static_cast<size_t>(j)]) + Interval(static_cast<double>(b[static_cast<size_t>(j)])));
    if (g.hi <= -psi || g.lo >= psi) return Verdict::outside;
    if (!(g.lo > -psi && g.hi < psi)) inside = false;
  }
  return inside ? Verdict::inside : Verdict::unknown;
}

bool witness(const MongeMap& map, const Box& box, std::int64_t q, const std::vector<double>& gamma,
             std::span<const std::int64_t> b, double psi) {
  Box point;
  for (const auto& x : box) point.emplace_back(x.mid());
  return classify_box(map, point, q, gamma, b, psi) == Verdict::inside;
}

struct CellSearch {
  bool found = false;
  bool witnessed = false;
  Box hull;
};

CellSearch search_cell(const MongeMap& map, const Box& root, std::int64_t q, const std::vector<double>& gamma,
                       std::span<const std::int64_t> b, double psi, int max_depth) {
  CellSearch out;
  std::vector<std::pair<Box, int>> stack{{root, 0}};
  auto keep = [&](const Box& box) {
    if (!out.found) {
      out.hull = box;
      out.found = true;
      return;
    }
    for (size_t i = 0; i < box.size(); ++i) out.hull[i] = hull(out.hull[i], box[i]);
  };
  while (!stack.empty()) {
    auto [box, depth] = std::move(stack.back());
    stack.pop_back();
    const Verdict v = classify_box(map, box, q, gamma, b, psi);
    if (v == Verdict::outside) continue;
    if (v == Verdict::inside) {
      out.witnessed = true;
      keep(box);
      continue;
    }
    if (depth >= max_depth) {
      if (!out.witnessed && witness(map, box, q, gamma, b, psi)) out.witnessed = true;
      keep(box);
      continue;
    }
    size_t axis = 0;
    for (size_t i = 1; i < box.size(); ++i) {
      if (box[i].width() > box[axis].width()) axis = i;
    }
    const double mid = box[axis].mid();
    Box left = box;
    Box right = box;
    left[axis].hi = mid;
    right[axis].lo = mid;
    stack.emplace_back(std::move(right), depth + 1);
    stack.emplace_back(std::move(left), depth + 1);
  }
  return out;
}

}  // namespace

CoverSummary build_cover(const MongeMap& map, const PsiValue& psi_q, const Shift& theta, std::int64_t q,
                         const Rational& s_hausdorff, const CoverOptions& options) {
  if (q < 1) throw InputError("cover needs q >= 1");
  if (!(psi_q.exact > 0) || psi_q.exact > Rational(1, 2)) throw InputError("cover needs 0 < psi(q) <= 1/2");
  if (s_hausdorff <= 0 || s_hausdorff > map.d()) throw InputError("cover needs 0 < s <= d");
  const int d = map.d();
  const int m = map.m();
  const int max_depth = options.max_depth > 0 ? options.max_depth : 10 * d;
  const int threads = options.threads > 0 ? options.threads : default_thread_count();

  CoverSummary summary;
  summary.q = q;
  summary.psi_q = psi_q.value;
  summary.c1 = estimate_constants(map, options.grid_resolution).c1;
  summary.c2 = 1.0 + summary.c1;
  summary.diameter_limit = 2.0 * std::sqrt(static_cast<double>(d)) * psi_q.value / static_cast<double>(q);

  const Shift reduced = reduce_shift(theta);
  const std::vector<double> lambda = reduced.lambda_approx();
  const std::vector<double> gamma = reduced.gamma_approx();
  const IndexSet z(q, reduced.lambda);
  std::vector<std::vector<std::int64_t>> points(z.begin(), z.end());
  const double psi = psi_q.value;
  const double width = psi / static_cast<double>(q);
  const double s = to_double(s_hausdorff);

  std::vector<std::vector<CoverCell>> per_point(points.size());
  parallel_for(points.size(), threads, [&](std::size_t idx) {
    const auto& a = points[idx];
    Box root;
    for (int i = 0; i < d; ++i) {
      const double centre = (static_cast<double>(a[static_cast<size_t>(i)]) + lambda[static_cast<size_t>(i)]) / static_cast<double>(q);
      root.emplace_back(std::max(0.0, detail::down(centre - width)), std::min(1.0, detail::up(centre + width)));
    }
    // Candidate b from the range of q f − γ̃ over the α-box.
    std::vector<std::int64_t> lo(static_cast<size_t>(m));
    std::vector<std::int64_t> hi(static_cast<size_t>(m));
    const Interval qi(static_cast<double>(q));
    for (int j = 0; j < m; ++j) {
      const Interval g = qi * map.coordinate(j)(std::span<const Interval>(root)) - Interval(gamma[static_cast<size_t>(j)]);
      lo[static_cast<size_t>(j)] = static_cast<std::int64_t>(std::floor(g.lo - psi));
      hi[static_cast<size_t>(j)] = static_cast<std::int64_t>(std::ceil(g.hi + psi));
    }
    std::vector<std::int64_t> b = lo;
    while (true) {
      const CellSearch found = search_cell(map, root, q, gamma, b, psi, max_depth);
      if (found.found) {
        CoverCell cell;
        cell.q = q;
        cell.a = a;
        cell.b = b;
        cell.box = found.hull;
        double sq = 0.0;
        for (const auto& x : cell.box) sq += x.width() * x.width();
        cell.diameter = std::sqrt(sq);
        cell.s_power = std::pow(cell.diameter, s);
        cell.witnessed = found.witnessed;
        per_point[idx].push_back(std::move(cell));
      }
      int pos = m - 1;
      while (pos >= 0 && b[static_cast<size_t>(pos)] == hi[static_cast<size_t>(pos)]) {
        b[static_cast<size_t>(pos)] = lo[static_cast<size_t>(pos)];
        --pos;
      }
      if (pos < 0) break;
      ++b[static_cast<size_t>(pos)];
    }
  });

  CompensatedSum total;
  for (auto& cells : per_point) {
    for (auto& cell : cells) {
      total.add(cell.s_power);
      summary.cells.push_back(std::move(cell));
    }
  }
  summary.count = summary.cells.size();
  summary.sum_s_power = total.value();

  const double c2psi = summary.c2 * psi;
  summary.bound_applicable = c2psi < 0.5;
  if (summary.bound_applicable) {
    CountOptions count_options;
    count_options.threads = threads;
    summary.bound_count =
        count_at(map, PsiValue::from_double(c2psi), theta, q, CountMethod::pruned, count_options).A;
  }
  return summary;
}

McEstimate doubly_metric_mc(const ContinuousMap& F, int d, int n, double psi_q, std::int64_t q,
                            std::uint64_t samples, std::uint64_t seed, int threads) {
  if (d < 1 || n < 1) throw InputError("Monte Carlo needs d >= 1 and n >= 1");
  if (psi_q < 0.0 || psi_q > 0.5) throw InputError("Monte Carlo needs 0 <= psi(q) <= 1/2");
  if (samples < 1) throw InputError("Monte Carlo needs at least one sample");
  McEstimate out;
  out.samples = samples;
  out.target = std::pow(2.0 * psi_q, n);
  if (psi_q == 0.0) return out;

  const CounterRng rng(seed);
  const auto stride = static_cast<std::uint64_t>(d + n);
  constexpr std::uint64_t kChunks = 256;
  const std::uint64_t chunks = std::min(kChunks, samples);
  std::vector<std::uint64_t> hits(chunks, 0);
  const auto qd = static_cast<double>(q);
  parallel_for(chunks, threads > 0 ? threads : default_thread_count(), [&](std::size_t c) {
    std::vector<double> x(static_cast<size_t>(d));
    std::vector<double> y(static_cast<size_t>(n));
    const std::uint64_t begin = samples * c / chunks;
    const std::uint64_t end = samples * (c + 1) / chunks;
    std::uint64_t local = 0;
    for (std::uint64_t k = begin; k < end; ++k) {
      const std::uint64_t base = k * stride;
      for (int i = 0; i < d; ++i) x[static_cast<size_t>(i)] = rng.uniform(base + static_cast<std::uint64_t>(i));
      F(x, y);
      bool hit = true;
      for (int j = 0; j < n && hit; ++j) {
        const double t = qd * y[static_cast<size_t>(j)] - rng.uniform(base + static_cast<std::uint64_t>(d + j));
        hit = std::abs(t - std::nearbyint(t)) < psi_q;
      }
      if (hit) ++local;
    }
    hits[c] = local;
  });
  for (auto h : hits) out.hits += h;
  const auto N = static_cast<double>(samples);
  out.estimate = static_cast<double>(out.hits) / N;
  out.standard_error = std::sqrt(out.estimate * (1.0 - out.estimate) / N);
  const double diff = out.estimate - out.target;
  if (out.standard_error > 0.0) {
    out.z_score = diff / out.standard_error;
  } else {
    out.z_score = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  return out;
}

McEstimate doubly_metric_mc(const MongeMap& map, double psi_q, std::int64_t q, std::uint64_t samples,
                            std::uint64_t seed, int threads) {
  const int d = map.d();
  auto graph = [&map, d](std::span<const double> x, std::span<double> out) {
    for (int i = 0; i < d; ++i) out[static_cast<size_t>(i)] = x[static_cast<size_t>(i)];
    for (int j = 0; j < map.m(); ++j) out[static_cast<size_t>(d + j)] = map.value(j, x);
  };
  return doubly_metric_mc(graph, d, map.n(), psi_q, q, samples, seed, threads);
}

std::vector<McInstance> standard_mc_suite() {
  return {
      {"parabola", 3, 0.1, 1},         {"parabola", 1, 0.25, 2},        {"parabola", 7, 0.05, 3},
      {"parabola", 50, 0.3, 4},        {"parabola", 1000, 0.01, 5},     {"moment_curve(3)", 2, 0.2, 6},
      {"moment_curve(3)", 11, 0.15, 7}, {"moment_curve(3)", 97, 0.4, 8}, {"moment_curve(4)", 5, 0.3, 9},
      {"moment_curve(4)", 64, 0.45, 10}, {"paraboloid(2)", 4, 0.1, 11},  {"paraboloid(2)", 17, 0.2, 12},
      {"paraboloid(2)", 256, 0.35, 13}, {"paraboloid(3)", 9, 0.4, 14},   {"paraboloid(3)", 31, 0.45, 15},
      {"veronese_counterexample(1)", 3, 0.45, 16},    {"veronese_counterexample(1)", 12, 0.5, 17},    {"parabola", 123456, 0.02, 18},
      {"moment_curve(3)", 1, 0.5, 19}, {"paraboloid(2)", 1000000, 0.25, 20},
  };
}

}  // namespace dioph
