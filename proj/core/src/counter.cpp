#include "dioph/counter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dioph/errors.hpp"
#include "dioph/expsum.hpp"
#include "dioph/parallel.hpp"

namespace dioph {

IndexSet::IndexSet(std::int64_t q, std::span<const Rational> lambda_tilde) {
  if (q < 1) throw InputError("index set needs q >= 1");
  for (const auto& l : lambda_tilde) {
    if (l < 0 || l >= 1) throw InputError("reduced shift must lie in [0,1)");
    extents_.push_back(l == 0 ? q : q - 1);
  }
}

std::uint64_t IndexSet::size() const {
  std::uint64_t n = 1;
  for (auto e : extents_) n *= static_cast<std::uint64_t>(e + 1);
  return n;
}

IndexSet::iterator::iterator(const IndexSet* set, bool end) : set_(set), done_(end) {
  if (!end) current_.assign(set->extents_.size(), 0);
}

IndexSet::iterator& IndexSet::iterator::operator++() {
  int pos = static_cast<int>(current_.size()) - 1;
  while (pos >= 0 && current_[static_cast<size_t>(pos)] == set_->extents_[static_cast<size_t>(pos)]) {
    current_[static_cast<size_t>(pos)] = 0;
    --pos;
  }
  if (pos < 0) {
    done_ = true;
  } else {
    ++current_[static_cast<size_t>(pos)];
  }
  return *this;
}

IndexSet index_set_Z(std::int64_t q, std::span<const Rational> lambda_tilde) { return IndexSet(q, lambda_tilde); }

double heuristic_estimate(double psi_q, std::int64_t q, int d, int m) {
  return std::pow(psi_q, m) * std::pow(static_cast<double>(q), d);
}

PointTester::PointTester(const MongeMap& map, const Shift& reduced_theta, std::int64_t q, const PsiValue& psi,
                         Arithmetic arithmetic)
    : map_(&map),
      theta_(&reduced_theta),
      q_(q),
      psi_(psi),
      arithmetic_(arithmetic),
      lambda_(reduced_theta.lambda_approx()),
      gamma_(reduced_theta.gamma_approx()),
      alpha_(static_cast<size_t>(map.d())),
      dist_(static_cast<size_t>(map.m())),
      err_(static_cast<size_t>(map.m())),
      alpha_exact_(static_cast<size_t>(map.d())) {
  // Relative error of a Horner-free monomial sum, padded for the α rounding.
  err_scale_ = 8.0 * std::numeric_limits<double>::epsilon() * (map.max_degree() + map.d() + 4);
}

PointTester::Outcome PointTester::test(std::span<const std::int64_t> a) {
  if (arithmetic_ == Arithmetic::rational) return test_rational(a);
  const double qd = static_cast<double>(q_);
  for (size_t i = 0; i < alpha_.size(); ++i) alpha_[i] = (static_cast<double>(a[i]) + lambda_[i]) / qd;
  const double psi = psi_.value;
  double sup = 0.0;
  bool certain_miss = false;
  bool uncertain = false;
  for (int j = 0; j < map_->m(); ++j) {
    const auto& f = map_->coordinate(j);
    const double v = qd * f(alpha_) - gamma_[static_cast<size_t>(j)];
    const double dist = std::abs(v - std::nearbyint(v));
    const double err = err_scale_ * (1.0 + qd * f.abs_sum(alpha_) + std::abs(gamma_[static_cast<size_t>(j)]));
    dist_[static_cast<size_t>(j)] = dist;
    err_[static_cast<size_t>(j)] = err;
    sup = std::max(sup, dist);
    if (dist - err >= psi) certain_miss = true;
    if (std::abs(dist - psi) <= err) uncertain = true;
  }
  Outcome out;
  out.borderline = std::abs(sup - psi) <= kBorderlineTolerance;
  if (certain_miss) return out;
  if (!uncertain) {
    out.hit = true;
    return out;
  }
  // Settle the coordinates inside the error band exactly.
  bool have_alpha = false;
  for (int j = 0; j < map_->m(); ++j) {
    if (std::abs(dist_[static_cast<size_t>(j)] - psi) > err_[static_cast<size_t>(j)]) continue;
    if (!have_alpha) {
      for (size_t i = 0; i < alpha_exact_.size(); ++i) {
        alpha_exact_[i] = (Rational(a[i]) + theta_->lambda[i]) / Rational(q_);
      }
      have_alpha = true;
    }
    const Rational v = Rational(q_) * map_->coordinate(j)(std::span<const Rational>(alpha_exact_)) -
                       theta_->gamma[static_cast<size_t>(j)];
    if (distance_to_integer(v) >= psi_.exact) return out;
  }
  out.hit = true;
  return out;
}

PointTester::Outcome PointTester::test_rational(std::span<const std::int64_t> a) {
  for (size_t i = 0; i < alpha_exact_.size(); ++i) {
    alpha_exact_[i] = (Rational(a[i]) + theta_->lambda[i]) / Rational(q_);
  }
  Rational sup = 0;
  for (int j = 0; j < map_->m(); ++j) {
    const Rational v = Rational(q_) * map_->coordinate(j)(std::span<const Rational>(alpha_exact_)) -
                       theta_->gamma[static_cast<size_t>(j)];
    const Rational dist = distance_to_integer(v);
    if (dist > sup) sup = dist;
  }
  Outcome out;
  out.hit = sup < psi_.exact;
  out.borderline = abs(sup - psi_.exact) <= Rational(kBorderlineTolerance);
  return out;
}

namespace {

std::uint64_t saturating_pow(std::int64_t base, int exp) {
  std::uint64_t r = 1;
  const auto b = static_cast<std::uint64_t>(base);
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / b) return std::numeric_limits<std::uint64_t>::max();
    r *= b;
  }
  return r;
}

struct Tally {
  std::uint64_t hits = 0;
  std::uint64_t borderline = 0;
  std::uint64_t visited = 0;

  void add(const PointTester::Outcome& o) {
    ++visited;
    hits += o.hit ? 1 : 0;
    borderline += o.borderline ? 1 : 0;
  }
  void merge(const Tally& t) {
    hits += t.hits;
    borderline += t.borderline;
    visited += t.visited;
  }
};

// Splits [0, extent] of the first coordinate into contiguous chunks.
std::vector<std::pair<std::int64_t, std::int64_t>> chunk_first_axis(std::int64_t extent, int threads) {
  const std::int64_t total = extent + 1;
  const std::int64_t chunks = std::clamp<std::int64_t>(static_cast<std::int64_t>(threads) * 8, 1, total);
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t lo = total * c / chunks;
    const std::int64_t hi = total * (c + 1) / chunks - 1;
    if (hi >= lo) out.emplace_back(lo, hi);
  }
  return out;
}

// Enumerates the box [lo, hi] (inclusive) in lexicographic order.
template <class F>
void for_each_in_box(const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi, F&& fn) {
  std::vector<std::int64_t> a = lo;
  const int d = static_cast<int>(lo.size());
  while (true) {
    fn(std::span<const std::int64_t>(a));
    int pos = d - 1;
    while (pos >= 0 && a[static_cast<size_t>(pos)] == hi[static_cast<size_t>(pos)]) {
      a[static_cast<size_t>(pos)] = lo[static_cast<size_t>(pos)];
      --pos;
    }
    if (pos < 0) return;
    ++a[static_cast<size_t>(pos)];
  }
}

CountReport make_report(const MongeMap& map, std::int64_t q, const PsiValue& psi, const CountOptions& options) {
  CountReport r;
  r.q = q;
  r.psi_q = psi.value;
  r.trivial = saturating_pow(q + 1, map.d());
  if (psi.exact > 0) {
    r.heuristic = heuristic_estimate(psi.value, q, map.d(), map.m());
    r.bound_thm = options.bound == BoundKind::thm14 ? bound_thm14(q, psi.value, map.d())
                                                    : bound_thm11(q, psi.value, map.d(), map.m());
  }
  r.psi_above_half = psi.exact > Rational(1, 2);
  return r;
}

void validate(const MongeMap& map, const Shift& theta, std::int64_t q, const PsiValue& psi) {
  if (q < 1) throw InputError("q must be >= 1");
  if (static_cast<int>(theta.lambda.size()) != map.d() || static_cast<int>(theta.gamma.size()) != map.m()) {
    throw InputError("shift dimensions do not match the manifold");
  }
  if (psi.exact >= 1) throw InputError("psi(q) >= 1 is rejected: the nearest-integer distance never reaches 1");
  if (psi.exact < 0) throw InputError("psi(q) must be non-negative");
}

int resolve_threads(const CountOptions& options) {
  return options.threads > 0 ? options.threads : default_thread_count();
}

Tally enumerate_exact(const MongeMap& map, const Shift& reduced, std::int64_t q, const PsiValue& psi,
                      const CountOptions& options) {
  const IndexSet z(q, reduced.lambda);
  const int threads = resolve_threads(options);
  const auto chunks = chunk_first_axis(z.extents()[0], threads);
  std::vector<Tally> partial(chunks.size());
  parallel_for(chunks.size(), threads, [&](std::size_t c) {
    PointTester tester(map, reduced, q, psi, options.arithmetic);
    std::vector<std::int64_t> lo(z.extents().size(), 0);
    std::vector<std::int64_t> hi = z.extents();
    lo[0] = chunks[c].first;
    hi[0] = chunks[c].second;
    Tally t;
    for_each_in_box(lo, hi, [&](std::span<const std::int64_t> a) { t.add(tester.test(a)); });
    partial[c] = t;
  });
  Tally total;
  for (const auto& t : partial) total.merge(t);
  return total;
}

// Interval-pruned subdivision of the index grid.
class Pruner {
 public:
  Pruner(const MongeMap& map, const Shift& reduced, std::int64_t q, const PsiValue& psi, Arithmetic arithmetic)
      : map_(map),
        q_(q),
        qd_(static_cast<double>(q)),
        psi_(psi.value),
        tester_(map, reduced, q, psi, arithmetic),
        lambda_(reduced.lambda_approx()),
        gamma_(reduced.gamma_approx()) {
    const double eps = std::numeric_limits<double>::epsilon();
    err_scale_ = 16.0 * eps * (map.max_degree() + map.d() + 4);
    // Everything within this distance of the ψ-bands must be visited, so the
    // per-point decision (including borderline reporting) sees it.
    margin_ = kBorderlineTolerance + 1e-9;
  }

  Tally run(std::vector<std::int64_t> lo, std::vector<std::int64_t> hi) {
    tally_ = Tally{};
    visit(lo, hi);
    return tally_;
  }

 private:
  static constexpr std::uint64_t kLeafPoints = 512;
  static constexpr double kMinLinearHalfWidth = 2.0;

  std::vector<Interval> alpha_box(const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi) const {
    std::vector<Interval> box(lo.size());
    for (size_t i = 0; i < lo.size(); ++i) {
      const double a = (static_cast<double>(lo[i]) + lambda_[i]) / qd_;
      const double b = (static_cast<double>(hi[i]) + lambda_[i]) / qd_;
      box[i] = Interval(detail::down(a), detail::up(b));
    }
    return box;
  }

  // Enclosure of q f_j - γ_j over the box: natural extension intersected with
  // the mean-value form around the box centre.
  Interval enclosure(int j, const std::vector<Interval>& box) const {
    const auto& f = map_.coordinate(j);
    const Interval natural = f(std::span<const Interval>(box));
    std::vector<Interval> centre(box.size());
    for (size_t i = 0; i < box.size(); ++i) centre[i] = Interval(box[i].mid());
    Interval mv = f(std::span<const Interval>(centre));
    for (int i = 0; i < map_.d(); ++i) {
      const Interval g = map_.gradient(j, i)(std::span<const Interval>(box));
      mv = mv + g * (box[static_cast<size_t>(i)] - centre[static_cast<size_t>(i)]);
    }
    const Interval best = intersect(natural, mv);
    return Interval(qd_) * best - Interval(gamma_[static_cast<size_t>(j)]);
  }

  // True when every point of the enclosure is farther than ψ (plus margins)
  // from the nearest integer.
  bool misses_bands(Interval y) const {
    const double slack = psi_ + margin_ + err_scale_ * (1.0 + y.mag());
    if (y.width() + 2.0 * slack >= 1.0) return false;
    const double k = std::floor(y.lo);
    return y.lo - k >= slack && (k + 1.0) - y.hi >= slack;
  }

  void visit(std::vector<std::int64_t>& lo, std::vector<std::int64_t>& hi) {
    const auto box = alpha_box(lo, hi);
    for (int j = 0; j < map_.m(); ++j) {
      if (misses_bands(enclosure(j, box))) return;
    }
    std::uint64_t points = 1;
    size_t widest = 0;
    for (size_t i = 0; i < lo.size(); ++i) {
      points *= static_cast<std::uint64_t>(hi[i] - lo[i] + 1);
      if (hi[i] - lo[i] > hi[widest] - lo[widest]) widest = i;
    }
    if (points <= kLeafPoints || hi[widest] == lo[widest]) {
      leaf(lo, hi);
      return;
    }
    const std::int64_t mid = lo[widest] + (hi[widest] - lo[widest]) / 2;
    const std::int64_t saved_hi = hi[widest];
    const std::int64_t saved_lo = lo[widest];
    hi[widest] = mid;
    visit(lo, hi);
    hi[widest] = saved_hi;
    lo[widest] = mid + 1;
    visit(lo, hi);
    lo[widest] = saved_lo;
  }

  // Rows run along the last coordinate.
  void leaf(const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi) {
    const size_t last = lo.size() - 1;
    std::vector<std::int64_t> row_lo = lo;
    std::vector<std::int64_t> row_hi = hi;
    row_hi[last] = lo[last];
    for_each_in_box(row_lo, row_hi, [&](std::span<const std::int64_t> start) {
      std::vector<std::int64_t> a(start.begin(), start.end());
      segment(a, lo[last], hi[last]);
    });
  }

  void evaluate_range(std::vector<std::int64_t>& a, std::int64_t t_lo, std::int64_t t_hi) {
    const size_t last = a.size() - 1;
    for (std::int64_t t = t_lo; t <= t_hi; ++t) {
      a[last] = t;
      tally_.add(tester_.test(a));
    }
  }

  // Along a row segment, g(t) = q f_0((a+λ̃)/q) − γ_0 is within R of the
  // linear model y0 + g'(c)(t−c); integer multiples of (t−c) do not change
  // the distance to Z, so only the fractional slope matters.
  void segment(std::vector<std::int64_t>& a, std::int64_t t_lo, std::int64_t t_hi) {
    if (t_hi - t_lo < 2) {
      evaluate_range(a, t_lo, t_hi);
      return;
    }
    const size_t last = a.size() - 1;
    const std::int64_t c = t_lo + (t_hi - t_lo) / 2;
    const auto h = static_cast<double>(std::max(c - t_lo, t_hi - c));

    std::vector<Interval> seg(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
      const double v = (static_cast<double>(a[i]) + lambda_[i]) / qd_;
      seg[i] = Interval(detail::down(v), detail::up(v));
    }
    seg[last] = Interval(detail::down((static_cast<double>(t_lo) + lambda_[last]) / qd_),
                         detail::up((static_cast<double>(t_hi) + lambda_[last]) / qd_));
    const int L = static_cast<int>(last);
    const double second = map_.hessian(0, L, L)(std::span<const Interval>(seg)).mag() / qd_;
    const double remainder = 0.5 * second * h * h;
    if (remainder > 0.25 * psi_) {
      // Halving cannot reach a segment long enough to skip anything.
      if (second > 0.0 && std::sqrt(0.5 * psi_ / second) < kMinLinearHalfWidth) {
        evaluate_range(a, t_lo, t_hi);
        return;
      }
      segment(a, t_lo, c);
      segment(a, c + 1, t_hi);
      return;
    }

    std::vector<double> alpha(a.size());
    a[last] = c;
    for (size_t i = 0; i < a.size(); ++i) alpha[i] = (static_cast<double>(a[i]) + lambda_[i]) / qd_;
    const auto& f = map_.coordinate(0);
    const double y0 = qd_ * f(alpha) - gamma_[0];
    const double slope = map_.gradient(0, L)(alpha);
    const double s = slope - std::nearbyint(slope);
    const double slack = psi_ + remainder + margin_ +
                         err_scale_ * (1.0 + qd_ * f.abs_sum(alpha) + std::abs(gamma_[0])) +
                         err_scale_ * h * (1.0 + std::abs(slope)) * 4.0;
    if (slack >= 0.5) {
      evaluate_range(a, t_lo, t_hi);
      return;
    }
    const double as = std::abs(s);
    if (as * h < 1e-300) {
      if (std::abs(y0 - std::nearbyint(y0)) < slack) evaluate_range(a, t_lo, t_hi);
      return;
    }
    const double y_min = y0 - as * h;
    const double y_max = y0 + as * h;
    const auto k_lo = static_cast<std::int64_t>(std::floor(y_min - slack));
    const auto k_hi = static_cast<std::int64_t>(std::ceil(y_max + slack));
    // Candidate t-intervals for increasing k are ordered by the sign of s.
    std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
      double t1 = static_cast<double>(c) + (static_cast<double>(k) - slack - y0) / s;
      double t2 = static_cast<double>(c) + (static_cast<double>(k) + slack - y0) / s;
      if (t1 > t2) std::swap(t1, t2);
      const auto first = std::max<std::int64_t>(t_lo, static_cast<std::int64_t>(std::ceil(t1 - 1e-9)));
      const auto stop = std::min<std::int64_t>(t_hi, static_cast<std::int64_t>(std::floor(t2 + 1e-9)));
      if (first <= stop) ranges.emplace_back(first, stop);
    }
    std::sort(ranges.begin(), ranges.end());
    std::int64_t next = t_lo;
    for (auto [first, stop] : ranges) {
      first = std::max(first, next);
      if (first > stop) continue;
      evaluate_range(a, first, stop);
      next = stop + 1;
    }
  }

  const MongeMap& map_;
  std::int64_t q_;
  double qd_;
  double psi_;
  PointTester tester_;
  std::vector<double> lambda_;
  std::vector<double> gamma_;
  double err_scale_ = 0.0;
  double margin_ = 0.0;
  Tally tally_;
};

Tally enumerate_pruned(const MongeMap& map, const Shift& reduced, std::int64_t q, const PsiValue& psi,
                       const CountOptions& options) {
  const IndexSet z(q, reduced.lambda);
  const int threads = resolve_threads(options);
  const auto chunks = chunk_first_axis(z.extents()[0], threads);
  std::vector<Tally> partial(chunks.size());
  parallel_for(chunks.size(), threads, [&](std::size_t c) {
    Pruner pruner(map, reduced, q, psi, options.arithmetic);
    std::vector<std::int64_t> lo(z.extents().size(), 0);
    std::vector<std::int64_t> hi = z.extents();
    lo[0] = chunks[c].first;
    hi[0] = chunks[c].second;
    partial[c] = pruner.run(std::move(lo), std::move(hi));
  });
  Tally total;
  for (const auto& t : partial) total.merge(t);
  return total;
}

}  // namespace

CountReport count_at(const MongeMap& map, const PsiValue& psi_q, const Shift& theta, std::int64_t q,
                     CountMethod method, const CountOptions& options) {
  validate(map, theta, q, psi_q);
  const auto start = std::chrono::steady_clock::now();
  CountReport report = make_report(map, q, psi_q, options);
  if (psi_q.exact == 0) {
    report.support_miss = true;
    return report;
  }
  const Shift reduced = reduce_shift(theta);
  const Tally t = method == CountMethod::exact ? enumerate_exact(map, reduced, q, psi_q, options)
                                               : enumerate_pruned(map, reduced, q, psi_q, options);
  report.A = t.hits;
  report.borderline = t.borderline;
  report.visited = t.visited;
  report.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
  return report;
}

CountReport count_A_exact(const MongeMap& map, const ApproxFunction& psi, const Shift& theta, std::int64_t q,
                          const CountOptions& options) {
  return count_at(map, psi.value(q), theta, q, CountMethod::exact, options);
}

CountReport count_A_pruned(const MongeMap& map, const ApproxFunction& psi, const Shift& theta, std::int64_t q,
                           const CountOptions& options) {
  return count_at(map, psi.value(q), theta, q, CountMethod::pruned, options);
}

NReport count_N(const MongeMap& map, const ApproxFunction& psi, const Shift& theta, std::int64_t Q,
                CountMethod method, const CountOptions& options) {
  if (Q < 1) throw InputError("Q must be >= 1");
  NReport out;
  out.Q = Q;
  for (std::int64_t q : psi.support_in(Q + 1, 2 * Q)) {
    out.rows.push_back(count_at(map, psi.value(q), theta, q, method, options));
    out.N += out.rows.back().A;
  }
  // Q itself may sit outside the support; the volume heuristic uses ψ(Q) as given.
  double psi_Q = 0.0;
  if (!(std::holds_alternative<PowerLogForm>(psi.form()) && Q == 1)) psi_Q = psi.value(Q).value;
  out.heuristic_volume = std::pow(psi_Q, map.m()) * std::pow(static_cast<double>(Q), map.d() + 1);
  return out;
}

}  // namespace dioph
