#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "cli.hpp"
#include "dioph/expsum.hpp"
#include "dioph/metric.hpp"
#include "dioph/rng.hpp"
#include "instances.hpp"

namespace dioph::cli {

namespace {

// First counterexample, if any.
using Check = std::optional<std::string>;

struct Scale {
  int random_instances;
  std::vector<std::int64_t> chain_q;
  std::uint64_t mc_samples;
  std::size_t mc_instances;
  std::int64_t cover_qmax;
};

Check pruned_matches_exact(std::uint64_t seed, int count, int threads) {
  CountOptions o;
  o.threads = threads;
  for (int k = 0; k < count; ++k) {
    const auto inst = random_instance(seed, static_cast<std::uint64_t>(k));
    const auto psi = PsiValue::from_rational(inst.psi);
    const auto exact = count_at(inst.map, psi, inst.theta, inst.q, CountMethod::exact, o).A;
    const auto pruned = count_at(inst.map, psi, inst.theta, inst.q, CountMethod::pruned, o).A;
    if (exact != pruned) {
      return inst.describe() + " exact=" + std::to_string(exact) + " pruned=" + std::to_string(pruned);
    }
  }
  return std::nullopt;
}

// Uses the half window H = ⌊1/(4ψ)⌋, where the Fejér lower bound holds on the
// whole 2ψ-band.
Check chain_half_window(const std::vector<std::int64_t>& qs, int threads) {
  for (const auto& map : {presets::parabola(), presets::paraboloid(2)}) {
    const double C1 = estimate_constants(map, 64).C1;
    for (auto q : qs) {
      for (const Rational& psi : {Rational(1, 4), Rational(1, 8)}) {
        ChainOptions o;
        o.window = FejerWindow::half;
        o.threads = threads;
        const auto s = run_chain(map, PsiValue::from_rational(psi), Shift::zero(map.d(), map.m()), q, C1, o);
        if (!s.all_ok()) {
          std::ostringstream os;
          os << map.name() << " q=" << q << " psi=" << to_string(psi) << " A=" << s.A << " sum_A_u=" << s.sum_A_u
             << " fejer_violations=" << s.fejer_violations << " inclusion_violations=" << s.inclusion_violations;
          return os.str();
        }
      }
    }
  }
  return std::nullopt;
}

Check fejer_and_geometric(std::uint64_t seed) {
  const CounterRng rng(seed);
  const double floor = 4.0 / (std::numbers::pi * std::numbers::pi);
  std::uint64_t c = 0;
  for (int k = 0; k < 10000; ++k) {
    const auto H = static_cast<std::int64_t>(1 + rng.bits(c++) % 50);
    const double x = (2.0 * rng.uniform(c++) - 1.0) / (2.0 * static_cast<double>(H));
    if (fejer_kernel(x, H) < floor - 1e-12) {
      return "fejer_kernel(" + format_double(x) + ", " + std::to_string(H) + ") = " +
             format_double(fejer_kernel(x, H));
    }
  }
  for (int k = 0; k < 10000; ++k) {
    const auto r = static_cast<std::int64_t>(1 + rng.bits(c++) % 200);
    const double rho = 40.0 * rng.uniform(c++) - 20.0;
    const double dist = std::abs(rho - std::nearbyint(rho));
    const double g = geometric_sum_magnitude(rho, r);
    const double bound = dist > 0.0 ? std::min(static_cast<double>(r), 1.0 / (2.0 * dist)) : static_cast<double>(r);
    if (g > bound * (1.0 + 1e-12)) {
      return "geometric_sum_magnitude(" + format_double(rho) + ", " + std::to_string(r) + ") = " + format_double(g);
    }
  }
  return std::nullopt;
}

Check condition_fixtures(std::uint64_t seed) {
  const auto surface = presets::veronese_counterexample(1);
  const auto bowl = presets::paraboloid(2);
  const CounterRng rng(seed);
  std::uint64_t c = 0;
  for (int k = 0; k < 200; ++k) {
    std::vector<Rational> alpha;
    for (int i = 0; i < surface.d(); ++i) alpha.emplace_back(static_cast<long>(rng.bits(c++) % 1000), 999L);
    if (jacobian_condition_value(surface, std::span<const Rational>(alpha)) != 0) return "jacobian nonzero on the counterexample";
    if (!nondegeneracy_check(surface, std::span<const Rational>(alpha), 2)) return "counterexample not 2-non-degenerate";
    std::vector<Rational> beta{alpha[0], alpha[1]};
    if (hessian_condition_value(bowl, std::span<const Rational>(beta)) != 4) return "paraboloid Hessian != 4";
  }
  return std::nullopt;
}

Check monte_carlo(std::uint64_t samples, std::size_t instances, int threads) {
  const auto suite = standard_mc_suite();
  for (std::size_t k = 0; k < std::min(instances, suite.size()); ++k) {
    const auto& inst = suite[k];
    const auto est = doubly_metric_mc(presets::by_name(inst.manifold), inst.psi_q, inst.q, samples, inst.seed, threads);
    if (!(std::abs(est.z_score) <= 5.0)) {
      return inst.manifold + " q=" + std::to_string(inst.q) + " psi=" + format_double(inst.psi_q) +
             " estimate=" + format_double(est.estimate) + " target=" + format_double(est.target) +
             " z=" + format_double(est.z_score);
    }
  }
  return std::nullopt;
}

Check metric_formulas(std::uint64_t seed) {
  if (critical_exponents(4, 1, 5).s0_monotonic != Rational(7, 2)) return "s0 for (4,1) != 7/2";
  if (critical_exponents(2, 1, 3).s0_hypersurface != Rational(5, 3)) return "hypersurface s0 for n=3 != 5/3";
  if (critical_exponents(1, 1, 2).s_lacunary != Rational(1, 2)) return "lacunary s for n=2 != 1/2";
  const CounterRng rng(seed);
  std::uint64_t c = 0;
  for (int k = 0; k < 100; ++k) {
    const int d = static_cast<int>(1 + rng.bits(c++) % 5);
    const int m = static_cast<int>(1 + rng.bits(c++) % 3);
    const Rational tau(static_cast<long>(rng.bits(c++) % 40), 40L);
    SeriesSpec spec;
    spec.d = d;
    spec.m = m;
    spec.psi = ApproxFunction(PowerForm{tau});
    Rational s(static_cast<long>(1 + rng.bits(c++) % (12 * static_cast<std::uint64_t>(d))), 12L);
    s.canonicalize();
    spec.s_hausdorff = s;
    const bool closed = s > Rational(d + m + 1) / (tau + 1) - m;
    const bool classified = classify_convergence(spec) == Convergence::converges;
    if (closed != classified) {
      return "d=" + std::to_string(d) + " m=" + std::to_string(m) + " tau=" + to_string(tau) + " s=" + to_string(s);
    }
  }
  return std::nullopt;
}

Check cover_consistency(std::int64_t qmax, int threads) {
  const auto map = presets::parabola();
  CoverOptions o;
  o.threads = threads;
  for (std::int64_t q = 1; q <= qmax; ++q) {
    const auto psi = PsiValue::from_rational(Rational(1, 10));
    const auto c = build_cover(map, psi, Shift::zero(1, 1), q, Rational(1), o);
    if (c.bound_applicable && c.count > c.bound_count) {
      return "q=" + std::to_string(q) + " cells=" + std::to_string(c.count) + " bound=" + std::to_string(c.bound_count);
    }
    for (const auto& cell : c.cells) {
      if (cell.diameter > c.diameter_limit * (1.0 + 1e-12)) return "q=" + std::to_string(q) + " diameter too large";
    }
  }
  return std::nullopt;
}

Check scan_determinism() {
  const auto map = presets::parabola();
  const auto psi = parse_psi("powlog:1/3:2/3");
  ScanConfig config;
  config.qmin = 2;
  config.qmax = 200;
  config.timing = false;
  std::string reference;
  for (int threads : {1, 4}) {
    config.threads = threads;
    const std::string text = scan_csv(scan(map, psi, Shift::zero(1, 1), config), false);
    if (reference.empty()) {
      reference = text;
    } else if (text != reference) {
      return "scan output differs at " + std::to_string(threads) + " threads";
    }
  }
  return std::nullopt;
}

}  // namespace

int run_verify(const std::string& suite, std::uint64_t seed, int threads, std::ostream& out) {
  const Scale scale = suite == "full" ? Scale{200, {64, 128, 256, 512}, 1'000'000, 20, 200}
                                      : Scale{40, {64, 128}, 100'000, 6, 60};
  struct Named {
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Named> checks{
      {"pruned_matches_exact", [&] { return pruned_matches_exact(seed, scale.random_instances, threads); }},
      {"chain_half_window", [&] { return chain_half_window(scale.chain_q, threads); }},
      {"fejer_and_geometric", [&] { return fejer_and_geometric(seed); }},
      {"condition_fixtures", [&] { return condition_fixtures(seed); }},
      {"doubly_metric_mc", [&] { return monte_carlo(scale.mc_samples, scale.mc_instances, threads); }},
      {"metric_formulas", [&] { return metric_formulas(seed); }},
      {"cover_consistency", [&] { return cover_consistency(scale.cover_qmax, threads); }},
      {"scan_determinism", [&] { return scan_determinism(); }},
  };
  out << "suite=" << suite << " seed=" << seed << '\n';
  bool ok = true;
  for (const auto& check : checks) {
    Check failure;
    try {
      failure = check.run();
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
    }
    if (failure) {
      out << "FAIL " << check.name << ": " << *failure << '\n';
      if (ok) out << "first counterexample: " << *failure << '\n';
      ok = false;
    } else {
      out << "PASS " << check.name << '\n';
    }
  }
  return ok ? kExitOk : kExitViolation;
}

}  // namespace dioph::cli
