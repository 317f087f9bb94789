#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dioph/errors.hpp"
#include "dioph/expsum.hpp"
#include "dioph/metric.hpp"
#include "dioph/parallel.hpp"

namespace dioph::cli {

using json = nlohmann::ordered_json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

MongeMap load_manifold(const std::string& spec) {
  std::ifstream in(spec);
  if (!in) return presets::by_name(spec);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("manifold file '" + spec + "' is not valid JSON: " + e.what());
  }
  try {
    const int d = doc.at("d").get<int>();
    if (d < 1) throw InputError("manifold file '" + spec + "': d must be >= 1");
    std::vector<Polynomial> coords;
    for (const auto& coord : doc.at("coordinates")) {
      Polynomial p(d);
      for (const auto& term : coord) {
        const auto exps = term.at("exp").get<std::vector<int>>();
        if (static_cast<int>(exps.size()) != d) {
          throw InputError("manifold file '" + spec + "': exponent vector " + term.at("exp").dump() + " needs " +
                           std::to_string(d) + " entries");
        }
        const auto& c = term.at("coeff");
        p.add_term(exps, parse_rational(c.is_string() ? c.get<std::string>() : c.dump()));
      }
      coords.push_back(std::move(p));
    }
    if (coords.empty()) throw InputError("manifold file '" + spec + "' has no coordinates");
    return MongeMap(d, std::move(coords), doc.value("name", std::string("custom")));
  } catch (const json::exception& e) {
    throw InputError("manifold file '" + spec + "': " + e.what());
  }
}

std::vector<CountReport> scan(const MongeMap& map, const ApproxFunction& psi, const Shift& theta,
                              const ScanConfig& config) {
  if (config.qmin < 1 || config.qmax < config.qmin) throw InputError("scan needs 1 <= qmin <= qmax");
  const std::vector<std::int64_t> qs = psi.support_in(config.qmin, config.qmax);
  std::vector<CountReport> rows(qs.size());
  CountOptions per_q = config.count;
  per_q.threads = 1;
  parallel_for(qs.size(), config.threads, [&](std::size_t i) {
    rows[i] = count_at(map, psi.value(qs[i]), theta, qs[i], config.method, per_q);
  });
  return rows;
}

namespace {

std::string csv_row(const CountReport& r, bool timing) {
  std::ostringstream os;
  os << r.q << ',' << format_double(r.psi_q) << ',' << r.A << ',' << format_double(r.heuristic) << ','
     << r.trivial << ',' << format_double(r.bound_thm) << ',' << format_double(r.ratio_A_over_heuristic()) << ','
     << r.borderline << ',' << (timing ? r.elapsed.count() : 0);
  return os.str();
}

json report_json(const CountReport& r, bool timing) {
  json j;
  j["q"] = r.q;
  j["psi_q"] = r.psi_q;
  j["A"] = r.A;
  j["heuristic"] = r.heuristic;
  j["trivial"] = r.trivial;
  j["bound_rhs"] = r.bound_thm;
  j["ratio_A_over_heuristic"] = r.ratio_A_over_heuristic();
  j["borderline"] = r.borderline;
  j["micros"] = timing ? r.elapsed.count() : 0;
  j["support_miss"] = r.support_miss;
  j["psi_above_half"] = r.psi_above_half;
  return j;
}

json exponents_json(const CriticalExponents& c) {
  json j;
  j["d"] = c.d;
  j["m"] = c.m;
  j["n"] = c.n;
  j["s0_monotonic"] = to_string(c.s0_monotonic);
  j["monotonic_applicable"] = c.monotonic_applicable;
  j["s0_hypersurface"] = c.s0_hypersurface ? json(to_string(*c.s0_hypersurface)) : json(nullptr);
  j["hypersurface_applicable"] = c.hypersurface_applicable;
  j["s_lacunary"] = to_string(c.s_lacunary);
  j["tau"] = c.tau ? json(to_string(*c.tau)) : json(nullptr);
  j["dim_bound"] = c.dim_bound ? json(to_string(*c.dim_bound)) : json(nullptr);
  j["tau_in_range"] = c.tau_in_range;
  j["dim_bound_applicable"] = c.dim_bound_applicable;
  return j;
}

// Shared flag storage; each subcommand binds the subset it needs.
struct Flags {
  std::string manifold = "parabola";
  std::string psi;
  std::string support = "all";
  std::string theta;
  std::int64_t q = 0;
  std::int64_t qmin = 2;
  std::int64_t qmax = 0;
  std::string C1;
  std::string window = "full";
  std::string s = "1";
  std::string tau;
  std::string beta = "0";
  int d = 1;
  int m = 1;
  std::uint64_t seed = 42;
  std::string suite = "fast";
  int threads = 0;
  std::string format;
  std::string output;
  bool no_timing = false;
  bool exact = false;
  std::string method = "pruned";
  std::string bound = "thm11";
  double budget = kDefaultWorkBudget;
  int depth = 0;
};

CountMethod parse_method(const std::string& s) {
  if (s == "pruned") return CountMethod::pruned;
  if (s == "exact") return CountMethod::exact;
  throw InputError("unknown method '" + s + "' (expected exact or pruned)");
}

BoundKind parse_bound(const std::string& s) {
  if (s == "thm11") return BoundKind::thm11;
  if (s == "thm14") return BoundKind::thm14;
  throw InputError("unknown bound '" + s + "' (expected thm11 or thm14)");
}

FejerWindow parse_window(const std::string& s) {
  if (s == "full") return FejerWindow::full;
  if (s == "half") return FejerWindow::half;
  throw InputError("unknown window '" + s + "' (expected full or half)");
}

void check_format(const std::string& f) {
  if (f != "csv" && f != "json") throw InputError("unknown format '" + f + "' (expected csv or json)");
}

int threads_of(const Flags& f) { return f.threads > 0 ? f.threads : default_thread_count(); }

CountOptions count_options(const Flags& f) {
  CountOptions o;
  o.threads = threads_of(f);
  o.arithmetic = f.exact ? Arithmetic::rational : Arithmetic::hybrid;
  o.bound = parse_bound(f.bound);
  return o;
}

int cmd_count(const Flags& f, std::ostream& out) {
  const std::string format = f.format.empty() ? "json" : f.format;
  check_format(format);
  if (f.psi.empty()) throw InputError("count needs --psi");
  if (f.q < 1) throw InputError("count needs --q >= 1");
  const MongeMap map = load_manifold(f.manifold);
  const ApproxFunction psi = parse_psi(f.psi, f.support);
  const Shift theta = parse_shift(f.theta, map.d(), map.m());
  const CountReport r = count_at(map, psi.value(f.q), theta, f.q, parse_method(f.method), count_options(f));
  if (format == "csv") {
    out << kScanHeader << '\n' << csv_row(r, !f.no_timing) << '\n';
  } else {
    json j;
    j["manifold"] = map.name();
    j["psi"] = psi.to_string();
    j["support"] = psi.support_string();
    j.update(report_json(r, !f.no_timing));
    out << j.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_scan(const Flags& f, std::ostream& out) {
  const std::string format = f.format.empty() ? "csv" : f.format;
  check_format(format);
  if (f.psi.empty()) throw InputError("scan needs --psi");
  if (f.qmax < 1) throw InputError("scan needs --qmax");
  const MongeMap map = load_manifold(f.manifold);
  const ApproxFunction psi = parse_psi(f.psi, f.support);
  const Shift theta = parse_shift(f.theta, map.d(), map.m());
  ScanConfig config;
  config.qmin = f.qmin;
  config.qmax = f.qmax;
  config.method = parse_method(f.method);
  config.count = count_options(f);
  config.threads = threads_of(f);
  config.timing = !f.no_timing;
  const auto rows = scan(map, psi, theta, config);
  if (format == "csv") {
    out << scan_csv(rows, config.timing);
  } else {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(report_json(r, config.timing));
    out << arr.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_bounds(const Flags& f, std::ostream& out, std::ostream& err) {
  if (f.psi.empty()) throw InputError("bounds needs --psi");
  if (f.q < 1) throw InputError("bounds needs --q >= 1");
  const MongeMap map = load_manifold(f.manifold);
  const ApproxFunction psi = parse_psi(f.psi, f.support);
  const Shift theta = parse_shift(f.theta, map.d(), map.m());
  const double C1 = f.C1.empty() ? estimate_constants(map, 64).C1 : to_double(parse_rational(f.C1));
  ChainOptions options;
  options.window = parse_window(f.window);
  options.work_budget = f.budget;
  options.threads = threads_of(f);
  const ChainSummary s = run_chain(map, psi.value(f.q), theta, f.q, C1, options);
  out << "u,A_u,B_u,B_star,chain_ok\n";
  for (const auto& row : s.rows) {
    for (size_t i = 0; i < row.u.size(); ++i) out << (i ? ":" : "") << row.u[i];
    out << ',' << row.A_u << ',' << row.B_u << ',' << format_double(row.B_star_u) << ','
        << (row.chain_ok ? "true" : "false") << '\n';
  }
  const auto& p = s.params;
  err << "regime=" << (p.regime == Regime::main ? "main" : "trivial") << " r=" << p.r << " H=" << p.H
      << " s_blocks=" << p.s_blocks << " A=" << s.A << " sum_A_u=" << s.sum_A_u << " mvt_ok=" << s.mvt_ok
      << " inclusion_violations=" << s.inclusion_violations << " fejer_violations=" << s.fejer_violations
      << " residue_violations=" << s.residue_violations << " majorant_violations=" << s.majorant_violations << '\n';
  return s.all_ok() ? kExitOk : kExitViolation;
}

int cmd_series(const Flags& f, std::ostream& out) {
  SeriesSpec spec;
  spec.d = f.d;
  spec.m = f.m;
  spec.Q_max = f.qmax > 0 ? f.qmax : 100000;
  spec.s_hausdorff = parse_rational(f.s);
  std::optional<Rational> tau;
  if (!f.psi.empty()) {
    spec.psi = parse_psi(f.psi, f.support);
  } else {
    if (f.tau.empty()) throw InputError("series needs --tau or --psi");
    tau = parse_rational(f.tau);
    const Rational beta = parse_rational(f.beta);
    spec.psi = beta == 0 ? ApproxFunction(PowerForm{*tau}, parse_support(f.support))
                         : ApproxFunction(PowerLogForm{*tau, beta}, parse_support(f.support));
  }
  if (const auto* p = std::get_if<PowerForm>(&spec.psi.form())) tau = p->tau;
  if (const auto* p = std::get_if<PowerLogForm>(&spec.psi.form())) tau = p->tau;

  const SeriesReport r = series_partial_sum(spec, threads_of(f));
  json j;
  j["psi"] = spec.psi.to_string();
  j["support"] = spec.psi.support_string();
  j["s"] = to_string(spec.s_hausdorff);
  j["Q_max"] = spec.Q_max;
  j["partial_sum"] = r.partial_sum;
  j["last_doubling"] = r.last_doubling;
  j["previous_doubling"] = r.previous_doubling;
  j["doubling_ratio"] = r.doubling_ratio();
  j["terms"] = r.terms;
  const bool closed_form = !std::holds_alternative<TableForm>(spec.psi.form()) &&
                           !std::holds_alternative<ExplicitSupport>(spec.psi.support());
  if (closed_form) {
    j["exponent"] = to_string(series_exponent(spec));
    j["classification"] = to_string(classify_convergence(spec));
  } else {
    j["exponent"] = nullptr;
    j["classification"] = nullptr;
  }
  json threshold;
  threshold["violations"] = r.threshold_violations;
  threshold["first"] = r.first_violations;
  threshold["hypothesis_holds_up_to_Q_max"] = r.threshold_violations == 0;
  j["threshold"] = threshold;
  j["critical_exponents"] = exponents_json(critical_exponents(spec.d, spec.m, spec.n(), tau));
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_cover(const Flags& f, std::ostream& out, std::ostream& err) {
  if (f.psi.empty()) throw InputError("cover needs --psi");
  const MongeMap map = load_manifold(f.manifold);
  const ApproxFunction psi = parse_psi(f.psi, f.support);
  const Shift theta = parse_shift(f.theta, map.d(), map.m());
  const Rational s = parse_rational(f.s);
  std::vector<std::int64_t> qs;
  if (f.q > 0) {
    qs.push_back(f.q);
  } else {
    if (f.qmax < 1) throw InputError("cover needs --q or --qmax");
    qs = psi.support_in(std::max<std::int64_t>(1, f.qmin), f.qmax);
  }
  CoverOptions options;
  options.threads = threads_of(f);
  options.max_depth = f.depth;

  out << "q";
  for (int i = 1; i <= map.d(); ++i) out << ",a" << i;
  for (int j = 1; j <= map.m(); ++j) out << ",b" << j;
  out << ",diameter,s_power\n";
  bool ok = true;
  double total = 0.0;
  std::uint64_t cells = 0;
  for (auto q : qs) {
    const PsiValue v = psi.value(q);
    if (!(v.exact > 0)) continue;
    const CoverSummary c = build_cover(map, v, theta, q, s, options);
    for (const auto& cell : c.cells) {
      out << q;
      for (auto x : cell.a) out << ',' << x;
      for (auto x : cell.b) out << ',' << x;
      out << ',' << format_double(cell.diameter) << ',' << format_double(cell.s_power) << '\n';
      if (cell.diameter > c.diameter_limit * (1.0 + 1e-12)) {
        ok = false;
        err << "violation: q=" << q << " diameter " << format_double(cell.diameter) << " exceeds "
            << format_double(c.diameter_limit) << '\n';
      }
    }
    if (c.bound_applicable && c.count > c.bound_count) {
      ok = false;
      err << "violation: q=" << q << " has " << c.count << " cells but A(q, c2 psi) = " << c.bound_count << '\n';
    }
    total += c.sum_s_power;
    cells += c.count;
  }
  err << "cells=" << cells << " sum_s_power=" << format_double(total) << '\n';
  return ok ? kExitOk : kExitViolation;
}

int cmd_presets(const Flags& f, std::ostream& out) {
  const std::string format = f.format.empty() ? "csv" : f.format;
  check_format(format);
  if (format == "json") {
    json arr = json::array();
    for (const auto& p : presets::list()) arr.push_back({{"name", p.name}, {"description", p.description}});
    out << arr.dump(2) << '\n';
  } else {
    out << "name,description\n";
    for (const auto& p : presets::list()) out << p.name << ",\"" << p.description << "\"\n";
  }
  return kExitOk;
}

}  // namespace

std::string scan_csv(const std::vector<CountReport>& rows, bool timing) {
  std::string s = std::string(kScanHeader) + "\n";
  for (const auto& r : rows) s += csv_row(r, timing) + "\n";
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rational points near manifolds: counts, exponential-sum bounds and metric criteria", "dioph"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with the same keys as the long flags");
  Flags f;
  if (const char* env = std::getenv("DIOPH_THREADS")) {
    try {
      f.threads = std::stoi(env);
    } catch (const std::exception&) {
      err << "error: DIOPH_THREADS='" << env << "' is not an integer\n";
      return kExitUsage;
    }
  }
  app.add_option("--threads", f.threads, "Worker threads (default: DIOPH_THREADS or hardware)");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--manifold", f.manifold, "Preset name or JSON manifold file");
    sub->add_option("--psi", f.psi, "pow:τ | powlog:τ:β | const:c | table:{q:v,...} [:x<scale>]");
    sub->add_option("--support", f.support, "all | lacunary:g | set:{q,...}");
    sub->add_option("--theta", f.theta, "λ_1..λ_d,γ_1..γ_m (exact numbers)");
    sub->add_option("--threads", f.threads, "Worker threads");
  };

  auto* count = app.add_subcommand("count", "A(q, ψ, θ) at one q");
  add_common(count);
  count->add_option("--q", f.q, "Denominator")->required();
  count->add_option("--method", f.method, "exact | pruned");
  count->add_option("--bound", f.bound, "thm11 | thm14");
  count->add_flag("--exact", f.exact, "Exact rational arithmetic for every point");
  count->add_option("--format", f.format, "json | csv");
  count->add_flag("--no-timing", f.no_timing, "Report micros as 0");
  count->add_option("--output", f.output, "Write to a file instead of stdout");

  auto* scan_cmd = app.add_subcommand("scan", "CSV of counts over a q-range");
  add_common(scan_cmd);
  scan_cmd->add_option("--qmin", f.qmin, "First q (default 2)");
  scan_cmd->add_option("--qmax", f.qmax, "Last q")->required();
  scan_cmd->add_option("--method", f.method, "exact | pruned");
  scan_cmd->add_option("--bound", f.bound, "thm11 | thm14");
  scan_cmd->add_flag("--exact", f.exact, "Exact rational arithmetic for every point");
  scan_cmd->add_option("--format", f.format, "csv | json");
  scan_cmd->add_flag("--no-timing", f.no_timing, "Report micros as 0");
  scan_cmd->add_option("--output", f.output, "Write to a file instead of stdout");

  auto* bounds = app.add_subcommand("bounds", "Per-block chain A_u <= B_u <= (π²/4)^m B*_u");
  add_common(bounds);
  bounds->add_option("--q", f.q, "Denominator")->required();
  bounds->add_option("--C1", f.C1, "Second-derivative constant (default: grid estimate)");
  bounds->add_option("--window", f.window, "full: H = ⌊1/(2ψ)⌋, half: H = ⌊1/(4ψ)⌋");
  bounds->add_option("--budget", f.budget, "Maximum B* terms per block");
  bounds->add_option("--output", f.output, "Write to a file instead of stdout");

  auto* series = app.add_subcommand("series", "Partial sums and convergence of Σ (ψ(q)/q)^{s+m} q^n");
  series->add_option("--psi", f.psi, "Approximating function (overrides --tau/--beta)");
  series->add_option("--support", f.support, "all | lacunary:g | set:{q,...}");
  series->add_option("--tau", f.tau, "Exponent τ in ψ = q^{-τ}(log q)^β");
  series->add_option("--beta", f.beta, "Log exponent β");
  series->add_option("--s", f.s, "Hausdorff exponent s");
  series->add_option("--d", f.d, "Manifold dimension");
  series->add_option("--m", f.m, "Codimension");
  series->add_option("--qmax", f.qmax, "Truncation Q_max (default 100000)");
  series->add_option("--threads", f.threads, "Worker threads");
  series->add_option("--output", f.output, "Write to a file instead of stdout");

  auto* cover = app.add_subcommand("cover", "σ-cells and their Hausdorff sum");
  add_common(cover);
  cover->add_option("--q", f.q, "Single denominator");
  cover->add_option("--qmin", f.qmin, "First q of a range");
  cover->add_option("--qmax", f.qmax, "Last q of a range");
  cover->add_option("--s", f.s, "Hausdorff exponent s");
  cover->add_option("--depth", f.depth, "Bisections per cell (default 10·d)");
  cover->add_option("--output", f.output, "Write to a file instead of stdout");

  auto* verify = app.add_subcommand("verify", "Run the property suite");
  verify->add_option("--suite", f.suite, "fast | full");
  verify->add_option("--seed", f.seed, "Seed for randomized checks (default 42)");
  verify->add_option("--threads", f.threads, "Worker threads");

  auto* presets_cmd = app.add_subcommand("presets", "List preset manifolds");
  presets_cmd->add_option("--format", f.format, "csv | json");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!f.output.empty()) {
    file.open(f.output);
    if (!file) {
      err << "error: cannot open --output '" << f.output << "'\n";
      return kExitUsage;
    }
    sink = &file;
  }

  try {
    if (count->parsed()) return cmd_count(f, *sink);
    if (scan_cmd->parsed()) return cmd_scan(f, *sink);
    if (bounds->parsed()) return cmd_bounds(f, *sink, err);
    if (series->parsed()) return cmd_series(f, *sink);
    if (cover->parsed()) return cmd_cover(f, *sink, err);
    if (verify->parsed()) {
      if (f.suite != "fast" && f.suite != "full") throw InputError("unknown suite '" + f.suite + "' (expected fast or full)");
      return run_verify(f.suite, f.seed, threads_of(f), *sink);
    }
    if (presets_cmd->parsed()) return cmd_presets(f, *sink);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace dioph::cli
