#include "dioph/approx.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dioph/errors.hpp"

namespace dioph {

PsiValue PsiValue::from_rational(const Rational& r) {
  PsiValue v;
  v.exact = r;
  v.exact.canonicalize();
  v.value = to_double(v.exact);
  v.exact_is_closed_form = true;
  return v;
}

PsiValue PsiValue::from_double(double x) {
  PsiValue v;
  v.value = x;
  v.exact = rational_from_double(x);
  v.exact_is_closed_form = false;
  return v;
}

ApproxFunction::ApproxFunction(PsiForm form, Support support, Rational scale)
    : form_(std::move(form)), support_(std::move(support)), scale_(std::move(scale)) {
  scale_.canonicalize();
  if (scale_ <= 0) throw InputError("psi scale must be positive");
  if (const auto* p = std::get_if<PowerForm>(&form_); p && p->tau < 0) {
    throw InputError("pow form needs tau >= 0");
  }
  if (const auto* p = std::get_if<PowerLogForm>(&form_); p && p->tau < 0) {
    throw InputError("powlog form needs tau >= 0");
  }
  if (const auto* c = std::get_if<ConstantForm>(&form_); c && c->value < 0) {
    throw InputError("const form needs a non-negative value");
  }
  if (const auto* t = std::get_if<TableForm>(&form_)) {
    for (const auto& [q, v] : t->values) {
      if (q < 1) throw InputError("table entry with q < 1");
      if (v < 0) throw InputError("table entry with negative psi");
    }
  }
  if (const auto* l = std::get_if<LacunarySupport>(&support_); l && l->base < 2) {
    throw InputError("lacunary base must be >= 2");
  }
  if (auto* e = std::get_if<ExplicitSupport>(&support_)) {
    std::sort(e->values.begin(), e->values.end());
    e->values.erase(std::unique(e->values.begin(), e->values.end()), e->values.end());
  }
}

namespace {

bool support_contains(const Support& support, std::int64_t q) {
  if (q < 1) return false;
  return std::visit(
      [q](const auto& s) -> bool {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, AllSupport>) {
          return true;
        } else if constexpr (std::is_same_v<S, LacunarySupport>) {
          std::int64_t p = s.base;
          while (p < q) {
            if (p > q / s.base) return false;
            p *= s.base;
          }
          return p == q;
        } else {
          return std::binary_search(s.values.begin(), s.values.end(), q);
        }
      },
      support);
}

}  // namespace

bool ApproxFunction::in_support(std::int64_t q) const {
  if (!support_contains(support_, q)) return false;
  return std::visit(
      [q](const auto& f) -> bool {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, PowerLogForm>) {
          return q >= 2;
        } else if constexpr (std::is_same_v<F, TableForm>) {
          auto it = f.values.find(q);
          return it != f.values.end() && it->second > 0;
        } else if constexpr (std::is_same_v<F, ConstantForm>) {
          return f.value > 0;
        } else {
          return true;
        }
      },
      form_);
}

std::vector<std::int64_t> ApproxFunction::support_in(std::int64_t lo, std::int64_t hi) const {
  std::vector<std::int64_t> out;
  lo = std::max<std::int64_t>(lo, 1);
  if (hi < lo) return out;
  if (const auto* l = std::get_if<LacunarySupport>(&support_)) {
    for (std::int64_t p = l->base;; p *= l->base) {
      if (p >= lo && p <= hi && in_support(p)) out.push_back(p);
      if (p > hi / l->base) break;
    }
    return out;
  }
  if (const auto* e = std::get_if<ExplicitSupport>(&support_)) {
    for (auto q : e->values) {
      if (q >= lo && q <= hi && in_support(q)) out.push_back(q);
    }
    return out;
  }
  if (const auto* t = std::get_if<TableForm>(&form_)) {
    for (const auto& [q, v] : t->values) {
      if (q >= lo && q <= hi && in_support(q)) out.push_back(q);
    }
    return out;
  }
  for (std::int64_t q = lo; q <= hi; ++q) {
    if (in_support(q)) out.push_back(q);
  }
  return out;
}

PsiValue ApproxFunction::value(std::int64_t q) const {
  if (q < 1) throw InputError("psi evaluated at q < 1");
  if (std::holds_alternative<PowerLogForm>(form_) && q == 1) {
    throw InputError("powlog form is undefined at q = 1");
  }
  if (!in_support(q)) return PsiValue::from_rational(Rational(0));
  return std::visit(
      [&](const auto& f) -> PsiValue {
        using F = std::decay_t<decltype(f)>;
        const auto qd = static_cast<double>(q);
        if constexpr (std::is_same_v<F, PowerForm>) {
          if (f.tau.get_den() == 1 && f.tau.get_num() <= 64) {
            mpz_class denom;
            mpz_ui_pow_ui(denom.get_mpz_t(), static_cast<unsigned long>(q), f.tau.get_num().get_ui());
            return PsiValue::from_rational(scale_ / Rational(denom));
          }
          return PsiValue::from_double(to_double(scale_) * std::pow(qd, -to_double(f.tau)));
        } else if constexpr (std::is_same_v<F, PowerLogForm>) {
          return PsiValue::from_double(to_double(scale_) * std::pow(qd, -to_double(f.tau)) *
                                       std::pow(std::log(qd), to_double(f.beta)));
        } else if constexpr (std::is_same_v<F, TableForm>) {
          return PsiValue::from_rational(scale_ * f.values.at(q));
        } else {
          return PsiValue::from_rational(scale_ * f.value);
        }
      },
      form_);
}

ApproxFunction ApproxFunction::scaled(const Rational& factor) const {
  return ApproxFunction(form_, support_, scale_ * factor);
}

std::string ApproxFunction::to_string() const {
  std::string text = std::visit(
      [](const auto& f) -> std::string {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, PowerForm>) {
          return "pow:" + f.tau.get_str();
        } else if constexpr (std::is_same_v<F, PowerLogForm>) {
          return "powlog:" + f.tau.get_str() + ":" + f.beta.get_str();
        } else if constexpr (std::is_same_v<F, TableForm>) {
          std::string s = "table:{";
          bool first = true;
          for (const auto& [q, v] : f.values) {
            if (!first) s += ",";
            first = false;
            s += std::to_string(q) + ":" + v.get_str();
          }
          return s + "}";
        } else {
          return "const:" + f.value.get_str();
        }
      },
      form_);
  if (scale_ != 1) text += ":x" + scale_.get_str();
  return text;
}

std::string ApproxFunction::support_string() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, AllSupport>) {
          return "all";
        } else if constexpr (std::is_same_v<S, LacunarySupport>) {
          return "lacunary:" + std::to_string(s.base);
        } else {
          std::string out = "set:{";
          for (size_t i = 0; i < s.values.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(s.values[i]);
          }
          return out + "}";
        }
      },
      support_);
}

double psi_eval(const ApproxFunction& psi, std::int64_t q) { return psi.value(q).value; }

double threshold_floor(Threshold kind, std::int64_t q) {
  if (q < 2) throw InputError("threshold floor needs q >= 2");
  const auto qd = static_cast<double>(q);
  const double L = std::log(qd);
  if (kind.kind == ThresholdKind::cor12) {
    const double e = 1.0 / (2.0 * kind.dim + 1.0);
    return std::pow(qd, -e) * std::pow(L, 2.0 * e);
  }
  const double d = kind.dim;
  return std::pow(qd, -d / (2.0 + d)) * std::pow(L, 2.0 * d / (2.0 + d));
}

bool threshold_check(const ApproxFunction& psi, std::int64_t q, Threshold kind) {
  if (q < 2) throw InputError("threshold check needs q >= 2");
  const double floor = threshold_floor(kind, q);
  const PsiValue v = psi.value(q);
  return v.value >= floor * (1.0 - 1e-12) && v.exact <= Rational(1, 2);
}

Shift Shift::zero(int d, int m) {
  return Shift{std::vector<Rational>(static_cast<size_t>(d), Rational(0)),
               std::vector<Rational>(static_cast<size_t>(m), Rational(0))};
}

std::vector<double> Shift::lambda_approx() const {
  std::vector<double> out;
  for (const auto& x : lambda) out.push_back(to_double(x));
  return out;
}

std::vector<double> Shift::gamma_approx() const {
  std::vector<double> out;
  for (const auto& x : gamma) out.push_back(to_double(x));
  return out;
}

Shift reduce_shift(const Shift& theta) {
  Shift out;
  for (const auto& x : theta.lambda) out.lambda.push_back(fractional_part(x));
  for (const auto& x : theta.gamma) out.gamma.push_back(fractional_part(x));
  return out;
}

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

Rational parse_token(const std::string& token, std::string_view context) {
  try {
    return parse_rational(token);
  } catch (const InputError&) {
    throw InputError("invalid number '" + token + "' in '" + std::string(context) + "'");
  }
}

std::int64_t parse_int(const std::string& token, std::string_view context) {
  const Rational r = parse_token(token, context);
  if (r.get_den() != 1 || !r.get_num().fits_slong_p()) {
    throw InputError("expected an integer, got '" + token + "' in '" + std::string(context) + "'");
  }
  return r.get_num().get_si();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file '" + path + "'");
  std::ostringstream buf;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    buf << line << '\n';
  }
  return buf.str();
}

// Inline "{5:1/5, 7:1/7}" or a file with one "q value" pair per line.
std::map<std::int64_t, Rational> parse_table(std::string_view body, std::string_view context) {
  std::map<std::int64_t, Rational> out;
  if (!body.empty() && body.front() == '{') {
    if (body.back() != '}') throw InputError("unterminated table '" + std::string(body) + "'");
    const std::string inner = trim(body.substr(1, body.size() - 2));
    if (inner.empty()) return out;
    for (const auto& entry : split(inner, ',')) {
      const auto kv = split(entry, ':');
      if (kv.size() != 2) throw InputError("bad table entry '" + entry + "' in '" + std::string(context) + "'");
      out[parse_int(kv[0], context)] = parse_token(kv[1], context);
    }
    return out;
  }
  std::istringstream in(read_file(std::string(body)));
  std::string q_text;
  std::string v_text;
  while (in >> q_text >> v_text) out[parse_int(q_text, context)] = parse_token(v_text, context);
  return out;
}

std::vector<std::int64_t> parse_set(std::string_view body, std::string_view context) {
  std::vector<std::int64_t> out;
  std::string text;
  if (!body.empty() && body.front() == '{') {
    if (body.back() != '}') throw InputError("unterminated set '" + std::string(body) + "'");
    text = std::string(body.substr(1, body.size() - 2));
    std::replace(text.begin(), text.end(), ',', ' ');
  } else {
    text = read_file(std::string(body));
    std::replace(text.begin(), text.end(), ',', ' ');
  }
  std::istringstream in(text);
  std::string token;
  while (in >> token) out.push_back(parse_int(token, context));
  return out;
}

}  // namespace

Support parse_support(std::string_view grammar) {
  const std::string g = trim(grammar);
  if (g == "all" || g.empty()) return AllSupport{};
  const auto colon = g.find(':');
  const std::string head = g.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : g.substr(colon + 1);
  if (head == "lacunary") {
    if (body.empty()) return LacunarySupport{2};
    const auto base = parse_int(body, g);
    if (base < 2) throw InputError("lacunary base must be >= 2 in '" + g + "'");
    return LacunarySupport{base};
  }
  if (head == "set") {
    if (body.empty()) throw InputError("set support needs a body in '" + g + "'");
    return ExplicitSupport{parse_set(body, g)};
  }
  throw InputError("unknown support token '" + head + "' in '" + g + "'");
}

ApproxFunction parse_psi(std::string_view grammar, std::string_view support_grammar) {
  std::string g = trim(grammar);
  if (g.empty()) throw InputError("empty psi grammar");
  Rational scale(1);
  // A trailing ":x<scale>" outside any braces.
  if (auto pos = g.rfind(":x"); pos != std::string::npos && g.find('}', pos) == std::string::npos) {
    scale = parse_token(g.substr(pos + 2), grammar);
    g.resize(pos);
  }
  const auto colon = g.find(':');
  const std::string head = g.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : g.substr(colon + 1);
  Support support = parse_support(support_grammar);
  if (head == "pow") {
    const auto parts = split(body, ':');
    if (parts.size() != 1 || parts[0].empty()) throw InputError("pow needs exactly one argument in '" + std::string(grammar) + "'");
    return ApproxFunction(PowerForm{parse_token(parts[0], grammar)}, std::move(support), scale);
  }
  if (head == "powlog") {
    const auto parts = split(body, ':');
    if (parts.size() != 2) throw InputError("powlog needs tau and beta in '" + std::string(grammar) + "'");
    return ApproxFunction(PowerLogForm{parse_token(parts[0], grammar), parse_token(parts[1], grammar)},
                          std::move(support), scale);
  }
  if (head == "const") {
    if (body.empty()) throw InputError("const needs a value in '" + std::string(grammar) + "'");
    return ApproxFunction(ConstantForm{parse_token(body, grammar)}, std::move(support), scale);
  }
  if (head == "table") {
    if (body.empty()) throw InputError("table needs a body in '" + std::string(grammar) + "'");
    return ApproxFunction(TableForm{parse_table(body, grammar)}, std::move(support), scale);
  }
  throw InputError("unknown psi token '" + head + "' in '" + std::string(grammar) + "'");
}

Shift parse_shift(std::string_view text, int d, int m) {
  const std::string t = trim(text);
  if (t.empty() || t == "0") return Shift::zero(d, m);
  const auto parts = split(t, ',');
  if (static_cast<int>(parts.size()) != d + m) {
    throw InputError("theta needs " + std::to_string(d + m) + " comma-separated values, got " +
                     std::to_string(parts.size()));
  }
  Shift s;
  for (int i = 0; i < d + m; ++i) {
    Rational v = parse_token(parts[static_cast<size_t>(i)], text);
    (i < d ? s.lambda : s.gamma).push_back(std::move(v));
  }
  return s;
}

}  // namespace dioph
