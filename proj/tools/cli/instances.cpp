#include "instances.hpp"

#include <sstream>

#include "dioph/rng.hpp"

namespace dioph::cli {

namespace {

class Draws {
 public:
  Draws(std::uint64_t seed, std::uint64_t index) : rng_(seed ^ (0xD1B54A32D192ED03ULL * (index + 1))) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(rng_.bits(counter_++) % span);
  }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

}  // namespace

RandomInstance random_instance(std::uint64_t seed, std::uint64_t index, std::int64_t q_max) {
  Draws draw(seed, index);
  const int d = static_cast<int>(draw.integer(1, 2));
  const int m = static_cast<int>(draw.integer(1, d));
  std::vector<std::vector<int>> monomials;
  for (int a = 0; a <= 2; ++a) {
    for (int b = 0; b <= (d == 2 ? 2 - a : 0); ++b) {
      monomials.push_back(d == 2 ? std::vector<int>{a, b} : std::vector<int>{a});
    }
  }
  std::vector<Polynomial> coords;
  for (int j = 0; j < m; ++j) {
    Polynomial p(d);
    for (const auto& e : monomials) {
      const auto num = draw.integer(-6, 6);
      if (num == 0) continue;
      p.add_term(e, Rational(num, draw.integer(1, 6)));
    }
    if (p.degree() < 2) {
      std::vector<int> e(static_cast<size_t>(d), 0);
      e[static_cast<size_t>(j % d)] = 2;
      p.add_term(e, Rational(draw.integer(1, 5), draw.integer(1, 4)));
    }
    coords.push_back(std::move(p));
  }
  RandomInstance out{MongeMap(d, std::move(coords), "random"), Shift::zero(d, m), 1, Rational(1, 4)};
  auto rational = [&] {
    const auto den = draw.integer(1, 12);
    Rational r(draw.integer(0, 2 * den), den);
    r.canonicalize();
    return r;
  };
  for (auto& l : out.theta.lambda) l = rational();
  for (auto& g : out.theta.gamma) g = rational();
  out.q = draw.integer(1, q_max);
  out.psi = Rational(draw.integer(1, 9), 20);
  out.psi.canonicalize();
  return out;
}

std::string RandomInstance::describe() const {
  std::ostringstream os;
  os << "d=" << map.d() << " m=" << map.m() << " f=(";
  for (int j = 0; j < map.m(); ++j) os << (j ? "; " : "") << map.coordinate(j).to_string();
  os << ") q=" << q << " psi=" << to_string(psi) << " theta=(";
  bool first = true;
  for (const auto& x : theta.lambda) {
    os << (first ? "" : ",") << to_string(x);
    first = false;
  }
  for (const auto& x : theta.gamma) os << ',' << to_string(x);
  os << ')';
  return os.str();
}

}  // namespace dioph::cli
