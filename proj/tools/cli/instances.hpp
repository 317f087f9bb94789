#pragma once

#include <cstdint>
#include <string>

#include "dioph/approx.hpp"
#include "dioph/manifold.hpp"

namespace dioph::cli {

/// A seeded random counting instance: quadratic map with small rational
/// coefficients, d <= 2, m <= d, q <= q_max, rational θ and ψ(q) in
/// {1/20, 2/20, ..., 9/20}.
struct RandomInstance {
  MongeMap map;
  Shift theta;
  std::int64_t q = 1;
  Rational psi;

  [[nodiscard]] std::string describe() const;
};

RandomInstance random_instance(std::uint64_t seed, std::uint64_t index, std::int64_t q_max = 500);

}  // namespace dioph::cli
