#pragma once

// Small generators shared by the property tests.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "pilotpbr/qstate.hpp"
#include "pilotpbr/random.hpp"

namespace pilotpbr::gen {

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

// Box-Muller; good enough for generating test inputs.
inline double gaussian(Rng& rng) {
  const double u1 = 1.0 - rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline qstate::Ket random_ket(Rng& rng, std::size_t dim) {
  std::vector<qstate::Complex> a(dim);
  for (auto& c : a) c = {gaussian(rng), gaussian(rng)};
  return qstate::normalize(qstate::Ket(std::move(a)));
}

// Gram-Schmidt on random vectors.
inline qstate::MeasurementBasis random_basis(Rng& rng, std::size_t dim) {
  std::vector<qstate::Ket> out;
  while (out.size() < dim) {
    qstate::Ket v = random_ket(rng, dim);
    for (const auto& u : out) v = qstate::combine(1.0, v, -qstate::inner(u, v), u);
    if (v.norm() < 1e-6) continue;
    out.push_back(qstate::normalize(v));
  }
  return qstate::MeasurementBasis(std::move(out), "random");
}

inline std::vector<double> random_distribution(Rng& rng, std::size_t n, double zero_prob = 0.0) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = rng.uniform01() < zero_prob ? 0.0 : uniform(rng, 0.05, 1.0);
    total += x;
  }
  if (total == 0.0) {
    w[0] = 1.0;
    return w;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace pilotpbr::gen
