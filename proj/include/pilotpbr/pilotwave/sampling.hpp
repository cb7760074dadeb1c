#pragma once

// Born-rule sampling of initial positions and the matching KS check.
//
// |psi|^2 is treated as piecewise constant on cells of width dx centred on the
// grid points, so the CDF is piecewise linear.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pilotpbr/pilotwave/grid.hpp"

namespace pilotpbr::pilotwave {

// Sample i uses Rng::for_stream(seed, i), so results do not depend on the
// order or partitioning in which samples are drawn.
std::vector<double> sample_initial_positions(const WaveFunction1D& psi, std::size_t count,
                                             std::uint64_t seed);

class DensityCdf {
 public:
  explicit DensityCdf(const WaveFunction1D& psi);

  double operator()(double x) const;
  double inverse(double u) const;

 private:
  double left_;  // left edge of cell 0
  double dx_;
  std::vector<double> cumulative_;  // cumulative_[j] = mass of cells < j, normalized
};

struct KsResult {
  double statistic = 0.0;
  double critical_1pct = 0.0;
  bool pass = false;
};

// Asymptotic Kolmogorov 1% critical value sqrt(-ln(0.005)/2) / sqrt(N).
double ks_critical_1pct(std::size_t n);

KsResult ks_against_density(std::span<const double> samples, const WaveFunction1D& psi);

}  // namespace pilotpbr::pilotwave
