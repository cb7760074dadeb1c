#include "pilotpbr/pilotwave/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "pilotpbr/error.hpp"
#include "pilotpbr/random.hpp"

namespace pilotpbr::pilotwave {

DensityCdf::DensityCdf(const WaveFunction1D& psi)
    : left_(psi.grid.x_min - 0.5 * psi.grid.dx()), dx_(psi.grid.dx()) {
  cumulative_.resize(psi.values.size() + 1, 0.0);
  for (std::size_t j = 0; j < psi.values.size(); ++j) {
    cumulative_[j + 1] = cumulative_[j] + std::norm(psi.values[j]);
  }
  const double total = cumulative_.back();
  if (!(total > 0.0)) throw InvariantError("cannot sample from a vanishing wavefunction");
  for (auto& c : cumulative_) c /= total;
}

double DensityCdf::operator()(double x) const {
  const double s = (x - left_) / dx_;
  if (s <= 0.0) return 0.0;
  const auto cells = static_cast<double>(cumulative_.size() - 1);
  if (s >= cells) return 1.0;
  const auto j = static_cast<std::size_t>(s);
  const double frac = s - static_cast<double>(j);
  return cumulative_[j] + frac * (cumulative_[j + 1] - cumulative_[j]);
}

double DensityCdf::inverse(double u) const {
  // First cell whose upper cumulative bound exceeds u; empty cells are skipped.
  const auto it = std::upper_bound(cumulative_.begin() + 1, cumulative_.end(), u);
  const auto j = static_cast<std::size_t>(
      std::min(it, cumulative_.end() - 1) - cumulative_.begin() - 1);
  const double width = cumulative_[j + 1] - cumulative_[j];
  const double frac = width > 0.0 ? (u - cumulative_[j]) / width : 0.5;
  return left_ + (static_cast<double>(j) + std::clamp(frac, 0.0, 1.0)) * dx_;
}

std::vector<double> sample_initial_positions(const WaveFunction1D& psi, std::size_t count,
                                             std::uint64_t seed) {
  if (count == 0) throw InvariantError("sample count must be >= 1");
  const DensityCdf cdf(psi);
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto rng = Rng::for_stream(seed, i);
    xs[i] = cdf.inverse(rng.uniform01());
  }
  return xs;
}

double ks_critical_1pct(std::size_t n) {
  return std::sqrt(-std::log(0.005) / 2.0) / std::sqrt(static_cast<double>(n));
}

KsResult ks_against_density(std::span<const double> samples, const WaveFunction1D& psi) {
  if (samples.empty()) throw InvariantError("KS test needs at least one sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const DensityCdf cdf(psi);
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  KsResult r;
  r.statistic = d;
  r.critical_1pct = ks_critical_1pct(sorted.size());
  r.pass = d < r.critical_1pct;
  return r;
}

}  // namespace pilotpbr::pilotwave
