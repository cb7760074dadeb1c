#include "pilotpbr/pilotwave/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pilotpbr/error.hpp"

namespace pilotpbr::pilotwave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Complex derivative(std::span<const Complex> v, std::size_t j, double dx) {
  const Complex lo = j == 0 ? Complex{} : v[j - 1];
  const Complex hi = j + 1 == v.size() ? Complex{} : v[j + 1];
  return (hi - lo) / (2.0 * dx);
}

std::vector<bool> above_cutoff(const std::vector<double>& rho, double eps_rel) {
  const double peak = rho.empty() ? 0.0 : *std::max_element(rho.begin(), rho.end());
  std::vector<bool> ok(rho.size());
  for (std::size_t j = 0; j < rho.size(); ++j) ok[j] = rho[j] > eps_rel * peak && rho[j] > 0.0;
  return ok;
}

PartialField empty_field(std::size_t n) {
  return PartialField{std::vector<double>(n, kNaN), std::vector<bool>(n, false)};
}

double wrap(double a) { return a - 2.0 * std::numbers::pi * std::round(a / (2.0 * std::numbers::pi)); }

}  // namespace

std::size_t PartialField::defined_count() const noexcept {
  return static_cast<std::size_t>(std::count(defined.begin(), defined.end(), true));
}

std::vector<double> density(const WaveFunction1D& psi) {
  std::vector<double> rho(psi.values.size());
  for (std::size_t j = 0; j < rho.size(); ++j) rho[j] = std::norm(psi.values[j]);
  return rho;
}

std::vector<double> probability_current(const WaveFunction1D& psi, const Units& units) {
  const double dx = psi.grid.dx();
  const double c = units.hbar / units.mass;
  std::vector<double> J(psi.values.size());
  for (std::size_t j = 0; j < J.size(); ++j) {
    J[j] = c * (std::conj(psi.values[j]) * derivative(psi.values, j, dx)).imag();
  }
  return J;
}

PartialField velocity_field(const WaveFunction1D& psi, double eps_rel, const Units& units) {
  const auto rho = density(psi);
  const auto J = probability_current(psi, units);
  const auto ok = above_cutoff(rho, eps_rel);
  PartialField v = empty_field(rho.size());
  for (std::size_t j = 0; j < rho.size(); ++j) {
    if (!ok[j]) continue;
    v.values[j] = J[j] / rho[j];
    v.defined[j] = true;
  }
  return v;
}

PartialField weak_value_velocity(const WaveFunction1D& psi, double eps_rel, const Units& units) {
  const auto ok = above_cutoff(density(psi), eps_rel);
  const double dx = psi.grid.dx();
  const double c = units.hbar / units.mass;
  PartialField v = empty_field(ok.size());
  for (std::size_t j = 0; j < ok.size(); ++j) {
    if (!ok[j]) continue;
    v.values[j] = c * (derivative(psi.values, j, dx) / psi.values[j]).imag();
    v.defined[j] = true;
  }
  return v;
}

double velocity_identity_error(const WaveFunction1D& psi, double eps_rel, const Units& units) {
  const auto a = velocity_field(psi, eps_rel, units);
  const auto b = weak_value_velocity(psi, eps_rel, units);
  const double dx = psi.grid.dx();
  const double c = units.hbar / units.mass;
  double worst = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) {
    if (!a.defined[j]) continue;
    const double scale = c * std::abs(derivative(psi.values, j, dx) / psi.values[j]);
    if (scale == 0.0) {
      worst = std::max(worst, std::abs(a.values[j] - b.values[j]) > 0.0 ? 1.0 : 0.0);
      continue;
    }
    worst = std::max(worst, std::abs(a.values[j] - b.values[j]) / scale);
  }
  return worst;
}

PartialField unwrapped_phase(const WaveFunction1D& psi, double eps_rel, const Units& units) {
  const auto rho = density(psi);
  const auto ok = above_cutoff(rho, eps_rel);
  PartialField s = empty_field(rho.size());
  if (rho.empty()) return s;
  const auto peak = static_cast<std::size_t>(std::max_element(rho.begin(), rho.end()) - rho.begin());
  if (!ok[peak]) return s;

  std::vector<double> theta(rho.size(), kNaN);
  theta[peak] = std::arg(psi.values[peak]);
  auto link = [&](std::size_t from, std::size_t to) {
    if (!ok[to]) return;
    if (std::isnan(theta[from])) {
      theta[to] = std::arg(psi.values[to]);  // restart after a node
    } else {
      theta[to] = theta[from] + wrap(std::arg(psi.values[to]) - std::arg(psi.values[from]));
    }
  };
  for (std::size_t j = peak + 1; j < rho.size(); ++j) link(j - 1, j);
  for (std::size_t j = peak; j-- > 0;) link(j + 1, j);

  for (std::size_t j = 0; j < rho.size(); ++j) {
    if (!ok[j]) continue;
    s.values[j] = units.hbar * theta[j];
    s.defined[j] = true;
  }
  return s;
}

PartialField bohmian_energy(const WaveFunction1D& now, const WaveFunction1D& next, double eps_rel,
                            const Units& units) {
  if (!(now.grid == next.grid)) throw DimensionError("energy slices live on different grids");
  const double dt = next.time - now.time;
  if (!(dt > 0.0)) throw InvariantError("energy slices must be ordered in time");
  const auto s0 = unwrapped_phase(now, eps_rel, units);
  const auto s1 = unwrapped_phase(next, eps_rel, units);
  PartialField e = empty_field(s0.values.size());
  for (std::size_t j = 0; j < e.values.size(); ++j) {
    if (!s0.defined[j] || !s1.defined[j]) continue;
    const double ds = units.hbar * wrap((s1.values[j] - s0.values[j]) / units.hbar);
    e.values[j] = -ds / dt;
    e.defined[j] = true;
  }
  return e;
}

double continuity_residual(std::span<const WaveFunction1D> record, const Units& units) {
  if (record.size() < 3) throw InvariantError("continuity residual needs at least 3 slices");
  const Grid1D& grid = record.front().grid;
  const double step = record[1].time - record[0].time;
  if (!(step > 0.0)) throw InvariantError("record slices must advance in time");
  for (std::size_t k = 1; k < record.size(); ++k) {
    if (!(record[k].grid == grid)) throw DimensionError("record slices live on different grids");
    const double gap = record[k].time - record[k - 1].time;
    if (std::abs(gap - step) > 1e-9 * step) throw InvariantError("record slices are not equally spaced");
  }
  const double dx = grid.dx();
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < record.size(); ++k) {
    const auto J = probability_current(record[k], units);
    const auto before = density(record[k - 1]);
    const auto after = density(record[k + 1]);
    for (std::size_t j = 1; j + 1 < grid.n; ++j) {
      const double dJ = (J[j + 1] - J[j - 1]) / (2.0 * dx);
      const double drho = (after[j] - before[j]) / (2.0 * step);
      worst = std::max(worst, std::abs(dJ + drho));
    }
  }
  return worst;
}

Moments position_moments(const WaveFunction1D& psi) {
  const auto rho = density(psi);
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    const double x = psi.grid.x(j);
    m0 += rho[j];
    m1 += rho[j] * x;
    m2 += rho[j] * x * x;
  }
  const double mean = m1 / m0;
  return Moments{mean, std::sqrt(std::max(0.0, m2 / m0 - mean * mean))};
}

double mass_between(const WaveFunction1D& psi, double lo, double hi) {
  double m = 0.0;
  for (std::size_t j = 0; j < psi.values.size(); ++j) {
    const double x = psi.grid.x(j);
    if (x >= lo && x < hi) m += std::norm(psi.values[j]);
  }
  return m * psi.grid.dx();
}

double mean_velocity(const WaveFunction1D& psi, double eps_rel, const Units& units) {
  const auto rho = density(psi);
  const auto v = velocity_field(psi, eps_rel, units);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    if (!v.defined[j]) continue;
    num += rho[j] * v.values[j];
    den += rho[j];
  }
  return num / den;
}

EnergyBeat measure_energy_beat(std::span<const WaveFunction1D> record, double eps_rel,
                               const Units& units) {
  if (record.size() < 3) throw InvariantError("energy beat needs at least 3 slices");
  const std::size_t n = record.front().values.size();
  const std::size_t steps = record.size() - 1;

  std::vector<double> min_rho(n, std::numeric_limits<double>::infinity());
  double peak = 0.0;
  for (const auto& psi : record) {
    const auto rho = density(psi);
    for (std::size_t j = 0; j < n; ++j) {
      min_rho[j] = std::min(min_rho[j], rho[j]);
      peak = std::max(peak, rho[j]);
    }
  }

  std::vector<PartialField> energy;
  energy.reserve(steps);
  EnergyBeat beat;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < steps; ++k) {
    energy.push_back(bohmian_energy(record[k], record[k + 1], eps_rel, units));
    for (std::size_t j = 0; j < n; ++j) {
      if (!energy.back().defined[j]) continue;
      lo = std::min(lo, energy.back().values[j]);
      hi = std::max(hi, energy.back().values[j]);
    }
  }
  beat.spread = hi > lo ? hi - lo : 0.0;

  bool found = false;
  for (std::size_t j = 0; j < n; ++j) {
    if (min_rho[j] < 0.1 * peak) continue;
    double clo = std::numeric_limits<double>::infinity();
    double chi = -clo;
    bool complete = true;
    for (const auto& e : energy) {
      if (!e.defined[j]) {
        complete = false;
        break;
      }
      clo = std::min(clo, e.values[j]);
      chi = std::max(chi, e.values[j]);
    }
    if (complete && (!found || chi - clo > beat.cell_spread)) {
      found = true;
      beat.cell = j;
      beat.cell_spread = chi - clo;
    }
  }
  if (!found) throw InvariantError("no cell keeps a defined energy with density above 10% of peak");

  std::vector<std::size_t> maxima;
  for (std::size_t k = 1; k + 1 < energy.size(); ++k) {
    const double e = energy[k].values[beat.cell];
    if (e > energy[k - 1].values[beat.cell] && e >= energy[k + 1].values[beat.cell]) {
      maxima.push_back(k);
    }
  }
  beat.maxima = maxima.size();
  const double dt = record[1].time - record[0].time;
  if (maxima.size() >= 2) {
    beat.period = static_cast<double>(maxima.back() - maxima.front()) /
                  static_cast<double>(maxima.size() - 1) * dt;
    double sum = 0.0;
    for (std::size_t k = maxima[0]; k < maxima[1]; ++k) sum += energy[k].values[beat.cell];
    beat.time_average = sum / static_cast<double>(maxima[1] - maxima[0]);
  }
  return beat;
}

}  // namespace pilotpbr::pilotwave
