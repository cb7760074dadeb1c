#include "pilotpbr/pilotwave/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pilotpbr/error.hpp"

namespace pilotpbr::pilotwave {

std::size_t Grid1D::nearest_index(double xq) const {
  const double s = std::round((xq - x_min) / dx());
  if (s < 0.0 || s > static_cast<double>(n - 1)) {
    throw InvariantError("position " + std::to_string(xq) + " lies outside the grid");
  }
  return static_cast<std::size_t>(s);
}

void Grid1D::validate() const {
  if (n < kMinPoints) {
    throw InvariantError("grid needs at least " + std::to_string(kMinPoints) + " points, got " +
                         std::to_string(n));
  }
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw InvariantError("grid needs x_max > x_min");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvariantError("grid needs dt > 0");
}

double WaveFunction1D::norm() const noexcept {
  double s = 0.0;
  for (const auto& c : values) s += std::norm(c);
  return s * grid.dx();
}

void WaveFunction1D::check_normalized() const {
  if (values.size() != grid.n) throw InvariantError("wavefunction size does not match its grid");
  const double nrm = norm();
  if (std::abs(nrm - 1.0) > kNormTolerance) {
    throw InvariantError("wavefunction norm " + std::to_string(nrm) + " is not 1");
  }
}

WaveFunction1D normalized(WaveFunction1D psi) {
  const double nrm = psi.norm();
  if (!(nrm > 0.0)) throw InvariantError("cannot normalize a vanishing wavefunction");
  const double s = 1.0 / std::sqrt(nrm);
  for (auto& c : psi.values) c *= s;
  return psi;
}

WaveFunction1D gaussian_packet(const Grid1D& grid, double x0, double sigma, double k0) {
  grid.validate();
  if (!(sigma >= 4.0 * grid.dx())) {
    throw InvariantError("packet width " + std::to_string(sigma) + " is below 4 dx");
  }
  if (x0 - 5.0 * sigma < grid.x_min || x0 + 5.0 * sigma > grid.x(grid.n - 1)) {
    throw InvariantError("packet at " + std::to_string(x0) + " with width " +
                         std::to_string(sigma) + " is clipped by the grid boundary");
  }
  WaveFunction1D psi{grid, std::vector<Complex>(grid.n), 0.0};
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double x = grid.x(j);
    const double d = x - x0;
    psi.values[j] = std::exp(-d * d / (4.0 * sigma * sigma)) * std::polar(1.0, k0 * x);
  }
  return normalized(std::move(psi));
}

WaveFunction1D box_eigenstate(const Grid1D& grid, std::size_t mode) {
  grid.validate();
  if (mode == 0 || mode > grid.n) throw InvariantError("box mode must lie in 1..n");
  WaveFunction1D psi{grid, std::vector<Complex>(grid.n), 0.0};
  const double q = std::numbers::pi * static_cast<double>(mode) / static_cast<double>(grid.n + 1);
  for (std::size_t j = 0; j < grid.n; ++j) psi.values[j] = std::sin(q * static_cast<double>(j + 1));
  return normalized(std::move(psi));
}

double box_lattice_energy(const Grid1D& grid, std::size_t mode, const Units& units) {
  const double q = std::numbers::pi * static_cast<double>(mode) / static_cast<double>(grid.n + 1);
  const double dx = grid.dx();
  return units.hbar * units.hbar / (units.mass * dx * dx) * (1.0 - std::cos(q));
}

double box_continuum_energy(const Grid1D& grid, std::size_t mode, const Units& units) {
  const double width = static_cast<double>(grid.n + 1) * grid.dx();
  const double k = std::numbers::pi * static_cast<double>(mode) / width;
  return units.hbar * units.hbar * k * k / (2.0 * units.mass);
}

WaveFunction1D superpose(Complex a, const WaveFunction1D& psi1, Complex b,
                         const WaveFunction1D& psi2) {
  if (!(psi1.grid == psi2.grid)) throw DimensionError("superposing wavefunctions on different grids");
  if (psi1.time != psi2.time) throw DimensionError("superposing wavefunctions at different times");
  WaveFunction1D out{psi1.grid, std::vector<Complex>(psi1.values.size()), psi1.time};
  for (std::size_t j = 0; j < out.values.size(); ++j) {
    out.values[j] = a * psi1.values[j] + b * psi2.values[j];
  }
  return normalized(std::move(out));
}

}  // namespace pilotpbr::pilotwave
