#pragma once

// Lattice, wavefunction and barrier types for the 1D pilot-wave engine.
//
// Grid points sit at x_j = x_min + j*dx, j = 0..n-1, dx = (x_max - x_min)/n.
// The wavefunction vanishes on the ghost points j = -1 and j = n, so the
// domain is a hard-walled box of width (n+1)*dx.

#include <complex>
#include <cstddef>
#include <vector>

namespace pilotpbr::pilotwave {

using Complex = std::complex<double>;

// Natural units by default.
struct Units {
  double hbar = 1.0;
  double mass = 1.0;
};

struct Grid1D {
  double x_min = -64.0;
  double x_max = 64.0;
  std::size_t n = 8192;
  double dt = 0.005;

  static constexpr std::size_t kMinPoints = 256;

  double dx() const noexcept { return (x_max - x_min) / static_cast<double>(n); }
  double x(std::size_t j) const noexcept { return x_min + static_cast<double>(j) * dx(); }
  std::size_t nearest_index(double x) const;

  // Throws InvariantError when n < 256, dx <= 0 or dt <= 0.
  void validate() const;

  bool operator==(const Grid1D&) const = default;
};

struct DeltaBarrier {
  double position = 0.0;
  double strength = 0.0;  // g >= 0, energy * length
};

inline constexpr double kNormTolerance = 1e-8;

struct WaveFunction1D {
  Grid1D grid;
  std::vector<Complex> values;
  double time = 0.0;

  // sum |psi|^2 dx
  double norm() const noexcept;
  // Throws InvariantError if |norm - 1| > kNormTolerance or sizes disagree.
  void check_normalized() const;
};

// Rescales to unit norm; throws InvariantError on a vanishing field.
WaveFunction1D normalized(WaveFunction1D psi);

// psi(x) ~ exp(-(x - x0)^2 / (4 sigma^2)) exp(i k0 x), normalized. Requires
// [x0 - 5 sigma, x0 + 5 sigma] inside the grid and sigma >= 4 dx.
WaveFunction1D gaussian_packet(const Grid1D& grid, double x0, double sigma, double k0);

// Mode m >= 1 of the hard-walled lattice box: sin(pi m (j+1) / (n+1)),
// normalized. Exact eigenvector of the lattice Hamiltonian.
WaveFunction1D box_eigenstate(const Grid1D& grid, std::size_t mode);

// Lattice box energy of mode m: (hbar^2 / (m dx^2)) (1 - cos(pi m / (n+1))).
double box_lattice_energy(const Grid1D& grid, std::size_t mode, const Units& units = {});

// Continuum hard-wall energy hbar^2 pi^2 m^2 / (2 mass L^2) for L = (n+1) dx.
double box_continuum_energy(const Grid1D& grid, std::size_t mode, const Units& units = {});

// a*psi1 + b*psi2, normalized. Grids and times must match.
WaveFunction1D superpose(Complex a, const WaveFunction1D& psi1, Complex b,
                         const WaveFunction1D& psi2);

}  // namespace pilotpbr::pilotwave
