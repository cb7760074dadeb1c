#pragma once

// Crank-Nicolson propagation on the hard-walled lattice.

#include <cstddef>
#include <span>
#include <vector>

#include "pilotpbr/pilotwave/grid.hpp"

namespace pilotpbr::pilotwave {

struct EvolveOptions {
  double max_step_drift = 1e-10;
  double max_run_drift = 1e-8;
  // CN is unitary for any dt, so norm drift cannot expose a coarse step. The
  // local error is estimated by comparing one dt step against two dt/2 steps.
  double max_step_error = 1e-4;
  std::size_t probe_interval = 16;
};

// One CN step (1 + i dt H / 2hbar) psi' = (1 - i dt H / 2hbar) psi with
// H = -(hbar^2/2m) d^2/dx^2 + V, V = g/dx on the cell nearest the barrier.
class CrankNicolson {
 public:
  CrankNicolson(const Grid1D& grid, const DeltaBarrier& barrier, const Units& units, double dt);

  void step(std::span<Complex> psi) const;
  double dt() const noexcept { return dt_; }

 private:
  double dt_;
  Complex off_;                   // off-diagonal of the implicit matrix
  std::vector<Complex> diag_rhs_; // diagonal of the explicit matrix
  std::vector<Complex> cprime_;   // Thomas forward coefficients
  std::vector<Complex> inv_den_;
  mutable std::vector<Complex> work_;
};

// Stateful propagator with the runtime drift and step-size guards. Throws
// NumericalError advising a smaller dt when a guard trips.
class Propagator {
 public:
  Propagator(const Grid1D& grid, const DeltaBarrier& barrier, const Units& units = {},
             const EvolveOptions& options = {});

  void advance(WaveFunction1D& psi);

  double worst_step_drift() const noexcept { return worst_step_drift_; }
  double worst_step_error() const noexcept { return worst_step_error_; }

 private:
  Grid1D grid_;
  EvolveOptions options_;
  CrankNicolson full_;
  CrankNicolson half_;
  std::size_t steps_ = 0;
  double reference_norm_ = -1.0;
  double worst_step_drift_ = 0.0;
  double worst_step_error_ = 0.0;
  std::vector<Complex> probe_;
};

// g >= 0 is required; throws InvariantError otherwise.
void validate_barrier(const DeltaBarrier& barrier);

WaveFunction1D evolve(const WaveFunction1D& psi, const DeltaBarrier& barrier, std::size_t steps,
                      const Units& units = {}, const EvolveOptions& options = {});

// Same as evolve, keeping every `stride`-th state including the first and last.
std::vector<WaveFunction1D> evolve_recorded(const WaveFunction1D& psi, const DeltaBarrier& barrier,
                                            std::size_t steps, std::size_t stride,
                                            const Units& units = {},
                                            const EvolveOptions& options = {});

}  // namespace pilotpbr::pilotwave
