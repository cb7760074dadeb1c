#pragma once

// Density, current, guidance velocity and Bohmian energy on the lattice.
// Derivatives are centred differences with zero ghost values at the walls.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pilotpbr/pilotwave/grid.hpp"

namespace pilotpbr::pilotwave {

// Cells with rho <= kRhoCutoff * max(rho) carry no velocity or energy.
inline constexpr double kRhoCutoff = 1e-10;

// A field that is undefined on some cells. Undefined cells hold NaN in
// `values` and false in `defined`.
struct PartialField {
  std::vector<double> values;
  std::vector<bool> defined;

  std::size_t defined_count() const noexcept;
  std::optional<double> at(std::size_t j) const {
    if (defined[j]) return values[j];
    return std::nullopt;
  }
};

std::vector<double> density(const WaveFunction1D& psi);

// J = (hbar/m) Im(conj(psi) dpsi/dx)
std::vector<double> probability_current(const WaveFunction1D& psi, const Units& units = {});

// v = J / rho on cells with rho > eps_rel * max(rho).
PartialField velocity_field(const WaveFunction1D& psi, double eps_rel = kRhoCutoff,
                            const Units& units = {});

// (hbar/m) Im(psi'/psi), the real part of the weak value of the velocity.
PartialField weak_value_velocity(const WaveFunction1D& psi, double eps_rel = kRhoCutoff,
                                 const Units& units = {});

// Largest |J/rho - Im(psi'/psi) hbar/m| over defined cells, divided by the
// modulus (hbar/m)|psi'/psi| of the complex weak value.
double velocity_identity_error(const WaveFunction1D& psi, double eps_rel = kRhoCutoff,
                               const Units& units = {});

// S = hbar * arg(psi) unwrapped along x starting at the densest cell. The
// chain restarts after every undefined cell.
PartialField unwrapped_phase(const WaveFunction1D& psi, double eps_rel = kRhoCutoff,
                             const Units& units = {});

// E = -(S(t+dt) - S(t)) / dt with per-cell 2 pi correction. A cell is defined
// when it is above the cutoff in both slices.
PartialField bohmian_energy(const WaveFunction1D& now, const WaveFunction1D& next,
                            double eps_rel = kRhoCutoff, const Units& units = {});

// Max over interior cells and interior slices of |dJ/dx + drho/dt|, using
// centred differences in both x and t. Slices must share a grid and be
// equally spaced in time.
double continuity_residual(std::span<const WaveFunction1D> record, const Units& units = {});

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

Moments position_moments(const WaveFunction1D& psi);

// sum of rho dx over cells with lo <= x < hi
double mass_between(const WaveFunction1D& psi, double lo, double hi);

// rho-weighted mean of v over defined cells.
double mean_velocity(const WaveFunction1D& psi, double eps_rel = kRhoCutoff, const Units& units = {});

// Time structure of E in a run. `record` holds slices exactly dt apart; E_k is
// formed from slices k and k+1. The probed cell is the one with the widest E
// range among cells whose density never drops below 10% of the peak.
struct EnergyBeat {
  std::size_t cell = 0;
  std::size_t maxima = 0;
  double period = 0.0;        // mean spacing of successive maxima of E at `cell`, 0 if < 2
  double cell_spread = 0.0;   // max - min of E over time at `cell`
  double spread = 0.0;        // max - min of E over all defined cells and times
  double time_average = 0.0;  // mean of E at `cell` between its first two maxima
};

EnergyBeat measure_energy_beat(std::span<const WaveFunction1D> record,
                               double eps_rel = kRhoCutoff, const Units& units = {});

}  // namespace pilotpbr::pilotwave
