#pragma once

// Guidance-equation trajectories co-evolved with the wave.
//
// The wave advances in steps of dt. Trajectories advance in macro steps of
// 2 dt using the velocity fields of the three slices t, t+dt, t+2dt, joined by
// quadratic interpolation in time and linear interpolation in x. The macro
// step is split into 2^k classical RK4 sub-steps, with k chosen from the local
// Lipschitz constant and speed of the field (see advance()).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pilotpbr/pilotwave/evolution.hpp"
#include "pilotpbr/pilotwave/fields.hpp"
#include "pilotpbr/pilotwave/grid.hpp"

namespace pilotpbr::pilotwave {

struct TrajectoryOptions {
  double eps_rel = kRhoCutoff;
  std::size_t record_stride = 1;       // macro steps between stored path points
  std::size_t wave_record_stride = 0;  // wave steps between stored slices, 0 = none
  bool record_followers = false;       // also keep the slice one dt after each stored one
  double max_step_dx = 5.0;            // continuity bound on one sub-step, in dx
  std::size_t max_substeps = 1024;
  EvolveOptions evolve;
};

struct TrajectoryEnsemble {
  std::uint64_t seed = 0;
  double x_min = 0.0;
  double x_max = 0.0;
  std::vector<double> initial_positions;
  std::vector<double> times;      // stored times, first is t0
  std::vector<double> positions;  // time-major: positions[k * size() + i]
  std::vector<double> final_positions;
  std::vector<bool> flagged;      // entered a region with no defined velocity
  double t_final = 0.0;

  std::size_t size() const noexcept { return initial_positions.size(); }
  std::span<const double> at(std::size_t k) const {
    return {positions.data() + k * size(), size()};
  }
  std::vector<double> path(std::size_t sample) const;
  std::size_t flagged_count() const noexcept;
};

class TrajectoryIntegrator {
 public:
  // Initial positions drawn by sample_initial_positions(psi0, count, seed).
  TrajectoryIntegrator(const WaveFunction1D& psi0, const DeltaBarrier& barrier, std::size_t count,
                       std::uint64_t seed, const Units& units = {},
                       const TrajectoryOptions& options = {});
  // Explicit initial positions; `seed` is recorded only.
  TrajectoryIntegrator(const WaveFunction1D& psi0, const DeltaBarrier& barrier,
                       std::vector<double> initial_positions, std::uint64_t seed,
                       const Units& units = {}, const TrajectoryOptions& options = {});

  void advance(std::size_t macro_steps);

  double time() const noexcept { return wave_.time; }
  double macro_dt() const noexcept { return 2.0 * wave_.grid.dt; }
  const WaveFunction1D& wave() const noexcept { return wave_; }
  const TrajectoryEnsemble& ensemble() const noexcept { return ensemble_; }
  const std::vector<WaveFunction1D>& wave_record() const noexcept { return wave_record_; }
  // followers()[k] is wave_record()[k] advanced by dt; the last stored slice
  // may not have one yet.
  const std::vector<WaveFunction1D>& wave_followers() const noexcept { return wave_followers_; }

  // Macro steps after which the sorted order of positions had changed.
  std::size_t order_violations() const noexcept { return order_violations_; }
  double max_substep_displacement() const noexcept { return max_disp_; }
  std::size_t max_substeps_used() const noexcept { return max_substeps_used_; }
  double norm_drift() const noexcept { return std::abs(wave_.norm() - initial_norm_); }

  TrajectoryEnsemble release_ensemble() { return std::move(ensemble_); }
  std::vector<WaveFunction1D> release_wave_record() { return std::move(wave_record_); }
  std::vector<WaveFunction1D> release_wave_followers() { return std::move(wave_followers_); }

 private:
  void wave_step();
  double velocity(const PartialField* slices[3], double s, double x, bool& ok) const;

  WaveFunction1D wave_;
  Units units_;
  TrajectoryOptions options_;
  Propagator propagator_;
  double initial_norm_;
  TrajectoryEnsemble ensemble_;
  std::vector<double> current_;
  std::vector<double> last_velocity_;
  std::vector<std::size_t> order_;
  std::vector<double> last_move_;
  std::vector<double> reach_;
  std::vector<std::size_t> substeps_;
  PartialField v_now_;
  std::vector<WaveFunction1D> wave_record_;
  std::vector<WaveFunction1D> wave_followers_;
  std::size_t wave_steps_ = 0;
  std::size_t macro_steps_ = 0;
  std::size_t order_violations_ = 0;
  double max_disp_ = 0.0;
  std::size_t max_substeps_used_ = 1;
};

struct TrajectoryRun {
  TrajectoryEnsemble ensemble;
  WaveFunction1D final_state;
  std::vector<WaveFunction1D> wave_record;
  std::vector<WaveFunction1D> wave_followers;
  std::size_t order_violations = 0;
  double max_substep_displacement = 0.0;
  double norm_drift = 0.0;
};

// Runs ceil((t_final - t0) / (2 dt)) macro steps; ensemble.t_final holds the
// time actually reached.
TrajectoryRun integrate_trajectories(const WaveFunction1D& psi0, const DeltaBarrier& barrier,
                                     std::size_t count, std::uint64_t seed, double t_final,
                                     const Units& units = {},
                                     const TrajectoryOptions& options = {});

}  // namespace pilotpbr::pilotwave
