#include "pilotpbr/pilotwave/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pilotpbr/error.hpp"
#include "pilotpbr/pilotwave/sampling.hpp"

namespace pilotpbr::pilotwave {

namespace {

// Linear interpolation in x. Falls back to the single defined neighbour; ok is
// cleared when neither neighbour is defined.
double interpolate(const PartialField& f, const Grid1D& g, double x, bool& ok) {
  const double s = (x - g.x_min) / g.dx();
  const double fl = std::floor(s);
  const double frac = s - fl;
  const auto n = static_cast<long long>(g.n);
  const auto j = static_cast<long long>(fl);
  const bool has_lo = j >= 0 && j < n && f.defined[static_cast<std::size_t>(j)];
  const bool has_hi = j + 1 >= 0 && j + 1 < n && f.defined[static_cast<std::size_t>(j + 1)];
  if (has_lo && has_hi) {
    const double a = f.values[static_cast<std::size_t>(j)];
    const double b = f.values[static_cast<std::size_t>(j + 1)];
    return a + frac * (b - a);
  }
  if (has_lo) return f.values[static_cast<std::size_t>(j)];
  if (has_hi) return f.values[static_cast<std::size_t>(j + 1)];
  ok = false;
  return 0.0;
}

}  // namespace

std::vector<double> TrajectoryEnsemble::path(std::size_t sample) const {
  std::vector<double> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) out[k] = positions[k * size() + sample];
  return out;
}

std::size_t TrajectoryEnsemble::flagged_count() const noexcept {
  return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), true));
}

TrajectoryIntegrator::TrajectoryIntegrator(const WaveFunction1D& psi0, const DeltaBarrier& barrier,
                                           std::size_t count, std::uint64_t seed,
                                           const Units& units, const TrajectoryOptions& options)
    : TrajectoryIntegrator(psi0, barrier, sample_initial_positions(psi0, count, seed), seed, units,
                           options) {}

TrajectoryIntegrator::TrajectoryIntegrator(const WaveFunction1D& psi0, const DeltaBarrier& barrier,
                                           std::vector<double> initial_positions,
                                           std::uint64_t seed, const Units& units,
                                           const TrajectoryOptions& options)
    : wave_(psi0),
      units_(units),
      options_(options),
      propagator_(psi0.grid, barrier, units, options.evolve),
      initial_norm_(psi0.norm()) {
  psi0.check_normalized();
  if (initial_positions.empty()) throw InvariantError("trajectory ensemble needs at least one sample");
  if (options_.record_stride == 0) throw InvariantError("record stride must be >= 1");

  ensemble_.seed = seed;
  ensemble_.x_min = psi0.grid.x_min;
  ensemble_.x_max = psi0.grid.x_max;
  ensemble_.initial_positions = std::move(initial_positions);
  ensemble_.flagged.assign(ensemble_.size(), false);
  ensemble_.times.push_back(psi0.time);
  ensemble_.positions = ensemble_.initial_positions;
  ensemble_.final_positions = ensemble_.initial_positions;
  ensemble_.t_final = psi0.time;

  current_ = ensemble_.initial_positions;
  last_velocity_.assign(current_.size(), 0.0);
  last_move_.assign(current_.size(), 0.0);
  order_.resize(current_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return current_[a] < current_[b]; });

  v_now_ = velocity_field(wave_, options_.eps_rel, units_);
  if (options_.wave_record_stride > 0) wave_record_.push_back(wave_);
}

void TrajectoryIntegrator::wave_step() {
  propagator_.advance(wave_);
  ++wave_steps_;
  const std::size_t stride = options_.wave_record_stride;
  if (stride == 0) return;
  if (wave_steps_ % stride == 0) wave_record_.push_back(wave_);
  if (options_.record_followers && wave_steps_ % stride == 1 % stride &&
      wave_followers_.size() < wave_record_.size()) {
    wave_followers_.push_back(wave_);
  }
}

double TrajectoryIntegrator::velocity(const PartialField* slices[3], double s, double x,
                                      bool& ok) const {
  // Quadratic Lagrange weights in s = tau / dt over the nodes 0, 1, 2.
  const double w[3] = {(s - 1.0) * (s - 2.0) / 2.0, -s * (s - 2.0), s * (s - 1.0) / 2.0};
  double v[3];
  bool have[3];
  for (int k = 0; k < 3; ++k) {
    have[k] = true;
    v[k] = interpolate(*slices[k], wave_.grid, x, have[k]);
  }
  if (!have[0] && !have[1] && !have[2]) {
    ok = false;
    return 0.0;
  }
  // A slice with no defined neighbour borrows from the nearest slice in time.
  for (int k = 0; k < 3; ++k) {
    if (have[k]) continue;
    const int order[3][2] = {{1, 2}, {0, 2}, {1, 0}};
    v[k] = have[order[k][0]] ? v[order[k][0]] : v[order[k][1]];
  }
  return w[0] * v[0] + w[1] * v[1] + w[2] * v[2];
}

void TrajectoryIntegrator::advance(std::size_t macro_steps) {
  const Grid1D& g = wave_.grid;
  const double dx = g.dx();
  const double h = macro_dt();
  const std::size_t n = current_.size();
  const auto cells = static_cast<long long>(g.n);
  std::vector<double> slope(g.n);
  std::vector<double> speed(g.n);
  reach_.resize(n);
  substeps_.resize(n);

  for (std::size_t step = 0; step < macro_steps; ++step) {
    wave_step();
    PartialField v_mid = velocity_field(wave_, options_.eps_rel, units_);
    wave_step();
    PartialField v_end = velocity_field(wave_, options_.eps_rel, units_);
    const PartialField* slices[3] = {&v_now_, &v_mid, &v_end};

    // Per-cell bounds on |dv/dx| and |v| over the three slices.
    std::fill(slope.begin(), slope.end(), 0.0);
    std::fill(speed.begin(), speed.end(), 0.0);
    for (const PartialField* f : slices) {
      for (std::size_t j = 0; j < g.n; ++j) {
        if (!f->defined[j]) continue;
        speed[j] = std::max(speed[j], std::abs(f->values[j]));
        if (j + 1 < g.n && f->defined[j + 1]) {
          slope[j] = std::max(slope[j], std::abs(f->values[j + 1] - f->values[j]) / dx);
        }
      }
    }

    // Sub-step counts. With h_sub * L <= 1/4 the RK4 map is increasing in x,
    // so samples advanced by the same map keep their order. Each sample takes
    // the count its neighbourhood needs; samples within 2 dx of each other,
    // which share interpolation segments, share the largest count among them.
    // Quadratic time weights amplify the bounds by at most 5/4.
    for (std::size_t i = 0; i < n; ++i) {
      reach_[i] = last_move_[i] + 4.0 * dx;
      const auto c = static_cast<long long>(std::floor((current_[i] - g.x_min) / dx));
      const auto w = static_cast<long long>(std::ceil(reach_[i] / dx));
      double lip = 0.0;
      double vmax = 0.0;
      for (long long j = std::max(0LL, c - w); j <= std::min(cells - 1, c + w); ++j) {
        lip = std::max(lip, slope[static_cast<std::size_t>(j)]);
        vmax = std::max(vmax, speed[static_cast<std::size_t>(j)]);
      }
      std::size_t sub = 1;
      while (sub < options_.max_substeps &&
             (1.25 * lip * h / static_cast<double>(sub) > 0.25 ||
              1.25 * vmax * h / static_cast<double>(sub) >= 2.0 * dx)) {
        sub *= 2;
      }
      substeps_[i] = sub;
    }
    for (std::size_t begin = 0; begin < n;) {
      std::size_t end = begin + 1;
      std::size_t sub = substeps_[order_[begin]];
      while (end < n && current_[order_[end]] - current_[order_[end - 1]] <= 2.0 * dx) {
        sub = std::max(sub, substeps_[order_[end]]);
        ++end;
      }
      for (std::size_t k = begin; k < end; ++k) substeps_[order_[k]] = sub;
      begin = end;
    }

    std::size_t widest = 1;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t sub = substeps_[i];
      widest = std::max(widest, sub);
      const double hs = h / static_cast<double>(sub);
      const double ds = 2.0 / static_cast<double>(sub);  // sub-step in units of dt
      double x = current_[i];
      double last = last_velocity_[i];
      bool flagged = false;
      auto eval = [&](double s, double xq) {
        bool ok = true;
        const double v = velocity(slices, s, xq, ok);
        if (!ok) {
          flagged = true;
          return last;
        }
        last = v;
        return v;
      };
      for (std::size_t k = 0; k < sub; ++k) {
        const double s0 = ds * static_cast<double>(k);
        const double k1 = eval(s0, x);
        const double k2 = eval(s0 + ds / 2.0, x + hs / 2.0 * k1);
        const double k3 = eval(s0 + ds / 2.0, x + hs / 2.0 * k2);
        const double k4 = eval(s0 + ds, x + hs * k3);
        const double move = hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        max_disp_ = std::max(max_disp_, std::abs(move));
        if (std::abs(move) >= options_.max_step_dx * dx) {
          std::ostringstream os;
          os << "trajectory " << i << " moved " << std::abs(move) / dx
             << " dx in one sub-step at t=" << wave_.time << "; reduce dt";
          throw NumericalError(os.str());
        }
        x += move;
      }
      last_move_[i] = std::abs(x - current_[i]);
      current_[i] = x;
      last_velocity_[i] = last;
      if (flagged) ensemble_.flagged[i] = true;
    }
    max_substeps_used_ = std::max(max_substeps_used_, widest);

    v_now_ = std::move(v_end);
    ++macro_steps_;

    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (current_[order_[k]] > current_[order_[k + 1]]) {
        ++order_violations_;
        break;
      }
    }
    if (macro_steps_ % options_.record_stride == 0) {
      ensemble_.times.push_back(wave_.time);
      ensemble_.positions.insert(ensemble_.positions.end(), current_.begin(), current_.end());
    }
  }
  ensemble_.final_positions = current_;
  ensemble_.t_final = wave_.time;
}

TrajectoryRun integrate_trajectories(const WaveFunction1D& psi0, const DeltaBarrier& barrier,
                                     std::size_t count, std::uint64_t seed, double t_final,
                                     const Units& units, const TrajectoryOptions& options) {
  if (!(t_final >= psi0.time)) throw InvariantError("t_final precedes the initial time");
  TrajectoryIntegrator integ(psi0, barrier, count, seed, units, options);
  const double span = (t_final - psi0.time) / integ.macro_dt();
  integ.advance(static_cast<std::size_t>(std::ceil(span - 1e-9)));
  TrajectoryRun run;
  run.order_violations = integ.order_violations();
  run.max_substep_displacement = integ.max_substep_displacement();
  run.norm_drift = integ.norm_drift();
  run.final_state = integ.wave();
  run.wave_record = integ.release_wave_record();
  run.wave_followers = integ.release_wave_followers();
  run.ensemble = integ.release_ensemble();
  return run;
}

}  // namespace pilotpbr::pilotwave
