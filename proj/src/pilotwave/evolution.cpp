#include "pilotpbr/pilotwave/evolution.hpp"

#include <cmath>
#include <sstream>

#include "pilotpbr/error.hpp"

namespace pilotpbr::pilotwave {

namespace {

std::string advise(const char* what, double value, double limit, double dt) {
  std::ostringstream os;
  os << "time step dt=" << dt << " too large: " << what << ' ' << value << " exceeds " << limit
     << "; reduce dt";
  return os.str();
}

}  // namespace

void validate_barrier(const DeltaBarrier& barrier) {
  if (!(barrier.strength >= 0.0) || !std::isfinite(barrier.strength)) {
    throw InvariantError("barrier strength must be finite and >= 0");
  }
}

CrankNicolson::CrankNicolson(const Grid1D& grid, const DeltaBarrier& barrier, const Units& units,
                             double dt)
    : dt_(dt) {
  const std::size_t n = grid.n;
  const double dx = grid.dx();
  const double kinetic = units.hbar * units.hbar / (2.0 * units.mass * dx * dx);
  const Complex itau{0.0, dt / (2.0 * units.hbar)};

  std::vector<double> h_diag(n, 2.0 * kinetic);
  if (barrier.strength > 0.0) {
    const double s = std::round((barrier.position - grid.x_min) / dx);
    if (s >= 0.0 && s < static_cast<double>(n)) {
      h_diag[static_cast<std::size_t>(s)] += barrier.strength / dx;
    }
  }
  off_ = itau * (-kinetic);

  diag_rhs_.resize(n);
  cprime_.resize(n);
  inv_den_.resize(n);
  work_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    diag_rhs_[j] = 1.0 - itau * h_diag[j];
    const Complex b = 1.0 + itau * h_diag[j];
    const Complex den = j == 0 ? b : b - off_ * cprime_[j - 1];
    inv_den_[j] = 1.0 / den;
    cprime_[j] = off_ * inv_den_[j];
  }
}

void CrankNicolson::step(std::span<Complex> psi) const {
  const std::size_t n = psi.size();
  // Explicit half: r = (1 - i tau H) psi, with the off-diagonal of -i tau H
  // equal to -off_.
  for (std::size_t j = 0; j < n; ++j) {
    Complex nb = 0.0;
    if (j > 0) nb += psi[j - 1];
    if (j + 1 < n) nb += psi[j + 1];
    work_[j] = diag_rhs_[j] * psi[j] - off_ * nb;
  }
  // Thomas solve with constant off-diagonals.
  for (std::size_t j = 0; j < n; ++j) {
    const Complex prev = j == 0 ? Complex{} : work_[j - 1];
    work_[j] = (work_[j] - off_ * prev) * inv_den_[j];
  }
  psi[n - 1] = work_[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) psi[j] = work_[j] - cprime_[j] * psi[j + 1];
}

static const Grid1D& checked(const Grid1D& grid, const DeltaBarrier& barrier) {
  grid.validate();
  validate_barrier(barrier);
  return grid;
}

Propagator::Propagator(const Grid1D& grid, const DeltaBarrier& barrier, const Units& units,
                       const EvolveOptions& options)
    : grid_(grid),
      options_(options),
      full_(checked(grid, barrier), barrier, units, grid.dt),
      half_(grid, barrier, units, grid.dt / 2.0) {}

void Propagator::advance(WaveFunction1D& psi) {
  if (!(psi.grid == grid_)) throw DimensionError("wavefunction grid differs from propagator grid");
  const double before = psi.norm();
  if (reference_norm_ < 0.0) reference_norm_ = before;

  const bool probe = options_.probe_interval > 0 && steps_ % options_.probe_interval == 0;
  if (probe) {
    probe_ = psi.values;
    half_.step(probe_);
    half_.step(probe_);
  }
  full_.step(psi.values);
  psi.time += grid_.dt;
  ++steps_;

  if (probe) {
    double err = 0.0;
    for (std::size_t j = 0; j < probe_.size(); ++j) err += std::norm(probe_[j] - psi.values[j]);
    err = std::sqrt(err * grid_.dx());
    worst_step_error_ = std::max(worst_step_error_, err);
    if (err > options_.max_step_error) {
      throw NumericalError(advise("estimated step error", err, options_.max_step_error, grid_.dt));
    }
  }

  const double after = psi.norm();
  const double step_drift = std::abs(after - before);
  worst_step_drift_ = std::max(worst_step_drift_, step_drift);
  if (step_drift > options_.max_step_drift) {
    throw NumericalError(advise("per-step norm drift", step_drift, options_.max_step_drift, grid_.dt));
  }
  const double run_drift = std::abs(after - reference_norm_);
  if (run_drift > options_.max_run_drift) {
    throw NumericalError(advise("run norm drift", run_drift, options_.max_run_drift, grid_.dt));
  }
}

WaveFunction1D evolve(const WaveFunction1D& psi, const DeltaBarrier& barrier, std::size_t steps,
                      const Units& units, const EvolveOptions& options) {
  psi.check_normalized();
  Propagator prop(psi.grid, barrier, units, options);
  WaveFunction1D out = psi;
  for (std::size_t s = 0; s < steps; ++s) prop.advance(out);
  return out;
}

std::vector<WaveFunction1D> evolve_recorded(const WaveFunction1D& psi, const DeltaBarrier& barrier,
                                            std::size_t steps, std::size_t stride,
                                            const Units& units, const EvolveOptions& options) {
  if (stride == 0) throw InvariantError("record stride must be >= 1");
  psi.check_normalized();
  Propagator prop(psi.grid, barrier, units, options);
  std::vector<WaveFunction1D> record{psi};
  WaveFunction1D cur = psi;
  for (std::size_t s = 1; s <= steps; ++s) {
    prop.advance(cur);
    if (s % stride == 0 || s == steps) record.push_back(cur);
  }
  return record;
}

}  // namespace pilotpbr::pilotwave
