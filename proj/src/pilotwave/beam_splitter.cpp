#include "pilotpbr/pilotwave/beam_splitter.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "pilotpbr/error.hpp"
#include "pilotpbr/pilotwave/fields.hpp"

namespace pilotpbr::pilotwave {

double calibrate_delta_barrier(double k0, const Units& units) {
  if (!(k0 > 0.0)) throw InvariantError("calibration needs k0 > 0");
  return units.hbar * units.hbar * k0 / units.mass;
}

ScatteringAmplitudes delta_amplitudes(double k, double g, const Units& units) {
  if (!(k > 0.0)) throw InvariantError("scattering needs k > 0");
  const double b = units.mass * g / (units.hbar * units.hbar * k);
  const std::complex<double> den{1.0, b};
  return {1.0 / den, std::complex<double>{0.0, -b} / den};
}

double delta_transmission(double k, double g, const Units& units) {
  return std::norm(delta_amplitudes(k, g, units).t);
}

std::string_view to_string(BeamSplitterInput input) {
  switch (input) {
    case BeamSplitterInput::Gate1: return "gate1";
    case BeamSplitterInput::Gate2: return "gate2";
    case BeamSplitterInput::Plus: return "plus";
    case BeamSplitterInput::Minus: return "minus";
  }
  return "?";
}

std::optional<BeamSplitterInput> parse_input(std::string_view label) {
  for (auto in : kAllInputs) {
    if (to_string(in) == label) return in;
  }
  return std::nullopt;
}

void BeamSplitterParams::validate() const {
  grid.validate();
  if (!(packet.sigma > 0.0) || !(packet.k0 > 0.0) || !(packet.x0 > 0.0)) {
    throw InvariantError("packet needs x0, sigma and k0 > 0");
  }
  const double bandwidth = 1.0 / (2.0 * packet.sigma * packet.k0);
  if (bandwidth > 0.05 + 1e-12) {
    std::ostringstream os;
    os << "packet bandwidth sigma_k/k0 = " << bandwidth << " exceeds 0.05";
    throw InvariantError(os.str());
  }
  const double reach = packet.x0 + 5.0 * packet.sigma;
  if (barrier_position - reach < grid.x_min || barrier_position + reach > grid.x(grid.n - 1)) {
    throw InvariantError("packets at barrier +/- x0 are clipped by the grid");
  }
  if (samples == 0) throw InvariantError("samples must be >= 1");
  if (model_bins == 0) throw InvariantError("model bins must be >= 1");
  if (barrier_strength && !(*barrier_strength >= 0.0)) throw InvariantError("barrier strength must be >= 0");
  if (t_final && !(*t_final > 0.0)) throw InvariantError("t_final must be > 0");
}

DeltaBarrier BeamSplitterParams::barrier() const {
  return DeltaBarrier{barrier_position,
                      barrier_strength ? *barrier_strength : calibrate_delta_barrier(packet.k0, units)};
}

WaveFunction1D beam_splitter_input_state(BeamSplitterInput input, const BeamSplitterParams& params) {
  const auto& p = params.packet;
  const double c = params.barrier_position;
  const auto psi1 = gaussian_packet(params.grid, c - p.x0, p.sigma, p.k0);
  const auto psi2 = gaussian_packet(params.grid, c + p.x0, p.sigma, -p.k0);
  const std::complex<double> i{0.0, 1.0};
  switch (input) {
    case BeamSplitterInput::Gate1: return psi1;
    case BeamSplitterInput::Gate2: return psi2;
    case BeamSplitterInput::Plus: return superpose(1.0, psi1, i, psi2);
    case BeamSplitterInput::Minus: return superpose(1.0, psi1, -i, psi2);
  }
  throw InvariantError("unknown beam splitter input");
}

double density_overlap(const WaveFunction1D& a, const WaveFunction1D& b) {
  if (!(a.grid == b.grid)) throw DimensionError("overlap of wavefunctions on different grids");
  double s = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) {
    s += std::min(std::norm(a.values[j]), std::norm(b.values[j]));
  }
  return s * a.grid.dx();
}

ontomodel::OutcomeClassifier exit_classifier(double barrier_position) {
  return {std::string(kBeamSplitterSetting),
          {std::string(kExit3), std::string(kExit4)},
          [barrier_position](double x) -> std::size_t { return x > barrier_position ? 0 : 1; }};
}

ScenarioResult beam_splitter_scenario(BeamSplitterInput input, const BeamSplitterParams& params) {
  params.validate();
  const DeltaBarrier barrier = params.barrier();
  const double c = params.barrier_position;
  const double x0 = params.packet.x0;

  ScenarioResult r;
  r.input = input;
  r.initial_state = beam_splitter_input_state(input, params);
  for (std::size_t k = 0; k < kAllInputs.size(); ++k) {
    r.initial_overlap[k] =
        kAllInputs[k] == input ? 1.0
                               : density_overlap(r.initial_state,
                                                 beam_splitter_input_state(kAllInputs[k], params));
  }

  TrajectoryIntegrator integ(r.initial_state, barrier, params.samples, params.seed, params.units,
                             params.trajectory);
  const double h = integ.macro_dt();
  auto macro_steps_to = [&](double t) {
    return static_cast<std::size_t>(std::max(0.0, std::ceil((t - integ.time()) / h - 1e-9)));
  };
  auto central = [&] { return mass_between(integ.wave(), c - x0 / 2.0, c + x0 / 2.0); };

  const double v0 = params.units.hbar * params.packet.k0 / params.units.mass;
  const double transit = 2.0 * x0 / v0;
  if (params.t_final) {
    integ.advance(macro_steps_to(*params.t_final));
  } else {
    integ.advance(macro_steps_to(transit));
    const double budget = params.max_time_factor * transit;
    const double chunk = transit / 20.0;
    while (central() >= params.clearance_tolerance && integ.time() + chunk <= budget + 1e-9) {
      integ.advance(macro_steps_to(integ.time() + chunk));
    }
  }
  r.central_mass = central();
  if (r.central_mass >= params.clearance_tolerance) {
    std::ostringstream os;
    os << "packets not cleared from the barrier region at t=" << integ.time() << " (mass "
       << r.central_mass << " within x0/2); increase the time budget";
    throw NumericalError(os.str());
  }

  r.t_final = integ.time();
  r.final_state = integ.wave();
  r.guard_mass = mass_between(r.final_state, c - x0 / 4.0, c + x0 / 4.0);
  for (std::size_t j = 0; j < params.grid.n; ++j) {
    (params.grid.x(j) > c ? r.p3 : r.p4) += std::norm(r.final_state.values[j]) * params.grid.dx();
  }
  r.norm_drift = integ.norm_drift();
  r.order_violations = integ.order_violations();
  r.max_substep_displacement = integ.max_substep_displacement();
  r.wave_record = integ.release_wave_record();
  r.wave_followers = integ.release_wave_followers();
  r.ensemble = integ.release_ensemble();
  for (double x : r.ensemble.final_positions) (x > c ? r.exits3 : r.exits4) += 1;
  r.ks = ks_against_density(r.ensemble.final_positions, r.final_state);

  const std::map<std::string, const TrajectoryEnsemble*> one{{std::string(to_string(input)), &r.ensemble}};
  r.model = ontomodel::make_bohmian_discrete_model(one, exit_classifier(c), params.model_bins);
  return r;
}

BeamSplitterSuite run_beam_splitter_suite(const BeamSplitterParams& params) {
  BeamSplitterSuite suite;
  std::map<std::string, const TrajectoryEnsemble*> all;
  for (std::size_t k = 0; k < kAllInputs.size(); ++k) {
    suite.results[k] = beam_splitter_scenario(kAllInputs[k], params);
    suite.initial_overlap[k] = suite.results[k].initial_overlap;
  }
  for (std::size_t k = 0; k < kAllInputs.size(); ++k) {
    all.emplace(std::string(to_string(kAllInputs[k])), &suite.results[k].ensemble);
  }

  const auto rho1 = density(suite.results[0].initial_state);
  const auto rho2 = density(suite.results[1].initial_state);
  const auto rhop = density(suite.results[2].initial_state);
  const double m1 = *std::max_element(rho1.begin(), rho1.end());
  const double m2 = *std::max_element(rho2.begin(), rho2.end());
  const double mp = *std::max_element(rhop.begin(), rhop.end());
  const double tau = ontomodel::kSupportFactor;
  for (std::size_t j = 0; j < rhop.size(); ++j) {
    const bool in_union = rho1[j] > tau * m1 || rho2[j] > tau * m2;
    if ((rhop[j] > tau * mp) != in_union) ++suite.support_mismatch_cells;
  }

  suite.model = ontomodel::make_bohmian_discrete_model(all, exit_classifier(params.barrier_position),
                                                       params.model_bins);
  return suite;
}

}  // namespace pilotpbr::pilotwave
