#pragma once

// Delta-barrier beam splitter with packets entering from either side.
//
// Gate1: packet at -x0 moving right. Gate2: packet at +x0 moving left.
// Plus/Minus: (psi1 +/- i psi2)/sqrt(2). Exit "3" is x > barrier, exit "4"
// is x < barrier.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "pilotpbr/bohmian_model.hpp"
#include "pilotpbr/pilotwave/grid.hpp"
#include "pilotpbr/pilotwave/sampling.hpp"
#include "pilotpbr/pilotwave/trajectories.hpp"

namespace pilotpbr::pilotwave {

// g = hbar^2 k0 / m, the strength giving T = 1/2 at wavenumber k0.
double calibrate_delta_barrier(double k0, const Units& units = {});

struct ScatteringAmplitudes {
  std::complex<double> t;
  std::complex<double> r;
};

// Plane-wave amplitudes for V = g delta(x): t = 1/(1 + i b), r = -i b/(1 + i b)
// with b = m g / (hbar^2 k).
ScatteringAmplitudes delta_amplitudes(double k, double g, const Units& units = {});
double delta_transmission(double k, double g, const Units& units = {});

enum class BeamSplitterInput { Gate1, Gate2, Plus, Minus };

inline constexpr std::array<BeamSplitterInput, 4> kAllInputs = {
    BeamSplitterInput::Gate1, BeamSplitterInput::Gate2, BeamSplitterInput::Plus,
    BeamSplitterInput::Minus};

std::string_view to_string(BeamSplitterInput input);  // "gate1", "gate2", "plus", "minus"
std::optional<BeamSplitterInput> parse_input(std::string_view label);

inline constexpr std::string_view kBeamSplitterSetting = "beam_splitter";
inline constexpr std::string_view kExit3 = "3";
inline constexpr std::string_view kExit4 = "4";

struct PacketParams {
  double x0 = 30.0;
  double sigma = 2.5;
  double k0 = 4.0;
};

struct BeamSplitterParams {
  Grid1D grid{-64.0, 64.0, 8192, 0.005};
  PacketParams packet;
  double barrier_position = 0.0;
  std::optional<double> barrier_strength;  // calibrated when empty
  std::size_t samples = 2000;
  std::uint64_t seed = 1;
  std::optional<double> t_final;  // automatic when empty
  Units units;
  std::size_t model_bins = 64;
  double clearance_tolerance = 1e-3;  // allowed mass within x0/2 of the barrier
  double max_time_factor = 1.5;       // budget, in units of 2 x0 / v0
  TrajectoryOptions trajectory;

  // Throws InvariantError on a bandwidth above 0.05 or a clipped packet.
  void validate() const;
  DeltaBarrier barrier() const;
};

WaveFunction1D beam_splitter_input_state(BeamSplitterInput input, const BeamSplitterParams& params);

// sum_j min(rho_a, rho_b) dx
double density_overlap(const WaveFunction1D& a, const WaveFunction1D& b);

struct ScenarioResult {
  BeamSplitterInput input = BeamSplitterInput::Gate1;
  double p3 = 0.0;  // wave norm with x > barrier at t_final
  double p4 = 0.0;
  std::size_t exits3 = 0;
  std::size_t exits4 = 0;
  double t_final = 0.0;
  double central_mass = 0.0;  // norm within x0/2 of the barrier at t_final
  double guard_mass = 0.0;    // norm within x0/4 of the barrier at t_final
  double norm_drift = 0.0;
  std::size_t order_violations = 0;
  double max_substep_displacement = 0.0;
  KsResult ks;
  std::array<double, 4> initial_overlap{};  // against each input, in kAllInputs order
  WaveFunction1D initial_state;
  WaveFunction1D final_state;
  TrajectoryEnsemble ensemble;
  std::vector<WaveFunction1D> wave_record;     // per TrajectoryOptions
  std::vector<WaveFunction1D> wave_followers;
  std::optional<ontomodel::OntologicalModel> model;  // this preparation alone

  double freq3() const { return static_cast<double>(exits3) / static_cast<double>(exits3 + exits4); }
  double freq4() const { return static_cast<double>(exits4) / static_cast<double>(exits3 + exits4); }
};

// Throws NumericalError when the packets have not left the barrier region
// within the time budget.
ScenarioResult beam_splitter_scenario(BeamSplitterInput input, const BeamSplitterParams& params);

struct BeamSplitterSuite {
  std::array<ScenarioResult, 4> results;
  std::array<std::array<double, 4>, 4> initial_overlap{};
  // Cells where membership in the Plus support differs from membership in the
  // union of the Gate1 and Gate2 supports (threshold 1e-12 of each maximum).
  std::size_t support_mismatch_cells = 0;
  std::optional<ontomodel::OntologicalModel> model;  // all four preparations
};

BeamSplitterSuite run_beam_splitter_suite(const BeamSplitterParams& params);

ontomodel::OutcomeClassifier exit_classifier(double barrier_position);

}  // namespace pilotpbr::pilotwave
