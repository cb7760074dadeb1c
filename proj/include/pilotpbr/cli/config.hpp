#pragma once

// JSON run configurations. Every document carries "version": 1 and unknown
// fields are rejected with a ConfigError naming the field path.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pilotpbr/epr_bell.hpp"
#include "pilotpbr/ontomodel.hpp"
#include "pilotpbr/pilotwave/beam_splitter.hpp"
#include "pilotpbr/pilotwave/grid.hpp"

namespace pilotpbr::cli {

inline constexpr int kConfigVersion = 1;

// Parse errors and I/O failures become ConfigError.
nlohmann::json read_json_file(const std::filesystem::path& path);

struct PbrConfig {
  std::string source;  // "preset:<name>", "model" or "model_file:<path>"
  std::optional<ontomodel::OntologicalModel> model;
};

// Exactly one of "preset" (segregated | overlapping | contextual), "model"
// (inline document) or "model_file" (path relative to the config) is given.
// "shared_weight" tunes the overlapping and contextual presets.
PbrConfig parse_pbr_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

struct BeamSplitterOutput {
  std::size_t trajectory_time_stride = 25;   // macro steps between CSV rows
  std::size_t trajectory_sample_stride = 10; // write every k-th sample
  std::size_t field_time_stride = 100;       // wave steps between CSV slices
  std::size_t field_space_stride = 16;       // grid points between CSV rows
};

struct BeamSplitterConfig {
  pilotwave::BeamSplitterParams params;
  BeamSplitterOutput output;
};

BeamSplitterConfig parse_beamsplitter_config(const nlohmann::json& doc);

struct EprConfig {
  epr::ChshSettings settings = epr::optimal_chsh_settings();
  epr::SpinSetting gap_a{0.0, "a"};  // defaults to settings.a / settings.b
  epr::SpinSetting gap_b{0.0, "b"};
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  double chsh_band = 0.05;
};

EprConfig parse_epr_config(const nlohmann::json& doc);

enum class FieldsStateKind { Eigenstate, Superposition, Gaussian };

struct FieldsConfig {
  pilotwave::Grid1D grid{0.0, std::numbers::pi, 256, 0.002};
  pilotwave::Units units;
  FieldsStateKind kind = FieldsStateKind::Eigenstate;
  std::vector<std::size_t> modes{1};  // eigenstate: one mode; superposition: two
  double x0 = 0.0;
  double sigma = 1.0;
  double k0 = 0.0;
  std::size_t steps = 1000;
  std::size_t time_stride = 10;
  std::size_t space_stride = 1;
  double velocity_identity_tolerance = 1e-9;
  double energy_tolerance = 0.01;  // eigenstate: relative spread of E
  double period_tolerance = 0.05;  // superposition: relative beat period error
  double continuity_ratio = 3.0;   // refined residual must drop by this factor
  double continuity_floor = 1e-8;  // residuals below this count as zero
};

FieldsConfig parse_fields_config(const nlohmann::json& doc);

// Initial state for a fields run on `grid` (the config grid or its refinement).
pilotwave::WaveFunction1D fields_initial_state(const FieldsConfig& cfg,
                                               const pilotwave::Grid1D& grid);

std::string_view to_string(FieldsStateKind kind);

}  // namespace pilotpbr::cli
