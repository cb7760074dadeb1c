#include "pilotpbr/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pilotpbr/error.hpp"
#include "pilotpbr/model_json.hpp"
#include "pilotpbr/pbr_scenario.hpp"

namespace pilotpbr::cli {

using nlohmann::json;

namespace {

// Field access on one JSON object that remembers which keys were consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  std::string name(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  bool has(std::string_view key) {
    seen_.emplace(key);
    return j_.contains(key);
  }

  const json& at(std::string_view key) {
    if (!has(key)) throw ConfigError("missing field '" + name(key) + "'");
    return j_.at(std::string(key));
  }

  double number(std::string_view key) {
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError("field '" + name(key) + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("field '" + name(key) + "' must be finite");
    return d;
  }

  double number_or(std::string_view key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  std::uint64_t unsigned_integer(std::string_view key) {
    const json& v = at(key);
    if (!v.is_number_unsigned()) {
      throw ConfigError("field '" + name(key) + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::uint64_t unsigned_or(std::string_view key, std::uint64_t fallback) {
    return has(key) ? unsigned_integer(key) : fallback;
  }

  std::size_t positive_or(std::string_view key, std::size_t fallback) {
    const auto v = unsigned_or(key, fallback);
    if (v == 0) throw ConfigError("field '" + name(key) + "' must be >= 1");
    return static_cast<std::size_t>(v);
  }

  std::string string(std::string_view key) {
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError("field '" + name(key) + "' must be a string");
    return v.get<std::string>();
  }

  Reader object(std::string_view key) { return Reader(at(key), name(key)); }

  // Rejects keys that were never asked for.
  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.contains(item.key())) throw ConfigError("unknown field '" + name(item.key()) + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : "field '" + path_ + "'"; }

  const json& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

void check_version(Reader& r) {
  const json& v = r.at("version");
  if (!v.is_number_integer() || v.get<long long>() != kConfigVersion) {
    throw ConfigError("field 'version' must be " + std::to_string(kConfigVersion));
  }
}

pilotwave::Grid1D read_grid(Reader r, pilotwave::Grid1D grid) {
  grid.x_min = r.number_or("x_min", grid.x_min);
  grid.x_max = r.number_or("x_max", grid.x_max);
  grid.n = static_cast<std::size_t>(r.unsigned_or("n", grid.n));
  grid.dt = r.number_or("dt", grid.dt);
  r.finish();
  try {
    grid.validate();
  } catch (const InvariantError& e) {
    throw ConfigError(std::string("field 'grid': ") + e.what());
  }
  return grid;
}

pilotwave::Units read_units(Reader r) {
  pilotwave::Units u;
  u.hbar = r.number_or("hbar", u.hbar);
  u.mass = r.number_or("mass", u.mass);
  r.finish();
  if (!(u.hbar > 0.0) || !(u.mass > 0.0)) throw ConfigError("field 'units': hbar and mass must be > 0");
  return u;
}

epr::SpinSetting read_angle(Reader& r, std::string_view key, std::string label) {
  return epr::SpinSetting(r.number(key), std::move(label));
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": malformed JSON: " + e.what());
  }
}

PbrConfig parse_pbr_config(const json& doc, const std::filesystem::path& base_dir) {
  Reader r(doc, "");
  check_version(r);
  const int given = static_cast<int>(r.has("preset")) + static_cast<int>(r.has("model")) +
                    static_cast<int>(r.has("model_file"));
  if (given != 1) throw ConfigError("exactly one of 'preset', 'model' or 'model_file' is required");
  const bool has_weight = r.has("shared_weight");
  const double shared = has_weight ? r.number("shared_weight") : 0.5;
  if (!(shared > 0.0 && shared <= 1.0)) throw ConfigError("field 'shared_weight' must lie in (0, 1]");

  PbrConfig cfg;
  if (r.has("preset")) {
    const std::string preset = r.string("preset");
    cfg.source = "preset:" + preset;
    if (preset == "segregated") {
      if (has_weight) throw ConfigError("field 'shared_weight' does not apply to the segregated preset");
      cfg.model = pbr::make_pbr_segregated_model();
    } else if (preset == "overlapping") {
      cfg.model = pbr::make_overlapping_noncontextual_model(shared);
    } else if (preset == "contextual") {
      cfg.model = pbr::make_contextual_born_model({"a", "s", "b"}, {1.0 - shared, shared, 0.0},
                                                  {0.0, shared, 1.0 - shared});
    } else {
      throw ConfigError("field 'preset' must be segregated, overlapping or contextual");
    }
  } else {
    if (has_weight) throw ConfigError("field 'shared_weight' only applies to presets");
    if (r.has("model")) {
      cfg.source = "model";
      cfg.model = ontomodel::model_from_json(r.at("model"));
    } else {
      const std::filesystem::path file = base_dir / r.string("model_file");
      cfg.source = "model_file:" + r.string("model_file");
      cfg.model = ontomodel::model_from_json(read_json_file(file));
    }
  }
  r.finish();
  return cfg;
}

BeamSplitterConfig parse_beamsplitter_config(const json& doc) {
  Reader r(doc, "");
  check_version(r);
  BeamSplitterConfig cfg;
  auto& p = cfg.params;
  if (r.has("grid")) p.grid = read_grid(r.object("grid"), p.grid);
  if (r.has("units")) p.units = read_units(r.object("units"));
  if (r.has("packet")) {
    Reader pk = r.object("packet");
    p.packet.x0 = pk.number_or("x0", p.packet.x0);
    p.packet.sigma = pk.number_or("sigma", p.packet.sigma);
    p.packet.k0 = pk.number_or("k0", p.packet.k0);
    pk.finish();
  }
  if (r.has("barrier")) {
    Reader b = r.object("barrier");
    if (b.has("g")) {
      const json& g = b.at("g");
      if (g.is_string()) {
        if (g.get<std::string>() != "auto") throw ConfigError("field 'barrier.g' must be a number or \"auto\"");
        p.barrier_strength.reset();
      } else {
        p.barrier_strength = b.number("g");
      }
    }
    p.barrier_position = b.number_or("position", p.barrier_position);
    b.finish();
  }
  p.samples = r.positive_or("samples", p.samples);
  p.seed = r.unsigned_or("seed", p.seed);
  if (r.has("t_final")) {
    const json& t = r.at("t_final");
    if (t.is_string()) {
      if (t.get<std::string>() != "auto") throw ConfigError("field 't_final' must be a number or \"auto\"");
      p.t_final.reset();
    } else {
      p.t_final = r.number("t_final");
    }
  }
  p.model_bins = r.positive_or("model_bins", p.model_bins);
  if (r.has("output")) {
    Reader o = r.object("output");
    auto& out = cfg.output;
    out.trajectory_time_stride = o.positive_or("trajectory_time_stride", out.trajectory_time_stride);
    out.trajectory_sample_stride = o.positive_or("trajectory_sample_stride", out.trajectory_sample_stride);
    out.field_time_stride = o.positive_or("field_time_stride", out.field_time_stride);
    out.field_space_stride = o.positive_or("field_space_stride", out.field_space_stride);
    o.finish();
  }
  r.finish();

  try {
    p.validate();
    for (auto in : pilotwave::kAllInputs) (void)pilotwave::beam_splitter_input_state(in, p);
  } catch (const InvariantError& e) {
    throw ConfigError(e.what());
  }
  p.trajectory.record_stride = cfg.output.trajectory_time_stride;
  p.trajectory.wave_record_stride = cfg.output.field_time_stride;
  p.trajectory.record_followers = true;
  return cfg;
}

EprConfig parse_epr_config(const json& doc) {
  Reader r(doc, "");
  check_version(r);
  EprConfig cfg;
  if (r.has("angles")) {
    Reader a = r.object("angles");
    cfg.settings.a = read_angle(a, "a", "a");
    cfg.settings.a_prime = read_angle(a, "a_prime", "a'");
    cfg.settings.b = read_angle(a, "b", "b");
    cfg.settings.b_prime = read_angle(a, "b_prime", "b'");
    a.finish();
  }
  cfg.gap_a = cfg.settings.a;
  cfg.gap_b = cfg.settings.b;
  if (r.has("gap_angles")) {
    Reader g = r.object("gap_angles");
    cfg.gap_a = read_angle(g, "a", "a");
    cfg.gap_b = read_angle(g, "b", "b");
    g.finish();
  }
  cfg.samples = r.positive_or("samples", cfg.samples);
  cfg.seed = r.unsigned_or("seed", cfg.seed);
  cfg.chsh_band = r.number_or("chsh_band", cfg.chsh_band);
  if (!(cfg.chsh_band > 0.0)) throw ConfigError("field 'chsh_band' must be > 0");
  r.finish();
  return cfg;
}

std::string_view to_string(FieldsStateKind kind) {
  switch (kind) {
    case FieldsStateKind::Eigenstate: return "eigenstate";
    case FieldsStateKind::Superposition: return "superposition";
    case FieldsStateKind::Gaussian: return "gaussian";
  }
  return "?";
}

FieldsConfig parse_fields_config(const json& doc) {
  Reader r(doc, "");
  check_version(r);
  FieldsConfig cfg;
  if (r.has("grid")) cfg.grid = read_grid(r.object("grid"), cfg.grid);
  if (r.has("units")) cfg.units = read_units(r.object("units"));

  Reader st = r.object("state");
  const std::string kind = st.string("kind");
  if (kind == "eigenstate") {
    cfg.kind = FieldsStateKind::Eigenstate;
    cfg.modes = {static_cast<std::size_t>(st.unsigned_or("mode", 1))};
  } else if (kind == "superposition") {
    cfg.kind = FieldsStateKind::Superposition;
    const json& m = st.at("modes");
    if (!m.is_array() || m.size() != 2 || !m[0].is_number_unsigned() || !m[1].is_number_unsigned()) {
      throw ConfigError("field 'state.modes' must be two positive integers");
    }
    cfg.modes = {m[0].get<std::size_t>(), m[1].get<std::size_t>()};
    if (cfg.modes[0] == cfg.modes[1]) throw ConfigError("field 'state.modes' must name two different modes");
  } else if (kind == "gaussian") {
    cfg.kind = FieldsStateKind::Gaussian;
    cfg.x0 = st.number("x0");
    cfg.sigma = st.number("sigma");
    cfg.k0 = st.number_or("k0", 0.0);
    cfg.modes.clear();
  } else {
    throw ConfigError("field 'state.kind' must be eigenstate, superposition or gaussian");
  }
  st.finish();
  for (auto m : cfg.modes) {
    if (m == 0 || m > cfg.grid.n) throw ConfigError("field 'state' names a mode outside 1..n");
  }

  cfg.steps = r.positive_or("steps", cfg.steps);
  if (r.has("output")) {
    Reader o = r.object("output");
    cfg.time_stride = o.positive_or("time_stride", cfg.time_stride);
    cfg.space_stride = o.positive_or("space_stride", cfg.space_stride);
    o.finish();
  }
  if (r.has("checks")) {
    Reader c = r.object("checks");
    cfg.velocity_identity_tolerance = c.number_or("velocity_identity", cfg.velocity_identity_tolerance);
    cfg.energy_tolerance = c.number_or("energy", cfg.energy_tolerance);
    cfg.period_tolerance = c.number_or("period", cfg.period_tolerance);
    cfg.continuity_ratio = c.number_or("continuity_ratio", cfg.continuity_ratio);
    cfg.continuity_floor = c.number_or("continuity_floor", cfg.continuity_floor);
    c.finish();
  }
  r.finish();
  if (cfg.steps < 2) throw ConfigError("field 'steps' must be >= 2");
  try {
    (void)fields_initial_state(cfg, cfg.grid);
  } catch (const InvariantError& e) {
    throw ConfigError(std::string("field 'state': ") + e.what());
  }
  return cfg;
}

pilotwave::WaveFunction1D fields_initial_state(const FieldsConfig& cfg, const pilotwave::Grid1D& grid) {
  switch (cfg.kind) {
    case FieldsStateKind::Eigenstate:
      return pilotwave::box_eigenstate(grid, cfg.modes.at(0));
    case FieldsStateKind::Superposition:
      return pilotwave::superpose(1.0, pilotwave::box_eigenstate(grid, cfg.modes.at(0)), 1.0,
                                  pilotwave::box_eigenstate(grid, cfg.modes.at(1)));
    case FieldsStateKind::Gaussian:
      return pilotwave::gaussian_packet(grid, cfg.x0, cfg.sigma, cfg.k0);
  }
  throw InvariantError("unknown state kind");
}

}  // namespace pilotpbr::cli
