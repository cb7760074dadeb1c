#include "pilotpbr/model_json.hpp"

#include <set>

namespace pilotpbr::ontomodel {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown field '" + where + key + "'");
  }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError("missing field '" + where + key + "'");
  }
  return obj.at(key);
}

std::vector<double> number_list(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError("field '" + field + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError("field '" + field + "' must hold only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::string> string_or_list(const json& v, const std::string& field) {
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) throw ConfigError("field '" + field + "' must be a string or array");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) throw ConfigError("field '" + field + "' must hold strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

json string_or_list_to_json(const std::vector<std::string>& v) {
  if (v.size() == 1) return v.front();
  return json(v);
}

}  // namespace

json model_to_json(const OntologicalModel& model) {
  json doc;
  doc["cells"] = model.space().cells();
  json epi = json::object();
  for (const auto& [label, state] : model.epistemic_states()) epi[label] = state.weights();
  doc["epistemic"] = epi;

  const auto& r = model.response();
  json resp;
  resp["kind"] = std::string(to_string(r.kind()));
  json outcomes = json::object();
  for (const auto& s : r.settings()) outcomes[s] = r.outcomes(s);
  resp["outcomes"] = outcomes;
  json entries = json::array();
  for (const auto& [key, probs] : r.entries()) {
    json e;
    e["setting"] = key.setting;
    e["cell"] = string_or_list_to_json(key.cells);
    if (!key.preps.empty()) e["prep"] = string_or_list_to_json(key.preps);
    e["probs"] = probs;
    entries.push_back(std::move(e));
  }
  resp["entries"] = entries;
  doc["response"] = resp;
  return doc;
}

OntologicalModel model_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("model document must be a JSON object");
  reject_unknown(doc, "", {"cells", "epistemic", "response"});

  std::shared_ptr<const LambdaSpace> space;
  try {
    space = std::make_shared<const LambdaSpace>(string_or_list(require(doc, "cells", ""), "cells"));
  } catch (const InvariantError& e) {
    throw ConfigError(std::string("field 'cells': ") + e.what());
  }

  const auto& epi = require(doc, "epistemic", "");
  if (!epi.is_object() || epi.empty()) {
    throw ConfigError("field 'epistemic' must be a non-empty object");
  }
  std::vector<EpistemicState> states;
  for (const auto& [label, weights] : epi.items()) {
    const std::string field = "epistemic." + label;
    try {
      states.emplace_back(space, number_list(weights, field), label);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError("field '" + field + "': " + e.what());
    }
  }

  const auto& resp = require(doc, "response", "");
  if (!resp.is_object()) throw ConfigError("field 'response' must be an object");
  reject_unknown(resp, "response.", {"kind", "outcomes", "entries"});
  const auto& kind_v = require(resp, "kind", "response.");
  ResponseKind kind;
  if (kind_v == "non_contextual") {
    kind = ResponseKind::NonContextual;
  } else if (kind_v == "contextual") {
    kind = ResponseKind::Contextual;
  } else {
    throw ConfigError("field 'response.kind' must be \"non_contextual\" or \"contextual\"");
  }
  ResponseFunction response(kind);

  if (resp.contains("outcomes")) {
    const auto& oc = resp.at("outcomes");
    if (!oc.is_object()) throw ConfigError("field 'response.outcomes' must be an object");
    for (const auto& [setting, labels] : oc.items()) {
      const std::string field = "response.outcomes." + setting;
      try {
        response.declare_setting(setting, string_or_list(labels, field));
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        throw ConfigError("field '" + field + "': " + e.what());
      }
    }
  }

  const auto& entries = require(resp, "entries", "response.");
  if (!entries.is_array()) throw ConfigError("field 'response.entries' must be an array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const std::string where = "response.entries[" + std::to_string(i) + "].";
    if (!e.is_object()) throw ConfigError("field '" + where + "' must be an object");
    reject_unknown(e, where, {"setting", "cell", "prep", "probs"});
    const auto& setting_v = require(e, "setting", where);
    if (!setting_v.is_string()) throw ConfigError("field '" + where + "setting' must be a string");
    ResponseKey key;
    key.setting = setting_v.get<std::string>();
    key.cells = string_or_list(require(e, "cell", where), where + "cell");
    if (e.contains("prep")) key.preps = string_or_list(e.at("prep"), where + "prep");
    auto probs = number_list(require(e, "probs", where), where + "probs");
    for (const auto& c : key.cells) {
      if (!space->find(c)) throw ConfigError("field '" + where + "cell' names unknown cell '" + c + "'");
    }
    try {
      if (!response.has_setting(key.setting)) {
        std::vector<std::string> labels;
        for (std::size_t k = 0; k < probs.size(); ++k) labels.push_back(std::to_string(k));
        response.declare_setting(key.setting, std::move(labels));
      }
      response.set(std::move(key), std::move(probs));
    } catch (const Error& err) {
      throw ConfigError("field '" + where + "probs': " + err.what());
    }
  }

  try {
    return OntologicalModel(space, std::move(states), std::move(response));
  } catch (const Error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

}  // namespace pilotpbr::ontomodel
