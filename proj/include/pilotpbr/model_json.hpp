#pragma once

// JSON form of an ontological model:
//
//   {
//     "cells": ["a", "b", ...],
//     "epistemic": { "<preparation>": [w_a, w_b, ...], ... },
//     "response": {
//       "kind": "non_contextual" | "contextual",
//       "outcomes": { "<setting>": ["label", ...], ... },        (optional)
//       "entries": [
//         { "setting": "z",   "cell": "a",        "probs": [...] },
//         { "setting": "pbr", "cell": ["a", "b"], "probs": [...] },
//         { "setting": "pbr", "cell": ["a", "b"], "prep": ["psi1", "psi2"], "probs": [...] }
//       ]
//     }
//   }
//
// "prep" is required on contextual entries and forbidden on non-contextual
// ones. Settings missing from "outcomes" get labels "0".."k-1". Unknown
// fields are rejected.

#include <json.hpp>

#include "pilotpbr/ontomodel.hpp"

namespace pilotpbr::ontomodel {

nlohmann::json model_to_json(const OntologicalModel& model);

// Throws ConfigError naming the offending field.
OntologicalModel model_from_json(const nlohmann::json& doc);

}  // namespace pilotpbr::ontomodel
