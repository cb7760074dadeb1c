#include "pilotpbr/bohmian_model.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "pilotpbr/error.hpp"

namespace pilotpbr::ontomodel {

namespace {

std::size_t classify_checked(const OutcomeClassifier& c, double x) {
  const std::size_t k = c.classify(x);
  if (k >= c.outcomes.size()) throw DimensionError("classifier returned an unknown outcome index");
  return k;
}

}  // namespace

std::vector<double> ensemble_outcome_frequencies(const pilotwave::TrajectoryEnsemble& ensemble,
                                                 const OutcomeClassifier& outcome_of) {
  std::vector<double> counts(outcome_of.outcomes.size(), 0.0);
  for (double x : ensemble.final_positions) counts[classify_checked(outcome_of, x)] += 1.0;
  for (auto& c : counts) c /= static_cast<double>(ensemble.final_positions.size());
  return counts;
}

OntologicalModel make_bohmian_discrete_model(
    const std::map<std::string, const pilotwave::TrajectoryEnsemble*>& ensembles,
    const OutcomeClassifier& outcome_of, std::size_t bins) {
  if (bins == 0) throw InvariantError("bins must be >= 1");
  if (ensembles.empty()) throw InvariantError("no ensembles given");
  if (outcome_of.outcomes.empty() || !outcome_of.classify) {
    throw InvariantError("outcome classifier needs outcomes and a function");
  }
  const auto* first = ensembles.begin()->second;
  for (const auto& [label, e] : ensembles) {
    if (e == nullptr || e->size() == 0) throw InvariantError("ensemble '" + label + "' is empty");
    if (e->x_min != first->x_min || e->x_max != first->x_max) {
      throw DimensionError("ensembles live on different domains");
    }
  }
  const double lo = first->x_min;
  const double width = (first->x_max - lo) / static_cast<double>(bins);

  std::vector<std::string> cells(bins);
  for (std::size_t b = 0; b < bins; ++b) cells[b] = "bin" + std::to_string(b);
  auto space = std::make_shared<const LambdaSpace>(cells);

  ResponseFunction response(ResponseKind::Contextual);
  response.declare_setting(outcome_of.setting, outcome_of.outcomes);

  std::vector<EpistemicState> states;
  for (const auto& [label, e] : ensembles) {
    std::vector<double> visits(bins, 0.0);
    std::vector<std::vector<double>> exits(bins, std::vector<double>(outcome_of.outcomes.size(), 0.0));
    for (std::size_t i = 0; i < e->size(); ++i) {
      const double s = std::floor((e->initial_positions[i] - lo) / width);
      const auto b = static_cast<std::size_t>(std::clamp(s, 0.0, static_cast<double>(bins - 1)));
      visits[b] += 1.0;
      exits[b][classify_checked(outcome_of, e->final_positions[i])] += 1.0;
    }
    std::vector<double> weights(bins);
    for (std::size_t b = 0; b < bins; ++b) {
      weights[b] = visits[b] / static_cast<double>(e->size());
      if (visits[b] == 0.0) continue;
      for (auto& c : exits[b]) c /= visits[b];
      response.set(ResponseKey{outcome_of.setting, {cells[b]}, {label}}, std::move(exits[b]));
    }
    states.emplace_back(space, std::move(weights), label);
  }
  return OntologicalModel(space, std::move(states), std::move(response));
}

}  // namespace pilotpbr::ontomodel
