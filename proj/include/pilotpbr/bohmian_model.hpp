#pragma once

// Finite ontological model distilled from trajectory ensembles: lambda is the
// bin of the initial position, the response is the empirical exit frequency
// per (bin, preparation).

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pilotpbr/ontomodel.hpp"
#include "pilotpbr/pilotwave/trajectories.hpp"

namespace pilotpbr::ontomodel {

struct OutcomeClassifier {
  std::string setting;
  std::vector<std::string> outcomes;
  // Index into `outcomes` for a final position.
  std::function<std::size_t(double)> classify;
};

// Bins split [x_min, x_max) of the shared domain into equal widths; cell ids
// are "bin0", "bin1", ... Bins a preparation never visits get weight 0 and no
// response row for that preparation.
OntologicalModel make_bohmian_discrete_model(
    const std::map<std::string, const pilotwave::TrajectoryEnsemble*>& ensembles,
    const OutcomeClassifier& outcome_of, std::size_t bins);

// Empirical outcome frequencies of an ensemble, computed without binning.
std::vector<double> ensemble_outcome_frequencies(const pilotwave::TrajectoryEnsemble& ensemble,
                                                 const OutcomeClassifier& outcome_of);

}  // namespace pilotpbr::ontomodel
