#include "pilotpbr/ontomodel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

namespace pilotpbr::ontomodel {

namespace {

void check_probability_row(std::span<const double> row, const std::string& what) {
  double sum = 0.0;
  for (double p : row) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvariantError(what + " has a negative or non-finite probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kEpsProb) {
    throw InvariantError(what + " sums to " + std::to_string(sum) + ", not 1");
  }
}

std::string describe(const ResponseKey& key) {
  std::string s = "setting '" + key.setting + "', cell";
  s += key.cells.size() > 1 ? "s (" : " ";
  for (std::size_t i = 0; i < key.cells.size(); ++i) s += (i ? ", " : "") + key.cells[i];
  if (key.cells.size() > 1) s += ")";
  if (!key.preps.empty()) {
    s += ", preparation";
    for (const auto& p : key.preps) s += " " + p;
  }
  return s;
}

std::vector<double> checked_prediction(std::vector<double> acc, const std::string& what) {
  const double sum = std::accumulate(acc.begin(), acc.end(), 0.0);
  if (std::abs(sum - 1.0) > kEpsPredicted) {
    throw InvariantError(what + " sums to " + std::to_string(sum));
  }
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------

LambdaSpace::LambdaSpace(std::vector<std::string> cells) : cells_(std::move(cells)) {
  if (cells_.empty()) throw InvariantError("lambda space must have at least one cell");
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].empty()) throw InvariantError("empty lambda cell identifier");
    if (!index_.emplace(cells_[i], i).second) {
      throw InvariantError("duplicate lambda cell '" + cells_[i] + "'");
    }
  }
}

std::optional<std::size_t> LambdaSpace::find(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t LambdaSpace::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw DimensionError("unknown lambda cell '" + std::string(id) + "'");
}

EpistemicState::EpistemicState(SpacePtr space, std::vector<double> weights,
                               std::string preparation_label)
    : space_(std::move(space)), weights_(std::move(weights)), label_(std::move(preparation_label)) {
  if (!space_) throw InvariantError("epistemic state without a lambda space");
  if (weights_.size() != space_->size()) {
    throw DimensionError("epistemic state '" + label_ + "' has " +
                         std::to_string(weights_.size()) + " weights for " +
                         std::to_string(space_->size()) + " cells");
  }
  check_probability_row(weights_, "epistemic state '" + label_ + "'");
  max_weight_ = *std::max_element(weights_.begin(), weights_.end());
}

std::string_view to_string(ResponseKind kind) {
  return kind == ResponseKind::NonContextual ? "non_contextual" : "contextual";
}

// ---------------------------------------------------------------------------

void ResponseFunction::declare_setting(std::string setting, std::vector<std::string> outcome_labels) {
  if (setting.empty()) throw InvariantError("empty setting label");
  if (outcome_labels.empty()) throw InvariantError("setting '" + setting + "' has no outcomes");
  std::set<std::string> seen(outcome_labels.begin(), outcome_labels.end());
  if (seen.size() != outcome_labels.size()) {
    throw InvariantError("setting '" + setting + "' has duplicate outcome labels");
  }
  auto [it, inserted] = outcomes_.emplace(std::move(setting), std::move(outcome_labels));
  if (!inserted) throw InvariantError("setting '" + it->first + "' declared twice");
}

bool ResponseFunction::has_setting(std::string_view setting) const {
  return outcomes_.find(setting) != outcomes_.end();
}

const std::vector<std::string>& ResponseFunction::outcomes(std::string_view setting) const {
  auto it = outcomes_.find(setting);
  if (it == outcomes_.end()) {
    throw MissingResponseEntry("response has no setting '" + std::string(setting) + "'", "");
  }
  return it->second;
}

std::vector<std::string> ResponseFunction::settings() const {
  std::vector<std::string> out;
  for (const auto& [s, _] : outcomes_) out.push_back(s);
  return out;
}

void ResponseFunction::check_key_shape(const ResponseKey& key) const {
  if (key.cells.empty() || key.cells.size() > 2) {
    throw InvariantError("response key must name one or two cells");
  }
  if (kind_ == ResponseKind::NonContextual && !key.preps.empty()) {
    throw InvariantError("non-contextual response cannot be keyed by preparation (" +
                         describe(key) + ")");
  }
  if (kind_ == ResponseKind::Contextual && key.preps.size() != key.cells.size()) {
    throw InvariantError("contextual response needs one preparation per cell (" + describe(key) +
                         ")");
  }
}

void ResponseFunction::set(ResponseKey key, std::vector<double> probabilities) {
  check_key_shape(key);
  const auto& labels = outcomes(key.setting);
  if (probabilities.size() != labels.size()) {
    throw DimensionError("response row for " + describe(key) + " has " +
                         std::to_string(probabilities.size()) + " entries, setting has " +
                         std::to_string(labels.size()) + " outcomes");
  }
  check_probability_row(probabilities, "response row for " + describe(key));
  table_.insert_or_assign(std::move(key), std::move(probabilities));
}

const std::vector<double>* ResponseFunction::find(const ResponseKey& key) const {
  check_key_shape(key);
  auto it = table_.find(key);
  return it == table_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------

OntologicalModel::OntologicalModel(SpacePtr space, std::vector<EpistemicState> epistemic,
                                   ResponseFunction response)
    : space_(std::move(space)), response_(std::move(response)) {
  if (!space_) throw InvariantError("model without a lambda space");
  for (auto& e : epistemic) {
    if (e.space_ptr() != space_ && !(e.space() == *space_)) {
      throw DimensionError("epistemic state '" + e.preparation_label() +
                           "' lives on a different lambda space");
    }
    const std::string label = e.preparation_label();
    if (!epistemic_.emplace(label, std::move(e)).second) {
      throw InvariantError("duplicate preparation '" + label + "'");
    }
  }
  for (const auto& [key, _] : response_.entries()) {
    for (const auto& c : key.cells) space_->index_of(c);
  }
}

const EpistemicState& OntologicalModel::epistemic(std::string_view preparation) const {
  auto it = epistemic_.find(preparation);
  if (it == epistemic_.end()) {
    throw DimensionError("model has no preparation '" + std::string(preparation) + "'");
  }
  return it->second;
}

bool OntologicalModel::has_preparation(std::string_view preparation) const {
  return epistemic_.find(preparation) != epistemic_.end();
}

// ---------------------------------------------------------------------------

std::vector<double> predicted_probability(const OntologicalModel& model,
                                          const std::string& preparation,
                                          const std::string& setting) {
  const auto& rho = model.epistemic(preparation);
  const auto& response = model.response();
  const bool contextual = response.kind() == ResponseKind::Contextual;
  std::vector<double> acc(response.outcomes(setting).size(), 0.0);

  for (std::size_t c = 0; c < model.space().size(); ++c) {
    const double w = rho.weight(c);
    if (!(w > 0.0)) continue;
    ResponseKey key{setting, {model.space().cell(c)}, {}};
    if (contextual) key.preps = {preparation};
    const auto* row = response.find(key);
    if (!row) {
      throw MissingResponseEntry("no response entry for populated " + describe(key),
                                 model.space().cell(c));
    }
    for (std::size_t a = 0; a < acc.size(); ++a) acc[a] += w * (*row)[a];
  }
  return checked_prediction(std::move(acc), "prediction for '" + preparation + "'");
}

std::vector<double> product_predicted_probability(const OntologicalModel& model,
                                                  const std::string& prep_a,
                                                  const std::string& prep_b,
                                                  const std::string& joint_setting) {
  const auto& rho_a = model.epistemic(prep_a);
  const auto& rho_b = model.epistemic(prep_b);
  const auto& response = model.response();
  const bool contextual = response.kind() == ResponseKind::Contextual;
  std::vector<double> acc(response.outcomes(joint_setting).size(), 0.0);
  const auto& space = model.space();

  for (std::size_t c1 = 0; c1 < space.size(); ++c1) {
    const double w1 = rho_a.weight(c1);
    if (!(w1 > 0.0)) continue;
    for (std::size_t c2 = 0; c2 < space.size(); ++c2) {
      const double w2 = rho_b.weight(c2);
      if (!(w2 > 0.0)) continue;
      ResponseKey key{joint_setting, {space.cell(c1), space.cell(c2)}, {}};
      if (contextual) key.preps = {prep_a, prep_b};
      const auto* row = response.find(key);
      if (!row) {
        throw MissingResponseEntry("no response entry for populated " + describe(key),
                                   space.cell(c1) + "," + space.cell(c2));
      }
      // Preparation independence: the joint weight is the product.
      const double w = w1 * w2;
      for (std::size_t a = 0; a < acc.size(); ++a) acc[a] += w * (*row)[a];
    }
  }
  return checked_prediction(std::move(acc),
                            "joint prediction for ('" + prep_a + "', '" + prep_b + "')");
}

OverlapResult support_overlap(const EpistemicState& e1, const EpistemicState& e2) {
  if (e1.space_ptr() != e2.space_ptr() && !(e1.space() == e2.space())) {
    throw DimensionError("support_overlap across different lambda spaces");
  }
  OverlapResult r;
  for (std::size_t c = 0; c < e1.weights().size(); ++c) {
    r.overlap_mass += std::min(e1.weight(c), e2.weight(c));
    if (e1.in_support(c) && e2.in_support(c)) r.disjoint = false;
  }
  return r;
}

AuditResult pbr_overlap_audit(const OntologicalModel& model, const std::string& prep1,
                              const std::string& prep2, const std::string& joint_setting) {
  const auto& response = model.response();
  if (response.kind() == ResponseKind::Contextual) {
    throw AuditInapplicable("audit inapplicable: response depends on Psi0");
  }
  const auto& outcomes = response.outcomes(joint_setting);
  if (outcomes.size() != 4) {
    throw DimensionError("PBR audit needs a four-outcome joint setting, '" + joint_setting +
                         "' has " + std::to_string(outcomes.size()));
  }
  const EpistemicState* rho[2] = {&model.epistemic(prep1), &model.epistemic(prep2)};

  if (support_overlap(*rho[0], *rho[1]).disjoint) return AuditPass{};

  const auto& space = model.space();
  std::size_t shared = 0;
  while (!(rho[0]->in_support(shared) && rho[1]->in_support(shared))) ++shared;

  ContradictionCertificate cert;
  cert.cell = space.cell(shared);
  cert.weight1 = rho[0]->weight(shared);
  cert.weight2 = rho[1]->weight(shared);

  // Outcome i must vanish under preparation pair (i/2, i%2). At the shared
  // cell every pair has positive joint weight, so every outcome is forced.
  std::array<double, 4> pair_weight{};
  for (std::size_t i = 0; i < 4; ++i) {
    pair_weight[i] = rho[i / 2]->weight(shared) * rho[i % 2]->weight(shared);
    if (pair_weight[i] > 0.0) cert.forced_zero_outcomes.push_back(outcomes[i]);
  }
  // All four entries are forced to zero, yet the row has to sum to one.
  cert.normalization_deficit = 1.0;

  if (const auto* row = response.find({joint_setting, {cert.cell, cert.cell}, {}})) {
    cert.model_row = *row;
    for (std::size_t i = 0; i < 4; ++i) {
      cert.implied_violation = std::max(cert.implied_violation, pair_weight[i] * (*row)[i]);
    }
  }
  return cert;
}

// ---------------------------------------------------------------------------

std::string segregated_cell_id(std::string_view preparation) {
  return "cell:" + std::string(preparation);
}

OntologicalModel make_segregated_model(
    const std::vector<std::pair<std::string, qstate::Ket>>& preparations,
    const std::vector<qstate::MeasurementBasis>& bases) {
  if (preparations.empty()) throw InvariantError("segregated model needs a preparation");
  std::vector<std::string> cells;
  for (const auto& [label, ket] : preparations) cells.push_back(segregated_cell_id(label));
  auto space = std::make_shared<const LambdaSpace>(cells);

  std::vector<EpistemicState> epistemic;
  for (std::size_t i = 0; i < preparations.size(); ++i) {
    std::vector<double> w(cells.size(), 0.0);
    w[i] = 1.0;
    epistemic.emplace_back(space, std::move(w), preparations[i].first);
  }

  const std::size_t dim = preparations.front().second.dim();
  ResponseFunction response(ResponseKind::NonContextual);
  for (const auto& basis : bases) {
    response.declare_setting(basis.label(), basis.outcome_labels());

    if (basis.dim() == dim) {
      for (std::size_t i = 0; i < preparations.size(); ++i) {
        auto p = qstate::born_probabilities(basis, qstate::normalize(preparations[i].second));
        response.set({basis.label(), {cells[i]}, {}}, std::move(p));
      }
    } else if (basis.dim() == dim * dim) {
      for (std::size_t i = 0; i < preparations.size(); ++i) {
        for (std::size_t j = 0; j < preparations.size(); ++j) {
          const auto joint = qstate::tensor(qstate::normalize(preparations[i].second),
                                            qstate::normalize(preparations[j].second));
          response.set({basis.label(), {cells[i], cells[j]}, {}},
                       qstate::born_probabilities(basis, joint));
        }
      }
    } else {
      throw DimensionError("basis '" + basis.label() + "' fits neither one nor two systems");
    }
  }
  return OntologicalModel(std::move(space), std::move(epistemic), std::move(response));
}

}  // namespace pilotpbr::ontomodel
