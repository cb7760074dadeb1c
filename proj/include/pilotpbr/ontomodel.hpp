#pragma once

// Finite ontological models: a hidden-variable space split into cells, one
// epistemic distribution per prepared state, and a response function giving
// outcome probabilities per (setting, cell) -- optionally also keyed by the
// preparing state, which is what makes a response contextual.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "pilotpbr/error.hpp"
#include "pilotpbr/qstate.hpp"

namespace pilotpbr::ontomodel {

// Tolerance on sum(weights) and on sum over outcomes of each response row.
inline constexpr double kEpsProb = 1e-12;
// Tolerance on the sum of a contracted (predicted) distribution.
inline constexpr double kEpsPredicted = 1e-10;
// A cell is in the support of a distribution when its weight exceeds
// kSupportFactor * (largest weight of that distribution).
inline constexpr double kSupportFactor = 1e-12;

class MissingResponseEntry : public Error {
 public:
  MissingResponseEntry(const std::string& what, std::string cell)
      : Error(what), cell_(std::move(cell)) {}
  const std::string& cell() const noexcept { return cell_; }

 private:
  std::string cell_;
};

// Raised when the PBR audit is asked to judge a contextual model.
class AuditInapplicable : public Error {
 public:
  using Error::Error;
};

class LambdaSpace {
 public:
  // Cell identifiers must be unique and non-empty.
  explicit LambdaSpace(std::vector<std::string> cells);

  std::size_t size() const noexcept { return cells_.size(); }
  const std::vector<std::string>& cells() const noexcept { return cells_; }
  const std::string& cell(std::size_t i) const { return cells_.at(i); }
  std::optional<std::size_t> find(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;

  bool operator==(const LambdaSpace& other) const { return cells_ == other.cells_; }

 private:
  std::vector<std::string> cells_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

using SpacePtr = std::shared_ptr<const LambdaSpace>;

class EpistemicState {
 public:
  EpistemicState(SpacePtr space, std::vector<double> weights, std::string preparation_label);

  const LambdaSpace& space() const noexcept { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double weight(std::size_t i) const { return weights_.at(i); }
  const std::string& preparation_label() const noexcept { return label_; }

  double max_weight() const noexcept { return max_weight_; }
  bool in_support(std::size_t i) const { return weights_.at(i) > kSupportFactor * max_weight_; }

 private:
  SpacePtr space_;
  std::vector<double> weights_;
  std::string label_;
  double max_weight_ = 0.0;
};

enum class ResponseKind { NonContextual, Contextual };

std::string_view to_string(ResponseKind kind);

// Key of one response row. `cells` has one entry for a single-system setting
// and two for a joint setting; `preps` is empty for non-contextual rows and
// mirrors `cells` in length for contextual ones.
struct ResponseKey {
  std::string setting;
  std::vector<std::string> cells;
  std::vector<std::string> preps;

  auto operator<=>(const ResponseKey&) const = default;
};

class ResponseFunction {
 public:
  explicit ResponseFunction(ResponseKind kind) : kind_(kind) {}

  ResponseKind kind() const noexcept { return kind_; }

  // Outcome labels fix the length of every row stored under `setting`.
  void declare_setting(std::string setting, std::vector<std::string> outcome_labels);
  bool has_setting(std::string_view setting) const;
  const std::vector<std::string>& outcomes(std::string_view setting) const;
  std::vector<std::string> settings() const;

  // Stores one row. Rejects rows that do not sum to one, preparation keys on
  // a non-contextual table, and missing preparation keys on a contextual one.
  void set(ResponseKey key, std::vector<double> probabilities);

  // nullptr when absent. Throws InvariantError for a preparation-keyed lookup
  // on a non-contextual table.
  const std::vector<double>* find(const ResponseKey& key) const;

  const std::map<ResponseKey, std::vector<double>>& entries() const noexcept { return table_; }

 private:
  void check_key_shape(const ResponseKey& key) const;

  ResponseKind kind_;
  std::map<std::string, std::vector<std::string>, std::less<>> outcomes_;
  std::map<ResponseKey, std::vector<double>> table_;
};

class OntologicalModel {
 public:
  OntologicalModel(SpacePtr space, std::vector<EpistemicState> epistemic,
                   ResponseFunction response);

  const LambdaSpace& space() const noexcept { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  const ResponseFunction& response() const noexcept { return response_; }
  const std::map<std::string, EpistemicState, std::less<>>& epistemic_states() const noexcept {
    return epistemic_;
  }
  const EpistemicState& epistemic(std::string_view preparation) const;
  bool has_preparation(std::string_view preparation) const;

 private:
  SpacePtr space_;
  std::map<std::string, EpistemicState, std::less<>> epistemic_;
  ResponseFunction response_;
};

// sum_lambda P(alpha | setting, lambda [, prep]) rho(lambda | prep).
std::vector<double> predicted_probability(const OntologicalModel& model,
                                          const std::string& preparation,
                                          const std::string& setting);

// Product-preparation form: sum over (lambda, lambda') of
// P_M(xi | lambda, lambda' [, prepA, prepB]) rho_A(lambda) rho_B(lambda').
std::vector<double> product_predicted_probability(const OntologicalModel& model,
                                                  const std::string& prep_a,
                                                  const std::string& prep_b,
                                                  const std::string& joint_setting);

struct OverlapResult {
  double overlap_mass = 0.0;  // sum_lambda min(w1, w2)
  bool disjoint = true;       // no cell lies in both supports
};

OverlapResult support_overlap(const EpistemicState& e1, const EpistemicState& e2);

struct ContradictionCertificate {
  std::string cell;
  double weight1 = 0.0;
  double weight2 = 0.0;
  std::vector<std::string> forced_zero_outcomes;
  // 1 - sum of the forced values; the row must nevertheless sum to one.
  double normalization_deficit = 0.0;
  // The model's own row at (cell, cell), when the table has one, and the
  // smallest probability the model is then bound to assign to an outcome
  // that quantum mechanics forbids for some preparation pair.
  std::optional<std::vector<double>> model_row;
  double implied_violation = 0.0;
};

struct AuditPass {};

using AuditResult = std::variant<AuditPass, ContradictionCertificate>;

// PBR overlap audit for two preparations and the four-outcome joint setting.
// Outcome i (0-based) is the one whose quantum probability vanishes for the
// product preparation (prep_{i/2}, prep_{i%2}), with prep_0 = prep1 and
// prep_1 = prep2 -- the ordering of the PBR measurement.
//
// Disjoint supports -> AuditPass. Otherwise a shared cell lambda* has
// rho_j(lambda*) rho_k(lambda*) > 0 for every pair (j, k), so reproducing the
// four zeros forces P_M(xi_i | lambda*, lambda*) = 0 for all i, contradicting
// normalization. Contextual models throw AuditInapplicable: with a
// preparation-dependent response the four zeros constrain four different
// rows and no contradiction follows.
AuditResult pbr_overlap_audit(const OntologicalModel& model, const std::string& prep1,
                              const std::string& prep2, const std::string& joint_setting);

// One cell per preparation, point-mass epistemic states, and Born-rule rows.
// A basis whose dimension is the square of the preparation dimension is
// treated as a joint setting and gets rows for every ordered cell pair.
OntologicalModel make_segregated_model(
    const std::vector<std::pair<std::string, qstate::Ket>>& preparations,
    const std::vector<qstate::MeasurementBasis>& bases);

// Cell identifier used by make_segregated_model for a preparation label.
std::string segregated_cell_id(std::string_view preparation);

}  // namespace pilotpbr::ontomodel
