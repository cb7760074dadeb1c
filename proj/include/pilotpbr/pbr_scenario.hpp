#pragma once

// The two-qubit PBR setup: preparations |0> and |+>, the entangled
// four-outcome measurement whose outcome i is impossible for one product
// preparation each, and an end-to-end report tying it to an ontological model.

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pilotpbr/ontomodel.hpp"
#include "pilotpbr/qstate.hpp"

namespace pilotpbr::pbr {

inline const std::string kPsi1 = "psi1";
inline const std::string kPsi2 = "psi2";
inline const std::string kJointSetting = "pbr";

// (|0>, (|0> + |1>)/sqrt 2)
std::pair<qstate::Ket, qstate::Ket> pbr_states();

// Psi1 Psi1, Psi1 Psi2, Psi2 Psi1, Psi2 Psi2 -- the product state that outcome
// xi_{i+1} must never fire on.
std::array<qstate::Ket, 4> designated_products();

// Solves numerically for an orthonormal xi_1..xi_4 with
// <xi_i | designated_products()[i-1]> = 0. Throws NumericalError if the
// post-conditions are not met to 1e-10.
qstate::MeasurementBasis solve_pbr_basis();

// solve_pbr_basis(), computed once per process.
const qstate::MeasurementBasis& build_pbr_basis();

// Max over i of |<xi_i | designated_products()[i]>|. Requires a 4-dim basis.
double verify_zero_conditions(const qstate::MeasurementBasis& basis);

// Segregated (point-mass) model for psi1/psi2 with the joint PBR setting.
ontomodel::OntologicalModel make_pbr_segregated_model();

// Non-contextual model on cells {a, s, b}: psi1 weighs (1-shared, shared, 0),
// psi2 weighs (0, shared, 1-shared). Every joint row zeroes the outcomes the
// quantum zeros demand where possible; the (s, s) row cannot and is uniform.
ontomodel::OntologicalModel make_overlapping_noncontextual_model(double shared_weight = 0.5);

// Contextual model whose joint row for (lambda, lambda', Psi_j, Psi_k) is the
// Born distribution of Psi_j (x) Psi_k, for arbitrary epistemic weights.
ontomodel::OntologicalModel make_contextual_born_model(std::vector<std::string> cells,
                                                       std::vector<double> psi1_weights,
                                                       std::vector<double> psi2_weights);

enum class AuditStatus { Pass, Contradiction, Inapplicable };

struct PbrReport {
  double zero_conditions_max = 0.0;
  // Born probability of xi_i for its designated product preparation.
  std::array<double, 4> quantum_zero_pairings{};
  // Indexed [pair][outcome] with pairs ordered as designated_products().
  std::array<std::array<double, 4>, 4> quantum_joint{};
  std::array<std::array<double, 4>, 4> model_joint{};
  double max_joint_deviation = 0.0;
  // "product_non_contextual" or "product_contextual": which decomposition
  // produced model_joint.
  std::string prediction_path;
  double overlap_mass = 0.0;
  bool supports_disjoint = false;
  AuditStatus audit = AuditStatus::Pass;
  std::string audit_message;
  std::optional<ontomodel::ContradictionCertificate> certificate;
};

// Requires preparations psi1/psi2 and a response for the joint setting "pbr".
PbrReport run_pbr_demo(const ontomodel::OntologicalModel& model);

std::string_view to_string(AuditStatus status);

nlohmann::json to_json(const PbrReport& report);

}  // namespace pilotpbr::pbr
