#include "pilotpbr/pbr_scenario.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "pilotpbr/error.hpp"

namespace pilotpbr::pbr {

using qstate::Complex;
using qstate::Ket;
using qstate::MeasurementBasis;

namespace {

using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

const std::array<std::string, 2>& prep_labels() {
  static const std::array<std::string, 2> labels{kPsi1, kPsi2};
  return labels;
}

Vec4 to_eigen(const Ket& k) {
  Vec4 v;
  for (int i = 0; i < 4; ++i) v(i) = k[static_cast<std::size_t>(i)];
  return v;
}

// The 16 real generators of 4x4 Hermitian matrices.
std::array<Mat4, 16> hermitian_generators() {
  std::array<Mat4, 16> gens;
  std::size_t p = 0;
  for (int d = 0; d < 4; ++d) {
    gens[p] = Mat4::Zero();
    gens[p++](d, d) = 1.0;
  }
  for (int k = 0; k < 4; ++k) {
    for (int l = k + 1; l < 4; ++l) {
      gens[p] = Mat4::Zero();
      gens[p](k, l) = 1.0;
      gens[p++](l, k) = 1.0;
      gens[p] = Mat4::Zero();
      gens[p](k, l) = Complex{0.0, 1.0};
      gens[p++](l, k) = Complex{0.0, -1.0};
    }
  }
  return gens;
}

Eigen::Matrix<double, 8, 1> residual(const Mat4& u, const std::array<Vec4, 4>& targets) {
  Eigen::Matrix<double, 8, 1> r;
  for (int i = 0; i < 4; ++i) {
    const Complex c = u.col(i).dot(targets[static_cast<std::size_t>(i)]);
    r(2 * i) = c.real();
    r(2 * i + 1) = c.imag();
  }
  return r;
}

Mat4 cayley(const Mat4& h) {
  const Mat4 id = Mat4::Identity();
  const Complex half_i{0.0, 0.5};
  return (id - half_i * h).partialPivLu().solve(id + half_i * h);
}

}  // namespace

std::pair<Ket, Ket> pbr_states() {
  const double s = 1.0 / std::sqrt(2.0);
  return {Ket({1.0, 0.0}), Ket({s, s})};
}

std::array<Ket, 4> designated_products() {
  const auto [p1, p2] = pbr_states();
  return {qstate::tensor(p1, p1), qstate::tensor(p1, p2), qstate::tensor(p2, p1),
          qstate::tensor(p2, p2)};
}

MeasurementBasis solve_pbr_basis() {
  const auto products = designated_products();
  std::array<Vec4, 4> targets;
  for (std::size_t i = 0; i < 4; ++i) targets[i] = to_eigen(products[i]);

  // Fixed, generic starting unitary so the solve is reproducible.
  Mat4 start;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      start(i, j) = Complex{std::cos(1.0 + i + 2.3 * j), std::sin(0.7 * i * j + 0.4 * i - 1.1 * j)};
  Mat4 u = Eigen::HouseholderQR<Mat4>(start).householderQ();

  const auto gens = hermitian_generators();
  for (int iter = 0; iter < 100; ++iter) {
    const auto r = residual(u, targets);
    if (r.lpNorm<Eigen::Infinity>() < 1e-15) break;

    // c_i(U C(H)) = c_i - i sum_k H_ik <u_k|w_i> to first order in H.
    Mat4 overlaps;
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i) overlaps(k, i) = u.col(k).dot(targets[static_cast<std::size_t>(i)]);
    Eigen::Matrix<double, 8, 16> jac;
    for (std::size_t p = 0; p < gens.size(); ++p) {
      for (int i = 0; i < 4; ++i) {
        Complex dc{0.0, 0.0};
        for (int k = 0; k < 4; ++k) dc += gens[p](i, k) * overlaps(k, i);
        dc *= Complex{0.0, -1.0};
        jac(2 * i, static_cast<int>(p)) = dc.real();
        jac(2 * i + 1, static_cast<int>(p)) = dc.imag();
      }
    }
    const Eigen::Matrix<double, 16, 1> theta =
        jac.completeOrthogonalDecomposition().solve(-r);

    double scale = 1.0;
    const double before = r.norm();
    Mat4 next = u;
    for (int halving = 0; halving < 30; ++halving, scale *= 0.5) {
      Mat4 h = Mat4::Zero();
      for (std::size_t p = 0; p < gens.size(); ++p) h += (scale * theta(static_cast<int>(p))) * gens[p];
      next = u * cayley(h);
      if (residual(next, targets).norm() < before) break;
    }
    u = next;
  }

  std::vector<Ket> xs;
  for (int i = 0; i < 4; ++i) {
    std::vector<Complex> amps(4);
    for (int j = 0; j < 4; ++j) amps[static_cast<std::size_t>(j)] = u(j, i);
    xs.emplace_back(std::move(amps));
  }
  const double ortho = qstate::orthonormality_error(xs);
  if (!(ortho < qstate::kEpsOrtho)) {
    throw NumericalError("PBR basis solve lost orthonormality (" + std::to_string(ortho) + ")");
  }
  MeasurementBasis basis(std::move(xs), kJointSetting, {"xi1", "xi2", "xi3", "xi4"});
  const double zeros = verify_zero_conditions(basis);
  if (!(zeros < qstate::kEpsOrtho)) {
    throw NumericalError("PBR basis solve did not reach the zero conditions (" +
                         std::to_string(zeros) + ")");
  }
  return basis;
}

const MeasurementBasis& build_pbr_basis() {
  static const MeasurementBasis basis = solve_pbr_basis();
  return basis;
}

double verify_zero_conditions(const MeasurementBasis& basis) {
  if (basis.dim() != 4) {
    throw DimensionError("zero conditions need a two-qubit basis, got dimension " +
                         std::to_string(basis.dim()));
  }
  const auto products = designated_products();
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    worst = std::max(worst, std::abs(qstate::inner(basis[i], products[i])));
  }
  return worst;
}

// ---------------------------------------------------------------------------

ontomodel::OntologicalModel make_pbr_segregated_model() {
  const auto [p1, p2] = pbr_states();
  return ontomodel::make_segregated_model({{kPsi1, p1}, {kPsi2, p2}}, {build_pbr_basis()});
}

ontomodel::OntologicalModel make_overlapping_noncontextual_model(double shared_weight) {
  using namespace ontomodel;
  if (!(shared_weight > 0.0 && shared_weight < 1.0)) {
    throw InvariantError("shared weight must lie strictly between 0 and 1");
  }
  auto space = std::make_shared<const LambdaSpace>(std::vector<std::string>{"a", "s", "b"});
  const std::array<std::vector<double>, 2> w{
      std::vector<double>{1.0 - shared_weight, shared_weight, 0.0},
      std::vector<double>{0.0, shared_weight, 1.0 - shared_weight}};
  std::vector<EpistemicState> epistemic{EpistemicState(space, w[0], kPsi1),
                                        EpistemicState(space, w[1], kPsi2)};

  ResponseFunction response(ResponseKind::NonContextual);
  response.declare_setting(kJointSetting, build_pbr_basis().outcome_labels());
  for (std::size_t c1 = 0; c1 < space->size(); ++c1) {
    for (std::size_t c2 = 0; c2 < space->size(); ++c2) {
      std::array<bool, 4> forced{};
      int free = 0;
      for (std::size_t i = 0; i < 4; ++i) {
        forced[i] = w[i / 2][c1] > 0.0 && w[i % 2][c2] > 0.0;
        free += forced[i] ? 0 : 1;
      }
      std::vector<double> row(4, 0.25);
      if (free > 0) {
        for (std::size_t i = 0; i < 4; ++i) row[i] = forced[i] ? 0.0 : 1.0 / free;
      }
      response.set({kJointSetting, {space->cell(c1), space->cell(c2)}, {}}, std::move(row));
    }
  }
  return OntologicalModel(space, std::move(epistemic), std::move(response));
}

ontomodel::OntologicalModel make_contextual_born_model(std::vector<std::string> cells,
                                                       std::vector<double> psi1_weights,
                                                       std::vector<double> psi2_weights) {
  using namespace ontomodel;
  auto space = std::make_shared<const LambdaSpace>(std::move(cells));
  std::vector<EpistemicState> epistemic{EpistemicState(space, std::move(psi1_weights), kPsi1),
                                        EpistemicState(space, std::move(psi2_weights), kPsi2)};
  const auto& basis = build_pbr_basis();
  const auto products = designated_products();

  ResponseFunction response(ResponseKind::Contextual);
  response.declare_setting(kJointSetting, basis.outcome_labels());
  for (std::size_t pair = 0; pair < 4; ++pair) {
    const auto row = qstate::born_probabilities(basis, products[pair]);
    const std::string& pa = prep_labels()[pair / 2];
    const std::string& pb = prep_labels()[pair % 2];
    for (const auto& c1 : space->cells())
      for (const auto& c2 : space->cells()) response.set({kJointSetting, {c1, c2}, {pa, pb}}, row);
  }
  return OntologicalModel(space, std::move(epistemic), std::move(response));
}

// ---------------------------------------------------------------------------

PbrReport run_pbr_demo(const ontomodel::OntologicalModel& model) {
  PbrReport report;
  const auto& basis = build_pbr_basis();
  const auto products = designated_products();
  report.zero_conditions_max = verify_zero_conditions(basis);

  const bool contextual = model.response().kind() == ontomodel::ResponseKind::Contextual;
  report.prediction_path = contextual ? "product_contextual" : "product_non_contextual";

  for (std::size_t pair = 0; pair < 4; ++pair) {
    const auto q = qstate::born_probabilities(basis, products[pair]);
    const auto m = ontomodel::product_predicted_probability(
        model, prep_labels()[pair / 2], prep_labels()[pair % 2], kJointSetting);
    if (m.size() != 4) throw DimensionError("joint setting 'pbr' must have four outcomes");
    report.quantum_zero_pairings[pair] = q[pair];
    for (std::size_t i = 0; i < 4; ++i) {
      report.quantum_joint[pair][i] = q[i];
      report.model_joint[pair][i] = m[i];
      report.max_joint_deviation = std::max(report.max_joint_deviation, std::abs(q[i] - m[i]));
    }
  }

  const auto overlap = ontomodel::support_overlap(model.epistemic(kPsi1), model.epistemic(kPsi2));
  report.overlap_mass = overlap.overlap_mass;
  report.supports_disjoint = overlap.disjoint;

  try {
    auto result = ontomodel::pbr_overlap_audit(model, kPsi1, kPsi2, kJointSetting);
    if (auto* cert = std::get_if<ontomodel::ContradictionCertificate>(&result)) {
      report.audit = AuditStatus::Contradiction;
      report.audit_message = "overlapping supports at cell '" + cert->cell +
                             "' force all four joint outcomes to zero";
      report.certificate = std::move(*cert);
    } else {
      report.audit = AuditStatus::Pass;
      report.audit_message = "supports are disjoint";
    }
  } catch (const ontomodel::AuditInapplicable& e) {
    report.audit = AuditStatus::Inapplicable;
    report.audit_message = e.what();
  }
  return report;
}

std::string_view to_string(AuditStatus status) {
  switch (status) {
    case AuditStatus::Pass:
      return "pass";
    case AuditStatus::Contradiction:
      return "contradiction";
    case AuditStatus::Inapplicable:
      return "inapplicable";
  }
  return "unknown";
}

nlohmann::json to_json(const PbrReport& report) {
  using nlohmann::json;
  json pairs = json::array();
  for (std::size_t pair = 0; pair < 4; ++pair) {
    pairs.push_back(json{{"preparations", {prep_labels()[pair / 2], prep_labels()[pair % 2]}},
                         {"quantum", report.quantum_joint[pair]},
                         {"model", report.model_joint[pair]}});
  }
  json audit{{"status", std::string(to_string(report.audit))}, {"message", report.audit_message}};
  if (report.certificate) {
    const auto& c = *report.certificate;
    audit["cell"] = c.cell;
    audit["weight1"] = c.weight1;
    audit["weight2"] = c.weight2;
    audit["forced_zero_outcomes"] = c.forced_zero_outcomes;
    audit["normalization_deficit"] = c.normalization_deficit;
    if (c.model_row) audit["model_row"] = *c.model_row;
    audit["implied_violation"] = c.implied_violation;
  }
  return json{{"zero_conditions_max", report.zero_conditions_max},
              {"quantum_zero_pairings", report.quantum_zero_pairings},
              {"prediction_path", report.prediction_path},
              {"max_joint_deviation", report.max_joint_deviation},
              {"pairs", pairs},
              {"overlap_mass", report.overlap_mass},
              {"supports_disjoint", report.supports_disjoint},
              {"audit", audit}};
}

}  // namespace pilotpbr::pbr
