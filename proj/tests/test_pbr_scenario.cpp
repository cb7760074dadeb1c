#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <variant>

#include "pilotpbr/pbr_scenario.hpp"

using namespace pilotpbr;
using namespace pilotpbr::pbr;
using qstate::Ket;

namespace {

// Hand-derived measurement for the |0>, |+> pair, written out in the
// computational basis.
qstate::MeasurementBasis closed_form_basis() {
  const double h = 1.0 / std::numbers::sqrt2;
  return qstate::MeasurementBasis({Ket({0.0, h, h, 0.0}), Ket({0.5, -0.5, 0.5, 0.5}),
                                   Ket({0.5, 0.5, -0.5, 0.5}), Ket({h, 0.0, 0.0, -h})},
                                  "closed");
}

}  // namespace

TEST(PbrBasis, ClosedFormOracle) {
  const auto closed = closed_form_basis();
  EXPECT_LT(qstate::orthonormality_error(closed.vectors()), 1e-15);
  EXPECT_LT(verify_zero_conditions(closed), 1e-15);
}

TEST(PbrBasis, SolverMeetsZeroConditions) {
  const auto& basis = build_pbr_basis();
  EXPECT_EQ(basis.dim(), 4u);
  EXPECT_LT(verify_zero_conditions(basis), 1e-10);
  EXPECT_LT(qstate::orthonormality_error(basis.vectors()), 1e-10);
}

TEST(PbrBasis, VerifyDetectsBadBasis) {
  EXPECT_GT(verify_zero_conditions(qstate::MeasurementBasis::computational(4, "z")), 0.1);
}

TEST(PbrBasis, DesignatedProductsOrder) {
  const auto [psi1, psi2] = pbr_states();
  const auto p = designated_products();
  EXPECT_LT(std::abs(qstate::inner(p[1], qstate::tensor(psi1, psi2)) - 1.0), 1e-15);
  EXPECT_LT(std::abs(qstate::inner(p[2], qstate::tensor(psi2, psi1)) - 1.0), 1e-15);
  EXPECT_NEAR(std::abs(qstate::inner(psi1, psi2)), 1.0 / std::numbers::sqrt2, 1e-15);
}

TEST(PbrReport, Segregated) {
  const auto r = run_pbr_demo(make_pbr_segregated_model());
  EXPECT_EQ(r.audit, AuditStatus::Pass);
  EXPECT_TRUE(r.supports_disjoint);
  EXPECT_EQ(r.overlap_mass, 0.0);
  EXPECT_LT(r.max_joint_deviation, 1e-10);
  for (double q : r.quantum_zero_pairings) EXPECT_LT(q, 1e-20);
}

TEST(PbrReport, OverlappingHasCertificate) {
  const auto r = run_pbr_demo(make_overlapping_noncontextual_model(0.5));
  EXPECT_EQ(r.audit, AuditStatus::Contradiction);
  ASSERT_TRUE(r.certificate);
  EXPECT_EQ(r.certificate->normalization_deficit, 1.0);
  EXPECT_EQ(r.certificate->cell, "s");
  EXPECT_NEAR(r.certificate->implied_violation, 0.0625, 1e-12);
  EXPECT_NEAR(r.overlap_mass, 0.5, 1e-15);
  EXPECT_GT(r.max_joint_deviation, 0.01);
}

TEST(PbrReport, ContextualIsInapplicableAndExact) {
  const auto r = run_pbr_demo(make_contextual_born_model({"a", "s", "b"}, {0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}));
  EXPECT_EQ(r.audit, AuditStatus::Inapplicable);
  EXPECT_FALSE(r.supports_disjoint);
  EXPECT_LT(r.max_joint_deviation, 1e-10);
  EXPECT_EQ(r.prediction_path, "product_contextual");
}

TEST(PbrReport, JsonHasStatus) {
  const auto j = to_json(run_pbr_demo(make_pbr_segregated_model()));
  EXPECT_EQ(j.at("audit").at("status"), "pass");
}
