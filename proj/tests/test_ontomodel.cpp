#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <variant>

#include <json.hpp>

#include "pilotpbr/error.hpp"
#include "pilotpbr/model_json.hpp"
#include "pilotpbr/ontomodel.hpp"
#include "pilotpbr/pbr_scenario.hpp"
#include "test_support.hpp"

using namespace pilotpbr;
using namespace pilotpbr::ontomodel;
using nlohmann::json;

namespace {

const std::vector<std::string> kFour = {"0", "1", "2", "3"};

SpacePtr make_space(std::size_t n) {
  std::vector<std::string> cells;
  for (std::size_t i = 0; i < n; ++i) cells.push_back("c" + std::to_string(i));
  return std::make_shared<const LambdaSpace>(std::move(cells));
}

// Non-contextual model over n cells with the given weights for psi1/psi2 and
// a random row for every ordered cell pair.
OntologicalModel random_joint_model(Rng& rng, const SpacePtr& space, std::vector<double> w1,
                                    std::vector<double> w2) {
  ResponseFunction r(ResponseKind::NonContextual);
  r.declare_setting("pbr", kFour);
  for (const auto& a : space->cells()) {
    for (const auto& b : space->cells()) {
      r.set({"pbr", {a, b}, {}}, gen::random_distribution(rng, 4, 0.3));
    }
  }
  return OntologicalModel(space,
                          {EpistemicState(space, std::move(w1), "psi1"),
                           EpistemicState(space, std::move(w2), "psi2")},
                          std::move(r));
}

std::vector<double> weights_from_mask(Rng& rng, unsigned mask, std::size_t n) {
  std::vector<double> w(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask & (1u << i)) {
      w[i] = gen::uniform(rng, 0.1, 1.0);
      total += w[i];
    }
  }
  for (auto& x : w) x /= total;
  return w;
}

json tiny_model_doc() {
  return json::parse(R"({
    "cells": ["a", "b"],
    "epistemic": {"p": [0.25, 0.75]},
    "response": {
      "kind": "non_contextual",
      "outcomes": {"z": ["up", "down"]},
      "entries": [
        {"setting": "z", "cell": "a", "probs": [1.0, 0.0]},
        {"setting": "z", "cell": "b", "probs": [0.5, 0.5]}
      ]
    }
  })");
}

}  // namespace

TEST(LambdaSpace, RejectsDuplicatesAndEmpty) {
  EXPECT_THROW(LambdaSpace({"a", "a"}), InvariantError);
  EXPECT_THROW(LambdaSpace({}), InvariantError);
  EXPECT_THROW(LambdaSpace({""}), InvariantError);
  const LambdaSpace s({"x", "y"});
  EXPECT_EQ(s.index_of("y"), 1u);
  EXPECT_FALSE(s.find("z"));
}

TEST(EpistemicState, ValidatesWeights) {
  const auto space = make_space(2);
  EXPECT_THROW(EpistemicState(space, {0.5, 0.6}, "p"), InvariantError);
  EXPECT_THROW(EpistemicState(space, {1.5, -0.5}, "p"), InvariantError);
  EXPECT_THROW(EpistemicState(space, {1.0}, "p"), DimensionError);
  EXPECT_NO_THROW(EpistemicState(space, {0.5, 0.5}, "p"));
}

TEST(ResponseFunction, KindControlsPreparationKeys) {
  ResponseFunction nc(ResponseKind::NonContextual);
  nc.declare_setting("z", {"0", "1"});
  EXPECT_THROW(nc.set({"z", {"a"}, {"p"}}, {1.0, 0.0}), InvariantError);
  EXPECT_THROW(nc.set({"z", {"a"}, {}}, {0.7, 0.7}), InvariantError);
  EXPECT_THROW(nc.set({"z", {"a"}, {}}, {1.0}), DimensionError);

  ResponseFunction ctx(ResponseKind::Contextual);
  ctx.declare_setting("z", {"0", "1"});
  EXPECT_THROW(ctx.set({"z", {"a"}, {}}, {1.0, 0.0}), InvariantError);
  ctx.set({"z", {"a"}, {"p"}}, {1.0, 0.0});
  EXPECT_NE(ctx.find({"z", {"a"}, {"p"}}), nullptr);
  EXPECT_EQ(ctx.find({"z", {"a"}, {"q"}}), nullptr);
}

TEST(PredictedProbability, ContractsWeightsWithRows) {
  const auto model = model_from_json(tiny_model_doc());
  const auto p = predicted_probability(model, "p", "z");
  EXPECT_NEAR(p[0], 0.25 + 0.375, 1e-15);
  EXPECT_NEAR(p[1], 0.375, 1e-15);
}

TEST(PredictedProbability, MissingRowNamesCell) {
  auto doc = tiny_model_doc();
  doc["response"]["entries"].erase(1);
  const auto model = model_from_json(doc);
  try {
    predicted_probability(model, "p", "z");
    FAIL() << "expected MissingResponseEntry";
  } catch (const MissingResponseEntry& e) {
    EXPECT_EQ(e.cell(), "b");
  }
}

TEST(PredictedProbability, ZeroWeightCellNeedsNoRow) {
  auto doc = tiny_model_doc();
  doc["epistemic"]["p"] = {1.0, 0.0};
  doc["response"]["entries"].erase(1);
  const auto p = predicted_probability(model_from_json(doc), "p", "z");
  EXPECT_EQ(p[0], 1.0);
}

TEST(SupportOverlap, Examples) {
  const auto space = make_space(3);
  const EpistemicState a(space, {0.5, 0.5, 0.0}, "a");
  const EpistemicState b(space, {0.0, 0.5, 0.5}, "b");
  const EpistemicState c(space, {0.0, 0.0, 1.0}, "c");
  EXPECT_NEAR(support_overlap(a, b).overlap_mass, 0.5, 1e-15);
  EXPECT_FALSE(support_overlap(a, b).disjoint);
  EXPECT_EQ(support_overlap(a, c).overlap_mass, 0.0);
  EXPECT_TRUE(support_overlap(a, c).disjoint);
}

TEST(SupportOverlap, SymmetricAndBoundedProperty) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const auto space = make_space(n);
    const EpistemicState a(space, gen::random_distribution(rng, n, 0.4), "a");
    const EpistemicState b(space, gen::random_distribution(rng, n, 0.4), "b");
    const auto ab = support_overlap(a, b);
    const auto ba = support_overlap(b, a);
    EXPECT_EQ(ab.overlap_mass, ba.overlap_mass);
    EXPECT_EQ(ab.disjoint, ba.disjoint);
    EXPECT_GE(ab.overlap_mass, 0.0);
    EXPECT_LE(ab.overlap_mass, 1.0 + 1e-12);
    EXPECT_NEAR(support_overlap(a, a).overlap_mass, 1.0, 1e-12);
    if (ab.disjoint) {
      EXPECT_EQ(ab.overlap_mass, 0.0);
    }
  }
}

// Every pair of non-empty supports on up to three cells: the audit passes
// exactly when the supports are disjoint, and a certificate always comes with
// a deficit of one and a violation the model's own predictions exhibit.
TEST(PbrAudit, SoundOnExhaustiveSupportPatterns) {
  Rng rng(22);
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto space = make_space(n);
    const unsigned full = (1u << n) - 1;
    for (unsigned m1 = 1; m1 <= full; ++m1) {
      for (unsigned m2 = 1; m2 <= full; ++m2) {
        const auto model =
            random_joint_model(rng, space, weights_from_mask(rng, m1, n), weights_from_mask(rng, m2, n));
        const auto result = pbr_overlap_audit(model, "psi1", "psi2", "pbr");
        const bool disjoint = (m1 & m2) == 0;
        ASSERT_EQ(std::holds_alternative<AuditPass>(result), disjoint) << m1 << " " << m2;
        if (disjoint) continue;

        const auto& cert = std::get<ContradictionCertificate>(result);
        EXPECT_EQ(cert.normalization_deficit, 1.0);
        EXPECT_EQ(cert.forced_zero_outcomes, kFour);
        const std::size_t c = space->index_of(cert.cell);
        EXPECT_TRUE((m1 & m2) & (1u << c));
        ASSERT_TRUE(cert.model_row.has_value());
        EXPECT_GT(cert.implied_violation, 0.0);

        // Independent check: outcome i fires on pair (i/2, i%2) at least as
        // often as the certificate claims.
        const std::string preps[2] = {"psi1", "psi2"};
        double worst = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
          const auto p = product_predicted_probability(model, preps[i / 2], preps[i % 2], "pbr");
          worst = std::max(worst, p[i]);
        }
        EXPECT_GE(worst, cert.implied_violation - 1e-12);
      }
    }
  }
}

// Randomized variant on larger spaces with sparse weights.
TEST(PbrAudit, RandomModelsProperty) {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const auto space = make_space(n);
    auto w1 = gen::random_distribution(rng, n, 0.5);
    auto w2 = gen::random_distribution(rng, n, 0.5);
    bool shared = false;
    for (std::size_t i = 0; i < n; ++i) shared = shared || (w1[i] > 0.0 && w2[i] > 0.0);
    const auto model = random_joint_model(rng, space, w1, w2);
    const auto result = pbr_overlap_audit(model, "psi1", "psi2", "pbr");
    EXPECT_EQ(std::holds_alternative<ContradictionCertificate>(result), shared);
  }
}

TEST(PbrAudit, ContextualModelIsInapplicable) {
  const auto model = pbr::make_contextual_born_model({"a", "b"}, {0.5, 0.5}, {0.5, 0.5});
  EXPECT_THROW(pbr_overlap_audit(model, "psi1", "psi2", "pbr"), AuditInapplicable);
}

TEST(PbrAudit, NeedsFourOutcomes) {
  const auto space = make_space(1);
  ResponseFunction r(ResponseKind::NonContextual);
  r.declare_setting("pbr", {"0", "1"});
  r.set({"pbr", {"c0", "c0"}, {}}, {0.5, 0.5});
  const OntologicalModel m(space, {EpistemicState(space, {1.0}, "psi1"), EpistemicState(space, {1.0}, "psi2")},
                           std::move(r));
  EXPECT_THROW(pbr_overlap_audit(m, "psi1", "psi2", "pbr"), DimensionError);
}

// The segregated model must reproduce the Born rule for random states and bases.
TEST(SegregatedModel, MatchesBornRuleProperty) {
  Rng rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 2 + trial % 3;
    std::vector<std::pair<std::string, qstate::Ket>> preps;
    for (int k = 0; k < 3; ++k) preps.emplace_back("s" + std::to_string(k), gen::random_ket(rng, d));
    const auto single = gen::random_basis(rng, d);
    auto joint = gen::random_basis(rng, d * d);
    const qstate::MeasurementBasis joint_named(joint.vectors(), "joint");
    const auto model = make_segregated_model(preps, {single, joint_named});

    for (const auto& [label, ket] : preps) {
      const auto born = qstate::born_probabilities(single, ket);
      const auto pred = predicted_probability(model, label, "random");
      for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(pred[i], born[i], 1e-12);
      EXPECT_EQ(model.epistemic(label).weight(model.space().index_of(segregated_cell_id(label))), 1.0);
    }
    for (const auto& [la, ka] : preps) {
      for (const auto& [lb, kb] : preps) {
        const auto born = qstate::born_probabilities(joint_named, qstate::tensor(ka, kb));
        const auto pred = product_predicted_probability(model, la, lb, "joint");
        for (std::size_t i = 0; i < d * d; ++i) EXPECT_NEAR(pred[i], born[i], 1e-12);
      }
    }
  }
}

TEST(ModelJson, RoundTrip) {
  const auto original = pbr::make_overlapping_noncontextual_model(0.3);
  const auto doc = model_to_json(original);
  const auto back = model_from_json(doc);
  EXPECT_EQ(model_to_json(back), doc);
  EXPECT_EQ(back.space(), original.space());
  EXPECT_EQ(back.response().entries(), original.response().entries());
  EXPECT_EQ(back.response().outcomes("pbr"), original.response().outcomes("pbr"));

  const auto ctx = pbr::make_contextual_born_model({"a", "s"}, {0.5, 0.5}, {0.2, 0.8});
  EXPECT_EQ(model_to_json(model_from_json(model_to_json(ctx))), model_to_json(ctx));
}

TEST(ModelJson, RejectsUnknownFields) {
  auto doc = tiny_model_doc();
  doc["extra"] = 1;
  try {
    model_from_json(doc);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("extra"), std::string::npos);
  }
  doc = tiny_model_doc();
  doc["response"]["entries"][0]["weight"] = 1;
  try {
    model_from_json(doc);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("weight"), std::string::npos);
  }
}

TEST(ModelJson, RejectsInvalidContent) {
  auto doc = tiny_model_doc();
  doc["epistemic"]["p"] = {0.5, 0.6};
  EXPECT_THROW(model_from_json(doc), ConfigError);

  doc = tiny_model_doc();
  doc["response"]["entries"][0]["cell"] = "nowhere";
  EXPECT_THROW(model_from_json(doc), ConfigError);

  doc = tiny_model_doc();
  doc["response"]["entries"][0]["prep"] = {"p"};
  EXPECT_THROW(model_from_json(doc), ConfigError);

  doc = tiny_model_doc();
  doc.erase("cells");
  EXPECT_THROW(model_from_json(doc), ConfigError);

  EXPECT_THROW(model_from_json(json::array()), ConfigError);
}
