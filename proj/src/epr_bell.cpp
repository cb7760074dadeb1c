#include "pilotpbr/epr_bell.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pilotpbr/error.hpp"

namespace pilotpbr::epr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

SpinSetting::SpinSetting(double theta, std::string name) : angle(0.0), label(std::move(name)) {
  if (!std::isfinite(theta)) throw InvariantError("setting angle must be finite");
  angle = std::fmod(theta, kTwoPi);
  if (angle < 0.0) angle += kTwoPi;
  if (angle >= kTwoPi) angle = 0.0;
}

qstate::Ket spin_eigenstate(const SpinSetting& s, int outcome) {
  const double c = std::cos(s.angle / 2.0);
  const double sn = std::sin(s.angle / 2.0);
  if (outcome > 0) return qstate::Ket({c, sn});
  return qstate::Ket({-sn, c});
}

qstate::Ket singlet() {
  const double h = 1.0 / std::numbers::sqrt2;
  return qstate::Ket({0.0, h, -h, 0.0});
}

double JointBlock::correlator() const { return p[0][0] - p[0][1] - p[1][0] + p[1][1]; }

JointBlock singlet_joint(const SpinSetting& a, const SpinSetting& b) {
  std::vector<qstate::Ket> vectors;
  for (int alpha : {1, -1}) {
    for (int beta : {1, -1}) {
      vectors.push_back(qstate::tensor(spin_eigenstate(a, alpha), spin_eigenstate(b, beta)));
    }
  }
  const qstate::MeasurementBasis basis(std::move(vectors), "spin(" + a.label + "," + b.label + ")");
  const auto probs = qstate::born_probabilities(basis, singlet());
  JointBlock out;
  for (std::size_t k = 0; k < 4; ++k) out.p[k / 2][k % 2] = probs[k];
  return out;
}

TwoStepDraw two_step_sample(const SpinSetting& a, const SpinSetting& b, Rng& rng) {
  TwoStepDraw d{};
  d.lambda = rng.uniform01();
  d.alpha = d.lambda < 0.5 ? 1 : -1;
  const double p_plus = (1.0 - d.alpha * std::cos(a.angle - b.angle)) / 2.0;
  d.beta = rng.uniform01() < p_plus ? 1 : -1;
  return d;
}

JointBlock CorrelationEntry::frequencies() const {
  JointBlock f;
  if (total == 0) return f;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      f.p[i][j] = static_cast<double>(counts[i][j]) / static_cast<double>(total);
    }
  }
  return f;
}

CorrelationEntry sample_correlations(const SpinSetting& a, const SpinSetting& b, std::size_t n,
                                     std::uint64_t seed) {
  CorrelationEntry e{a, b, {}, 0};
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = Rng::for_stream(seed, i);
    const auto d = two_step_sample(a, b, rng);
    ++e.counts[outcome_index(d.alpha)][outcome_index(d.beta)];
  }
  e.total = n;
  return e;
}

double chsh(const ChshCorrelators& e) {
  return e.ab - e.ab_prime + e.a_prime_b + e.a_prime_b_prime;
}

ChshSettings optimal_chsh_settings() {
  const double pi = std::numbers::pi;
  return ChshSettings{SpinSetting(0.0, "a"), SpinSetting(pi / 2.0, "a'"),
                      SpinSetting(pi / 4.0, "b"), SpinSetting(3.0 * pi / 4.0, "b'")};
}

ChshCorrelators singlet_correlators(const ChshSettings& s) {
  return {singlet_joint(s.a, s.b).correlator(), singlet_joint(s.a, s.b_prime).correlator(),
          singlet_joint(s.a_prime, s.b).correlator(),
          singlet_joint(s.a_prime, s.b_prime).correlator()};
}

std::vector<double> deterministic_chsh_values() {
  std::vector<double> out;
  for (unsigned mask = 0; mask < 16; ++mask) {
    auto bit = [&](unsigned k) { return (mask >> (3 - k)) & 1u ? -1.0 : 1.0; };
    const double a = bit(0), ap = bit(1), b = bit(2), bp = bit(3);
    out.push_back(chsh({a * b, a * bp, ap * b, ap * bp}));
  }
  return out;
}

double local_bound_bruteforce() {
  double best = 0.0;
  for (double s : deterministic_chsh_values()) best = std::max(best, std::abs(s));
  return best;
}

FactorizationReport factorization_dependence_report(std::size_t n, std::uint64_t seed,
                                                    const SpinSetting& a, const SpinSetting& b,
                                                    const ChshSettings& settings) {
  FactorizationReport r;
  r.a = a;
  r.b = b;
  r.samples = n;
  const auto e = sample_correlations(a, b, n, seed);
  r.alpha_plus = e.counts[0][0] + e.counts[0][1];
  r.alpha_minus = e.counts[1][0] + e.counts[1][1];
  if (r.alpha_plus < kMinConditionalSamples || r.alpha_minus < kMinConditionalSamples) {
    throw StatisticsError("too few samples for a conditional: alpha=+1 seen " +
                          std::to_string(r.alpha_plus) + " times, alpha=-1 seen " +
                          std::to_string(r.alpha_minus) + " times (need " +
                          std::to_string(kMinConditionalSamples) + ")");
  }
  r.p_beta_plus_given_alpha_plus =
      static_cast<double>(e.counts[0][0]) / static_cast<double>(r.alpha_plus);
  r.p_beta_plus_given_alpha_minus =
      static_cast<double>(e.counts[1][0]) / static_cast<double>(r.alpha_minus);
  // Binary conditionals: total variation equals the gap in P(beta = +1).
  r.gap = std::abs(r.p_beta_plus_given_alpha_plus - r.p_beta_plus_given_alpha_minus);
  r.analytic_gap = std::abs(std::cos(a.angle - b.angle));

  r.chsh_settings = settings;
  r.sampled = {sample_correlations(settings.a, settings.b, n, seed).frequencies().correlator(),
               sample_correlations(settings.a, settings.b_prime, n, seed).frequencies().correlator(),
               sample_correlations(settings.a_prime, settings.b, n, seed).frequencies().correlator(),
               sample_correlations(settings.a_prime, settings.b_prime, n, seed).frequencies().correlator()};
  r.chsh_sampled = chsh(r.sampled);
  r.chsh_quantum = chsh(singlet_correlators(settings));
  r.local_bound = local_bound_bruteforce();
  return r;
}

FactorizationReport factorization_dependence_report(std::size_t n, std::uint64_t seed) {
  return factorization_dependence_report(n, seed, SpinSetting(0.0, "a"),
                                         SpinSetting(std::numbers::pi / 4.0, "b"),
                                         optimal_chsh_settings());
}

}  // namespace pilotpbr::epr
