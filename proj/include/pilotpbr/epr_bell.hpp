#pragma once

// Singlet correlations, the two-step hidden-variable sampler and CHSH bounds.
//
// Analyzer directions lie in the x-z plane; a setting at angle theta measures
// spin along (sin theta, 0, cos theta). Outcomes are +1 / -1.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pilotpbr/qstate.hpp"
#include "pilotpbr/random.hpp"

namespace pilotpbr::epr {

struct SpinSetting {
  // Angle is reduced to [0, 2 pi).
  explicit SpinSetting(double angle, std::string label = {});

  double angle;
  std::string label;
};

// |+theta> = cos(theta/2)|0> + sin(theta/2)|1>, |-theta> = -sin(theta/2)|0> + cos(theta/2)|1>.
qstate::Ket spin_eigenstate(const SpinSetting& s, int outcome);

// (|01> - |10>) / sqrt(2)
qstate::Ket singlet();

inline std::size_t outcome_index(int outcome) { return outcome > 0 ? 0 : 1; }

// P(alpha, beta) indexed [outcome_index(alpha)][outcome_index(beta)].
struct JointBlock {
  std::array<std::array<double, 2>, 2> p{};

  double at(int alpha, int beta) const { return p[outcome_index(alpha)][outcome_index(beta)]; }
  // sum alpha beta P(alpha, beta)
  double correlator() const;
};

// Born rule on the singlet through qstate.
JointBlock singlet_joint(const SpinSetting& a, const SpinSetting& b);

struct TwoStepDraw {
  double lambda;
  int alpha;
  int beta;
};

// lambda ~ U[0,1); alpha = +1 iff lambda < 1/2; then beta = +1 with
// probability (1 - alpha cos(a - b)) / 2. Alice's rule ignores both settings;
// Bob's depends on a and alpha.
TwoStepDraw two_step_sample(const SpinSetting& a, const SpinSetting& b, Rng& rng);

struct CorrelationEntry {
  SpinSetting a;
  SpinSetting b;
  std::array<std::array<std::uint64_t, 2>, 2> counts{};  // [alpha][beta]
  std::uint64_t total = 0;

  JointBlock frequencies() const;
};

// Draw i uses Rng::for_stream(seed, i), so the lambda stream is the same for
// every pair of settings under one seed.
CorrelationEntry sample_correlations(const SpinSetting& a, const SpinSetting& b, std::size_t n,
                                     std::uint64_t seed);

struct ChshCorrelators {
  double ab = 0.0;
  double ab_prime = 0.0;
  double a_prime_b = 0.0;
  double a_prime_b_prime = 0.0;
};

// S = E(a,b) - E(a,b') + E(a',b) + E(a',b')
double chsh(const ChshCorrelators& e);

struct ChshSettings {
  SpinSetting a{0.0, "a"};
  SpinSetting a_prime{0.0, "a'"};
  SpinSetting b{0.0, "b"};
  SpinSetting b_prime{0.0, "b'"};
};

// a = 0, a' = pi/2, b = pi/4, b' = 3 pi/4
ChshSettings optimal_chsh_settings();

ChshCorrelators singlet_correlators(const ChshSettings& s);

// S for each of the 16 deterministic assignments
// (alpha(a), alpha(a'), beta(b), beta(b')) in {+1,-1}^4, in binary order
// with +1 first.
std::vector<double> deterministic_chsh_values();

// max |S| over the deterministic assignments. Factorized models
// P(beta|b,lambda) P(alpha|a,lambda) are mixtures of these, so the bound
// covers them too.
double local_bound_bruteforce();

struct FactorizationReport {
  SpinSetting a{0.0};
  SpinSetting b{0.0};
  std::uint64_t samples = 0;
  std::uint64_t alpha_plus = 0;
  std::uint64_t alpha_minus = 0;
  double p_beta_plus_given_alpha_plus = 0.0;
  double p_beta_plus_given_alpha_minus = 0.0;
  double gap = 0.0;           // total variation between the two conditionals
  double analytic_gap = 0.0;  // |cos(a - b)|
  ChshSettings chsh_settings;
  ChshCorrelators sampled;
  double chsh_sampled = 0.0;
  double chsh_quantum = 0.0;
  double local_bound = 0.0;
};

inline constexpr std::uint64_t kMinConditionalSamples = 100;

// Conditionals at (a, b); CHSH over `settings`, each pair drawn with `n`
// samples under `seed`. Throws StatisticsError when alpha = +1 or -1 occurs
// fewer than kMinConditionalSamples times.
FactorizationReport factorization_dependence_report(std::size_t n, std::uint64_t seed,
                                                    const SpinSetting& a, const SpinSetting& b,
                                                    const ChshSettings& settings);

// a = 0, b = pi/4, optimal CHSH settings.
FactorizationReport factorization_dependence_report(std::size_t n, std::uint64_t seed);

}  // namespace pilotpbr::epr
