#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "pilotpbr/error.hpp"
#include "pilotpbr/pilotwave/evolution.hpp"
#include "pilotpbr/pilotwave/fields.hpp"
#include "pilotpbr/pilotwave/grid.hpp"

using namespace pilotpbr;
using namespace pilotpbr::pilotwave;

namespace {

constexpr double kPi = std::numbers::pi;

Grid1D packet_grid() { return Grid1D{-40.0, 40.0, 4096, 0.005}; }

Grid1D box_grid(std::size_t n = 256, double dt = 0.002) { return Grid1D{0.0, kPi, n, dt}; }

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(Grid, Validation) {
  EXPECT_THROW((Grid1D{0.0, 1.0, 100, 0.01}.validate()), InvariantError);
  EXPECT_THROW((Grid1D{1.0, 0.0, 512, 0.01}.validate()), InvariantError);
  EXPECT_THROW((Grid1D{0.0, 1.0, 512, 0.0}.validate()), InvariantError);
  EXPECT_NO_THROW(Grid1D{}.validate());
  const Grid1D g;
  EXPECT_DOUBLE_EQ(g.dx(), 128.0 / 8192.0);
  EXPECT_EQ(g.nearest_index(0.0), 4096u);
}

TEST(Grid, BarrierValidation) {
  EXPECT_THROW(validate_barrier({0.0, -1.0}), InvariantError);
  EXPECT_NO_THROW(validate_barrier({0.0, 0.0}));
}

TEST(GaussianPacket, Moments) {
  const auto psi = gaussian_packet(packet_grid(), -5.0, 1.5, 2.0);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
  const auto m = position_moments(psi);
  EXPECT_NEAR(m.mean, -5.0, 1e-9);
  EXPECT_NEAR(m.stddev, 1.5, 1e-6);
  // The centred difference sees sin(k0 dx)/dx rather than k0.
  const double dx = packet_grid().dx();
  EXPECT_NEAR(mean_velocity(psi), std::sin(2.0 * dx) / dx, 1e-4);
  EXPECT_NEAR(mean_velocity(psi), 2.0, 1e-3);
}

TEST(GaussianPacket, RejectsClippingAndUnderresolved) {
  EXPECT_THROW(gaussian_packet(packet_grid(), 35.0, 2.0, 0.0), InvariantError);
  EXPECT_THROW(gaussian_packet(packet_grid(), 0.0, packet_grid().dx(), 0.0), InvariantError);
}

TEST(Evolution, PreservesNorm) {
  const auto psi = gaussian_packet(packet_grid(), -5.0, 1.5, 2.0);
  const auto out = evolve(psi, {0.0, 0.5}, 400);
  EXPECT_LT(std::abs(out.norm() - 1.0), 1e-10);
  EXPECT_NEAR(out.time, 2.0, 1e-12);
}

TEST(Evolution, FreeSpreadingMatchesAnalytic) {
  const double sigma = 1.5;
  const auto psi = gaussian_packet(packet_grid(), -5.0, sigma, 1.0);
  const auto out = evolve(psi, {0.0, 0.0}, 800);
  const double t = out.time;
  const double expected = sigma * std::sqrt(1.0 + std::pow(t / (2.0 * sigma * sigma), 2));
  const auto m = position_moments(out);
  EXPECT_NEAR(m.stddev, expected, 1e-3 * expected);
  // Ehrenfest: the centroid moves at the mean velocity.
  EXPECT_NEAR(m.mean, -5.0 + mean_velocity(psi) * t, 1e-3);
}

TEST(Evolution, CoarseStepIsRejected) {
  auto grid = Grid1D{-64.0, 64.0, 8192, 0.05};
  const auto psi = gaussian_packet(grid, 30.0, 2.5, -4.0);
  try {
    evolve(psi, {0.0, 4.0}, 200);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("reduce dt"), std::string::npos);
  }
}

TEST(Evolution, RecordedKeepsEndpoints) {
  const auto psi = gaussian_packet(packet_grid(), 0.0, 1.5, 0.0);
  const auto rec = evolve_recorded(psi, {}, 10, 4);
  ASSERT_EQ(rec.size(), 4u);  // steps 0, 4, 8, 10
  EXPECT_EQ(rec.front().time, 0.0);
  EXPECT_NEAR(rec.back().time, 0.05, 1e-12);
}

TEST(Current, RealWavefunctionDoesNotMove) {
  const auto psi = gaussian_packet(packet_grid(), 0.0, 1.5, 0.0);
  EXPECT_EQ(max_abs(probability_current(psi)), 0.0);
  const auto v = velocity_field(psi);
  double vmax = 0.0;
  for (std::size_t j = 0; j < v.values.size(); ++j) {
    if (v.defined[j]) vmax = std::max(vmax, std::abs(v.values[j]));
  }
  EXPECT_LT(vmax, 1e-9);

  const auto box = superpose(1.0, box_eigenstate(box_grid(), 1), 0.5, box_eigenstate(box_grid(), 3));
  EXPECT_LT(max_abs(probability_current(box)), 1e-9);
}

TEST(Current, ConjugationFlipsSign) {
  auto psi = gaussian_packet(packet_grid(), -3.0, 1.2, 1.7);
  auto conj = psi;
  for (auto& c : conj.values) c = std::conj(c);
  const auto j1 = probability_current(psi);
  const auto j2 = probability_current(conj);
  for (std::size_t j = 0; j < j1.size(); ++j) EXPECT_EQ(j1[j], -j2[j]);
}

TEST(Current, PlaneWaveValue) {
  const Grid1D g = packet_grid();
  WaveFunction1D psi{g, std::vector<Complex>(g.n), 0.0};
  const double k = 0.8;
  for (std::size_t j = 0; j < g.n; ++j) psi.values[j] = std::polar(1.0, k * g.x(j));
  psi = normalized(psi);
  const auto v = velocity_field(psi);
  const double expected = std::sin(k * g.dx()) / g.dx();
  for (std::size_t j = 1; j + 1 < g.n; ++j) EXPECT_NEAR(v.values[j], expected, 1e-9);
}

TEST(Velocity, UndefinedAtNodes) {
  const auto psi = box_eigenstate(box_grid(257), 2);
  const std::size_t node = 128;  // sin(2 pi (j+1) / 258) vanishes at j = 128
  EXPECT_LT(density(psi)[node], 1e-12);
  auto moving = psi;
  for (std::size_t j = 0; j < psi.values.size(); ++j) {
    moving.values[j] *= std::polar(1.0, 0.3 * psi.grid.x(j));
  }
  const auto v = velocity_field(moving);
  EXPECT_FALSE(v.defined[node]);
  EXPECT_TRUE(std::isnan(v.values[node]));
  EXPECT_FALSE(v.at(node).has_value());
  EXPECT_TRUE(v.defined[node + 5]);
}

TEST(Velocity, WeakValueIdentity) {
  const auto packet = gaussian_packet(packet_grid(), -5.0, 1.5, 2.0);
  EXPECT_LT(velocity_identity_error(packet), 1e-9);
  const auto evolved = evolve(packet, {0.0, 0.5}, 600);
  EXPECT_LT(velocity_identity_error(evolved), 1e-9);
  const auto sup = superpose(1.0, box_eigenstate(box_grid(), 1), Complex(0.0, 1.0), box_eigenstate(box_grid(), 2));
  EXPECT_LT(velocity_identity_error(sup), 1e-9);
}

TEST(BoxEigenstate, LatticeEnergyApproachesContinuum) {
  for (std::size_t mode = 1; mode <= 3; ++mode) {
    const double coarse = box_lattice_energy(box_grid(256), mode);
    const double fine = box_lattice_energy(box_grid(1024), mode);
    const double c_coarse = box_continuum_energy(box_grid(256), mode);
    const double c_fine = box_continuum_energy(box_grid(1024), mode);
    EXPECT_LT(std::abs(fine - c_fine), std::abs(coarse - c_coarse));
    // (1 - cos t) / (t^2 / 2) = 1 - t^2/12 + O(t^4)
    const double theta = std::numbers::pi * double(mode) / 257.0;
    EXPECT_NEAR(coarse / c_coarse, 1.0 - theta * theta / 12.0, 1e-8);
  }
  EXPECT_THROW(box_eigenstate(box_grid(), 0), InvariantError);
}

TEST(BohmianEnergy, EigenstateIsConstant) {
  const auto grid = box_grid();
  for (std::size_t mode = 1; mode <= 2; ++mode) {
    const auto psi = box_eigenstate(grid, mode);
    const auto next = evolve(psi, {}, 1);
    const auto e = bohmian_energy(psi, next);
    const double expected = box_lattice_energy(grid, mode);
    ASSERT_GT(e.defined_count(), grid.n / 2);
    for (std::size_t j = 0; j < grid.n; ++j) {
      if (!e.defined[j]) continue;
      EXPECT_NEAR(e.values[j], expected, 1e-5 * expected);
    }
  }
}

// E(x) at t = 0 for a real Gaussian is the quantum potential
// 1/(4 sigma^2) - x^2/(8 sigma^4). The forward difference in time is first
// order, so two step sizes are combined by Richardson extrapolation.
TEST(BohmianEnergy, FreeGaussianRichardson) {
  const double sigma = 1.5;
  Grid1D g1{-20.0, 20.0, 4096, 0.004};
  Grid1D g2 = g1;
  g2.dt = 0.002;
  const auto p1 = gaussian_packet(g1, 0.0, sigma, 0.0);
  const auto p2 = gaussian_packet(g2, 0.0, sigma, 0.0);
  const auto e1 = bohmian_energy(p1, evolve(p1, {}, 1));
  const auto e2 = bohmian_energy(p2, evolve(p2, {}, 1));
  double worst = 0.0;
  for (std::size_t j = 0; j < g1.n; ++j) {
    const double x = g1.x(j);
    if (std::abs(x) > 2.0 * sigma) continue;
    ASSERT_TRUE(e1.defined[j] && e2.defined[j]);
    const double extrapolated = 2.0 * e2.values[j] - e1.values[j];
    const double exact = 1.0 / (4 * sigma * sigma) - x * x / (8 * std::pow(sigma, 4));
    worst = std::max(worst, std::abs(extrapolated - exact));
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Continuity, ResidualShrinksUnderRefinement) {
  auto run = [](std::size_t n, double dt, std::size_t steps) {
    const Grid1D g{-20.0, 20.0, n, dt};
    const auto psi = gaussian_packet(g, -5.0, 1.0, 2.0);
    return continuity_residual(evolve_recorded(psi, {0.0, 0.0}, steps, 1));
  };
  const double coarse = run(1024, 0.005, 200);
  const double fine = run(2048, 0.0025, 400);
  EXPECT_GT(coarse, 0.0);
  EXPECT_GE(coarse / fine, 3.0);
}

TEST(Continuity, StationaryStateHasNoResidual) {
  const auto rec = evolve_recorded(box_eigenstate(box_grid(), 1), {}, 50, 1);
  EXPECT_LT(continuity_residual(rec), 1e-8);
}

TEST(EnergyBeat, SuperpositionBeatsAtEnergyDifference) {
  const auto grid = box_grid();
  const auto psi = superpose(1.0, box_eigenstate(grid, 1), 1.0, box_eigenstate(grid, 2));
  const auto rec = evolve_recorded(psi, {}, 6000, 1);
  const auto beat = measure_energy_beat(rec);
  const double e1 = box_lattice_energy(grid, 1);
  const double e2 = box_lattice_energy(grid, 2);
  const double expected = 2.0 * kPi / (e2 - e1);
  ASSERT_GE(beat.maxima, 2u);
  EXPECT_NEAR(beat.period, expected, 0.05 * expected);
  EXPECT_GT(beat.cell_spread, 0.01 * e2);
}

TEST(Fields, MassBetween) {
  const auto psi = gaussian_packet(packet_grid(), 0.0, 1.5, 0.0);
  EXPECT_NEAR(mass_between(psi, -100.0, 100.0), 1.0, 1e-12);
  EXPECT_NEAR(mass_between(psi, 0.0, 100.0), 0.5, 0.01);
}
