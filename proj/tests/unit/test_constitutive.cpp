#include "chb/constitutive.hpp"
#include "chb/spectral_bases.hpp"
#include "chb/validation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace chb;

namespace {

constexpr double pi = std::numbers::pi;

FieldSnapshot grid(int n = 24) {
  const Quadrature q = make_quadrature(RectDomain{1.0, 1.0, n, n});
  return FieldSnapshot::zeros(q.x, q.y, q.w);
}

FieldSnapshot random_state(std::mt19937& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> u(-amp, amp);
  FieldSnapshot s = grid(12);
  for (Vec* f : {&s.phi, &s.theta, &s.exx, &s.eyy, &s.exy, &s.phi_x, &s.phi_y})
    for (int q = 0; q < s.size(); ++q) (*f)[q] = u(rng);
  s.div_u = s.exx + s.eyy;
  return s;
}

MaterialParams varied_params() {
  MaterialParams p;
  p.mobility = ScalarLaw::affine(1.0, 0.3, 0.5, 1.5);
  p.biot_modulus = ScalarLaw::sigmoid(0.8, 1.6, 0.7);
  p.biot_willis = ScalarLaw::affine(0.6, 0.1, 0.3, 0.9);
  p.lame_lambda = ScalarLaw::sigmoid(1.0, 2.0, 0.5);
  p.lame_mu = ScalarLaw::affine(1.0, 0.2, 0.5, 1.5);
  p.eigenstrain = Eigenstrain::vegard({0.03, 0.01, 0.005}, {});
  return p;
}

}  // namespace

TEST(DoubleWell, Values) {
  EXPECT_EQ(double_well(1.0), 0.0);
  EXPECT_EQ(double_well(-1.0), 0.0);
  EXPECT_EQ(double_well(0.0), 1.0);
  EXPECT_EQ(double_well_prime(0.0), 0.0);
  EXPECT_EQ(double_well(2.0), 9.0);
  EXPECT_EQ(double_well_prime(2.0), 24.0);
  for (double s = -3.0; s <= 3.0; s += 0.125) {
    EXPECT_GE(double_well(s), 0.0);
    EXPECT_GE(double_well_second(s) + 4.0, -1e-14);
    const double h = 1e-6;
    EXPECT_NEAR(double_well_prime(s), (double_well(s + h) - double_well(s - h)) / (2 * h), 1e-6);
  }
}

TEST(ScalarLaw, Families) {
  const ScalarLaw a = ScalarLaw::affine(1.0, 0.5, 0.25, 1.5);
  EXPECT_DOUBLE_EQ(a.value(0.4), 1.2);
  EXPECT_DOUBLE_EQ(a.value(-10.0), 0.25);
  EXPECT_DOUBLE_EQ(a.value(10.0), 1.5);
  EXPECT_DOUBLE_EQ(a.derivative(0.4), 0.5);
  EXPECT_DOUBLE_EQ(a.derivative(10.0), 0.0);
  const ScalarLaw s = ScalarLaw::sigmoid(1.0, 3.0, 0.5);
  EXPECT_DOUBLE_EQ(s.value(0.0), 2.0);
  const double h = 1e-6;
  EXPECT_NEAR(s.derivative(0.3), (s.value(0.3 + h) - s.value(0.3 - h)) / (2 * h), 1e-8);
  EXPECT_TRUE(ScalarLaw::constant(2.0).is_constant());
  EXPECT_EQ(ScalarLaw::constant(2.0), ScalarLaw::constant(2.0));
}

TEST(Energy, InterfaceExamples) {
  MaterialParams p;
  p.gamma = 1.0;
  p.ell = 1.0;
  FieldSnapshot s = grid();
  s.phi.setOnes();
  EXPECT_NEAR(energy_interface(s, p), 0.0, 1e-15);
  s.phi.setZero();
  EXPECT_NEAR(energy_interface(s, p), 1.0, 1e-14);
  for (int q = 0; q < s.size(); ++q) {
    s.phi[q] = std::cos(pi * s.x[q]);
    s.phi_x[q] = -pi * std::sin(pi * s.x[q]);
  }
  EXPECT_NEAR(energy_interface(s, p), 3.0 / 8.0 + pi * pi / 4.0, 1e-12);
}

TEST(Energy, ElasticExamples) {
  MaterialParams p;
  p.lame_lambda = ScalarLaw::constant(0.0);
  p.lame_mu = ScalarLaw::constant(0.5);
  p.eigenstrain = Eigenstrain::swelling(0.3, 0.2);
  FieldSnapshot s = grid();
  s.phi.setConstant(0.2);
  s.exx.setOnes();
  s.eyy.setOnes();
  EXPECT_NEAR(energy_elastic(s, p), 1.0, 1e-13);  // (1/2) 2 mu |I|^2

  s.phi.setConstant(0.7);
  s.exx.setConstant(0.3 * 0.5);
  s.eyy.setConstant(0.3 * 0.5);
  EXPECT_NEAR(energy_elastic(s, p), 0.0, 1e-15);
}

TEST(Energy, FluidExamples) {
  MaterialParams p;
  p.biot_willis = ScalarLaw::constant(0.5);
  FieldSnapshot s = grid();
  s.theta.setOnes();
  EXPECT_NEAR(energy_fluid(s, p), 0.5, 1e-14);
  s.div_u.setConstant(2.0);
  EXPECT_NEAR(energy_fluid(s, p), 0.0, 1e-15);
}

TEST(Energy, TotalExamplesAndAdditivity) {
  MaterialParams p;
  p.gamma = 2.0;
  p.ell = 0.5;
  FieldSnapshot s = grid();
  EXPECT_NEAR(total_energy(s, p), 4.0, 1e-13);  // gamma |Omega| / ell

  p.eigenstrain = Eigenstrain::swelling(0.7, 1.0);
  s.phi.setOnes();
  EXPECT_NEAR(total_energy(s, p), 0.0, 1e-15);

  std::mt19937 rng(11);
  const MaterialParams v = varied_params();
  for (int n = 0; n < 10; ++n) {
    const FieldSnapshot r = random_state(rng);
    const double ei = energy_interface(r, v), ee = energy_elastic(r, v), ef = energy_fluid(r, v);
    EXPECT_NEAR(total_energy(r, v), ei + ee + ef, 1e-13 * std::abs(ei + ee + ef));
    EXPECT_GE(ei, 0.0);
    EXPECT_GE(ee, 0.0);
    EXPECT_GE(ef, 0.0);
  }
}

TEST(VariationalDerivative, ZeroStateVanishes) {
  FieldSnapshot s = grid();
  MaterialParams p;
  p.eigenstrain = Eigenstrain::swelling(0.2, 0.0);
  EXPECT_LT(var_deriv_phi(s, p).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(VariationalDerivative, LocalPartMatchesPointwiseDifference) {
  // Without gradients, delta_phi E is the pointwise derivative of the energy density.
  std::mt19937 rng(3);
  const MaterialParams p = varied_params();
  FieldSnapshot s = random_state(rng, 0.8);
  s.phi_x.setZero();
  s.phi_y.setZero();
  s.lap_phi.setZero();
  const Vec g = var_deriv_phi(s, p);
  const double h = 1e-5;
  for (int q = 0; q < s.size(); q += 7) {
    FieldSnapshot plus = s, minus = s;
    plus.phi[q] += h;
    minus.phi[q] -= h;
    const double fd = (total_energy(plus, p) - total_energy(minus, p)) / (2 * h * s.w[q]);
    EXPECT_NEAR(g[q], fd, 1e-6 * (1.0 + std::abs(fd)));
  }
}

TEST(Stress, PressureAndStressFreeState) {
  MaterialParams p;
  p.biot_modulus = ScalarLaw::constant(3.0);
  p.biot_willis = ScalarLaw::constant(1.0);
  FieldSnapshot s = grid(6);
  s.theta.setConstant(2.0);
  s.div_u.setOnes();
  EXPECT_LT((pressure(s, p).array() - 3.0).abs().maxCoeff(), 1e-15);

  p.eigenstrain = Eigenstrain::swelling(0.4, 0.0);
  s.phi.setConstant(0.5);
  s.exx.setConstant(0.2);
  s.eyy.setConstant(0.2);
  s.div_u.setConstant(0.4);
  s.theta.setConstant(0.4);
  const StressField se = stress_elastic(s, p);
  EXPECT_LT(se.xx.cwiseAbs().maxCoeff() + se.yy.cwiseAbs().maxCoeff() + se.xy.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Stress, CauchyMatchesEffectiveDecomposition) {
  std::mt19937 rng(5);
  const MaterialParams p = varied_params();
  const FieldSnapshot s = random_state(rng);
  const Vec rate = Vec::LinSpaced(s.size(), -1.0, 1.0);
  const StressField total = cauchy_stress(s, p, rate);
  const StressField eff = effective_stress(s, p, rate);
  const Vec pr = pressure(s, p);
  for (int q = 0; q < s.size(); ++q) {
    const double ap = p.biot_willis.value(s.phi[q]) * pr[q];
    EXPECT_NEAR(total.xx[q], eff.xx[q] - ap, 1e-13);
    EXPECT_NEAR(total.yy[q], eff.yy[q] - ap, 1e-13);
    EXPECT_NEAR(total.xy[q], eff.xy[q], 1e-13);
  }
}

TEST(LowerBounds, ElasticAndFluidHoldOnRandomStates) {
  std::mt19937 rng(17);
  MaterialParams p = varied_params();
  p.biot_modulus = ScalarLaw::constant(1.3);
  const LowerBoundConstants c = lower_bound_constants(p);
  for (int n = 0; n < 50; ++n) {
    const FieldSnapshot s = random_state(rng, 2.0);
    EXPECT_GE(energy_elastic(s, p), elastic_lower_bound(s, c) - 1e-12);
    EXPECT_GE(energy_fluid(s, p), fluid_lower_bound(s, c) - 1e-12);
  }
}

TEST(Validation, DefaultsAcceptedAndViolationsNamed) {
  MaterialParams p;
  EXPECT_TRUE(validate_assumptions(p, {}, ExperimentMode::existence).ok());

  p.mobility = ScalarLaw::affine(0.1, 1.0, -1.0, 2.0);  // crosses zero at phi = -0.1
  const ValidationReport r = validate_assumptions(p, {}, ExperimentMode::existence);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.errors.front().assumption, "(A2*)");
  EXPECT_THROW(r.raise_if_failed(), ValidationError);

  MaterialParams q;
  q.eta = -1.0;
  EXPECT_EQ(validate_assumptions(q, {}, ExperimentMode::existence).errors.front().assumption, "(A7)");

  MaterialParams c;
  c.eta = 0.0;
  c.permeability = ScalarLaw::sigmoid(0.5, 1.5, 0.5);
  const ValidationReport rc = validate_assumptions(c, {}, ExperimentMode::continuity);
  ASSERT_FALSE(rc.ok());
  EXPECT_EQ(rc.errors.front().assumption, "(B2)");
}
