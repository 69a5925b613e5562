#include "chb/diagnostics.hpp"
#include "chb/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace chb;

namespace {

ModelConfig spinodal_config() {
  ModelConfig c;
  c.name = "spinodal";
  c.k = 12;
  c.params.mobility = ScalarLaw::constant(0.01);
  c.params.eigenstrain = Eigenstrain::swelling(0.05, 0.0);
  c.params.biot_willis = ScalarLaw::constant(0.5);
  c.initial.phi = {"noise", 0.0, 0.1, 5};
  c.time.t_final = 0.03;
  c.time.dt = 1e-3;
  return c;
}

ModelConfig equilibrium_config() {
  ModelConfig c = spinodal_config();
  c.initial.phi = {"constant", 0.3};
  c.initial.theta = {"constant", 0.1};
  return c;
}

ModelConfig continuity_config() {
  ModelConfig c;
  c.name = "continuity";
  c.k = 10;
  c.params.mobility = ScalarLaw::constant(0.01);
  c.params.biot_willis = ScalarLaw::constant(0.5);
  c.params.eigenstrain = Eigenstrain::vegard({0.02, 0.01, 0.005}, {});
  c.params.eta = 0.0;
  c.initial.phi = {"disk", 0.0, 1.0};
  c.initial.phi.radius = 0.3;
  c.time.t_final = 0.02;
  c.time.dt = 1e-3;
  c.time.output_every = 5;
  c.experiment.mode = ExperimentMode::continuity;
  return c;
}

Vec zero_mean_random(std::mt19937& rng, int k) {
  std::normal_distribution<double> n;
  Vec v(k);
  for (int i = 0; i < k; ++i) v[i] = n(rng);
  v[0] = 0.0;
  return v;
}

}  // namespace

TEST(Trapezoid, IntegratesLinearExactly) {
  EXPECT_DOUBLE_EQ(trapezoid({0.0, 0.5, 2.0}, {1.0, 2.0, 5.0}), 0.75 + 5.25);
  EXPECT_EQ(trapezoid({0.0}, {3.0}), 0.0);
}

TEST(Records, ColumnsMatchValues) {
  const DiagnosticsRecord r;
  EXPECT_EQ(DiagnosticsRecord::columns().size(), r.values().size());
  EXPECT_EQ(DiagnosticsRecord::columns().front(), "t");
}

TEST(Records, AdditiveAndNonNegative) {
  const Trajectory t = run(spinodal_config());
  ASSERT_TRUE(t.complete);
  for (const TrajectoryPoint& p : t.points) {
    const DiagnosticsRecord& r = p.record;
    EXPECT_NEAR(r.E_total, r.E_i + r.E_e + r.E_f, 1e-13 * std::abs(r.E_total));
    EXPECT_GE(r.E_i, 0.0);
    EXPECT_GE(r.E_f, 0.0);
    EXPECT_GE(r.D_mu, 0.0);
    EXPECT_GE(r.D_q, 0.0);
    EXPECT_GE(r.D_visc, 0.0);
    EXPECT_TRUE(r.finite);
  }
  for (std::size_t n = 1; n < t.points.size(); ++n) EXPECT_LE(t.points[n].record.E_total, t.points[n - 1].record.E_total);
}

TEST(IdentityResidual, VanishesAtEquilibrium) {
  const Trajectory t = run(equilibrium_config());
  for (double r : energy_identity_residual(t)) EXPECT_LT(std::abs(r), 1e-12);
  const AprioriMonitor m = apriori_monitor(t);
  EXPECT_LT(m.int_visc, 1e-24);
  EXPECT_LT(m.int_grad_mu_sq, 1e-24);
  EXPECT_LT(m.int_q_sq, 1e-24);
  EXPECT_TRUE(m.finite);
}

TEST(IdentityResidual, SmallOnSpinodalRun) {
  const Trajectory t = run(spinodal_config());
  const std::vector<double> r = energy_identity_residual(t);
  ASSERT_EQ(r.size(), t.points.size());
  EXPECT_EQ(r.front(), 0.0);
  const double drop = t.points.front().record.E_total - t.points.back().record.E_total;
  ASSERT_GT(drop, 0.0);
  for (double v : r) EXPECT_LT(std::abs(v), 0.2 * drop);
  const AprioriMonitor m = apriori_monitor(t);
  EXPECT_TRUE(m.finite);
  EXPECT_GT(m.int_grad_mu_sq, 0.0);
}

TEST(Balance, ConservationAndAffineLaws) {
  const Trajectory t0 = run(spinodal_config());
  const BalanceSeries b0 = balance_residuals(t0);
  for (std::size_t n = 0; n < b0.t.size(); ++n) {
    EXPECT_LT(b0.phi[n], 1e-12);
    EXPECT_LT(b0.theta[n], 1e-12);
  }
  ModelConfig c = spinodal_config();
  c.sources.R = 0.1;
  c.sources.S_f = -0.2;
  const Trajectory t = run(c);
  const double area = c.domain.area();
  for (const TrajectoryPoint& p : t.points) {
    EXPECT_NEAR(p.record.phi_integral - t.points.front().record.phi_integral, 0.1 * area * p.record.t, 1e-10);
    EXPECT_NEAR(p.record.theta_integral - t.points.front().record.theta_integral, -0.2 * area * p.record.t, 1e-10);
  }
  for (double v : balance_residuals(t).phi) EXPECT_LT(v, 1e-10);
}

TEST(DualNorm, SpectralFormulaAndDenseOracle) {
  const ScalarBasis b = build_scalar_basis(RectDomain{}, 16);
  const DualNormContext ctx(b, 0.5, 2.0);
  const Vec e2 = Vec::Unit(b.size(), 1);
  EXPECT_NEAR(ctx.mobility_norm_sq(e2), 1.0 / (0.5 * b.lambda[1]), 1e-14);
  EXPECT_EQ(ctx.permeability_norm_sq(Vec::Zero(b.size())), 0.0);
  std::mt19937 rng(3);
  for (int n = 0; n < 10; ++n) {
    const Vec f = zero_mean_random(rng, b.size()), g = zero_mean_random(rng, b.size());
    const double spectral = ctx.pairing(f, g, 0.5);
    EXPECT_NEAR(ctx.pairing(f, g, Vec::Constant(b.quad.size(), 0.5)), spectral, 1e-10 * std::abs(spectral) + 1e-14);
    EXPECT_EQ(inv_laplacian_pairing(f, b, 0.5), ctx.pairing(f, f, 0.5));
  }
  Vec bad = e2;
  bad[0] = 1e-3;
  EXPECT_THROW(ctx.mobility_norm_sq(bad), std::invalid_argument);
}

TEST(DualNorm, NormProperties) {
  const ScalarBasis b = build_scalar_basis(RectDomain{2.0, 1.0, 0, 0}, 20);
  const DualNormContext ctx(b, 1.3, 1.0);
  std::mt19937 rng(4);
  for (int n = 0; n < 50; ++n) {
    const Vec f = zero_mean_random(rng, b.size()), g = zero_mean_random(rng, b.size());
    const double ff = ctx.mobility_norm_sq(f), gg = ctx.mobility_norm_sq(g), fg = ctx.pairing(f, g, 1.3);
    EXPECT_GT(ff, 0.0);
    EXPECT_LE(fg * fg, ff * gg * (1 + 1e-14));
    EXPECT_NEAR(ctx.mobility_norm_sq(2.5 * f), 6.25 * ff, 1e-12 * ff);
    EXPECT_LE(std::sqrt(ctx.mobility_norm_sq(f + g)), std::sqrt(ff) + std::sqrt(gg) + 1e-14);
  }
}

TEST(Seminorm, KernelScalingAndDerivativeForm) {
  ModelConfig c = continuity_config();
  const Model m(c);
  const int k = m.size();
  std::mt19937 rng(8);
  StateDifference zero{Vec::Zero(k), Vec::Zero(k), Vec::Zero(k)};
  EXPECT_EQ(quadratic_seminorm(zero, m), 0.0);

  ModelConfig flat = c;
  flat.params.eigenstrain = Eigenstrain::vegard({}, {});
  const Model mf(flat);
  StateDifference kernel = zero;
  kernel.a[0] = 0.7;  // constant phase shift, no strain, no fluid content
  EXPECT_LT(quadratic_seminorm(kernel, mf), 1e-12);

  std::normal_distribution<double> nd;
  auto random_diff = [&] {
    StateDifference s{Vec(k), Vec(k), Vec(k)};
    for (int i = 0; i < k; ++i) {
      s.a[i] = 0.1 * nd(rng);
      s.c[i] = 0.01 * nd(rng);
      s.d[i] = 0.1 * nd(rng);
    }
    return s;
  };
  const StateDifference x1 = random_diff(), x2 = random_diff();
  const StateDifference dx{x1.a - x2.a, x1.c - x2.c, x1.d - x2.d};
  const double v = quadratic_seminorm(dx, m);
  EXPECT_GT(v, 0.0);
  const StateDifference sx{3.0 * dx.a, 3.0 * dx.c, 3.0 * dx.d};
  EXPECT_NEAR(quadratic_seminorm(sx, m), 9.0 * v, 1e-12 * v);
  EXPECT_NEAR(quadratic_seminorm_from_derivatives(x1, x2, m), v, 1e-10 * std::max(1.0, v));
}

TEST(Continuity, ZeroPerturbationGivesZeroLhs) {
  const ModelConfig c = continuity_config();
  const Model m(c);
  const Trajectory base = run(m);
  const PerturbationData unit = make_perturbation("phi0", m.size(), 7);
  EXPECT_EQ(unit.delta_a[0], 0.0);
  EXPECT_NEAR(unit.delta_a.norm(), 1.0, 1e-14);
  const ContinuityLevel l = compare_pair(base, run_perturbed(c, unit, 0.0), m, unit, 0.0);
  EXPECT_EQ(l.lhs, 0.0);
  for (double term : l.terms) EXPECT_EQ(term, 0.0);
}

TEST(Continuity, QuadraticScalingOnShortSweep) {
  const ModelConfig c = continuity_config();
  const ContinuityStudy st = continuous_dependence_experiment(c, "theta0", {1e-1, 1e-2, 1e-3}, 2);
  ASSERT_EQ(st.levels.size(), 3u);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(st.slopes[i], 1.0, 0.15) << continuity_term_names()[i];
  EXPECT_LT(st.ratio_spread, 10.0);
  for (const ContinuityLevel& l : st.levels) EXPECT_TRUE(l.flux_bound_holds);
}

TEST(Continuity, RejectsStateDependentLaws) {
  ModelConfig c = continuity_config();
  c.params.permeability = ScalarLaw::sigmoid(0.5, 1.5, 0.5);
  EXPECT_THROW(continuous_dependence_experiment(c, "phi0", {1e-2}), ValidationError);
}

TEST(Continuity, LogLogSlope) {
  EXPECT_NEAR(loglog_slope({1.0, 10.0, 100.0}, {2.0, 200.0, 20000.0}), 2.0, 1e-12);
}
