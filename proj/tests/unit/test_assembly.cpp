#include "chb/assembly.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <memory>
#include <random>

using namespace chb;

namespace {

const SpectralBasisSet& bases12() {
  static const SpectralBasisSet b = build_bases(RectDomain{}, 12);
  return b;
}

Vec random_vec(std::mt19937& rng, int n, double amp) {
  std::uniform_real_distribution<double> u(-amp, amp);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

MaterialParams varied_params() {
  MaterialParams p;
  p.mobility = ScalarLaw::affine(1.0, 0.4, 0.5, 1.5);
  p.permeability = ScalarLaw::sigmoid(0.5, 1.5, 0.5);
  p.biot_modulus = ScalarLaw::sigmoid(0.8, 1.6, 0.7);
  p.biot_willis = ScalarLaw::affine(0.6, 0.1, 0.3, 0.9);
  p.lame_lambda = ScalarLaw::sigmoid(1.0, 2.0, 0.5);
  p.lame_mu = ScalarLaw::affine(1.0, 0.2, 0.5, 1.5);
  p.eigenstrain = Eigenstrain::vegard({0.03, 0.01, 0.005}, {});
  return p;
}

bool exactly_symmetric(const Mat& m) { return (m - m.transpose()).cwiseAbs().maxCoeff() == 0.0; }

}  // namespace

TEST(MobilityStiffness, ConstantLawIsScaledEigenvalues) {
  const SpectralBasisSet& b = bases12();
  MaterialParams p;
  p.mobility = ScalarLaw::constant(0.3);
  std::mt19937 rng(1);
  const Mat A = assemble_mobility_stiffness(random_vec(rng, b.size(), 0.5), b, p);
  const Mat expect = (0.3 * b.scalar.lambda).asDiagonal();
  EXPECT_LT((A - expect).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(A.row(0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(MobilityStiffness, VariableLawSymmetricAndCoercive) {
  const SpectralBasisSet& b = bases12();
  MaterialParams p;
  p.mobility = ScalarLaw::custom([](double s) { return 1.0 + 0.5 * s * s; }, [](double s) { return s; });
  std::mt19937 rng(2);
  for (int n = 0; n < 5; ++n) {
    const Mat A = assemble_mobility_stiffness(random_vec(rng, b.size(), 0.2), b, p);
    EXPECT_TRUE(exactly_symmetric(A));
    const Mat active = A.bottomRightCorner(b.size() - 1, b.size() - 1);
    const double min_eig = Eigen::SelfAdjointEigenSolver<Mat>(active).eigenvalues().minCoeff();
    EXPECT_GE(min_eig, 1.0 * b.scalar.lambda[1] * (1.0 - 1e-10));
  }
}

TEST(ElasticSystem, ZeroStateHasZeroRhs) {
  MaterialParams p;
  p.eigenstrain = Eigenstrain::swelling(0.1, 0.0);
  const SpectralBasisSet& b = bases12();
  const ElasticSystem es = assemble_elastic_system(Vec::Zero(b.size()), Vec::Zero(b.size()), b, p, {});
  EXPECT_EQ(es.rhs.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ElasticSystem, ConstantLawsIndependentOfState) {
  const SpectralBasisSet& b = bases12();
  auto sb = std::make_shared<const SpectralBasisSet>(b);
  MaterialParams p;
  p.eigenstrain = Eigenstrain::swelling(0.1, 0.0);
  const Assembler as(sb, p, {});
  std::mt19937 rng(3);
  const Vec a1 = random_vec(rng, b.size(), 1.0), a2 = random_vec(rng, b.size(), 1.0);
  const Vec d = random_vec(rng, b.size(), 1.0);
  const ElasticSystem s1 = as.elastic_system(a1, d), s2 = as.elastic_system(a2, d);
  EXPECT_EQ(s1.E_eps, s2.E_eps);
  EXPECT_EQ(s1.F_eps, s2.F_eps);
  EXPECT_EQ(as.mobility_stiffness(a1), as.mobility_stiffness(a2));
  EXPECT_EQ(as.flux_mass(a1), as.flux_mass(a2));
  const ElasticSystem direct = assemble_elastic_system(a1, d, b, p, {});
  EXPECT_LT((direct.E_eps - s1.E_eps).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ElasticSystem, PositiveDefiniteOnRandomStates) {
  const SpectralBasisSet& b = bases12();
  const MaterialParams p = varied_params();
  std::mt19937 rng(4);
  const int n = b.vector.size();
  for (int s = 0; s < 5; ++s) {
    const ElasticSystem es = assemble_elastic_system(random_vec(rng, b.size(), 1.0), random_vec(rng, b.size(), 1.0),
                                                     b, p, {});
    const Mat K = es.E_eps + es.F_eps;
    EXPECT_TRUE(exactly_symmetric(K));
    EXPECT_TRUE(exactly_symmetric(es.C_eps));
    for (int t = 0; t < 20; ++t) {
      const Vec x = random_vec(rng, n, 1.0);
      EXPECT_GT(x.dot(K * x), 0.0);
      EXPECT_GE(x.dot(es.C_eps * x), -1e-12);
    }
  }
}

TEST(FluxSystem, DiagonalForConstantPermeability) {
  const SpectralBasisSet& b = bases12();
  MaterialParams p;
  p.permeability = ScalarLaw::constant(2.0);
  const FluxSystem fs = assemble_flux_system(Vec::Zero(b.size()), Vec::Zero(b.size()), Vec::Zero(b.size()), b, p);
  for (int i = 1; i < b.size(); ++i) EXPECT_NEAR(fs.M_kqq(i, i), 0.5 / b.scalar.lambda[i], 1e-12);
  EXPECT_EQ(fs.M_kqq.row(0).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(fs.M_kqq.col(0).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT(fs.E_dtheta_f.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(FluxSystem, ConstantPressureGivesZeroVector) {
  const SpectralBasisSet& b = bases12();
  MaterialParams p;
  Vec d = Vec::Zero(b.size());
  d[0] = 0.7;  // constant theta, u = 0, constant M: constant p
  const FluxSystem fs = assemble_flux_system(Vec::Zero(b.size()), Vec::Zero(b.size()), d, b, p);
  EXPECT_LT(fs.E_dtheta_f.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(DivergenceCoupling, DualToScalarBasis) {
  const SpectralBasisSet& b = bases12();
  const Mat B = assemble_divergence_coupling(b);
  const int k = b.size();
  EXPECT_LT((B.bottomRightCorner(k - 1, k - 1) - Mat::Identity(k - 1, k - 1)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(B.row(0).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(B.col(0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(PhaseVectors, ZeroStateAndLinearisedDoubleWell) {
  const SpectralBasisSet& b = bases12();
  MaterialParams p;
  const Vec z = Vec::Zero(b.size());
  const PhaseVectors zero = assemble_phase_vectors(z, z, z, b, p);
  EXPECT_EQ(zero.psi_prime.cwiseAbs().maxCoeff() + zero.E_dphi_e.cwiseAbs().maxCoeff() +
                zero.E_dphi_f.cwiseAbs().maxCoeff(),
            0.0);
  const double eps = 1e-5;
  Vec a = z;
  a[1] = eps;
  const PhaseVectors pv = assemble_phase_vectors(a, z, z, b, p);
  EXPECT_LT((pv.psi_prime - (-4.0 * eps) * Vec::Unit(b.size(), 1)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(PhaseVectors, EnergyPartsMatchFiniteDifferences) {
  const SpectralBasisSet& b = bases12();
  const MaterialParams p = varied_params();
  std::mt19937 rng(6);
  const int k = b.size();
  const Vec a = random_vec(rng, k, 0.3), c = random_vec(rng, b.vector.size(), 0.05), d = random_vec(rng, k, 0.3);
  const PhaseVectors pv = assemble_phase_vectors(a, c, d, b, p);
  const double h = 1e-6;
  for (int j = 0; j < k; j += 3) {
    Vec ap = a, am = a;
    ap[j] += h;
    am[j] -= h;
    const FieldSnapshot sp = light_snapshot(ap, c, d, b), sm = light_snapshot(am, c, d, b);
    const double fd_e = (energy_elastic(sp, p) - energy_elastic(sm, p)) / (2 * h);
    const double fd_f = (energy_fluid(sp, p) - energy_fluid(sm, p)) / (2 * h);
    EXPECT_NEAR(pv.E_dphi_e[j], fd_e, 1e-7 * (1.0 + std::abs(fd_e)));
    EXPECT_NEAR(pv.E_dphi_f[j], fd_f, 1e-7 * (1.0 + std::abs(fd_f)));
  }
}

TEST(Projection, ConstantSource) {
  const SpectralBasisSet& b = bases12();
  const Vec r = project_constant(0.25, b.scalar);
  EXPECT_NEAR(r[0], 0.25, 1e-14);
  EXPECT_LT(r.tail(b.size() - 1).cwiseAbs().maxCoeff(), 1e-14);
}
