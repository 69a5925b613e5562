#include "chb/spectral_bases.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace chb;

namespace {

constexpr double pi = std::numbers::pi;

RectDomain unit() { return RectDomain{}; }
RectDomain wide() { return RectDomain{2.0, 1.0, 0, 0}; }

}  // namespace

TEST(ScalarBasis, SingleModeIsConstant) {
  const ScalarBasis b = build_scalar_basis(unit(), 1);
  ASSERT_EQ(b.size(), 1);
  EXPECT_EQ(b.lambda[0], 0.0);
  EXPECT_LT((b.value.array() - 1.0).abs().maxCoeff(), 1e-13);
}

TEST(ScalarBasis, SecondEigenvalueIsPiSquared) {
  const ScalarBasis b = build_scalar_basis(unit(), 2);
  EXPECT_NEAR(b.lambda[1], pi * pi, 1e-12);
  EXPECT_EQ(b.modes[1].mx, 0);  // (0,1) precedes (1,0)
  EXPECT_EQ(b.modes[1].my, 1);
}

TEST(ScalarBasis, OrderingNonDecreasingWithLexicographicTies) {
  const ScalarBasis b = build_scalar_basis(wide(), 40);
  for (int i = 1; i < b.size(); ++i) {
    ASSERT_LE(b.lambda[i - 1], b.lambda[i]);
    if (b.lambda[i - 1] == b.lambda[i]) {
      const auto& p = b.modes[i - 1];
      const auto& q = b.modes[i];
      EXPECT_TRUE(p.mx < q.mx || (p.mx == q.mx && p.my < q.my));
    }
  }
  const ScalarBasis again = build_scalar_basis(wide(), 40);
  for (int i = 0; i < b.size(); ++i) EXPECT_EQ(b.modes[i].mx, again.modes[i].mx);
}

TEST(ScalarBasis, GramAndStiffness) {
  for (const RectDomain& d : {unit(), wide()}) {
    const ScalarBasis b = build_scalar_basis(d, 16);
    const int k = b.size();
    EXPECT_LT((scalar_gram(b) - Mat::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-12);
    const Mat diag = b.lambda.asDiagonal();
    EXPECT_LT((scalar_stiffness(b) - diag).cwiseAbs().maxCoeff(), 1e-8 * b.lambda.maxCoeff());
  }
}

TEST(ScalarBasis, RejectsZeroModesAndCoarseQuadrature) {
  EXPECT_THROW(build_scalar_basis(unit(), 0), ConfigError);
  RectDomain coarse = unit();
  coarse.nq_x = coarse.nq_y = 3;
  EXPECT_THROW(build_scalar_basis(coarse, 16), ConfigError);
}

TEST(Projection, ConstantAndModeAndCosines) {
  const ScalarBasis b = build_scalar_basis(unit(), 10);
  const Vec c = project_scalar(Vec::Constant(b.quad.size(), 2.5), b);
  EXPECT_NEAR(c[0], 2.5, 1e-12);
  EXPECT_LT(c.tail(c.size() - 1).cwiseAbs().maxCoeff(), 1e-12);

  const Vec e3 = project_scalar(b.value.col(2), b);
  EXPECT_LT((e3 - Vec::Unit(b.size(), 2)).cwiseAbs().maxCoeff(), 1e-12);

  Vec f(b.quad.size());
  for (int q = 0; q < f.size(); ++q) f[q] = std::cos(pi * b.quad.x[q]) + std::cos(pi * b.quad.y[q]);
  const Vec p = project_scalar(f, b);
  EXPECT_NEAR(p[1], 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(p[2], 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_LT(std::abs(p[0]) + p.tail(p.size() - 3).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Projection, RoundTripIsIdentity) {
  const ScalarBasis b = build_scalar_basis(wide(), 24);
  Vec a(b.size());
  for (int i = 0; i < a.size(); ++i) a[i] = std::sin(1.3 * i + 0.2);
  EXPECT_LT((project_scalar(b.reconstruct(a), b) - a).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(project_scalar(Vec::Zero(5), b), ConfigError);
}

TEST(VectorBasis, FirstModeAndBoundaryTrace) {
  const VectorBasis v = build_vector_basis(unit(), 12);
  EXPECT_NEAR(v.lambda[0], 2.0 * pi * pi, 1e-12);
  EXPECT_EQ(v.modes[0].component, 0);
  EXPECT_EQ(v.modes[1].component, 1);
  for (int i = 0; i < v.size(); ++i) {
    for (double s : {0.0, 0.17, 0.5, 0.93, 1.0}) {
      for (auto [x, y] : {std::pair{0.0, s}, {1.0, s}, {s, 0.0}, {s, 1.0}}) {
        const auto [ux, uy] = v.evaluate(i, x, y);
        EXPECT_LT(std::abs(ux) + std::abs(uy), 1e-14);
      }
    }
  }
}

TEST(VectorBasis, DivergenceSamplesMatchAnalyticDerivative) {
  const VectorBasis v = build_vector_basis(unit(), 8);
  ASSERT_EQ(v.modes[0].mx, 1);
  ASSERT_EQ(v.modes[0].my, 1);
  ASSERT_EQ(v.modes[0].component, 0);
  for (int q = 0; q < v.quad.size(); ++q) {
    const double expect = 2.0 * v.scale[0] * pi * std::cos(pi * v.quad.x[q]) * std::sin(pi * v.quad.y[q]);
    EXPECT_NEAR(v.div(q, 0), expect, 1e-13);
  }
  EXPECT_LT((weighted_gram(v.ux, v.quad.w) + weighted_gram(v.uy, v.quad.w) - Mat::Identity(v.size(), v.size()))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(FluxBasis, InertFirstModeAndGradientIdentity) {
  const ScalarBasis s = build_scalar_basis(unit(), 10);
  const FluxBasis f = build_flux_basis(s);
  EXPECT_EQ(f.qx.col(0).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(f.qy.col(0).cwiseAbs().maxCoeff(), 0.0);
  for (int i = 1; i < f.size(); ++i) {
    EXPECT_LT((f.lambda[i] * f.qx.col(i) + s.grad_x.col(i)).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((f.lambda[i] * f.qy.col(i) + s.grad_y.col(i)).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(FluxBasis, AnalyticFirstCosineMode) {
  const ScalarBasis s = build_scalar_basis(unit(), 3);
  const FluxBasis f = build_flux_basis(s);
  const int i = 2;  // (1,0)
  ASSERT_EQ(s.modes[i].mx, 1);
  for (int q = 0; q < s.quad.size(); ++q) {
    EXPECT_NEAR(f.qx(q, i), std::sqrt(2.0) / pi * std::sin(pi * s.quad.x[q]), 1e-13);
    EXPECT_NEAR(f.qy(q, i), 0.0, 1e-14);
  }
}

TEST(FluxBasis, MixedPoissonRelations) {
  const ScalarBasis s = build_scalar_basis(wide(), 16);
  const FluxBasis f = build_flux_basis(s);
  const Vec& w = s.quad.w;
  const Mat qq = weighted_gram(f.qx, w) + weighted_gram(f.qy, w);
  const Mat eta_divq = weighted_cross(s.value, w, f.div);
  // (q_i, q_j) = (eta_i, div q_j) / lambda_i on the zero-mean modes
  for (int i = 1; i < f.size(); ++i)
    for (int j = 1; j < f.size(); ++j) EXPECT_NEAR(qq(i, j), eta_divq(i, j) / f.lambda[i], 1e-10);
  // div q_i tested against theta equals (eta_i, theta) for zero-mean theta
  const Vec theta = s.value.rightCols(s.size() - 1) * Vec::LinSpaced(s.size() - 1, -1.0, 1.0);
  for (int i = 1; i < f.size(); ++i)
    EXPECT_NEAR(integrate(w, f.div.col(i).cwiseProduct(theta)), integrate(w, s.value.col(i).cwiseProduct(theta)),
                1e-10);
  // normal component vanishes on the boundary
  for (int i = 1; i < f.size(); ++i) {
    EXPECT_NEAR(s.gradient(i, 0.0, 0.37).first, 0.0, 1e-13);
    EXPECT_NEAR(s.gradient(i, 0.61, 1.0).second, 0.0, 1e-13);
  }
}

TEST(Quadrature, WeightsSumToArea) {
  const Quadrature q = make_quadrature(RectDomain{2.0, 1.0, 12, 9});
  EXPECT_EQ(q.size(), 108);
  EXPECT_NEAR(q.w.sum(), 2.0, 1e-13);
  EXPECT_GE(default_quadrature_points(5), quadrature_floor(5));
}
