#pragma once

#include "chb/types.hpp"

#include <vector>

namespace chb {

/// Axis-aligned rectangle [0, lx] x [0, ly] with its tensor Gauss-Legendre resolution.
/// nq_x / nq_y equal to 0 select the default resolution for the requested modes.
struct RectDomain {
  double lx = 1.0;
  double ly = 1.0;
  int nq_x = 0;
  int nq_y = 0;

  double area() const { return lx * ly; }
  bool operator==(const RectDomain&) const = default;
};

/// Tensor-product quadrature flattened as q = iy * nx + ix.
struct Quadrature {
  int nx = 0;
  int ny = 0;
  Vec x;
  Vec y;
  Vec w;
  int size() const { return static_cast<int>(w.size()); }
};

/// Smallest admissible points per direction for modes up to index max_mode.
int quadrature_floor(int max_mode);
/// Resolution used when the domain leaves nq at 0. Resolves products of two modes to rounding.
int default_quadrature_points(int max_mode);

Quadrature make_quadrature(const RectDomain& domain);

struct ScalarMode {
  int mx = 0;
  int my = 0;
};

struct VectorMode {
  int mx = 1;
  int my = 1;
  int component = 0;  ///< 0 = e_x, 1 = e_y
};

/// Neumann eigenfunctions cos(mx pi x / lx) cos(my pi y / ly), ordered by eigenvalue then (mx, my).
std::vector<ScalarMode> scalar_modes(const RectDomain& domain, int k);
/// Dirichlet eigenfunctions sin sin e_d, ordered by eigenvalue, then (mx, my), then component.
std::vector<VectorMode> vector_modes(const RectDomain& domain, int k);

double neumann_eigenvalue(const RectDomain& domain, int mx, int my);

struct ScalarBasis {
  RectDomain domain;  ///< with resolved nq
  Quadrature quad;
  std::vector<ScalarMode> modes;
  Vec lambda;
  Vec scale;  ///< per-mode amplitude so that the quadrature L2 norm is 1
  Mat value;  ///< Nq x k
  Mat grad_x;
  Mat grad_y;

  int size() const { return static_cast<int>(modes.size()); }
  Vec reconstruct(const Vec& a) const { return value * a; }
  double evaluate(int i, double x, double y) const;
  /// Gradient of mode i at an arbitrary point.
  std::pair<double, double> gradient(int i, double x, double y) const;
};

struct VectorBasis {
  RectDomain domain;
  Quadrature quad;
  std::vector<VectorMode> modes;
  Vec lambda;
  Vec scale;
  Mat ux;
  Mat uy;
  Mat exx;  ///< symmetric gradient components
  Mat eyy;
  Mat exy;
  Mat div;

  int size() const { return static_cast<int>(modes.size()); }
  std::pair<double, double> evaluate(int i, double x, double y) const;
};

/// q_i = -grad(eta_i) / lambda_i for i >= 2; mode 1 is the inert zero field.
struct FluxBasis {
  Vec lambda;
  Mat qx;
  Mat qy;
  Mat div;  ///< equals the scalar samples eta_i for i >= 2, zero for mode 1

  int size() const { return static_cast<int>(lambda.size()); }
};

/// The four Galerkin spaces on one shared quadrature grid; the phase and fluid-content spaces coincide.
struct SpectralBasisSet {
  ScalarBasis scalar;
  VectorBasis vector;
  FluxBasis flux;

  int size() const { return scalar.size(); }
  const Quadrature& quad() const { return scalar.quad; }
};

/// Domain with nq filled in (default resolution where it was 0) for the given scalar and vector mode sets.
RectDomain resolve_quadrature(const RectDomain& domain, int max_mx, int max_my);

ScalarBasis build_scalar_basis(const RectDomain& domain, int k);
VectorBasis build_vector_basis(const RectDomain& domain, int k);
FluxBasis build_flux_basis(const ScalarBasis& scalar);
SpectralBasisSet build_bases(const RectDomain& domain, int k);

/// L2 projection by quadrature: a_j = (f, eta_j).
Vec project_scalar(const Vec& f, const ScalarBasis& basis);

/// Quadrature Gram matrix (eta_i, eta_j).
Mat scalar_gram(const ScalarBasis& basis);
/// Quadrature stiffness (grad eta_i, grad eta_j).
Mat scalar_stiffness(const ScalarBasis& basis);
/// X^T diag(weight) X with exactly symmetric output.
Mat weighted_gram(const Mat& x, const Vec& weight);
Mat weighted_cross(const Mat& x, const Vec& weight, const Mat& y);

}  // namespace chb
