#pragma once

#include "chb/dynamics.hpp"
#include "chb/record.hpp"

#include <vector>

namespace chb {

/// Instantaneous record at one state. c_rate is the displacement rate used for D_visc and W_f.
/// Residuals and time integrals are filled in by finalize_records.
DiagnosticsRecord make_record(const Model& model, const CoefficientState& state, const Vec& c_rate);

/// Fill identity residual, balance residuals and the trapezoid time integrals along the output points.
void finalize_records(std::vector<TrajectoryPoint>& points, const Model& model);

/// Trapezoid rule of y over t.
double trapezoid(const std::vector<double>& t, const std::vector<double>& y);

/// r(t) = E(t) + int (D_visc + D_mu + D_q) - E(0) - int (W_R + W_f + W_S), trapezoid on output points.
std::vector<double> energy_identity_residual(const Trajectory& traj);

struct AprioriMonitor {
  double sup_psi_L1 = 0.0;
  double sup_phi_H1_sq = 0.0;
  double sup_u_H1_sq = 0.0;
  double sup_theta_L2_sq = 0.0;
  double int_visc = 0.0;
  double int_grad_mu_sq = 0.0;
  double int_q_sq = 0.0;
  double int_mu_H1_sq = 0.0;
  bool finite = true;
};

AprioriMonitor apriori_monitor(const Trajectory& traj);

struct BalanceSeries {
  std::vector<double> t;
  std::vector<double> phi;    ///< |d/dt int phi - int R| per output interval
  std::vector<double> theta;  ///< |d/dt int theta - int S_f|
};

BalanceSeries balance_residuals(const Trajectory& traj);

/// Weighted inverse Laplacian pairings (-Delta_w^{-1} f, g) on zero-mean Galerkin coefficients.
/// Inputs with a nonzero mean coefficient are rejected with std::invalid_argument.
class DualNormContext {
public:
  DualNormContext(const ScalarBasis& basis, double m, double kappa);

  /// Constant weight: sum_{i>=2} f_i g_i / (w lambda_i).
  double pairing(const Vec& f, const Vec& g, double weight) const;
  /// Grid weight: dense solve of (w grad x, grad eta_j) = (f, eta_j) on the zero-mean modes.
  double pairing(const Vec& f, const Vec& g, const Vec& weight_on_grid) const;

  double mobility_norm_sq(const Vec& f) const { return pairing(f, f, m_); }
  double permeability_norm_sq(const Vec& f) const { return pairing(f, f, kappa_); }

  const ScalarBasis& basis() const { return *basis_; }

private:
  const ScalarBasis* basis_;
  double m_, kappa_;
};

/// Spectral (-Delta_w^{-1} f, f) for constant weight.
double inv_laplacian_pairing(const Vec& f, const ScalarBasis& basis, double weight);

/// Norm pieces of the perturbation estimates, all in coefficients.
double h1_norm_sq_scalar(const Vec& a, const ScalarBasis& basis);   ///< sum a_i^2 (1 + lambda_i)
double h1_dual_norm_sq(const Vec& b, const ScalarBasis& basis);     ///< sum b_i^2 / (1 + lambda_i)
double h1_norm_sq_vector(const Vec& c, const VectorBasis& basis);   ///< sum c_i^2 (1 + lambda_i)
double hdiv_dual_norm_sq(const Vec& e, const FluxBasis& basis);     ///< sum_{i>=2} e_i^2 / (lambda_i (1 + lambda_i))
double flux_l2_norm_sq(const Vec& e, const FluxBasis& basis, double kappa);  ///< kappa^-1 sum_{i>=2} e_i^2 / lambda_i

/// Difference state for the quadratic semi-norm.
struct StateDifference {
  Vec a, c, d;
};

/// gamma ell ||grad phi||^2 + (eps(u) - hat phi):C(eps(u) - hat phi) + M ||theta - alpha div u||^2 at constant laws.
double quadratic_seminorm(const StateDifference& diff, const Model& model);
/// (dE_quad(X1) - dE_quad(X2)) . (X1 - X2) from the assembled derivative vectors (double well excluded).
double quadratic_seminorm_from_derivatives(const StateDifference& x1, const StateDifference& x2, const Model& model);

}  // namespace chb
