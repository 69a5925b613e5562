#pragma once

#include <string>
#include <vector>

namespace chb {

/// Per-output-time energies, dissipation and work rates, residuals and monitor quantities.
/// Rates are instantaneous; the int_* fields are trapezoid integrals from t = 0.
struct DiagnosticsRecord {
  double t = 0.0;
  double E_total = 0.0, E_i = 0.0, E_e = 0.0, E_f = 0.0;
  double D_mu = 0.0;    ///< ||m^1/2 grad mu||^2
  double D_q = 0.0;     ///< ||kappa^-1/2 q||^2
  double D_visc = 0.0;  ///< eta ||d_t div u||^2
  double W_R = 0.0;     ///< (R, mu)
  double W_f = 0.0;     ///< <f, d_t u>
  double W_S = 0.0;     ///< (S_f, Pi p)
  double identity_residual = 0.0;
  double balance_phi = 0.0;    ///< |d/dt int phi - int R| over the preceding interval
  double balance_theta = 0.0;  ///< |d/dt int theta - int S_f|
  double phi_integral = 0.0;
  double theta_integral = 0.0;
  double psi_L1 = 0.0;
  double phi_H1_sq = 0.0;
  double u_H1_sq = 0.0;
  double theta_L2_sq = 0.0;
  double grad_mu_sq = 0.0;
  double q_L2_sq = 0.0;
  double mu_H1_sq = 0.0;
  double int_visc = 0.0;
  double int_grad_mu_sq = 0.0;
  double int_q_sq = 0.0;
  double int_mu_H1_sq = 0.0;
  bool finite = true;

  /// Column names of the time-series CSV, in output order.
  static const std::vector<std::string>& columns();
  /// Values in the order of columns().
  std::vector<double> values() const;
};

}  // namespace chb
