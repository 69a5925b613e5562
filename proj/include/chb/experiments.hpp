#pragma once

#include "chb/diagnostics.hpp"

#include <string>
#include <vector>

namespace chb {

struct DissipationLevel {
  double dt = 0.0;
  double max_abs_residual = 0.0;     ///< max over output points of |identity residual|
  double max_energy_increase = 0.0;  ///< max over steps of E(t_{n+1}) - E(t_n)
  bool complete = true;
  Trajectory trajectory;
};

struct DissipationStudy {
  std::vector<DissipationLevel> levels;
  double fitted_order = 0.0;    ///< least-squares slope of log max|r| against log dt
  double min_pair_order = 0.0;  ///< smallest order between consecutive levels
};

/// Energy identity under a dt sweep. Empty dts means dt, dt/2, ... over experiment.dt_levels.
DissipationStudy dissipation_study(const ModelConfig& config, std::vector<double> dts = {}, int threads = 1);

/// Left-hand side terms of the perturbation estimates, in output order.
enum ContinuityTerm {
  sup_phi_dual,      ///< sup ||phi~||^2 in the m-weighted dual norm
  sup_theta_dual,    ///< sup ||theta~||^2 in the kappa-weighted dual norm
  int_phi_H1,
  int_mu_H1_dual,
  int_theta_L2,
  int_u_H1,
  int_q_Hdiv_dual,
  sup_phi_L2,        ///< stronger phase-field norm
  int_mu_L2,         ///< stronger chemical potential norm
  sup_flux_integral, ///< sup ||kappa^-1/2 int q~||^2
  continuity_term_count
};

const std::vector<std::string>& continuity_term_names();

struct ContinuityLevel {
  double epsilon = 0.0;
  std::vector<double> terms;  ///< indexed by ContinuityTerm
  double lhs = 0.0;           ///< sum of the first seven terms
  double rhs = 0.0;           ///< data side with unit constant
  double ratio = 0.0;         ///< lhs / rhs
  bool flux_bound_holds = true;   ///< flux-integral bound with constant 3 at every output time
  double flux_bound_max_ratio = 0.0;
};

struct ContinuityStudy {
  std::string perturbation;
  std::vector<ContinuityLevel> levels;
  std::vector<double> slopes;  ///< per term, fitted log-log slope against epsilon^2
  double ratio_spread = 0.0;   ///< max / min of lhs / rhs across the sweep
};

/// Pair of initial states (base, perturbed) or data sets for one perturbation kind.
struct PerturbationData {
  Vec delta_a;   ///< added to the initial phase-field coefficients
  Vec delta_d;   ///< added to the initial fluid-content coefficients
  double delta_R = 0.0;
  double delta_S_f = 0.0;
};

/// Unit-size perturbation: zero-mean random coefficients of unit L2 norm for phi0 / theta0, unit constant for R / S_f.
PerturbationData make_perturbation(const std::string& kind, int k, std::uint64_t seed);

/// Compare the base run with a run perturbed by epsilon * perturbation.
ContinuityLevel compare_pair(const Trajectory& base, const Trajectory& perturbed, const Model& model,
                             const PerturbationData& unit, double epsilon);

/// Run the base configuration and one perturbed run per epsilon (concurrently, up to `threads`).
ContinuityStudy continuous_dependence_experiment(const ModelConfig& config, const std::string& perturbation,
                                                 const std::vector<double>& epsilons, int threads = 1);

/// Run a configuration from initial coefficients shifted by the given perturbation.
Trajectory run_perturbed(const ModelConfig& config, const PerturbationData& unit, double epsilon);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace chb
