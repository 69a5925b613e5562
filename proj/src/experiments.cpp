#include "chb/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace chb {

namespace {

/// Run f(i) for i in [0, n) with at most `threads` in flight; results keep their index.
template <class T, class F>
std::vector<T> run_indexed(int n, int threads, F f) {
  std::vector<T> out(static_cast<std::size_t>(n));
  const int width = std::max(1, threads);
  for (int start = 0; start < n; start += width) {
    const int stop = std::min(n, start + width);
    if (stop - start == 1) {
      out[static_cast<std::size_t>(start)] = f(start);
      continue;
    }
    std::vector<std::future<T>> batch;
    for (int i = start; i < stop; ++i) batch.push_back(std::async(std::launch::async, f, i));
    for (int i = start; i < stop; ++i) out[static_cast<std::size_t>(i)] = batch[static_cast<std::size_t>(i - start)].get();
  }
  return out;
}

Vec zero_mean(Vec v) {
  if (v.size() > 0) v[0] = 0.0;
  return v;
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

DissipationStudy dissipation_study(const ModelConfig& config, std::vector<double> dts, int threads) {
  if (dts.empty()) {
    double dt = config.time.dt;
    for (int i = 0; i < std::max(1, config.experiment.dt_levels); ++i, dt *= 0.5) dts.push_back(dt);
  }
  DissipationStudy study;
  study.levels = run_indexed<DissipationLevel>(static_cast<int>(dts.size()), threads, [&](int i) {
    ModelConfig cfg = config;
    cfg.time.dt = dts[static_cast<std::size_t>(i)];
    cfg.time.output_every = 1;
    DissipationLevel lvl;
    lvl.dt = cfg.time.dt;
    lvl.trajectory = run(cfg);
    lvl.complete = lvl.trajectory.complete;
    for (const TrajectoryPoint& p : lvl.trajectory.points)
      lvl.max_abs_residual = std::max(lvl.max_abs_residual, std::abs(p.record.identity_residual));
    lvl.max_energy_increase = -std::numeric_limits<double>::infinity();
    const std::vector<double>& e = lvl.trajectory.step_energy;
    for (std::size_t n = 1; n < e.size(); ++n) lvl.max_energy_increase = std::max(lvl.max_energy_increase, e[n] - e[n - 1]);
    return lvl;
  });
  std::vector<double> x, y;
  for (const DissipationLevel& l : study.levels) {
    x.push_back(l.dt);
    y.push_back(l.max_abs_residual);
  }
  study.fitted_order = loglog_slope(x, y);
  study.min_pair_order = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < x.size(); ++i)
    study.min_pair_order = std::min(study.min_pair_order, std::log(y[i - 1] / y[i]) / std::log(x[i - 1] / x[i]));
  return study;
}

const std::vector<std::string>& continuity_term_names() {
  static const std::vector<std::string> names{"sup_phi_dual", "sup_theta_dual", "int_phi_H1",    "int_mu_H1_dual",
                                              "int_theta_L2", "int_u_H1",       "int_q_Hdiv_dual", "sup_phi_L2",
                                              "int_mu_L2",    "sup_flux_integral"};
  return names;
}

PerturbationData make_perturbation(const std::string& kind, int k, std::uint64_t seed) {
  PerturbationData p;
  p.delta_a = Vec::Zero(k);
  p.delta_d = Vec::Zero(k);
  auto random_zero_mean = [&]() {
    Vec v = Vec::Zero(k);
    for (int i = 1; i < k; ++i) v[i] = counter_uniform(seed, static_cast<std::uint64_t>(i));
    const double n = v.norm();
    return n > 0.0 ? Vec(v / n) : v;
  };
  if (kind == "phi0") p.delta_a = random_zero_mean();
  else if (kind == "theta0") p.delta_d = random_zero_mean();
  else if (kind == "R") p.delta_R = 1.0;
  else if (kind == "S_f") p.delta_S_f = 1.0;
  else throw ConfigError(fmt::format("unknown perturbation '{}'", kind));
  return p;
}

Trajectory run_perturbed(const ModelConfig& config, const PerturbationData& unit, double epsilon) {
  ModelConfig cfg = config;
  cfg.sources.R += epsilon * unit.delta_R;
  cfg.sources.S_f += epsilon * unit.delta_S_f;
  const Model model(cfg);
  const SpectralBasisSet& b = model.bases();
  Vec phi0 = sample_initial_field(cfg.initial.phi, b, cfg.params);
  Vec theta0 = sample_initial_field(cfg.initial.theta, b, cfg.params);
  phi0 += epsilon * (b.scalar.value * unit.delta_a);
  theta0 += epsilon * (b.scalar.value * unit.delta_d);
  RestartPoint start;
  start.state = initial_coefficients(phi0, theta0, model);
  start.c_rate = Vec::Zero(model.size());
  start.flux_integral = Vec::Zero(model.size());
  return run(model, &start);
}

ContinuityLevel compare_pair(const Trajectory& base, const Trajectory& pert, const Model& model,
                             const PerturbationData& unit, double epsilon) {
  if (base.points.size() != pert.points.size()) throw NumericalError("perturbation pair has mismatched output times");
  const MaterialParams& p = model.params();
  const SpectralBasisSet& b = model.bases();
  const double m = p.mobility.value(0.0);
  const double kappa = p.permeability.value(0.0);
  const DualNormContext dual(b.scalar, m, kappa);
  const double area = b.scalar.domain.area();

  ContinuityLevel lvl;
  lvl.epsilon = epsilon;
  lvl.terms.assign(continuity_term_count, 0.0);
  std::vector<double> t;
  std::vector<std::vector<double>> integrands(continuity_term_count);
  // the dual norms act on zero-mean test functions and do not see the mean coefficient
  const Vec theta0_diff = zero_mean(pert.points.front().state.d - base.points.front().state.d);
  const double theta0_dual = dual.permeability_norm_sq(theta0_diff);
  double sup_theta_dual_so_far = 0.0;
  lvl.flux_bound_max_ratio = 0.0;
  for (std::size_t n = 0; n < base.points.size(); ++n) {
    const CoefficientState& s1 = pert.points[n].state;
    const CoefficientState& s2 = base.points[n].state;
    const Vec da = s1.a - s2.a, db = s1.b - s2.b, dc = s1.c - s2.c, dd = s1.d - s2.d, de = s1.e - s2.e;
    const double tn = s1.t;
    t.push_back(tn);
    const double phi_dual = dual.mobility_norm_sq(zero_mean(da));
    const double theta_dual = dual.permeability_norm_sq(zero_mean(dd));
    lvl.terms[sup_phi_dual] = std::max(lvl.terms[sup_phi_dual], phi_dual);
    lvl.terms[sup_theta_dual] = std::max(lvl.terms[sup_theta_dual], theta_dual);
    lvl.terms[sup_phi_L2] = std::max(lvl.terms[sup_phi_L2], da.squaredNorm());
    integrands[int_phi_H1].push_back(h1_norm_sq_scalar(da, b.scalar));
    integrands[int_mu_H1_dual].push_back(h1_dual_norm_sq(db, b.scalar));
    integrands[int_theta_L2].push_back(dd.squaredNorm());
    integrands[int_u_H1].push_back(h1_norm_sq_vector(dc, b.vector));
    integrands[int_q_Hdiv_dual].push_back(hdiv_dual_norm_sq(de, b.flux));
    integrands[int_mu_L2].push_back(db.squaredNorm());

    const Vec flux_int = pert.points[n].flux_integral - base.points[n].flux_integral;
    const double flux_lhs = flux_l2_norm_sq(flux_int, b.flux, kappa);
    lvl.terms[sup_flux_integral] = std::max(lvl.terms[sup_flux_integral], flux_lhs);
    sup_theta_dual_so_far = std::max(sup_theta_dual_so_far, theta_dual);
    const double dS = epsilon * unit.delta_S_f;
    const double flux_rhs = 3.0 * (tn * tn * dS * dS * area + sup_theta_dual_so_far + theta0_dual);
    if (flux_lhs > 0.0) {
      const double ratio = flux_rhs > 0.0 ? flux_lhs / flux_rhs : std::numeric_limits<double>::infinity();
      lvl.flux_bound_max_ratio = std::max(lvl.flux_bound_max_ratio, ratio);
      // rounding floor relative to the terms being compared
      if (flux_lhs > flux_rhs * (1.0 + 1e-9) + 1e-300) lvl.flux_bound_holds = false;
    }
  }
  for (int term : {int_phi_H1, int_mu_H1_dual, int_theta_L2, int_u_H1, int_q_Hdiv_dual, int_mu_L2})
    lvl.terms[term] = trapezoid(t, integrands[term]);
  for (int term = 0; term <= int_q_Hdiv_dual; ++term) lvl.lhs += lvl.terms[term];

  const double T = t.empty() ? 0.0 : t.back();
  const double dR = epsilon * unit.delta_R, dS = epsilon * unit.delta_S_f;
  const Vec phi0_diff = pert.points.front().state.a - base.points.front().state.a;
  const double i1 = integrate(b.scalar.quad.w, b.scalar.value.col(0));
  const double mean0 = phi0_diff[0] * i1 / area;
  // int_0^T |Omega| (mean0 + t dR)^2 dt in closed form
  const double mean_term = area * (mean0 * mean0 * T + mean0 * dR * T * T + dR * dR * T * T * T / 3.0);
  lvl.rhs = T * area * (dR * dR + dS * dS) + mean_term + phi0_diff.squaredNorm() + theta0_dual;
  lvl.ratio = lvl.rhs > 0.0 ? lvl.lhs / lvl.rhs : (lvl.lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  return lvl;
}

ContinuityStudy continuous_dependence_experiment(const ModelConfig& config, const std::string& perturbation,
                                                 const std::vector<double>& epsilons, int threads) {
  validate_assumptions(config.params, config.sources, ExperimentMode::continuity).raise_if_failed();
  const Model model(config);
  const PerturbationData unit = make_perturbation(perturbation, model.size(), config.experiment.perturbation_seed);
  const int n = static_cast<int>(epsilons.size());
  std::vector<Trajectory> runs = run_indexed<Trajectory>(n + 1, threads, [&](int i) {
    return run_perturbed(config, unit, i == 0 ? 0.0 : epsilons[static_cast<std::size_t>(i - 1)]);
  });
  for (const Trajectory& tr : runs)
    if (!tr.complete) throw NumericalError(fmt::format("perturbation run failed: {}", tr.error));

  ContinuityStudy study;
  study.perturbation = perturbation;
  for (int i = 0; i < n; ++i)
    study.levels.push_back(compare_pair(runs[0], runs[static_cast<std::size_t>(i + 1)], model, unit, epsilons[static_cast<std::size_t>(i)]));

  std::vector<double> eps2;
  for (double e : epsilons) eps2.push_back(e * e);
  for (int term = 0; term < continuity_term_count; ++term) {
    std::vector<double> y;
    for (const ContinuityLevel& l : study.levels) y.push_back(l.terms[static_cast<std::size_t>(term)]);
    study.slopes.push_back(loglog_slope(eps2, y));
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const ContinuityLevel& l : study.levels) {
    lo = std::min(lo, l.ratio);
    hi = std::max(hi, l.ratio);
  }
  study.ratio_spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  return study;
}

}  // namespace chb
