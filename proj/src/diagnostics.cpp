#include "chb/diagnostics.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace chb {

const std::vector<std::string>& DiagnosticsRecord::columns() {
  static const std::vector<std::string> cols{
      "t",           "E_total",       "E_i",           "E_e",            "E_f",
      "D_mu",        "D_q",           "D_visc",        "W_R",            "W_f",
      "W_S",         "identity_residual", "balance_phi", "balance_theta", "phi_integral",
      "theta_integral", "psi_L1",     "phi_H1_sq",     "u_H1_sq",        "theta_L2_sq",
      "grad_mu_sq",  "q_L2_sq",       "mu_H1_sq",      "int_visc",       "int_grad_mu_sq",
      "int_q_sq",    "int_mu_H1_sq",  "finite"};
  return cols;
}

std::vector<double> DiagnosticsRecord::values() const {
  return {t,           E_total,        E_i,       E_e,         E_f,          D_mu,           D_q,
          D_visc,      W_R,            W_f,       W_S,         identity_residual, balance_phi, balance_theta,
          phi_integral, theta_integral, psi_L1,   phi_H1_sq,   u_H1_sq,      theta_L2_sq,    grad_mu_sq,
          q_L2_sq,     mu_H1_sq,       int_visc,  int_grad_mu_sq, int_q_sq,  int_mu_H1_sq,   finite ? 1.0 : 0.0};
}

namespace {

double mean_mode_integral(const ScalarBasis& basis) { return integrate(basis.quad.w, basis.value.col(0)); }

void require_zero_mean(const Vec& f) {
  if (f.size() == 0) return;
  if (std::abs(f[0]) > 1e-12 * std::max(1.0, f.norm()))
    throw std::invalid_argument(fmt::format("dual norm input has nonzero mean coefficient {}", f[0]));
}

}  // namespace

DiagnosticsRecord make_record(const Model& model, const CoefficientState& st, const Vec& c_rate) {
  const MaterialParams& p = model.params();
  const SpectralBasisSet& bases = model.bases();
  const Assembler& as = model.assembler();
  const FieldSnapshot s = full_snapshot(st, bases, p);

  DiagnosticsRecord r;
  r.t = st.t;
  r.E_i = energy_interface(s, p);
  r.E_e = energy_elastic(s, p);
  r.E_f = energy_fluid(s, p);
  r.E_total = r.E_i + r.E_e + r.E_f;

  r.D_mu = st.b.dot(as.mobility_stiffness(st.a) * st.b);
  r.D_q = st.e.dot(as.flux_mass(st.a) * st.e);
  r.D_visc = p.eta * c_rate.dot(as.viscous_matrix() * c_rate);
  r.W_R = as.r_hat().dot(st.b);
  r.W_f = as.f_hat().dot(c_rate);
  r.W_S = as.s_hat().dot(pressure_coefficients(st.a, st.c, st.d, bases, p));

  const double i1 = mean_mode_integral(bases.scalar);
  r.phi_integral = st.a[0] * i1;
  r.theta_integral = st.d[0] * i1;

  Vec psi(s.size());
  for (int q = 0; q < s.size(); ++q) psi[q] = double_well(s.phi[q]);
  r.psi_L1 = integrate(s.w, psi);
  const Vec& lam = bases.scalar.lambda;
  r.phi_H1_sq = h1_norm_sq_scalar(st.a, bases.scalar);
  r.u_H1_sq = h1_norm_sq_vector(st.c, bases.vector);
  r.theta_L2_sq = st.d.squaredNorm();
  r.grad_mu_sq = st.b.cwiseAbs2().dot(lam);
  r.q_L2_sq = flux_l2_norm_sq(st.e, bases.flux, 1.0);
  r.mu_H1_sq = h1_norm_sq_scalar(st.b, bases.scalar);

  const std::vector<double> v = r.values();
  for (double x : v) r.finite = r.finite && std::isfinite(x);
  return r;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) acc += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  return acc;
}

void finalize_records(std::vector<TrajectoryPoint>& points, const Model& model) {
  if (points.empty()) return;
  const SourceTerms& src = model.assembler().sources();
  const double area = model.bases().scalar.domain.area();
  auto dissipation = [](const DiagnosticsRecord& r) { return r.D_visc + r.D_mu + r.D_q; };
  auto work = [](const DiagnosticsRecord& r) { return r.W_R + r.W_f + r.W_S; };

  DiagnosticsRecord& r0 = points.front().record;
  r0.identity_residual = 0.0;
  r0.balance_phi = r0.balance_theta = 0.0;
  r0.int_visc = r0.int_grad_mu_sq = r0.int_q_sq = r0.int_mu_H1_sq = 0.0;
  double int_d = 0.0, int_w = 0.0;
  for (std::size_t n = 1; n < points.size(); ++n) {
    const DiagnosticsRecord& prev = points[n - 1].record;
    DiagnosticsRecord& r = points[n].record;
    const double h = r.t - prev.t;
    auto trap = [h](double x0, double x1) { return 0.5 * h * (x0 + x1); };
    int_d += trap(dissipation(prev), dissipation(r));
    int_w += trap(work(prev), work(r));
    r.identity_residual = r.E_total + int_d - r0.E_total - int_w;
    r.int_visc = prev.int_visc + trap(prev.D_visc, r.D_visc);
    r.int_grad_mu_sq = prev.int_grad_mu_sq + trap(prev.grad_mu_sq, r.grad_mu_sq);
    r.int_q_sq = prev.int_q_sq + trap(prev.q_L2_sq, r.q_L2_sq);
    r.int_mu_H1_sq = prev.int_mu_H1_sq + trap(prev.mu_H1_sq, r.mu_H1_sq);
    if (h > 0.0) {
      r.balance_phi = std::abs((r.phi_integral - prev.phi_integral) / h - src.R * area);
      r.balance_theta = std::abs((r.theta_integral - prev.theta_integral) / h - src.S_f * area);
    }
    r.finite = r.finite && std::isfinite(r.identity_residual);
  }
}

std::vector<double> energy_identity_residual(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.points.size());
  for (const TrajectoryPoint& p : traj.points) out.push_back(p.record.identity_residual);
  return out;
}

AprioriMonitor apriori_monitor(const Trajectory& traj) {
  AprioriMonitor m;
  for (const TrajectoryPoint& p : traj.points) {
    const DiagnosticsRecord& r = p.record;
    m.sup_psi_L1 = std::max(m.sup_psi_L1, r.psi_L1);
    m.sup_phi_H1_sq = std::max(m.sup_phi_H1_sq, r.phi_H1_sq);
    m.sup_u_H1_sq = std::max(m.sup_u_H1_sq, r.u_H1_sq);
    m.sup_theta_L2_sq = std::max(m.sup_theta_L2_sq, r.theta_L2_sq);
    m.finite = m.finite && r.finite;
  }
  if (!traj.points.empty()) {
    const DiagnosticsRecord& last = traj.points.back().record;
    m.int_visc = last.int_visc;
    m.int_grad_mu_sq = last.int_grad_mu_sq;
    m.int_q_sq = last.int_q_sq;
    m.int_mu_H1_sq = last.int_mu_H1_sq;
  }
  for (double x : {m.sup_psi_L1, m.sup_phi_H1_sq, m.sup_u_H1_sq, m.sup_theta_L2_sq, m.int_visc, m.int_grad_mu_sq,
                   m.int_q_sq, m.int_mu_H1_sq})
    m.finite = m.finite && std::isfinite(x);
  return m;
}

BalanceSeries balance_residuals(const Trajectory& traj) {
  BalanceSeries b;
  for (const TrajectoryPoint& p : traj.points) {
    b.t.push_back(p.record.t);
    b.phi.push_back(p.record.balance_phi);
    b.theta.push_back(p.record.balance_theta);
  }
  return b;
}

DualNormContext::DualNormContext(const ScalarBasis& basis, double m, double kappa) : basis_(&basis), m_(m), kappa_(kappa) {
  if (!(m > 0.0) || !(kappa > 0.0)) throw std::invalid_argument("dual norm weights must be positive");
}

double DualNormContext::pairing(const Vec& f, const Vec& g, double weight) const {
  require_zero_mean(f);
  require_zero_mean(g);
  const Vec& lam = basis_->lambda;
  double acc = 0.0;
  for (int i = 1; i < f.size(); ++i) acc += f[i] * g[i] / (weight * lam[i]);
  return acc;
}

double DualNormContext::pairing(const Vec& f, const Vec& g, const Vec& weight_on_grid) const {
  require_zero_mean(f);
  require_zero_mean(g);
  const Eigen::Index n = f.size() - 1;
  if (n <= 0) return 0.0;
  const Vec wt = basis_->quad.w.cwiseProduct(weight_on_grid);
  const Mat A = weighted_gram(basis_->grad_x, wt) + weighted_gram(basis_->grad_y, wt);
  Eigen::LLT<Mat> llt(A.bottomRightCorner(n, n));
  if (llt.info() != Eigen::Success) throw NumericalError("weighted stiffness is not positive definite");
  return g.tail(n).dot(llt.solve(f.tail(n)));
}

double inv_laplacian_pairing(const Vec& f, const ScalarBasis& basis, double weight) {
  return DualNormContext(basis, weight, weight).pairing(f, f, weight);
}

double h1_norm_sq_scalar(const Vec& a, const ScalarBasis& basis) {
  return a.cwiseAbs2().dot((basis.lambda.array() + 1.0).matrix());
}

double h1_dual_norm_sq(const Vec& b, const ScalarBasis& basis) {
  return b.cwiseAbs2().dot((basis.lambda.array() + 1.0).inverse().matrix());
}

double h1_norm_sq_vector(const Vec& c, const VectorBasis& basis) {
  return c.cwiseAbs2().dot((basis.lambda.array() + 1.0).matrix());
}

double hdiv_dual_norm_sq(const Vec& e, const FluxBasis& basis) {
  double acc = 0.0;
  for (int i = 1; i < e.size(); ++i) acc += e[i] * e[i] / (basis.lambda[i] * (1.0 + basis.lambda[i]));
  return acc;
}

double flux_l2_norm_sq(const Vec& e, const FluxBasis& basis, double kappa) {
  double acc = 0.0;
  for (int i = 1; i < e.size(); ++i) acc += e[i] * e[i] / basis.lambda[i];
  return acc / kappa;
}

double quadratic_seminorm(const StateDifference& diff, const Model& model) {
  const MaterialParams& p = model.params();
  const SpectralBasisSet& bases = model.bases();
  const FieldSnapshot s = light_snapshot(diff.a, diff.c, diff.d, bases);
  const Sym2 hat = p.eigenstrain.slope();
  Vec el(s.size()), fl(s.size());
  for (int q = 0; q < s.size(); ++q) {
    const Sym2 r = s.strain(q) - hat * s.phi[q];
    el[q] = r.dot(p.stiffness_apply(s.phi[q], r));
    const double z = s.theta[q] - p.biot_willis.value(s.phi[q]) * s.div_u[q];
    fl[q] = p.biot_modulus.value(s.phi[q]) * z * z;
  }
  const double grad = diff.a.cwiseAbs2().dot(bases.scalar.lambda);
  return p.gamma * p.ell * grad + integrate(s.w, el) + integrate(s.w, fl);
}

double quadratic_seminorm_from_derivatives(const StateDifference& x1, const StateDifference& x2, const Model& model) {
  const MaterialParams& p = model.params();
  const SpectralBasisSet& bases = model.bases();
  const Assembler& as = model.assembler();
  auto gradient = [&](const StateDifference& x) {
    const PhaseVectors pv = as.phase_vectors(x.a, x.c, x.d);
    const ElasticSystem el = as.elastic_system(x.a, x.d);
    StateDifference g;
    g.a = p.gamma * p.ell * bases.scalar.lambda.cwiseProduct(x.a) + pv.E_dphi_e + pv.E_dphi_f;
    g.c = (el.E_eps + el.F_eps) * x.c - el.t_eps + el.u_eps;
    g.d = pressure_coefficients(x.a, x.c, x.d, bases, p);
    return g;
  };
  const StateDifference g1 = gradient(x1), g2 = gradient(x2);
  return (g1.a - g2.a).dot(x1.a - x2.a) + (g1.c - g2.c).dot(x1.c - x2.c) + (g1.d - g2.d).dot(x1.d - x2.d);
}

}  // namespace chb
