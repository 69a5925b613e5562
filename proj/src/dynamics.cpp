#include "chb/dynamics.hpp"

#include "chb/diagnostics.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace chb {

namespace {

Eigen::Index active(int k) { return k - 1; }

Eigen::LLT<Mat> spd_factor(const Mat& m, const char* what) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError(fmt::format("{} is not symmetric positive definite", what));
  return llt;
}

/// max over the grid of T':C(phi)T', the phi-curvature of the elastic energy for constant C and affine T.
double elastic_curvature(const FieldSnapshot& s, const MaterialParams& p) {
  const Sym2 tp = p.eigenstrain.slope();
  double h = 0.0;
  for (int q = 0; q < s.size(); ++q) h = std::max(h, tp.dot(p.stiffness_apply(s.phi[q], tp)));
  return h;
}

void require_finite(const CoefficientState& s) {
  if (!s.a.allFinite() || !s.c.allFinite() || !s.d.allFinite())
    throw NumericalError(fmt::format("non-finite state at t = {}", s.t));
}

}  // namespace

Model::Model(ModelConfig config) : config_(std::move(config)) {
  bases_ = std::make_shared<const SpectralBasisSet>(build_bases(config_.domain, config_.k));
  assembler_ = std::make_unique<Assembler>(bases_, config_.params, config_.sources);
}

double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z = z ^ (z >> 31);
  return 2.0 * (static_cast<double>(z >> 11) * 0x1.0p-53) - 1.0;
}

Vec sample_initial_field(const FieldInit& init, const SpectralBasisSet& bases, const MaterialParams& params) {
  const Quadrature& quad = bases.quad();
  const RectDomain& dom = bases.scalar.domain;
  const int n = quad.size();
  Vec f = Vec::Constant(n, init.mean);
  constexpr double pi = std::numbers::pi;
  if (init.kind == "constant") {
    return f;
  } else if (init.kind == "noise") {
    const int k = bases.size();
    Vec coef = Vec::Zero(k);
    for (int i = 1; i < k; ++i) coef[i] = counter_uniform(init.seed, static_cast<std::uint64_t>(i));
    f += init.amplitude * std::sqrt(dom.area()) * (bases.scalar.value * coef);
  } else if (init.kind == "cosine") {
    for (int q = 0; q < n; ++q)
      f[q] += init.amplitude * std::cos(init.mode[0] * pi * quad.x[q] / dom.lx) *
              std::cos(init.mode[1] * pi * quad.y[q] / dom.ly);
  } else if (init.kind == "disk") {
    const double width = std::sqrt(2.0) * params.ell;
    for (int q = 0; q < n; ++q) {
      const double r = std::hypot(quad.x[q] - 0.5 * dom.lx, quad.y[q] - 0.5 * dom.ly);
      f[q] += init.amplitude * std::tanh((init.radius - r) / width);
    }
  } else {
    throw ConfigError(fmt::format("unknown initial field kind '{}'", init.kind));
  }
  return f;
}

CoefficientState initial_coefficients(const Vec& phi0, const Vec& theta0, const Model& model) {
  const SpectralBasisSet& b = model.bases();
  if (!phi0.allFinite() || !theta0.allFinite()) throw ValidationError("(A6)", "initial data is not finite");
  CoefficientState s;
  s.t = 0.0;
  s.a = project_scalar(phi0, b.scalar);
  s.d = project_scalar(theta0, b.scalar);
  // the natural initial displacement minimizes the energy for the given (phi, theta)
  const ElasticSystem el = model.assembler().elastic_system(s.a, s.d);
  s.c = spd_factor(el.E_eps + el.F_eps, "E_eps + F_eps").solve(el.rhs);
  s.b = eliminate_chemical_potential(s.a, s.c, s.d, model);
  s.e = eliminate_flux(s.a, s.c, s.d, model);
  return s;
}

Vec eliminate_chemical_potential(const Vec& a, const Vec& c, const Vec& d, const Model& model) {
  const MaterialParams& p = model.params();
  const PhaseVectors pv = model.assembler().phase_vectors(a, c, d);
  const Vec& lambda = model.bases().scalar.lambda;
  return p.gamma * p.ell * lambda.cwiseProduct(a) + (p.gamma / p.ell) * pv.psi_prime + pv.E_dphi_e + pv.E_dphi_f;
}

Vec eliminate_flux(const Vec& a, const Vec& c, const Vec& d, const Model& model) {
  const int k = model.size();
  Vec e = Vec::Zero(k);
  if (k == 1) return e;
  const FluxSystem fs = model.assembler().flux_system(a, c, d);
  const Eigen::Index n = active(k);
  e.tail(n) = spd_factor(fs.M_kqq.bottomRightCorner(n, n), "M_kqq").solve(fs.E_dtheta_f.tail(n));
  return e;
}

Vec solve_elasticity(const Vec& a, const Vec& d, const Model& model, const Vec& c_prev, double dt, double eta) {
  const ElasticSystem el = model.assembler().elastic_system(a, d);
  Mat K = el.E_eps + el.F_eps;
  Vec rhs = el.rhs;
  if (eta > 0.0) {
    K += (eta / dt) * el.C_eps;
    rhs += (eta / dt) * (el.C_eps * c_prev);
  }
  return spd_factor(K, "elasticity system").solve(rhs);
}

Vec solve_elasticity_spectral(const Vec& a, const Vec& d, const Model& model, const Vec& c_prev, double dt,
                              double eta) {
  const ElasticSystem el = model.assembler().elastic_system(a, d);
  Eigen::SelfAdjointEigenSolver<Mat> eig(el.C_eps);
  const Vec& D = eig.eigenvalues();
  const Mat& Q = eig.eigenvectors();
  const double tol = 1e-13 * std::max(D.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<int> pos, ker;
  for (int i = 0; i < D.size(); ++i) (D[i] > tol ? pos : ker).push_back(i);
  const Mat K = Q.transpose() * (el.E_eps + el.F_eps) * Q;
  const Vec g = Q.transpose() * el.rhs;
  const Vec x_prev = Q.transpose() * c_prev;
  const auto np = static_cast<Eigen::Index>(pos.size());
  const auto nk = static_cast<Eigen::Index>(ker.size());
  Mat Kpp = K(pos, pos);
  Vec gp = g(pos);
  if (eta > 0.0) {
    for (Eigen::Index i = 0; i < np; ++i) {
      Kpp(i, i) += eta / dt * D[pos[i]];
      gp[i] += eta / dt * D[pos[i]] * x_prev[pos[i]];
    }
  }
  Vec x = Vec::Zero(D.size());
  if (nk == 0) {
    const Vec xp = spd_factor(Kpp, "volumetric block").solve(gp);
    x(pos) = xp;
  } else {
    // kernel (algebraic, deviatoric) block eliminated through its Schur complement
    const Mat Kpk = K(pos, ker);
    const auto kk = spd_factor(K(ker, ker), "kernel block");
    const Mat S = Kpp - Kpk * kk.solve(Kpk.transpose());
    const Vec gk = g(ker);
    const Vec xp = np > 0 ? Vec(spd_factor(0.5 * (S + S.transpose()), "Schur complement").solve(gp - Kpk * kk.solve(gk)))
                          : Vec(Vec::Zero(0));
    x(pos) = xp;
    const Vec xk = kk.solve(gk - Kpk.transpose() * xp);
    x(ker) = xk;
  }
  return Q * x;
}

StepResult step_semi_implicit(const CoefficientState& st, double dt, const Model& model) {
  const Assembler& as = model.assembler();
  const MaterialParams& p = model.params();
  const SpectralBasisSet& bases = model.bases();
  const int k = model.size();
  const Eigen::Index n = active(k);
  const Vec& lambda = bases.scalar.lambda;

  // (i) mobility and curvature shifts frozen at the current state
  const Mat Am = as.mobility_stiffness(st.a);
  const Vec b_explicit = eliminate_chemical_potential(st.a, st.c, st.d, model);
  const double sigma =
      p.gamma / p.ell * model.config().time.stabilization + elastic_curvature(light_snapshot(st.a, st.c, st.d, bases), p);

  // (ii) linear Cahn-Hilliard core; the mean mode only sees the source
  Vec a_new = st.a;
  a_new[0] += dt * as.r_hat()[0];
  if (n > 0) {
    const Mat Aa = Am.bottomRightCorner(n, n);
    Vec diag = p.gamma * p.ell * lambda.tail(n);
    diag.array() += sigma;
    Mat L = Mat::Identity(n, n) + dt * Aa * diag.asDiagonal();
    const Vec rhs = dt * (as.r_hat().tail(n) - Aa * b_explicit.tail(n));
    a_new.tail(n) += L.partialPivLu().solve(rhs);
  }

  // (iii) displacement at the new phase field
  const Vec c_new = solve_elasticity(a_new, st.d, model, st.c, dt, p.eta);

  // (iv) fluid content, implicit in theta through the eliminated flux (div q_i = eta_i, i >= 2)
  Vec d_new = st.d;
  d_new[0] += dt * as.s_hat()[0];
  if (n > 0) {
    const FieldSnapshot s = light_snapshot(a_new, c_new, Vec::Zero(k), bases);
    Vec wm(s.size()), wg(s.size());
    for (int q = 0; q < s.size(); ++q) {
      const double m = p.biot_modulus.value(s.phi[q]);
      wm[q] = s.w[q] * m;
      wg[q] = s.w[q] * m * p.biot_willis.value(s.phi[q]) * s.div_u[q];
    }
    const Mat P = weighted_gram(bases.scalar.value, wm);
    const Vec g = bases.scalar.value.transpose() * wg;
    const Mat Mk = as.flux_mass(a_new).bottomRightCorner(n, n);
    const Mat lhs = Mk + dt * P.bottomRightCorner(n, n);
    const Vec rhs = Mk * (st.d.tail(n) + dt * as.s_hat().tail(n)) - dt * (P.bottomLeftCorner(n, 1) * d_new[0] - g.tail(n));
    d_new.tail(n) = spd_factor(0.5 * (lhs + lhs.transpose()), "fluid-content system").solve(rhs);
  }

  // (v) recover the eliminated variables
  StepResult r;
  r.state.t = st.t + dt;
  r.state.a = a_new;
  r.state.c = c_new;
  r.state.d = d_new;
  r.state.b = eliminate_chemical_potential(a_new, c_new, d_new, model);
  r.state.e = eliminate_flux(a_new, c_new, d_new, model);
  r.c_rate = (c_new - st.c) / dt;
  r.flux_increment = dt * r.state.e;
  require_finite(r.state);
  return r;
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  int iterations = 0;
  Vec X;
};

NewtonOutcome newton_solve(const CoefficientState& st, double dt, const Model& model) {
  const Assembler& as = model.assembler();
  const MaterialParams& p = model.params();
  const TimeSettings& ts = model.config().time;
  const int k = model.size();
  const Mat& B = as.divergence_coupling();

  auto residual = [&](const Vec& X) {
    const Vec a = X.segment(0, k), c = X.segment(k, k), d = X.segment(2 * k, k);
    Vec F(3 * k);
    const Vec b = eliminate_chemical_potential(a, c, d, model);
    F.segment(0, k) = a - st.a + dt * (as.mobility_stiffness(a) * b - as.r_hat());
    const ElasticSystem el = as.elastic_system(a, d);
    Vec Fc = (el.E_eps + el.F_eps) * c - el.rhs;
    if (p.eta > 0.0) Fc += (p.eta / dt) * (el.C_eps * (c - st.c));
    F.segment(k, k) = Fc;
    const Vec e = eliminate_flux(a, c, d, model);
    F.segment(2 * k, k) = d - st.d + dt * (B * e - as.s_hat());
    return F;
  };

  NewtonOutcome out;
  out.X.resize(3 * k);
  out.X << st.a, st.c, st.d;
  Vec F = residual(out.X);
  for (int it = 1; it <= ts.newton_max_iter; ++it) {
    out.iterations = it;
    if (!F.allFinite()) return out;
    if (F.cwiseAbs().maxCoeff() < ts.newton_tol) {
      out.converged = true;
      return out;
    }
    Mat J(3 * k, 3 * k);
    for (int j = 0; j < 3 * k; ++j) {
      Vec Xh = out.X;
      const double h = 1e-7 * std::max(1.0, std::abs(Xh[j]));
      Xh[j] += h;
      J.col(j) = (residual(Xh) - F) / h;
    }
    out.X -= J.partialPivLu().solve(F);
    F = residual(out.X);
  }
  out.converged = F.allFinite() && F.cwiseAbs().maxCoeff() < ts.newton_tol;
  return out;
}

StepResult newton_step(const CoefficientState& st, double dt, const Model& model, int depth) {
  const int k = model.size();
  const NewtonOutcome no = newton_solve(st, dt, model);
  if (no.converged) {
    StepResult r;
    r.state.t = st.t + dt;
    r.state.a = no.X.segment(0, k);
    r.state.c = no.X.segment(k, k);
    r.state.d = no.X.segment(2 * k, k);
    r.state.b = eliminate_chemical_potential(r.state.a, r.state.c, r.state.d, model);
    r.state.e = eliminate_flux(r.state.a, r.state.c, r.state.d, model);
    r.c_rate = (r.state.c - st.c) / dt;
    r.flux_increment = dt * r.state.e;
    r.iterations = no.iterations;
    return r;
  }
  if (depth >= model.config().time.max_halvings)
    throw NumericalError(fmt::format("Newton failed to converge at t = {} with dt = {}", st.t, dt));
  const StepResult r1 = newton_step(st, 0.5 * dt, model, depth + 1);
  StepResult r2 = newton_step(r1.state, 0.5 * dt, model, depth + 1);
  r2.c_rate = (r2.state.c - st.c) / dt;
  r2.flux_increment += r1.flux_increment;
  r2.iterations += r1.iterations;
  r2.halvings += r1.halvings + 1;
  return r2;
}

}  // namespace

StepResult step_implicit_newton(const CoefficientState& st, double dt, const Model& model) {
  StepResult r = newton_step(st, dt, model, 0);
  r.state.t = st.t + dt;
  require_finite(r.state);
  return r;
}

long step_count(const TimeSettings& ts) {
  if (ts.t_final <= 0.0) return 0;
  return static_cast<long>(std::ceil(ts.t_final / ts.dt - 1e-9));
}

double step_time(const TimeSettings& ts, long n) {
  const long total = step_count(ts);
  if (n >= total) return ts.t_final;
  return static_cast<double>(n) * ts.dt;
}

Trajectory run(const ModelConfig& config) {
  const Model model(config);
  return run(model);
}

Trajectory run(const Model& model, const RestartPoint* start) {
  const ModelConfig& cfg = model.config();
  const TimeSettings& ts = cfg.time;
  const int k = model.size();
  Trajectory traj;

  TrajectoryPoint cur;
  if (start) {
    cur.step = start->step;
    cur.state = start->state;
    cur.state.b = eliminate_chemical_potential(cur.state.a, cur.state.c, cur.state.d, model);
    cur.state.e = eliminate_flux(cur.state.a, cur.state.c, cur.state.d, model);
    cur.c_rate = start->c_rate;
    cur.flux_integral = start->flux_integral;
  } else {
    const Vec phi0 = sample_initial_field(cfg.initial.phi, model.bases(), cfg.params);
    const Vec theta0 = sample_initial_field(cfg.initial.theta, model.bases(), cfg.params);
    cur.state = initial_coefficients(phi0, theta0, model);
    cur.c_rate = Vec::Zero(k);
    cur.flux_integral = Vec::Zero(k);
  }
  traj.points.push_back(cur);
  const bool rate_from_first_step = !start || start->step == 0;

  auto energy_of = [&](const CoefficientState& s) {
    return total_energy(light_snapshot(s.a, s.c, s.d, model.bases()), cfg.params);
  };
  traj.step_t.push_back(cur.state.t);
  traj.step_energy.push_back(energy_of(cur.state));

  const long total = step_count(ts);
  const int every = std::max(1, ts.output_every);
  for (long n = cur.step; n < total; ++n) {
    const double t_next = step_time(ts, n + 1);
    const double dt = t_next - step_time(ts, n);
    StepResult r;
    try {
      r = ts.integrator == Integrator::semi_implicit ? step_semi_implicit(cur.state, dt, model)
                                                      : step_implicit_newton(cur.state, dt, model);
    } catch (const NumericalError& err) {
      traj.complete = false;
      traj.error = err.what();
      break;
    }
    cur.step = n + 1;
    cur.state = r.state;
    cur.state.t = t_next;
    cur.c_rate = r.c_rate;
    cur.flux_integral += r.flux_increment;
    if (n == 0 && rate_from_first_step) traj.points.front().c_rate = r.c_rate;
    traj.step_t.push_back(t_next);
    traj.step_energy.push_back(energy_of(cur.state));
    if ((n + 1) % every == 0 || n + 1 == total) traj.points.push_back(cur);
  }
  if (!traj.complete && traj.points.back().step != cur.step) traj.points.push_back(cur);

  for (TrajectoryPoint& pt : traj.points) pt.record = make_record(model, pt.state, pt.c_rate);
  finalize_records(traj.points, model);
  traj.terminal = full_snapshot(traj.points.back().state, model.bases(), cfg.params);
  return traj;
}

}  // namespace chb
