#include "chb/acceptance.hpp"

#include "chb/config.hpp"
#include "chb/diagnostics.hpp"
#include "chb/experiments.hpp"
#include "chb/output.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace chb {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

Vec random_vec(int n, std::uint64_t seed, double amp, bool decay) {
  Vec v(n);
  for (int i = 0; i < n; ++i)
    v[i] = amp * counter_uniform(seed, static_cast<std::uint64_t>(i)) / (decay ? static_cast<double>(i + 1) : 1.0);
  return v;
}

Vec zero_mean_random(int n, std::uint64_t seed) {
  Vec v = random_vec(n, seed, 1.0, false);
  v[0] = 0.0;
  return v;
}

/// Every coefficient law state dependent, swelling eigenstrain.
MaterialParams nonlinear_params() {
  MaterialParams p;
  p.gamma = 1.0;
  p.ell = 0.2;
  p.mobility = ScalarLaw::affine(1.0, 0.2, 0.5, 2.0);
  p.permeability = ScalarLaw::sigmoid(0.5, 1.5, 0.5);
  p.biot_modulus = ScalarLaw::affine(1.0, 0.2, 0.5, 2.0);
  p.biot_willis = ScalarLaw::sigmoid(0.6, 0.9, 0.7);
  p.lame_lambda = ScalarLaw::sigmoid(1.0, 2.0, 0.5);
  p.lame_mu = ScalarLaw::affine(1.0, 0.3, 0.5, 2.0);
  p.eigenstrain = Eigenstrain::swelling(0.05, 0.0);
  p.eta = 0.1;
  return p;
}

ModelConfig config_with(const MaterialParams& p, const RectDomain& dom, int k) {
  ModelConfig c;
  c.domain = dom;
  c.k = k;
  c.params = p;
  return c;
}

CriterionResult timed(int id, const std::string& title, const std::function<CriterionResult()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = fmt::format("exception: {}", e.what());
  }
  r.id = id;
  r.title = title;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

std::string format_result(const CriterionResult& r) {
  return fmt::format("{} [{}] {}: {} ({:.1f}s)", r.pass ? "PASS" : "FAIL", r.id, r.title, r.detail, r.seconds);
}

CriterionResult criterion_basis() {
  CriterionResult r;
  r.pass = true;
  std::string detail;
  for (const RectDomain dom : {RectDomain{1.0, 1.0, 0, 0}, RectDomain{2.0, 1.0, 0, 0}}) {
    const SpectralBasisSet b = build_bases(dom, 32);
    const Vec& w = b.quad().w;
    const double gram_s = (scalar_gram(b.scalar) - Mat::Identity(32, 32)).cwiseAbs().maxCoeff();
    Mat gv = weighted_gram(b.vector.ux, w) + weighted_gram(b.vector.uy, w);
    const double gram_v = (gv - Mat::Identity(32, 32)).cwiseAbs().maxCoeff();
    const double lmax = b.scalar.lambda.maxCoeff();
    const double stiff = (scalar_stiffness(b.scalar) - Mat(b.scalar.lambda.asDiagonal())).cwiseAbs().maxCoeff();
    double flux = 0.0;
    for (int i = 1; i < 32; ++i) {
      const double li = b.scalar.lambda[i];
      flux = std::max(flux, (li * b.flux.qx.col(i) + b.scalar.grad_x.col(i)).cwiseAbs().maxCoeff());
      flux = std::max(flux, (li * b.flux.qy.col(i) + b.scalar.grad_y.col(i)).cwiseAbs().maxCoeff());
    }
    const bool ok = gram_s < 1e-10 && gram_v < 1e-10 && stiff < 1e-8 * lmax && flux < 1e-13;
    r.pass = r.pass && ok;
    detail += fmt::format("{}{}x{}: gram {:.1e}/{:.1e} stiffness {:.1e} (tol {:.1e}) flux identity {:.1e}",
                          detail.empty() ? "" : "; ", dom.lx, dom.ly, gram_s, gram_v, stiff, 1e-8 * lmax, flux);
  }
  r.detail = detail;
  return r;
}

CriterionResult criterion_variational_derivatives() {
  const Model model(config_with(nonlinear_params(), RectDomain{}, 16));
  const int k = model.size();
  const MaterialParams& p = model.params();
  const SpectralBasisSet& bases = model.bases();
  auto energy = [&](const Vec& a, const Vec& c, const Vec& d) {
    return total_energy(light_snapshot(a, c, d, bases), p);
  };
  double worst_order = inf;
  double worst_err = 0.0;
  const char* names[] = {"phi", "eps", "theta"};
  std::string worst_name;
  for (int s = 0; s < 10; ++s) {
    const std::uint64_t seed = 1000 + 10 * static_cast<std::uint64_t>(s);
    const Vec a = random_vec(k, seed, 0.2, true), c = random_vec(k, seed + 1, 0.2, true),
              d = random_vec(k, seed + 2, 0.5, true);
    const Vec ga = eliminate_chemical_potential(a, c, d, model);
    const ElasticSystem el = model.assembler().elastic_system(a, d);
    const Vec gc = (el.E_eps + el.F_eps) * c - el.t_eps + el.u_eps;
    const Vec gd = pressure_coefficients(a, c, d, bases, p);
    for (int which = 0; which < 3; ++which) {
      const Vec v = random_vec(k, seed + 3 + static_cast<std::uint64_t>(which), 1.0, true);
      const Vec w = random_vec(k, seed + 6 + static_cast<std::uint64_t>(which), 1.0, true);
      const Vec& g = which == 0 ? ga : which == 1 ? gc : gd;
      const double exact = g.dot(v);
      // curved path: along a straight line the quadratic blocks have no truncation error to observe
      auto path = [&](double h) {
        Vec aa = a, cc = c, dd = d;
        Vec& x = which == 0 ? aa : which == 1 ? cc : dd;
        x += h * v + h * h * w;
        return energy(aa, cc, dd);
      };
      double err[2];
      const double hs[2] = {1e-3, 1e-4};
      for (int j = 0; j < 2; ++j) err[j] = std::abs((path(hs[j]) - path(-hs[j])) / (2.0 * hs[j]) - exact);
      const double order = std::log10(err[0] / err[1]);
      if (order < worst_order) {
        worst_order = order;
        worst_name = fmt::format("state {} d/d{}", s, names[which]);
      }
      worst_err = std::max(worst_err, err[1]);
    }
  }
  CriterionResult r;
  r.pass = worst_order >= 1.9;
  r.detail = fmt::format("min observed order {:.3f} (need >= 1.9) at {}; max error at h=1e-4 {:.2e}", worst_order,
                         worst_name, worst_err);
  return r;
}

CriterionResult criterion_energy_dissipation(const std::string& preset_dir, int threads) {
  const ModelConfig cfg = load_config(preset_dir + "/p1_spinodal.cfg");
  if (cfg.time.integrator != Integrator::semi_implicit) throw ConfigError("P1 must use the semi-implicit integrator");
  const DissipationStudy st = dissipation_study(cfg, {4e-3, 2e-3, 1e-3}, threads);
  double worst_increase = -inf;
  bool complete = true;
  std::string levels;
  for (const DissipationLevel& l : st.levels) {
    worst_increase = std::max(worst_increase, l.max_energy_increase);
    complete = complete && l.complete;
    levels += fmt::format(" dt={:g}:max|r|={:.3e}", l.dt, l.max_abs_residual);
  }
  CriterionResult r;
  r.pass = complete && worst_increase <= 1e-10 && st.fitted_order >= 1.0;
  r.detail = fmt::format("max step energy increase {:.2e} (tol 1e-10); residual order {:.3f} (pairwise min {:.3f}, need >= 1.0);{}",
                         worst_increase, st.fitted_order, st.min_pair_order, levels);
  return r;
}

CriterionResult criterion_conservation(const std::string& preset_dir) {
  CriterionResult r;
  const ModelConfig p1 = load_config(preset_dir + "/p1_spinodal.cfg");
  const ModelConfig p2 = load_config(preset_dir + "/p2_injection.cfg");
  if (p1.sources.R != 0.0 || p1.sources.S_f != 0.0) throw ConfigError("P1 must have zero sources");
  const Trajectory t1 = run(p1);
  double drift_phi = 0.0, drift_theta = 0.0;
  for (const TrajectoryPoint& pt : t1.points) {
    drift_phi = std::max(drift_phi, std::abs(pt.record.phi_integral - t1.points.front().record.phi_integral));
    drift_theta = std::max(drift_theta, std::abs(pt.record.theta_integral - t1.points.front().record.theta_integral));
  }
  const Trajectory t2 = run(p2);
  const double area = p2.domain.area();
  double affine_phi = 0.0, affine_theta = 0.0;
  for (const TrajectoryPoint& pt : t2.points) {
    const double t = pt.record.t;
    affine_phi = std::max(affine_phi, std::abs(pt.record.phi_integral - t2.points.front().record.phi_integral -
                                               p2.sources.R * area * t));
    affine_theta = std::max(affine_theta, std::abs(pt.record.theta_integral - t2.points.front().record.theta_integral -
                                                   p2.sources.S_f * area * t));
  }
  r.pass = t1.complete && t2.complete && drift_phi < 1e-10 && drift_theta < 1e-10 && affine_phi < 1e-10 &&
           std::abs(p2.sources.R - 0.1) < 1e-15;
  r.detail = fmt::format("P1 drift phi {:.1e} theta {:.1e}; P2 (R={}) affine deviation phi {:.1e}, theta (S_f={}) {:.1e}",
                         drift_phi, drift_theta, p2.sources.R, affine_phi, p2.sources.S_f, affine_theta);
  return r;
}

CriterionResult criterion_spd_structure() {
  CriterionResult r;
  const Model model(config_with(nonlinear_params(), RectDomain{}, 32));
  const int k = model.size();
  double min_el = inf, min_flux = inf;
  for (int s = 0; s < 20; ++s) {
    const std::uint64_t seed = 5000 + 10 * static_cast<std::uint64_t>(s);
    const Vec a = random_vec(k, seed, 0.4, true), d = random_vec(k, seed + 1, 0.5, true);
    const ElasticSystem el = model.assembler().elastic_system(a, d);
    min_el = std::min(min_el, Eigen::SelfAdjointEigenSolver<Mat>(el.E_eps + el.F_eps).eigenvalues().minCoeff());
    const Mat M = model.assembler().flux_mass(a).bottomRightCorner(k - 1, k - 1);
    min_flux = std::min(min_flux, Eigen::SelfAdjointEigenSolver<Mat>(M).eigenvalues().minCoeff());
  }
  double worst = 0.0;
  for (int kk : {8, 16, 32}) {
    const Model m(config_with(nonlinear_params(), RectDomain{}, kk));
    for (double eta : {0.0, 0.1}) {
      for (int s = 0; s < 3; ++s) {
        const std::uint64_t seed = 7000 + 10 * static_cast<std::uint64_t>(s) + static_cast<std::uint64_t>(kk);
        const Vec a = random_vec(kk, seed, 0.4, true), d = random_vec(kk, seed + 1, 0.5, true),
                  cp = random_vec(kk, seed + 2, 0.1, true);
        const Vec x1 = solve_elasticity(a, d, m, cp, 1e-2, eta);
        const Vec x2 = solve_elasticity_spectral(a, d, m, cp, 1e-2, eta);
        worst = std::max(worst, (x1 - x2).cwiseAbs().maxCoeff() / std::max(1.0, x1.cwiseAbs().maxCoeff()));
      }
    }
  }
  r.pass = min_el > 0.0 && min_flux > 0.0 && worst < 1e-9;
  r.detail = fmt::format("min eig E_eps+F_eps {:.3e}, M_kqq active {:.3e}; spectral vs direct elasticity {:.1e} (tol 1e-9)",
                         min_el, min_flux, worst);
  return r;
}

CriterionResult criterion_energy_lower_bounds() {
  CriterionResult r;
  int violations = 0, checked = 0;
  double min_margin_e = inf, min_margin_f = inf;
  for (int s = 0; s < 100; ++s) {
    const std::uint64_t seed = 9000 + 17 * static_cast<std::uint64_t>(s);
    auto u = [&](int i, double lo, double hi) {
      return lo + 0.5 * (hi - lo) * (1.0 + counter_uniform(seed, static_cast<std::uint64_t>(100 + i)));
    };
    MaterialParams p;
    p.lame_mu = s % 2 ? ScalarLaw::sigmoid(u(0, 0.5, 1.5), u(1, 1.0, 3.0), u(2, 0.2, 1.0)) : ScalarLaw::constant(u(0, 0.5, 2.0));
    p.lame_lambda = ScalarLaw::constant(u(3, 0.0, 3.0));
    // constant M: see the ledger note on the varying-M case
    p.biot_modulus = ScalarLaw::constant(u(4, 0.3, 3.0));
    p.biot_willis = ScalarLaw::constant(u(5, 0.1, 1.0));
    if (s % 3 == 0) p.eigenstrain = Eigenstrain::vegard({u(6, -0.2, 0.2), u(7, -0.2, 0.2), u(8, -0.1, 0.1)}, {});
    else p.eigenstrain = Eigenstrain::swelling(u(6, -0.3, 0.3), 0.0);
    const Model model(config_with(p, RectDomain{}, 12));
    const int k = model.size();
    const double amp = u(9, 0.1, 2.0);
    const Vec a = random_vec(k, seed + 1, amp, true), c = random_vec(k, seed + 2, amp, true),
              d = random_vec(k, seed + 3, amp, true);
    const FieldSnapshot snap = light_snapshot(a, c, d, model.bases());
    const LowerBoundConstants lb = lower_bound_constants(p);
    const double me = energy_elastic(snap, p) - elastic_lower_bound(snap, lb);
    const double mf = energy_fluid(snap, p) - fluid_lower_bound(snap, lb);
    const double scale = 1e-12 * std::max(1.0, energy_elastic(snap, p) + energy_fluid(snap, p));
    min_margin_e = std::min(min_margin_e, me);
    min_margin_f = std::min(min_margin_f, mf);
    if (me < -scale) ++violations;
    if (mf < -scale) ++violations;
    checked += 2;
  }
  r.pass = violations == 0;
  r.detail = fmt::format("{} violations in {} checks; min margin elastic {:.3e}, hydraulic {:.3e}", violations, checked,
                         min_margin_e, min_margin_f);
  return r;
}

CriterionResult criterion_continuous_dependence(const std::string& preset_dir, int threads) {
  CriterionResult r;
  const ModelConfig cfg = load_config(preset_dir + "/p3_perturbation.cfg");
  const ContinuityStudy st = continuous_dependence_experiment(cfg, cfg.experiment.perturbation, {1e-1, 1e-2, 1e-3}, threads);
  bool slopes_ok = true;
  double lo = inf, hi = -inf;
  std::string worst;
  double worst_dev = -1.0;
  for (std::size_t i = 0; i < st.slopes.size(); ++i) {
    const double s = st.slopes[i];
    const bool ok = std::isfinite(s) && std::abs(s - 1.0) <= 0.15;
    slopes_ok = slopes_ok && ok;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    const double dev = std::isfinite(s) ? std::abs(s - 1.0) : inf;
    if (dev > worst_dev) {
      worst_dev = dev;
      worst = continuity_term_names()[i];
    }
  }
  bool flux_ok = true;
  double flux_ratio = 0.0;
  for (const ContinuityLevel& l : st.levels) {
    flux_ok = flux_ok && l.flux_bound_holds;
    flux_ratio = std::max(flux_ratio, l.flux_bound_max_ratio);
  }
  r.pass = slopes_ok && st.ratio_spread < 10.0 && flux_ok;
  r.detail = fmt::format("slopes vs eps^2 in [{:.4f}, {:.4f}] (worst {}), LHS/RHS spread {:.4f} (< 10), flux bound {} "
                         "(max LHS/RHS {:.3f})",
                         lo, hi, worst, st.ratio_spread, flux_ok ? "holds" : "violated", flux_ratio);
  return r;
}

CriterionResult criterion_dual_norm() {
  CriterionResult r;
  const double m = 0.7;
  const SpectralBasisSet b = build_bases(RectDomain{}, 24);
  const int k = b.size();
  const DualNormContext ctx(b.scalar, m, 1.3);
  const Vec weight = Vec::Constant(b.quad().size(), m);
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const Vec f = zero_mean_random(k, 11000 + static_cast<std::uint64_t>(s));
    const double spectral = ctx.pairing(f, f, m);
    const double dense = ctx.pairing(f, f, weight);
    worst = std::max(worst, std::abs(spectral - dense) / std::abs(dense));
  }
  int cs_fail = 0;
  double cs_max = 0.0;
  for (int s = 0; s < 50; ++s) {
    const Vec f = zero_mean_random(k, 12000 + 2 * static_cast<std::uint64_t>(s));
    const Vec g = zero_mean_random(k, 12001 + 2 * static_cast<std::uint64_t>(s));
    const double fg = ctx.pairing(f, g, m), ff = ctx.pairing(f, f, m), gg = ctx.pairing(g, g, m);
    cs_max = std::max(cs_max, fg * fg / (ff * gg));
    if (fg * fg > ff * gg * (1.0 + 1e-12)) ++cs_fail;
  }
  r.pass = worst < 1e-10 && cs_fail == 0;
  r.detail = fmt::format("spectral vs dense solve max rel diff {:.1e} (tol 1e-10); Cauchy-Schwarz failures {}/50 (max ratio {:.4f})",
                         worst, cs_fail, cs_max);
  return r;
}

CriterionResult criterion_reproducibility(const std::string& preset_dir) {
  CriterionResult r;
  r.pass = true;
  std::string detail;
  for (const char* name : {"p1_spinodal", "p2_injection", "p3_perturbation"}) {
    const ModelConfig cfg = load_config(preset_dir + "/" + name + ".cfg");
    // the manifest stores the resolved config text; both runs start from it
    const std::string manifest_config = emit_config(cfg);
    const std::string first = timeseries_csv(run(parse_config(manifest_config)));
    const std::string second = timeseries_csv(run(parse_config(manifest_config)));
    const bool same = first == second;
    r.pass = r.pass && same;
    detail += fmt::format("{}{} {} ({} bytes)", detail.empty() ? "" : "; ", name, same ? "identical" : "DIFFERENT",
                          first.size());
  }
  r.detail = detail;
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  const std::vector<std::pair<std::string, std::function<CriterionResult()>>> all{
      {"basis correctness", [] { return criterion_basis(); }},
      {"variational derivative oracle", [] { return criterion_variational_derivatives(); }},
      {"energy dissipation", [&] { return criterion_energy_dissipation(o.preset_dir, o.threads); }},
      {"conservation", [&] { return criterion_conservation(o.preset_dir); }},
      {"SPD structure", [] { return criterion_spd_structure(); }},
      {"energy lower bounds", [] { return criterion_energy_lower_bounds(); }},
      {"continuous dependence", [&] { return criterion_continuous_dependence(o.preset_dir, o.threads); }},
      {"dual-norm operator", [] { return criterion_dual_norm(); }},
      {"reproducibility", [&] { return criterion_reproducibility(o.preset_dir); }},
  };
  std::vector<CriterionResult> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!o.only.empty() && std::find(o.only.begin(), o.only.end(), id) == o.only.end()) continue;
    out.push_back(timed(id, all[i].first, all[i].second));
    if (on_result) on_result(out.back());
  }
  return out;
}

}  // namespace chb
