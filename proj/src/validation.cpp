#include "chb/validation.hpp"

#include <fmt/format.h>

#include <cmath>

namespace chb {

namespace {

void check_declared(ValidationReport& r, const char* tag, const char* name, const std::optional<double>& declared,
                    double sampled, bool is_lower) {
  if (!declared) return;
  const double tol = 1e-12 * std::max(1.0, std::abs(sampled));
  const bool bad = is_lower ? sampled < *declared - tol : sampled > *declared + tol;
  if (bad) {
    r.errors.push_back({tag, fmt::format("declared {} = {} but sampling gives {}", name, *declared, sampled)});
  }
}

bool finite(const ScalarLaw& l) {
  for (double v : l.params())
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

void ValidationReport::raise_if_failed() const {
  if (errors.empty()) return;
  std::string msg;
  for (const auto& v : errors) msg += fmt::format("{}{} {}", msg.empty() ? "" : "; ", v.assumption, v.message);
  throw ValidationError(errors.front().assumption, msg);
}

ValidationReport validate_assumptions(const MaterialParams& p, const SourceTerms& src, ExperimentMode mode) {
  ValidationReport r;
  if (!(p.gamma > 0.0) || !(p.ell > 0.0)) r.errors.push_back({"(A1)", "gamma and ell must be positive"});
  if (!(p.sample_min < p.sample_max)) r.errors.push_back({"(A2*)", "empty phi sampling range"});
  for (const ScalarLaw* l : {&p.mobility, &p.permeability, &p.biot_modulus, &p.biot_willis, &p.lame_lambda, &p.lame_mu})
    if (!finite(*l)) r.errors.push_back({"(A6)", "non-finite law parameter"});
  if (!r.ok()) return r;

  const BoundConstants b = sampled_bounds(p);

  // (A1): psi >= 0 and psi'(0) = 0 hold for the quartic; the curvature shift is sampled
  if (b.psi_second_min + p.c_psi < 0.0)
    r.errors.push_back({"(A1)", fmt::format("psi'' + c_psi >= 0 fails: min psi'' = {}, c_psi = {}", b.psi_second_min, p.c_psi)});

  if (!(b.c_m > 0.0)) r.errors.push_back({"(A2*)", fmt::format("mobility not bounded below by a positive constant (min {})", b.c_m)});
  if (!(b.c_kappa > 0.0))
    r.errors.push_back({"(A2*)", fmt::format("permeability not bounded below by a positive constant (min {})", b.c_kappa)});
  if (!(b.c_M > 0.0))
    r.errors.push_back({"(A2*)", fmt::format("Biot modulus not bounded below by a positive constant (min {})", b.c_M)});
  check_declared(r, "(A2*)", "c_m", p.declared.c_m, b.c_m, true);
  check_declared(r, "(A2*)", "C_m", p.declared.C_m, b.C_m, false);
  check_declared(r, "(A2*)", "c_kappa", p.declared.c_kappa, b.c_kappa, true);
  check_declared(r, "(A2*)", "C_kappa", p.declared.C_kappa, b.C_kappa, false);
  check_declared(r, "(A2*)", "c_M", p.declared.c_M, b.c_M, true);
  check_declared(r, "(A2*)", "C_M", p.declared.C_M, b.C_M, false);
  check_declared(r, "(A2*)", "C_alpha", p.declared.C_alpha, b.C_alpha, false);

  if (!(b.c_C > 0.0))
    r.errors.push_back({"(A3)", fmt::format("elasticity tensor not uniformly positive definite (min eigenvalue {})", b.c_C)});
  check_declared(r, "(A3)", "c_C", p.declared.c_C, b.c_C, true);
  check_declared(r, "(A3)", "C_C", p.declared.C_C, b.C_C, false);

  if (!std::isfinite(b.C_T))
    r.errors.push_back({"(A4)", "eigenstrain has a nonzero offset, so |T(phi)| <= C_T |phi| fails near phi = 0"});
  check_declared(r, "(A4)", "C_T", p.declared.C_T, b.C_T, false);

  if (!src.autonomous) r.errors.push_back({"(A5)", "time-dependent sources are not supported"});
  if (!std::isfinite(src.R) || !std::isfinite(src.S_f) || !std::isfinite(src.f[0]) || !std::isfinite(src.f[1]))
    r.errors.push_back({"(A5)", "non-finite source"});

  if (p.eta < 0.0) r.errors.push_back({"(A7)", fmt::format("viscosity eta must be non-negative, got {}", p.eta)});

  if (mode == ExperimentMode::existence) {
    if (!p.biot_modulus.is_constant() || !p.biot_willis.is_constant())
      r.warnings.push_back({"(A2)", "state-dependent M or alpha: only the (A2*) energy steps are covered"});
    if (p.eta == 0.0)
      r.warnings.push_back({"(A7)", "eta = 0: the viscous regularization is off, existence is not covered"});
  } else {
    if (!p.mobility.is_constant()) r.errors.push_back({"(B2)", "mobility must be constant"});
    if (!p.permeability.is_constant()) r.errors.push_back({"(B2)", "permeability must be constant"});
    if (!p.biot_modulus.is_constant()) r.errors.push_back({"(B2)", "Biot modulus must be constant"});
    if (!p.biot_willis.is_constant()) r.errors.push_back({"(B2)", "Biot-Willis coefficient must be constant"});
    if (!p.lame_lambda.is_constant() || !p.lame_mu.is_constant())
      r.errors.push_back({"(B3)", "elasticity tensor must be constant"});
    if (p.eta != 0.0) r.errors.push_back({"(B2)", "continuity mode runs without viscosity: set eta = 0"});
    if (!std::isfinite(b.psi_prime_lip)) r.errors.push_back({"(B1)", "psi' not Lipschitz on the sample range"});
  }
  return r;
}

}  // namespace chb
