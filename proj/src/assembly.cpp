#include "chb/assembly.hpp"

namespace chb {

namespace {

Vec map_law(const ScalarLaw& law, const Vec& phi) {
  Vec out(phi.size());
  for (int q = 0; q < phi.size(); ++q) out[q] = law.value(phi[q]);
  return out;
}

Mat elastic_stiffness(const Vec& phi, const SpectralBasisSet& bases, const MaterialParams& params) {
  const VectorBasis& v = bases.vector;
  const Vec& w = bases.quad().w;
  const Vec mu2 = 2.0 * w.cwiseProduct(map_law(params.lame_mu, phi));
  const Vec lam = w.cwiseProduct(map_law(params.lame_lambda, phi));
  return weighted_gram(v.exx, mu2) + weighted_gram(v.eyy, mu2) + weighted_gram(v.exy, 2.0 * mu2) +
         weighted_gram(v.div, lam);
}

Mat fluid_stiffness(const Vec& phi, const SpectralBasisSet& bases, const MaterialParams& params) {
  Vec wt(phi.size());
  const Vec& w = bases.quad().w;
  for (int q = 0; q < phi.size(); ++q) {
    const double alpha = params.biot_willis.value(phi[q]);
    wt[q] = w[q] * params.biot_modulus.value(phi[q]) * alpha * alpha;
  }
  return weighted_gram(bases.vector.div, wt);
}

Mat mobility_matrix(const Vec& phi, const SpectralBasisSet& bases, const MaterialParams& params) {
  const Vec wt = bases.quad().w.cwiseProduct(map_law(params.mobility, phi));
  return weighted_gram(bases.scalar.grad_x, wt) + weighted_gram(bases.scalar.grad_y, wt);
}

Mat flux_mass_matrix(const Vec& phi, const SpectralBasisSet& bases, const MaterialParams& params) {
  Vec wt(phi.size());
  const Vec& w = bases.quad().w;
  for (int q = 0; q < phi.size(); ++q) wt[q] = w[q] / params.permeability.value(phi[q]);
  return weighted_gram(bases.flux.qx, wt) + weighted_gram(bases.flux.qy, wt);
}

Vec elastic_load(const FieldSnapshot& s, const SpectralBasisSet& bases, const MaterialParams& params) {
  const VectorBasis& v = bases.vector;
  const int n = s.size();
  Vec sxx(n), syy(n), sxy(n);
  for (int q = 0; q < n; ++q) {
    const Sym2 st = params.stiffness_apply(s.phi[q], params.eigenstrain(s.phi[q]));
    sxx[q] = s.w[q] * st.xx;
    syy[q] = s.w[q] * st.yy;
    sxy[q] = 2.0 * s.w[q] * st.xy;
  }
  return v.exx.transpose() * sxx + v.eyy.transpose() * syy + v.exy.transpose() * sxy;
}

Vec fluid_load(const FieldSnapshot& s, const SpectralBasisSet& bases, const MaterialParams& params) {
  const int n = s.size();
  Vec g(n);
  for (int q = 0; q < n; ++q)
    g[q] = s.w[q] * params.biot_willis.value(s.phi[q]) * params.biot_modulus.value(s.phi[q]) * s.theta[q];
  return -(bases.vector.div.transpose() * g);
}

Vec body_load(const SourceTerms& src, const SpectralBasisSet& bases) {
  const Vec& w = bases.quad().w;
  return bases.vector.ux.transpose() * (src.f[0] * w) + bases.vector.uy.transpose() * (src.f[1] * w);
}

Vec project_field(const Vec& f, const ScalarBasis& basis) { return basis.value.transpose() * basis.quad.w.cwiseProduct(f); }

}  // namespace

CoefficientState CoefficientState::zeros(int k) {
  CoefficientState s;
  s.a = s.b = s.c = s.d = s.e = Vec::Zero(k);
  return s;
}

FieldSnapshot light_snapshot(const Vec& a, const Vec& c, const Vec& d, const SpectralBasisSet& bases) {
  const ScalarBasis& sb = bases.scalar;
  const VectorBasis& vb = bases.vector;
  FieldSnapshot s;
  s.x = sb.quad.x;
  s.y = sb.quad.y;
  s.w = sb.quad.w;
  s.phi = sb.value * a;
  s.phi_x = sb.grad_x * a;
  s.phi_y = sb.grad_y * a;
  s.lap_phi = -(sb.value * sb.lambda.cwiseProduct(a));
  s.theta = sb.value * d;
  s.ux = vb.ux * c;
  s.uy = vb.uy * c;
  s.exx = vb.exx * c;
  s.eyy = vb.eyy * c;
  s.exy = vb.exy * c;
  s.div_u = vb.div * c;
  return s;
}

FieldSnapshot full_snapshot(const CoefficientState& st, const SpectralBasisSet& bases, const MaterialParams& params) {
  FieldSnapshot s = light_snapshot(st.a, st.c, st.d, bases);
  s.t = st.t;
  s.mu = bases.scalar.value * st.b;
  s.p = pressure(s, params);
  s.qx = bases.flux.qx * st.e;
  s.qy = bases.flux.qy * st.e;
  return s;
}

Mat assemble_mobility_stiffness(const Vec& a, const SpectralBasisSet& bases, const MaterialParams& params) {
  return mobility_matrix(bases.scalar.value * a, bases, params);
}

ElasticSystem assemble_elastic_system(const Vec& a, const Vec& d, const SpectralBasisSet& bases,
                                      const MaterialParams& params, const SourceTerms& sources) {
  const int k = bases.size();
  const FieldSnapshot s = light_snapshot(a, Vec::Zero(k), d, bases);
  ElasticSystem el;
  el.E_eps = elastic_stiffness(s.phi, bases, params);
  el.F_eps = fluid_stiffness(s.phi, bases, params);
  el.C_eps = weighted_gram(bases.vector.div, bases.quad().w);
  el.f_hat = body_load(sources, bases);
  el.t_eps = elastic_load(s, bases, params);
  el.u_eps = fluid_load(s, bases, params);
  el.rhs = el.f_hat + el.t_eps - el.u_eps;
  return el;
}

FluxSystem assemble_flux_system(const Vec& a, const Vec& c, const Vec& d, const SpectralBasisSet& bases,
                                const MaterialParams& params) {
  const FieldSnapshot s = light_snapshot(a, c, d, bases);
  FluxSystem fs;
  fs.M_kqq = flux_mass_matrix(s.phi, bases, params);
  const Vec p = pressure(s, params);
  fs.E_dtheta_f = bases.flux.div.transpose() * s.w.cwiseProduct(p);
  return fs;
}

PhaseVectors assemble_phase_vectors(const Vec& a, const Vec& c, const Vec& d, const SpectralBasisSet& bases,
                                    const MaterialParams& params) {
  const FieldSnapshot s = light_snapshot(a, c, d, bases);
  Vec psi(s.size());
  for (int q = 0; q < s.size(); ++q) psi[q] = double_well_prime(s.phi[q]);
  PhaseVectors pv;
  pv.psi_prime = project_field(psi, bases.scalar);
  pv.E_dphi_e = project_field(var_deriv_phi_elastic(s, params), bases.scalar);
  pv.E_dphi_f = project_field(var_deriv_phi_fluid(s, params), bases.scalar);
  return pv;
}

Mat assemble_divergence_coupling(const SpectralBasisSet& bases) {
  Mat B = weighted_cross(bases.scalar.value, bases.quad().w, bases.flux.div);
  // (div q_i, eta_1) = (eta_i, eta_1) vanishes exactly; q_1 is inert
  B.row(0).setZero();
  B.col(0).setZero();
  return B;
}

Vec project_constant(double g, const ScalarBasis& basis) {
  return basis.value.transpose() * (g * basis.quad.w);
}

Vec pressure_coefficients(const Vec& a, const Vec& c, const Vec& d, const SpectralBasisSet& bases,
                          const MaterialParams& params) {
  const FieldSnapshot s = light_snapshot(a, c, d, bases);
  return project_field(pressure(s, params), bases.scalar);
}

Assembler::Assembler(std::shared_ptr<const SpectralBasisSet> bases, MaterialParams params, SourceTerms sources)
    : bases_(std::move(bases)), params_(std::move(params)), sources_(sources) {
  const SpectralBasisSet& b = *bases_;
  B_ = assemble_divergence_coupling(b);
  C_ = weighted_gram(b.vector.div, b.quad().w);
  r_hat_ = project_constant(sources_.R, b.scalar);
  s_hat_ = project_constant(sources_.S_f, b.scalar);
  f_hat_ = body_load(sources_, b);
  const Vec phi0 = Vec::Zero(b.quad().size());
  if (params_.mobility.is_constant()) A_const_ = mobility_matrix(phi0, b, params_);
  if (params_.lame_lambda.is_constant() && params_.lame_mu.is_constant()) E_const_ = elastic_stiffness(phi0, b, params_);
  if (params_.biot_modulus.is_constant() && params_.biot_willis.is_constant()) F_const_ = fluid_stiffness(phi0, b, params_);
  if (params_.permeability.is_constant()) M_const_ = flux_mass_matrix(phi0, b, params_);
}

Mat Assembler::mobility_stiffness(const Vec& a) const {
  if (A_const_) return *A_const_;
  return mobility_matrix(bases_->scalar.value * a, *bases_, params_);
}

Mat Assembler::flux_mass(const Vec& a) const {
  if (M_const_) return *M_const_;
  return flux_mass_matrix(bases_->scalar.value * a, *bases_, params_);
}

ElasticSystem Assembler::elastic_system(const Vec& a, const Vec& d) const {
  const SpectralBasisSet& b = *bases_;
  const FieldSnapshot s = light_snapshot(a, Vec::Zero(size()), d, b);
  ElasticSystem el;
  el.E_eps = E_const_ ? *E_const_ : elastic_stiffness(s.phi, b, params_);
  el.F_eps = F_const_ ? *F_const_ : fluid_stiffness(s.phi, b, params_);
  el.C_eps = C_;
  el.f_hat = f_hat_;
  el.t_eps = elastic_load(s, b, params_);
  el.u_eps = fluid_load(s, b, params_);
  el.rhs = el.f_hat + el.t_eps - el.u_eps;
  return el;
}

FluxSystem Assembler::flux_system(const Vec& a, const Vec& c, const Vec& d) const {
  const FieldSnapshot s = light_snapshot(a, c, d, *bases_);
  FluxSystem fs;
  fs.M_kqq = M_const_ ? *M_const_ : flux_mass_matrix(s.phi, *bases_, params_);
  fs.E_dtheta_f = bases_->flux.div.transpose() * s.w.cwiseProduct(pressure(s, params_));
  return fs;
}

PhaseVectors Assembler::phase_vectors(const Vec& a, const Vec& c, const Vec& d) const {
  return assemble_phase_vectors(a, c, d, *bases_, params_);
}

}  // namespace chb
