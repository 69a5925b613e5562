#include "chb/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chb {

double double_well(double phi) {
  const double s = 1.0 - phi * phi;
  return s * s;
}

double double_well_prime(double phi) { return -4.0 * phi * (1.0 - phi * phi); }

double double_well_second(double phi) { return 12.0 * phi * phi - 4.0; }

ScalarLaw ScalarLaw::constant(double v) {
  ScalarLaw l;
  l.kind_ = Kind::constant;
  l.p_ = {v, 0.0, 0.0, 0.0};
  return l;
}

ScalarLaw ScalarLaw::affine(double v0, double slope, double lo, double hi) {
  if (!(lo <= hi)) throw ConfigError("affine law requires lo <= hi");
  ScalarLaw l;
  l.kind_ = Kind::affine;
  l.p_ = {v0, slope, lo, hi};
  return l;
}

ScalarLaw ScalarLaw::sigmoid(double minus, double plus, double width) {
  if (!(width > 0.0)) throw ConfigError("sigmoid law requires width > 0");
  ScalarLaw l;
  l.kind_ = Kind::sigmoid;
  l.p_ = {minus, plus, width, 0.0};
  return l;
}

ScalarLaw ScalarLaw::custom(std::function<double(double)> f, std::function<double(double)> df) {
  ScalarLaw l;
  l.kind_ = Kind::custom;
  l.f_ = std::move(f);
  l.df_ = std::move(df);
  return l;
}

double ScalarLaw::value(double phi) const {
  switch (kind_) {
    case Kind::constant:
      return p_[0];
    case Kind::affine:
      return std::clamp(p_[0] + p_[1] * phi, p_[2], p_[3]);
    case Kind::sigmoid:
      return p_[0] + (p_[1] - p_[0]) * 0.5 * (1.0 + std::tanh(phi / p_[2]));
    case Kind::custom:
      return f_(phi);
  }
  return 0.0;
}

double ScalarLaw::derivative(double phi) const {
  switch (kind_) {
    case Kind::constant:
      return 0.0;
    case Kind::affine: {
      const double v = p_[0] + p_[1] * phi;
      return (v < p_[2] || v > p_[3]) ? 0.0 : p_[1];
    }
    case Kind::sigmoid: {
      const double c = std::cosh(phi / p_[2]);
      return (p_[1] - p_[0]) * 0.5 / (p_[2] * c * c);
    }
    case Kind::custom:
      return df_(phi);
  }
  return 0.0;
}

Eigenstrain Eigenstrain::swelling(double xi, double phi_bar) {
  Eigenstrain e;
  e.kind = Kind::swelling;
  e.xi = xi;
  e.phi_bar = phi_bar;
  return e;
}

Eigenstrain Eigenstrain::vegard(const Sym2& hat, const Sym2& star) {
  Eigenstrain e;
  e.kind = Kind::vegard;
  e.hat = hat;
  e.star = star;
  return e;
}

Sym2 Eigenstrain::slope() const { return kind == Kind::swelling ? Sym2::identity() * xi : hat; }

Sym2 Eigenstrain::offset() const { return kind == Kind::swelling ? Sym2::identity() * (-xi * phi_bar) : star; }

Sym2 MaterialParams::stiffness_apply(double phi, const Sym2& eps) const {
  return eps * (2.0 * lame_mu.value(phi)) + Sym2::identity() * (lame_lambda.value(phi) * eps.trace());
}

Sym2 MaterialParams::stiffness_prime_apply(double phi, const Sym2& eps) const {
  return eps * (2.0 * lame_mu.derivative(phi)) + Sym2::identity() * (lame_lambda.derivative(phi) * eps.trace());
}

bool MaterialParams::coupling_laws_constant() const {
  return biot_modulus.is_constant() && biot_willis.is_constant() && lame_lambda.is_constant() &&
         lame_mu.is_constant();
}

FieldSnapshot FieldSnapshot::zeros(const Vec& x, const Vec& y, const Vec& w) {
  FieldSnapshot s;
  s.x = x;
  s.y = y;
  s.w = w;
  const Vec z = Vec::Zero(w.size());
  for (Vec* f : {&s.phi, &s.phi_x, &s.phi_y, &s.lap_phi, &s.mu, &s.theta, &s.p, &s.ux, &s.uy, &s.exx, &s.eyy,
                 &s.exy, &s.div_u, &s.qx, &s.qy})
    *f = z;
  return s;
}

double l2_norm_sq(const Vec& w, const Vec& f) { return integrate(w, f.cwiseProduct(f)); }

double strain_norm_sq(const FieldSnapshot& s) {
  Vec f(s.size());
  for (int q = 0; q < s.size(); ++q) f[q] = s.strain(q).norm2();
  return integrate(s.w, f);
}

double energy_interface(const FieldSnapshot& s, const MaterialParams& p) {
  Vec f(s.size());
  for (int q = 0; q < s.size(); ++q) {
    const double g2 = s.phi_x[q] * s.phi_x[q] + s.phi_y[q] * s.phi_y[q];
    f[q] = double_well(s.phi[q]) / p.ell + 0.5 * p.ell * g2;
  }
  return p.gamma * integrate(s.w, f);
}

double energy_elastic(const FieldSnapshot& s, const MaterialParams& p) {
  Vec f(s.size());
  for (int q = 0; q < s.size(); ++q) {
    const Sym2 e = s.strain(q) - p.eigenstrain(s.phi[q]);
    f[q] = 0.5 * e.dot(p.stiffness_apply(s.phi[q], e));
  }
  return integrate(s.w, f);
}

double energy_fluid(const FieldSnapshot& s, const MaterialParams& p) {
  Vec f(s.size());
  for (int q = 0; q < s.size(); ++q) {
    const double r = s.theta[q] - p.biot_willis.value(s.phi[q]) * s.div_u[q];
    f[q] = 0.5 * p.biot_modulus.value(s.phi[q]) * r * r;
  }
  return integrate(s.w, f);
}

double total_energy(const FieldSnapshot& s, const MaterialParams& p) {
  return energy_interface(s, p) + energy_elastic(s, p) + energy_fluid(s, p);
}

Vec var_deriv_phi_elastic(const FieldSnapshot& s, const MaterialParams& p) {
  Vec out(s.size());
  const Sym2 tp = p.eigenstrain.slope();
  for (int q = 0; q < s.size(); ++q) {
    const double phi = s.phi[q];
    const Sym2 e = s.strain(q) - p.eigenstrain(phi);
    out[q] = 0.5 * e.dot(p.stiffness_prime_apply(phi, e)) - tp.dot(p.stiffness_apply(phi, e));
  }
  return out;
}

Vec var_deriv_phi_fluid(const FieldSnapshot& s, const MaterialParams& p) {
  Vec out(s.size());
  for (int q = 0; q < s.size(); ++q) {
    const double phi = s.phi[q];
    const double r = s.theta[q] - p.biot_willis.value(phi) * s.div_u[q];
    out[q] = 0.5 * p.biot_modulus.derivative(phi) * r * r -
             p.biot_willis.derivative(phi) * p.biot_modulus.value(phi) * r * s.div_u[q];
  }
  return out;
}

Vec var_deriv_phi_local(const FieldSnapshot& s, const MaterialParams& p) {
  Vec out = var_deriv_phi_elastic(s, p) + var_deriv_phi_fluid(s, p);
  for (int q = 0; q < s.size(); ++q) out[q] += p.gamma / p.ell * double_well_prime(s.phi[q]);
  return out;
}

Vec var_deriv_phi(const FieldSnapshot& s, const MaterialParams& p) {
  return var_deriv_phi_local(s, p) - p.gamma * p.ell * s.lap_phi;
}

Vec pressure(const FieldSnapshot& s, const MaterialParams& p) {
  Vec out(s.size());
  for (int q = 0; q < s.size(); ++q) {
    const double phi = s.phi[q];
    out[q] = p.biot_modulus.value(phi) * (s.theta[q] - p.biot_willis.value(phi) * s.div_u[q]);
  }
  return out;
}

namespace {

StressField make_stress(int n) {
  StressField st;
  st.xx.resize(n);
  st.yy.resize(n);
  st.xy.resize(n);
  return st;
}

void put(StressField& st, int q, const Sym2& v) {
  st.xx[q] = v.xx;
  st.yy[q] = v.yy;
  st.xy[q] = v.xy;
}

}  // namespace

StressField stress_elastic(const FieldSnapshot& s, const MaterialParams& p) {
  StressField st = make_stress(s.size());
  const Vec pr = pressure(s, p);
  for (int q = 0; q < s.size(); ++q) {
    const double phi = s.phi[q];
    const Sym2 sig = p.stiffness_apply(phi, s.strain(q) - p.eigenstrain(phi)) -
                     Sym2::identity() * (p.biot_willis.value(phi) * pr[q]);
    put(st, q, sig);
  }
  return st;
}

StressField effective_stress(const FieldSnapshot& s, const MaterialParams& p, const Vec& div_rate) {
  StressField st = make_stress(s.size());
  for (int q = 0; q < s.size(); ++q) {
    const double phi = s.phi[q];
    put(st, q, Sym2::identity() * (p.eta * div_rate[q]) + p.stiffness_apply(phi, s.strain(q) - p.eigenstrain(phi)));
  }
  return st;
}

StressField cauchy_stress(const FieldSnapshot& s, const MaterialParams& p, const Vec& div_rate) {
  StressField st = stress_elastic(s, p);
  st.xx += p.eta * div_rate;
  st.yy += p.eta * div_rate;
  return st;
}

BoundConstants sampled_bounds(const MaterialParams& p) {
  constexpr int n = 4001;
  const double inf = std::numeric_limits<double>::infinity();
  BoundConstants b{inf, -inf, inf, -inf, inf, -inf, inf, -inf, inf, -inf, 0.0, inf, 0.0, 0.0};
  const Sym2 slope = p.eigenstrain.slope();
  const Sym2 offset = p.eigenstrain.offset();
  double prev_lam = 0.0, prev_mu = 0.0, prev_s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = p.sample_min + (p.sample_max - p.sample_min) * i / (n - 1);
    auto upd = [](double v, double& lo, double& hi) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    };
    upd(p.mobility.value(s), b.c_m, b.C_m);
    upd(p.permeability.value(s), b.c_kappa, b.C_kappa);
    upd(p.biot_modulus.value(s), b.c_M, b.C_M);
    upd(std::abs(p.biot_willis.value(s)), b.c_alpha, b.C_alpha);
    const double lam = p.lame_lambda.value(s);
    const double mu = p.lame_mu.value(s);
    // eigenvalues of the isotropic tensor on symmetric 2x2: 2mu (deviatoric), 2mu + 2lambda (volumetric)
    upd(std::min(2.0 * mu, 2.0 * mu + 2.0 * lam), b.c_C, b.C_C);
    upd(std::max(2.0 * mu, 2.0 * mu + 2.0 * lam), b.c_C, b.C_C);
    const double tn = std::sqrt((slope * s + offset).norm2());
    if (s != 0.0) {
      b.C_T = std::max(b.C_T, tn / std::abs(s));
    } else if (tn > 0.0) {
      b.C_T = inf;
    }
    const double d2 = double_well_second(s);
    b.psi_second_min = std::min(b.psi_second_min, d2);
    b.psi_prime_lip = std::max(b.psi_prime_lip, std::abs(d2));
    if (i > 0) {
      const double ds = s - prev_s;
      const double dl = std::max(std::abs(2.0 * (mu - prev_mu)), std::abs(2.0 * (mu - prev_mu) + 2.0 * (lam - prev_lam)));
      b.lip_C = std::max(b.lip_C, dl / ds);
    }
    prev_lam = lam;
    prev_mu = mu;
    prev_s = s;
  }
  return b;
}

BoundConstants effective_bounds(const MaterialParams& p) {
  BoundConstants b = sampled_bounds(p);
  const DeclaredBounds& d = p.declared;
  if (d.c_m) b.c_m = *d.c_m;
  if (d.C_m) b.C_m = *d.C_m;
  if (d.c_kappa) b.c_kappa = *d.c_kappa;
  if (d.C_kappa) b.C_kappa = *d.C_kappa;
  if (d.c_M) b.c_M = *d.c_M;
  if (d.C_M) b.C_M = *d.C_M;
  if (d.C_alpha) b.C_alpha = *d.C_alpha;
  if (d.c_C) b.c_C = *d.c_C;
  if (d.C_C) b.C_C = *d.C_C;
  if (d.C_T) b.C_T = *d.C_T;
  return b;
}

LowerBoundConstants lower_bound_constants(const MaterialParams& p) {
  const BoundConstants b = effective_bounds(p);
  constexpr double dim = 2.0;
  LowerBoundConstants c{};
  c.c_C = b.c_C;
  c.C_C = b.C_C;
  c.C_T = b.C_T;
  c.c_M = b.c_M;
  c.C_alpha = b.C_alpha;
  if (b.C_alpha > 0.0) {
    c.delta = b.c_C / (8.0 * b.c_M * b.C_alpha * b.C_alpha * dim) + 0.5;
    c.C_theta = 0.5 * b.c_M * (1.0 - 1.0 / (2.0 * c.delta));
  } else {
    // no coupling: E_f = (M/2)||theta||^2
    c.delta = std::numeric_limits<double>::infinity();
    c.C_theta = 0.5 * b.c_M;
  }
  return c;
}

double elastic_lower_bound(const FieldSnapshot& s, const LowerBoundConstants& c) {
  return 0.25 * c.c_C * strain_norm_sq(s) - 0.5 * c.c_C * c.C_T * c.C_T * l2_norm_sq(s.w, s.phi);
}

double fluid_lower_bound(const FieldSnapshot& s, const LowerBoundConstants& c) {
  return c.C_theta * l2_norm_sq(s.w, s.theta) - c.C_C / 8.0 * strain_norm_sq(s);
}

}  // namespace chb
