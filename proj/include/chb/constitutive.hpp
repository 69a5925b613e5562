#pragma once

#include "chb/types.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>

namespace chb {

/// Quartic double well (1 - phi^2)^2.
double double_well(double phi);
double double_well_prime(double phi);
double double_well_second(double phi);

/// Scalar coefficient law phi -> value from a closed family.
///   constant: v
///   affine:   clamp(v0 + slope * phi, lo, hi)
///   sigmoid:  minus + (plus - minus) * (1 + tanh(phi / width)) / 2
/// A custom law carries user callables and cannot be written back to a config file.
class ScalarLaw {
public:
  enum class Kind { constant, affine, sigmoid, custom };

  ScalarLaw() : p_{1.0, 0.0, 0.0, 0.0} {}
  static ScalarLaw constant(double v);
  static ScalarLaw affine(double v0, double slope, double lo, double hi);
  static ScalarLaw sigmoid(double minus, double plus, double width);
  static ScalarLaw custom(std::function<double(double)> f, std::function<double(double)> df);

  double value(double phi) const;
  double derivative(double phi) const;
  bool is_constant() const { return kind_ == Kind::constant; }
  Kind kind() const { return kind_; }
  /// constant: {v}; affine: {v0, slope, lo, hi}; sigmoid: {minus, plus, width}
  const std::array<double, 4>& params() const { return p_; }

  bool operator==(const ScalarLaw& o) const { return kind_ == o.kind_ && kind_ != Kind::custom && p_ == o.p_; }

private:
  Kind kind_ = Kind::constant;
  std::array<double, 4> p_{};
  std::function<double(double)> f_;
  std::function<double(double)> df_;
};

/// Affine eigenstrain T(phi) = slope * phi + offset.
struct Eigenstrain {
  enum class Kind { swelling, vegard };
  Kind kind = Kind::swelling;
  double xi = 0.0;       ///< swelling: T = xi (phi - phi_bar) I
  double phi_bar = 0.0;
  Sym2 hat;               ///< vegard: T = hat * phi + star
  Sym2 star;

  static Eigenstrain swelling(double xi, double phi_bar);
  static Eigenstrain vegard(const Sym2& hat, const Sym2& star);
  Sym2 slope() const;
  Sym2 offset() const;
  Sym2 operator()(double phi) const { return slope() * phi + offset(); }
  bool operator==(const Eigenstrain&) const = default;
};

/// Bound and Lipschitz constants a user may declare; unset entries are estimated by sampling.
struct DeclaredBounds {
  std::optional<double> c_m, C_m, c_kappa, C_kappa, c_M, C_M, C_alpha, c_C, C_C, C_T;
  bool operator==(const DeclaredBounds&) const = default;
};

struct MaterialParams {
  double gamma = 1.0;  ///< interface energy scale
  double ell = 0.1;    ///< interface width
  double c_psi = 4.0;  ///< psi'' + c_psi >= 0
  double C_psi = 2.0;  ///< constant in the growth bound of psi

  ScalarLaw mobility = ScalarLaw::constant(1.0);
  ScalarLaw permeability = ScalarLaw::constant(1.0);
  ScalarLaw biot_modulus = ScalarLaw::constant(1.0);
  ScalarLaw biot_willis = ScalarLaw::constant(1.0);
  ScalarLaw lame_lambda = ScalarLaw::constant(1.0);
  ScalarLaw lame_mu = ScalarLaw::constant(1.0);
  Eigenstrain eigenstrain;
  double eta = 0.1;  ///< Kelvin-Voigt viscosity

  double sample_min = -2.0;  ///< phi range used by the sampling validators
  double sample_max = 2.0;
  DeclaredBounds declared;

  /// C(phi) eps for the isotropic tensor: 2 mu eps + lambda tr(eps) I.
  Sym2 stiffness_apply(double phi, const Sym2& eps) const;
  Sym2 stiffness_prime_apply(double phi, const Sym2& eps) const;
  bool coupling_laws_constant() const;
  bool operator==(const MaterialParams&) const = default;
};

/// Spatially constant, time-independent sources.
struct SourceTerms {
  double R = 0.0;    ///< phase-field source
  double S_f = 0.0;  ///< fluid source
  std::array<double, 2> f{0.0, 0.0};  ///< body force
  bool autonomous = true;
  bool operator==(const SourceTerms&) const = default;
};

/// Fields on the quadrature grid, reconstructed from coefficients.
struct FieldSnapshot {
  double t = 0.0;
  Vec x, y, w;
  Vec phi, phi_x, phi_y, lap_phi;
  Vec mu;
  Vec theta;
  Vec p;
  Vec ux, uy;
  Vec exx, eyy, exy;
  Vec div_u;
  Vec qx, qy;

  int size() const { return static_cast<int>(w.size()); }
  Sym2 strain(int q) const { return {exx[q], eyy[q], exy[q]}; }
  /// Zero fields on the given grid.
  static FieldSnapshot zeros(const Vec& x, const Vec& y, const Vec& w);
};

double energy_interface(const FieldSnapshot& s, const MaterialParams& p);
double energy_elastic(const FieldSnapshot& s, const MaterialParams& p);
double energy_fluid(const FieldSnapshot& s, const MaterialParams& p);
double total_energy(const FieldSnapshot& s, const MaterialParams& p);

/// Elastic part of delta_phi E: (1/2)(eps - T):C'(eps - T) - T':C(eps - T).
Vec var_deriv_phi_elastic(const FieldSnapshot& s, const MaterialParams& p);
/// Hydraulic part of delta_phi E: (M'/2)(theta - alpha div u)^2 - alpha' M (theta - alpha div u) div u.
Vec var_deriv_phi_fluid(const FieldSnapshot& s, const MaterialParams& p);
/// delta_phi E without the -gamma*ell*Laplacian term (the part projected pointwise).
Vec var_deriv_phi_local(const FieldSnapshot& s, const MaterialParams& p);
/// Full delta_phi E with the spectral Laplacian stored in the snapshot.
Vec var_deriv_phi(const FieldSnapshot& s, const MaterialParams& p);
/// delta_theta E = p.
Vec pressure(const FieldSnapshot& s, const MaterialParams& p);

struct StressField {
  Vec xx, yy, xy;
  Sym2 at(int q) const { return {xx[q], yy[q], xy[q]}; }
};

/// delta_eps E = C(eps - T) - M alpha (theta - alpha div u) I.
StressField stress_elastic(const FieldSnapshot& s, const MaterialParams& p);
/// eta d_t(div u) I + C(eps - T) - alpha p I.
StressField cauchy_stress(const FieldSnapshot& s, const MaterialParams& p, const Vec& div_rate);
/// Effective stress eta d_t(div u) I + C(eps - T), so that sigma = sigma_eff - alpha p I.
StressField effective_stress(const FieldSnapshot& s, const MaterialParams& p, const Vec& div_rate);

double l2_norm_sq(const Vec& w, const Vec& f);
double strain_norm_sq(const FieldSnapshot& s);

/// Effective bound constants: declared values where given, sampled estimates otherwise.
struct BoundConstants {
  double c_m, C_m, c_kappa, C_kappa, c_M, C_M, c_alpha, C_alpha, c_C, C_C, C_T;
  double psi_second_min;   ///< min over the sample range of psi''
  double psi_prime_lip;    ///< max |psi''| over the sample range
  double lip_C;            ///< Lipschitz constant of phi -> C(phi)
};

BoundConstants sampled_bounds(const MaterialParams& p);
BoundConstants effective_bounds(const MaterialParams& p);

/// Constants of the lower bounds for the elastic and hydraulic energies (dimension d = 2).
struct LowerBoundConstants {
  double c_C, C_C, C_T, c_M, C_alpha;
  double delta;    ///< c_C / (8 c_M C_alpha^2 d) + 1/2
  double C_theta;  ///< (c_M / 2)(1 - 1/(2 delta))
};

LowerBoundConstants lower_bound_constants(const MaterialParams& p);
/// (c_C/4)||eps||^2 - (c_C C_T^2/2)||phi||^2
double elastic_lower_bound(const FieldSnapshot& s, const LowerBoundConstants& c);
/// C_theta ||theta||^2 - (C_C/8)||eps||^2
double fluid_lower_bound(const FieldSnapshot& s, const LowerBoundConstants& c);

}  // namespace chb
