#pragma once

#include "chb/constitutive.hpp"
#include "chb/spectral_bases.hpp"

#include <memory>
#include <optional>

namespace chb {

/// Coefficients at one time: phi = sum a_i eta_i, mu = sum b_i eta_i, u = sum c_i eta^u_i,
/// theta = sum d_i eta_i, q = sum e_i q_i.
struct CoefficientState {
  double t = 0.0;
  Vec a, b, c, d, e;

  static CoefficientState zeros(int k);
};

struct ElasticSystem {
  Mat E_eps;  ///< (C(phi) eps(eta_i), eps(eta_j))
  Mat F_eps;  ///< (M alpha^2 div eta_i, div eta_j)
  Mat C_eps;  ///< (div eta_i, div eta_j)
  Vec f_hat;  ///< (f, eta_j)
  Vec t_eps;  ///< (C T(phi), eps(eta_j))
  Vec u_eps;  ///< -(alpha M theta, div eta_j)
  Vec rhs;    ///< f_hat + t_eps - u_eps
};

struct FluxSystem {
  Mat M_kqq;       ///< (kappa^-1 q_i, q_j); row and column 1 are zero
  Vec E_dtheta_f;  ///< (p, div q_j)
};

struct PhaseVectors {
  Vec psi_prime;  ///< (psi'(phi), eta_j)
  Vec E_dphi_e;   ///< elastic part of delta_phi E projected
  Vec E_dphi_f;   ///< hydraulic part of delta_phi E projected
};

/// Fields needed by the energy and its derivatives (no mu, p, q).
FieldSnapshot light_snapshot(const Vec& a, const Vec& c, const Vec& d, const SpectralBasisSet& bases);
/// All fields, including mu, p and q from b and e.
FieldSnapshot full_snapshot(const CoefficientState& s, const SpectralBasisSet& bases, const MaterialParams& params);

Mat assemble_mobility_stiffness(const Vec& a, const SpectralBasisSet& bases, const MaterialParams& params);
ElasticSystem assemble_elastic_system(const Vec& a, const Vec& d, const SpectralBasisSet& bases,
                                      const MaterialParams& params, const SourceTerms& sources);
FluxSystem assemble_flux_system(const Vec& a, const Vec& c, const Vec& d, const SpectralBasisSet& bases,
                                const MaterialParams& params);
PhaseVectors assemble_phase_vectors(const Vec& a, const Vec& c, const Vec& d, const SpectralBasisSet& bases,
                                    const MaterialParams& params);
/// B_ji = (div q_i, eta_j); the mean row and the inert column are exactly zero.
Mat assemble_divergence_coupling(const SpectralBasisSet& bases);
/// (g, eta_j) for a constant g.
Vec project_constant(double g, const ScalarBasis& basis);
/// Projection coefficients of the pressure, all modes including the mean.
Vec pressure_coefficients(const Vec& a, const Vec& c, const Vec& d, const SpectralBasisSet& bases,
                          const MaterialParams& params);

/// Assembly with caching of whatever does not depend on the state under the configured laws.
class Assembler {
public:
  Assembler(std::shared_ptr<const SpectralBasisSet> bases, MaterialParams params, SourceTerms sources);

  const SpectralBasisSet& bases() const { return *bases_; }
  const MaterialParams& params() const { return params_; }
  const SourceTerms& sources() const { return sources_; }
  int size() const { return bases_->size(); }

  Mat mobility_stiffness(const Vec& a) const;
  ElasticSystem elastic_system(const Vec& a, const Vec& d) const;
  FluxSystem flux_system(const Vec& a, const Vec& c, const Vec& d) const;
  /// M_kqq alone (no pressure projection).
  Mat flux_mass(const Vec& a) const;
  PhaseVectors phase_vectors(const Vec& a, const Vec& c, const Vec& d) const;
  const Mat& divergence_coupling() const { return B_; }
  const Mat& viscous_matrix() const { return C_; }
  const Vec& r_hat() const { return r_hat_; }
  const Vec& s_hat() const { return s_hat_; }
  const Vec& f_hat() const { return f_hat_; }

private:
  std::shared_ptr<const SpectralBasisSet> bases_;
  MaterialParams params_;
  SourceTerms sources_;
  Mat B_, C_;
  Vec r_hat_, s_hat_, f_hat_;
  std::optional<Mat> A_const_, E_const_, F_const_, M_const_;
};

}  // namespace chb
