#pragma once

#include "chb/assembly.hpp"
#include "chb/record.hpp"
#include "chb/validation.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace chb {

enum class Integrator { semi_implicit, implicit_euler_newton };

struct TimeSettings {
  double t_final = 0.1;
  double dt = 1e-3;
  Integrator integrator = Integrator::semi_implicit;
  double stabilization = 4.0;  ///< curvature shift S of the semi-implicit double-well treatment
  double newton_tol = 1e-10;
  int newton_max_iter = 20;
  int max_halvings = 6;  ///< step floor dt / 2^max_halvings
  int output_every = 1;  ///< output cadence in steps
  bool operator==(const TimeSettings&) const = default;
};

/// Initial phase field and fluid content.
///   constant: mean
///   noise:    mean + amplitude * |Omega|^1/2 * sum over non-constant modes U_i eta_i, U_i = counter_uniform(seed, i)
///   cosine:   mean + amplitude * cos(mx pi x / lx) cos(my pi y / ly)
///   disk:     mean + amplitude * tanh((radius - |x - center|) / (sqrt(2) ell))
struct FieldInit {
  std::string kind = "constant";
  double mean = 0.0;
  double amplitude = 0.0;
  std::uint64_t seed = 1;
  std::array<int, 2> mode{1, 0};
  double radius = 0.25;
  bool operator==(const FieldInit&) const = default;
};

struct InitialSpec {
  FieldInit phi;
  FieldInit theta;
  bool operator==(const InitialSpec&) const = default;
};

/// Settings of the refinement and perturbation studies.
struct ExperimentSpec {
  ExperimentMode mode = ExperimentMode::existence;
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3};
  std::string perturbation = "phi0";  ///< phi0 | theta0 | R | S_f
  std::uint64_t perturbation_seed = 7;
  int dt_levels = 3;  ///< dissipation study: dt, dt/2, ..., dt/2^(levels-1)
  bool operator==(const ExperimentSpec&) const = default;
};

struct ModelConfig {
  std::string name = "run";
  RectDomain domain;
  int k = 16;
  MaterialParams params;
  SourceTerms sources;
  TimeSettings time;
  InitialSpec initial;
  ExperimentSpec experiment;
  bool operator==(const ModelConfig&) const = default;
};

/// A configuration with its bases and assembler built.
class Model {
public:
  explicit Model(ModelConfig config);

  const ModelConfig& config() const { return config_; }
  const SpectralBasisSet& bases() const { return *bases_; }
  const Assembler& assembler() const { return *assembler_; }
  const MaterialParams& params() const { return config_.params; }
  int size() const { return bases_->size(); }

private:
  ModelConfig config_;
  std::shared_ptr<const SpectralBasisSet> bases_;
  std::unique_ptr<Assembler> assembler_;
};

/// Counter-based uniform deviate on [-1, 1): splitmix64 finalizer of seed + (counter + 1) * 0x9E3779B97F4A7C15.
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

/// Sample a FieldInit on the quadrature grid.
Vec sample_initial_field(const FieldInit& init, const SpectralBasisSet& bases, const MaterialParams& params);

CoefficientState initial_coefficients(const Vec& phi0, const Vec& theta0, const Model& model);

Vec eliminate_chemical_potential(const Vec& a, const Vec& c, const Vec& d, const Model& model);
Vec eliminate_flux(const Vec& a, const Vec& c, const Vec& d, const Model& model);

/// eta = 0: (E + F) c = rhs. eta > 0: (eta/dt C + E + F) c = rhs + eta/dt C c_prev.
Vec solve_elasticity(const Vec& a, const Vec& d, const Model& model, const Vec& c_prev, double dt, double eta);
/// Same step through the eigendecomposition C = Q diag(D, 0) Q^T with the kernel block eliminated.
Vec solve_elasticity_spectral(const Vec& a, const Vec& d, const Model& model, const Vec& c_prev, double dt,
                              double eta);

struct StepResult {
  CoefficientState state;
  Vec c_rate;          ///< (c_new - c_old) / dt
  Vec flux_increment;  ///< integral of e over the step
  int iterations = 0;  ///< Newton residual evaluations on the accepted path, 0 for the linear scheme
  int halvings = 0;
};

StepResult step_semi_implicit(const CoefficientState& state, double dt, const Model& model);
StepResult step_implicit_newton(const CoefficientState& state, double dt, const Model& model);

struct TrajectoryPoint {
  long step = 0;
  CoefficientState state;
  Vec c_rate;
  Vec flux_integral;  ///< running time integral of the flux coefficients
  DiagnosticsRecord record;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  std::vector<double> step_t;       ///< every accepted step, starting at t = 0
  std::vector<double> step_energy;
  FieldSnapshot terminal;
  bool complete = true;
  std::string error;
};

/// Where a run starts: step index and state with the auxiliary rate / integral vectors.
struct RestartPoint {
  long step = 0;
  CoefficientState state;
  Vec c_rate;
  Vec flux_integral;
};

Trajectory run(const ModelConfig& config);
Trajectory run(const Model& model, const RestartPoint* start = nullptr);

/// Number of steps and the time of step n for the configured grid (last step clipped to t_final).
long step_count(const TimeSettings& ts);
double step_time(const TimeSettings& ts, long n);

}  // namespace chb
