#pragma once

#include "chb/dynamics.hpp"
#include "chb/experiments.hpp"

#include <string>
#include <vector>

namespace chb {

/// I/O failure while writing or reading an artifact.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One row per output point, DiagnosticsRecord::columns() as header, values as %.16e.
void emit_timeseries(const Trajectory& traj, const std::string& path);
std::string timeseries_csv(const Trajectory& traj);

/// Grid dump (x, y, phi, mu, theta, p, u_x, u_y, q_x, q_y) plus the coefficient sidecar at path + ".coef".
void emit_snapshot(const TrajectoryPoint& point, const Model& model, const std::string& path);
/// Sidecar text: step, t and the a, b, c, d, e, c_rate, flux_integral vectors in %.17g.
std::string sidecar_text(const TrajectoryPoint& point);
RestartPoint parse_sidecar(const std::string& text);
RestartPoint read_sidecar(const std::string& path);

void emit_dissipation_study(const DissipationStudy& study, const std::string& path);
void emit_continuity_study(const ContinuityStudy& study, const std::string& path);

struct RunManifest {
  std::string config_text;  ///< fully resolved configuration
  std::string version;
  std::string command;
  std::string started_utc;
  double elapsed_seconds = 0.0;
  std::vector<std::string> files;
};

void write_manifest(const RunManifest& manifest, const std::string& path);
RunManifest read_manifest(const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace chb
