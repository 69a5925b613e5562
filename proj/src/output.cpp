#include "chb/output.hpp"

#include <fmt/format.h>
#include "json.hpp"

#include <fstream>
#include <sstream>

namespace chb {

namespace {

std::string join_sci(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt::format("{:.16e}", v[i]);
  }
  return s;
}

std::string join_names(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

void put_vector(std::string& out, const char* name, const Vec& v) {
  out += fmt::format("{} {}", name, v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out += fmt::format(" {:.17g}", v[i]);
  out += "\n";
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) throw IoError("empty output path");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  out << text;
  if (!out) throw IoError(fmt::format("write to '{}' failed", path));
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string timeseries_csv(const Trajectory& traj) {
  std::string out = join_names(DiagnosticsRecord::columns()) + "\n";
  for (const TrajectoryPoint& p : traj.points) out += join_sci(p.record.values()) + "\n";
  return out;
}

void emit_timeseries(const Trajectory& traj, const std::string& path) { write_text(path, timeseries_csv(traj)); }

void emit_snapshot(const TrajectoryPoint& point, const Model& model, const std::string& path) {
  if (path.empty()) throw IoError("empty snapshot path");
  const FieldSnapshot s = full_snapshot(point.state, model.bases(), model.params());
  std::string out = "x,y,phi,mu,theta,p,u_x,u_y,q_x,q_y\n";
  for (int q = 0; q < s.size(); ++q)
    out += join_sci({s.x[q], s.y[q], s.phi[q], s.mu[q], s.theta[q], s.p[q], s.ux[q], s.uy[q], s.qx[q], s.qy[q]}) + "\n";
  write_text(path, out);
  write_text(path + ".coef", sidecar_text(point));
}

std::string sidecar_text(const TrajectoryPoint& point) {
  std::string out = "chb-coefficients 1\n";
  out += fmt::format("step {}\n", point.step);
  out += fmt::format("t {:.17g}\n", point.state.t);
  put_vector(out, "a", point.state.a);
  put_vector(out, "b", point.state.b);
  put_vector(out, "c", point.state.c);
  put_vector(out, "d", point.state.d);
  put_vector(out, "e", point.state.e);
  put_vector(out, "c_rate", point.c_rate);
  put_vector(out, "flux_integral", point.flux_integral);
  return out;
}

RestartPoint parse_sidecar(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "chb-coefficients" || version != 1) throw IoError("not a coefficient sidecar");
  RestartPoint r;
  auto read_vec = [&](const char* name) {
    std::string got;
    long n = 0;
    if (!(in >> got >> n) || got != name || n < 0) throw IoError(fmt::format("sidecar: expected vector '{}'", name));
    Vec v(n);
    for (long i = 0; i < n; ++i) {
      std::string tok;
      if (!(in >> tok)) throw IoError(fmt::format("sidecar: truncated vector '{}'", name));
      v[i] = std::strtod(tok.c_str(), nullptr);
    }
    return v;
  };
  std::string got, tok;
  if (!(in >> got >> r.step) || got != "step") throw IoError("sidecar: expected 'step'");
  if (!(in >> got >> tok) || got != "t") throw IoError("sidecar: expected 't'");
  r.state.t = std::strtod(tok.c_str(), nullptr);
  r.state.a = read_vec("a");
  r.state.b = read_vec("b");
  r.state.c = read_vec("c");
  r.state.d = read_vec("d");
  r.state.e = read_vec("e");
  r.c_rate = read_vec("c_rate");
  r.flux_integral = read_vec("flux_integral");
  return r;
}

RestartPoint read_sidecar(const std::string& path) { return parse_sidecar(read_text(path)); }

void emit_dissipation_study(const DissipationStudy& study, const std::string& path) {
  std::string out = "dt,max_abs_residual,max_energy_increase,complete\n";
  for (const DissipationLevel& l : study.levels)
    out += join_sci({l.dt, l.max_abs_residual, l.max_energy_increase, l.complete ? 1.0 : 0.0}) + "\n";
  out += fmt::format("# fitted_order {:.6f}\n# min_pair_order {:.6f}\n", study.fitted_order, study.min_pair_order);
  write_text(path, out);
}

void emit_continuity_study(const ContinuityStudy& study, const std::string& path) {
  std::vector<std::string> cols{"epsilon"};
  for (const std::string& n : continuity_term_names()) cols.push_back(n);
  for (const char* n : {"lhs", "rhs", "ratio", "flux_bound_holds", "flux_bound_max_ratio"}) cols.emplace_back(n);
  std::string out = join_names(cols) + "\n";
  for (const ContinuityLevel& l : study.levels) {
    std::vector<double> row{l.epsilon};
    row.insert(row.end(), l.terms.begin(), l.terms.end());
    row.insert(row.end(), {l.lhs, l.rhs, l.ratio, l.flux_bound_holds ? 1.0 : 0.0, l.flux_bound_max_ratio});
    out += join_sci(row) + "\n";
  }
  std::string slopes = "# slopes";
  for (std::size_t i = 0; i < study.slopes.size(); ++i)
    slopes += fmt::format(" {}={:.6f}", continuity_term_names()[i], study.slopes[i]);
  out += slopes + "\n" + fmt::format("# ratio_spread {:.6f}\n", study.ratio_spread);
  write_text(path, out);
}

void write_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::ordered_json j;
  j["version"] = m.version;
  j["command"] = m.command;
  j["started_utc"] = m.started_utc;
  j["elapsed_seconds"] = m.elapsed_seconds;
  j["files"] = m.files;
  j["config"] = m.config_text;
  write_text(path, j.dump(2) + "\n");
}

RunManifest read_manifest(const std::string& path) {
  const std::string text = read_text(path);
  RunManifest m;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    m.config_text = j.at("config").get<std::string>();
    m.version = j.value("version", "");
    m.command = j.value("command", "");
    m.started_utc = j.value("started_utc", "");
    m.elapsed_seconds = j.value("elapsed_seconds", 0.0);
    m.files = j.value("files", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("manifest '{}': {}", path, e.what()));
  }
  return m;
}

}  // namespace chb
