#include "chb/config.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace chb {

namespace {

struct Value {
  enum class Type { number, boolean, string, list } type = Type::string;
  double num = 0.0;
  bool flag = false;
  std::string str;  ///< unquoted text for strings, raw token otherwise
  std::vector<double> list;
  int line = 0;
  int col = 0;      ///< column of the value
  int key_col = 0;  ///< column of the key

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, line, col); }

  double number() const {
    if (type != Type::number) fail(fmt::format("expected a number, got '{}'", str));
    return num;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail(fmt::format("expected a positive number, got {}", v));
    return v;
  }
  int integer(int lo = std::numeric_limits<int>::min()) const {
    const double v = number();
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(fmt::format("expected an integer, got '{}'", str));
    if (v < lo) fail(fmt::format("expected an integer >= {}, got {}", lo, v));
    return static_cast<int>(v);
  }
  std::uint64_t unsigned_integer() const {
    if (type != Type::number || str.empty() || str.find_first_not_of("0123456789") != std::string::npos)
      fail(fmt::format("expected a non-negative integer, got '{}'", str));
    try {
      return std::stoull(str);
    } catch (const std::exception&) {
      fail(fmt::format("integer out of range: '{}'", str));
    }
  }
  bool boolean() const {
    if (type != Type::boolean) fail(fmt::format("expected true or false, got '{}'", str));
    return flag;
  }
  const std::string& text() const {
    if (type != Type::string) fail(fmt::format("expected a string, got '{}'", str));
    return str;
  }
  const std::vector<double>& numbers(std::size_t n = 0) const {
    if (type != Type::list) fail(fmt::format("expected a list, got '{}'", str));
    if (n != 0 && list.size() != n) fail(fmt::format("expected a list of {} numbers, got {}", n, list.size()));
    return list;
  }
};

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Value parse_value(const std::string& raw, int line, int col) {
  Value v;
  v.line = line;
  v.col = col;
  v.str = raw;
  if (raw.empty()) throw ConfigError("missing value", line, col);
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') throw ConfigError("unterminated string", line, col);
    v.type = Value::Type::string;
    v.str = raw.substr(1, raw.size() - 2);
    return v;
  }
  if (raw.front() == '[') {
    if (raw.back() != ']') throw ConfigError("unterminated list", line, col);
    v.type = Value::Type::list;
    const std::string body = trim(raw.substr(1, raw.size() - 2));
    if (body.empty()) return v;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      double x = 0.0;
      if (!parse_number(trim(item), x)) throw ConfigError(fmt::format("list entry '{}' is not a number", trim(item)), line, col);
      v.list.push_back(x);
    }
    return v;
  }
  if (raw == "true" || raw == "false") {
    v.type = Value::Type::boolean;
    v.flag = raw == "true";
    return v;
  }
  double x = 0.0;
  if (parse_number(raw, x)) {
    v.type = Value::Type::number;
    v.num = x;
    return v;
  }
  v.type = Value::Type::string;
  return v;
}

/// Key -> value entries; section headers are folded into the keys.
std::map<std::string, Value> tokenize(const std::string& text) {
  std::map<std::string, Value> entries;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // strip a comment that is not inside a quoted string
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const std::string body = trim(line);
    if (body.empty()) continue;
    const int indent = static_cast<int>(line.find_first_not_of(" \t")) + 1;
    if (body.front() == '[' && line.find('=') == std::string::npos) {
      if (body.back() != ']') throw ConfigError("unterminated section header", lineno, indent);
      section = trim(body.substr(1, body.size() - 2));
      if (section.empty() || section.find('.') != std::string::npos)
        throw ConfigError(fmt::format("bad section name '{}'", section), lineno, indent);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno, indent);
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("missing key", lineno, indent);
    for (char ch : key)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.'))
        throw ConfigError(fmt::format("bad character in key '{}'", key), lineno, indent);
    if (key.find('.') == std::string::npos) {
      if (section.empty()) throw ConfigError(fmt::format("key '{}' has no section", key), lineno, indent);
      key = section + "." + key;
    }
    const std::string rest = line.substr(eq + 1);
    const auto vstart = rest.find_first_not_of(" \t");
    const int vcol = static_cast<int>(eq + 2 + (vstart == std::string::npos ? 0 : vstart));
    Value v = parse_value(trim(rest), lineno, vcol);
    v.key_col = indent;
    const auto [it, inserted] = entries.emplace(key, v);
    if (!inserted)
      throw ConfigError(fmt::format("duplicate key '{}' (first set on line {})", key, it->second.line), lineno, indent);
  }
  return entries;
}

const char* law_names[] = {"mobility", "permeability", "biot_modulus", "biot_willis", "lame_lambda", "lame_mu"};

ScalarLaw& law_ref(MaterialParams& p, int i) {
  switch (i) {
    case 0: return p.mobility;
    case 1: return p.permeability;
    case 2: return p.biot_modulus;
    case 3: return p.biot_willis;
    case 4: return p.lame_lambda;
    default: return p.lame_mu;
  }
}

const ScalarLaw& law_ref(const MaterialParams& p, int i) { return law_ref(const_cast<MaterialParams&>(p), i); }

struct LawFields {
  std::string kind = "constant";
  double value = 1.0, slope = 0.0, lo = -std::numeric_limits<double>::infinity(),
         hi = std::numeric_limits<double>::infinity(), minus = 1.0, plus = 1.0, width = 1.0;
  const Value* kind_at = nullptr;
};

Sym2 sym_from(const Value& v) {
  const auto& l = v.numbers(3);
  return {l[0], l[1], l[2]};
}

FieldInit& field_ref(InitialSpec& s, const std::string& which) { return which == "phi" ? s.phi : s.theta; }

}  // namespace

std::string to_string(Integrator integrator) {
  return integrator == Integrator::semi_implicit ? "semi_implicit" : "implicit_euler";
}

std::string to_string(ExperimentMode mode) { return mode == ExperimentMode::existence ? "existence" : "continuity"; }

ModelConfig parse_config_unvalidated(const std::string& text) {
  const std::map<std::string, Value> entries = tokenize(text);
  ModelConfig cfg;
  MaterialParams& p = cfg.params;
  LawFields laws[6];
  std::optional<double> stabilization;

  using Setter = std::function<void(const Value&)>;
  std::map<std::string, Setter> setters{
      {"run.name", [&](const Value& v) { cfg.name = v.str; }},
      {"domain.lx", [&](const Value& v) { cfg.domain.lx = v.positive(); }},
      {"domain.ly", [&](const Value& v) { cfg.domain.ly = v.positive(); }},
      {"domain.nq_x", [&](const Value& v) { cfg.domain.nq_x = v.integer(0); }},
      {"domain.nq_y", [&](const Value& v) { cfg.domain.nq_y = v.integer(0); }},
      {"basis.modes", [&](const Value& v) { cfg.k = v.integer(1); }},
      {"interface.gamma", [&](const Value& v) { p.gamma = v.positive(); }},
      {"interface.ell", [&](const Value& v) { p.ell = v.positive(); }},
      {"interface.c_psi", [&](const Value& v) { p.c_psi = v.number(); }},
      {"interface.C_psi", [&](const Value& v) { p.C_psi = v.number(); }},
      {"eigenstrain.kind",
       [&](const Value& v) {
         const std::string& k = v.text();
         if (k == "swelling") p.eigenstrain.kind = Eigenstrain::Kind::swelling;
         else if (k == "vegard") p.eigenstrain.kind = Eigenstrain::Kind::vegard;
         else v.fail(fmt::format("eigenstrain kind must be swelling or vegard, got '{}'", k));
       }},
      {"eigenstrain.xi", [&](const Value& v) { p.eigenstrain.xi = v.number(); }},
      {"eigenstrain.phi_bar", [&](const Value& v) { p.eigenstrain.phi_bar = v.number(); }},
      {"eigenstrain.hat", [&](const Value& v) { p.eigenstrain.hat = sym_from(v); }},
      {"eigenstrain.star", [&](const Value& v) { p.eigenstrain.star = sym_from(v); }},
      {"viscosity.eta", [&](const Value& v) { p.eta = v.number(); }},
      {"bounds.phi_min", [&](const Value& v) { p.sample_min = v.number(); }},
      {"bounds.phi_max", [&](const Value& v) { p.sample_max = v.number(); }},
      {"bounds.c_m", [&](const Value& v) { p.declared.c_m = v.number(); }},
      {"bounds.C_m", [&](const Value& v) { p.declared.C_m = v.number(); }},
      {"bounds.c_kappa", [&](const Value& v) { p.declared.c_kappa = v.number(); }},
      {"bounds.C_kappa", [&](const Value& v) { p.declared.C_kappa = v.number(); }},
      {"bounds.c_M", [&](const Value& v) { p.declared.c_M = v.number(); }},
      {"bounds.C_M", [&](const Value& v) { p.declared.C_M = v.number(); }},
      {"bounds.C_alpha", [&](const Value& v) { p.declared.C_alpha = v.number(); }},
      {"bounds.c_C", [&](const Value& v) { p.declared.c_C = v.number(); }},
      {"bounds.C_C", [&](const Value& v) { p.declared.C_C = v.number(); }},
      {"bounds.C_T", [&](const Value& v) { p.declared.C_T = v.number(); }},
      {"sources.R", [&](const Value& v) { cfg.sources.R = v.number(); }},
      {"sources.S_f", [&](const Value& v) { cfg.sources.S_f = v.number(); }},
      {"sources.f",
       [&](const Value& v) {
         const auto& l = v.numbers(2);
         cfg.sources.f = {l[0], l[1]};
       }},
      {"sources.autonomous", [&](const Value& v) { cfg.sources.autonomous = v.boolean(); }},
      {"time.t_final",
       [&](const Value& v) {
         cfg.time.t_final = v.number();
         if (!(cfg.time.t_final >= 0.0)) v.fail("t_final must be non-negative");
       }},
      {"time.dt", [&](const Value& v) { cfg.time.dt = v.positive(); }},
      {"time.integrator",
       [&](const Value& v) {
         const std::string& k = v.text();
         if (k == "semi_implicit") cfg.time.integrator = Integrator::semi_implicit;
         else if (k == "implicit_euler") cfg.time.integrator = Integrator::implicit_euler_newton;
         else v.fail(fmt::format("integrator must be semi_implicit or implicit_euler, got '{}'", k));
       }},
      {"time.stabilization",
       [&](const Value& v) {
         stabilization = v.number();
         if (*stabilization < 0.0) v.fail("stabilization must be non-negative");
       }},
      {"time.newton_tol", [&](const Value& v) { cfg.time.newton_tol = v.positive(); }},
      {"time.newton_max_iter", [&](const Value& v) { cfg.time.newton_max_iter = v.integer(1); }},
      {"time.max_halvings", [&](const Value& v) { cfg.time.max_halvings = v.integer(0); }},
      {"time.output_every", [&](const Value& v) { cfg.time.output_every = v.integer(1); }},
      {"experiment.mode",
       [&](const Value& v) {
         const std::string& k = v.text();
         if (k == "existence") cfg.experiment.mode = ExperimentMode::existence;
         else if (k == "continuity") cfg.experiment.mode = ExperimentMode::continuity;
         else v.fail(fmt::format("experiment mode must be existence or continuity, got '{}'", k));
       }},
      {"experiment.epsilons",
       [&](const Value& v) {
         cfg.experiment.epsilons = v.numbers();
         for (double e : cfg.experiment.epsilons)
           if (!(e > 0.0)) v.fail("epsilons must be positive");
       }},
      {"experiment.perturbation",
       [&](const Value& v) {
         const std::string& k = v.text();
         if (k != "phi0" && k != "theta0" && k != "R" && k != "S_f")
           v.fail(fmt::format("perturbation must be phi0, theta0, R or S_f, got '{}'", k));
         cfg.experiment.perturbation = k;
       }},
      {"experiment.perturbation_seed", [&](const Value& v) { cfg.experiment.perturbation_seed = v.unsigned_integer(); }},
      {"experiment.dt_levels", [&](const Value& v) { cfg.experiment.dt_levels = v.integer(1); }},
  };
  for (int i = 0; i < 6; ++i) {
    const std::string s = law_names[i];
    LawFields& lf = laws[i];
    setters[s + ".kind"] = [&lf](const Value& v) {
      lf.kind = v.text();
      lf.kind_at = &v;
    };
    setters[s + ".value"] = [&lf](const Value& v) { lf.value = v.number(); };
    setters[s + ".slope"] = [&lf](const Value& v) { lf.slope = v.number(); };
    setters[s + ".lo"] = [&lf](const Value& v) { lf.lo = v.number(); };
    setters[s + ".hi"] = [&lf](const Value& v) { lf.hi = v.number(); };
    setters[s + ".minus"] = [&lf](const Value& v) { lf.minus = v.number(); };
    setters[s + ".plus"] = [&lf](const Value& v) { lf.plus = v.number(); };
    setters[s + ".width"] = [&lf](const Value& v) { lf.width = v.positive(); };
  }
  for (const char* which : {"phi", "theta"}) {
    const std::string s = std::string("initial.") + which + "_";
    FieldInit& f = field_ref(cfg.initial, which);
    setters[s + "kind"] = [&f](const Value& v) {
      const std::string& k = v.text();
      if (k != "constant" && k != "noise" && k != "cosine" && k != "disk")
        v.fail(fmt::format("initial field kind must be constant, noise, cosine or disk, got '{}'", k));
      f.kind = k;
    };
    setters[s + "mean"] = [&f](const Value& v) { f.mean = v.number(); };
    setters[s + "amplitude"] = [&f](const Value& v) { f.amplitude = v.number(); };
    setters[s + "seed"] = [&f](const Value& v) { f.seed = v.unsigned_integer(); };
    setters[s + "mode"] = [&f](const Value& v) {
      const auto& l = v.numbers(2);
      for (double x : l)
        if (x != std::floor(x) || x < 0) v.fail("mode entries must be non-negative integers");
      f.mode = {static_cast<int>(l[0]), static_cast<int>(l[1])};
    };
    setters[s + "radius"] = [&f](const Value& v) { f.radius = v.positive(); };
  }

  for (const auto& [key, value] : entries) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(fmt::format("unknown key '{}'", key), value.line, value.key_col);
    it->second(value);
  }

  for (int i = 0; i < 6; ++i) {
    const LawFields& lf = laws[i];
    ScalarLaw& law = law_ref(p, i);
    if (lf.kind == "constant") law = ScalarLaw::constant(lf.value);
    else if (lf.kind == "affine") {
      if (!(lf.lo <= lf.hi)) throw ConfigError(fmt::format("{}: lo must not exceed hi", law_names[i]));
      law = ScalarLaw::affine(lf.value, lf.slope, lf.lo, lf.hi);
    } else if (lf.kind == "sigmoid") law = ScalarLaw::sigmoid(lf.minus, lf.plus, lf.width);
    else lf.kind_at->fail(fmt::format("law kind must be constant, affine or sigmoid, got '{}'", lf.kind));
  }
  if (p.sample_min >= p.sample_max) throw ConfigError("bounds.phi_min must be below bounds.phi_max");
  cfg.time.stabilization = stabilization.value_or(p.c_psi);
  return cfg;
}

ModelConfig parse_config(const std::string& text) {
  ModelConfig cfg = parse_config_unvalidated(text);
  validate_assumptions(cfg.params, cfg.sources, cfg.experiment.mode).raise_if_failed();
  return cfg;
}

std::string emit_config(const ModelConfig& c) {
  const MaterialParams& p = c.params;
  std::string out;
  auto line = [&out](const std::string& key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
  auto num = [](double x) { return fmt::format("{}", x); };
  auto list = [&num](std::initializer_list<double> xs) {
    std::string s = "[";
    bool first = true;
    for (double x : xs) {
      s += (first ? "" : ", ") + num(x);
      first = false;
    }
    return s + "]";
  };
  auto sym = [&list](const Sym2& t) { return list({t.xx, t.yy, t.xy}); };

  line("run.name", fmt::format("\"{}\"", c.name));
  line("domain.lx", num(c.domain.lx));
  line("domain.ly", num(c.domain.ly));
  line("domain.nq_x", num(c.domain.nq_x));
  line("domain.nq_y", num(c.domain.nq_y));
  line("basis.modes", num(c.k));
  line("interface.gamma", num(p.gamma));
  line("interface.ell", num(p.ell));
  line("interface.c_psi", num(p.c_psi));
  line("interface.C_psi", num(p.C_psi));
  for (int i = 0; i < 6; ++i) {
    const std::string s = law_names[i];
    const ScalarLaw& law = law_ref(p, i);
    const auto& a = law.params();
    switch (law.kind()) {
      case ScalarLaw::Kind::constant:
        line(s + ".kind", "constant");
        line(s + ".value", num(a[0]));
        break;
      case ScalarLaw::Kind::affine:
        line(s + ".kind", "affine");
        line(s + ".value", num(a[0]));
        line(s + ".slope", num(a[1]));
        line(s + ".lo", num(a[2]));
        line(s + ".hi", num(a[3]));
        break;
      case ScalarLaw::Kind::sigmoid:
        line(s + ".kind", "sigmoid");
        line(s + ".minus", num(a[0]));
        line(s + ".plus", num(a[1]));
        line(s + ".width", num(a[2]));
        break;
      case ScalarLaw::Kind::custom:
        throw ConfigError(fmt::format("{}: a custom law cannot be written to a config file", s));
    }
  }
  const Eigenstrain& e = p.eigenstrain;
  line("eigenstrain.kind", e.kind == Eigenstrain::Kind::swelling ? "swelling" : "vegard");
  line("eigenstrain.xi", num(e.xi));
  line("eigenstrain.phi_bar", num(e.phi_bar));
  line("eigenstrain.hat", sym(e.hat));
  line("eigenstrain.star", sym(e.star));
  line("viscosity.eta", num(p.eta));
  line("bounds.phi_min", num(p.sample_min));
  line("bounds.phi_max", num(p.sample_max));
  const DeclaredBounds& d = p.declared;
  const std::pair<const char*, const std::optional<double>*> declared[] = {
      {"c_m", &d.c_m},   {"C_m", &d.C_m},         {"c_kappa", &d.c_kappa}, {"C_kappa", &d.C_kappa},
      {"c_M", &d.c_M},   {"C_M", &d.C_M},         {"C_alpha", &d.C_alpha}, {"c_C", &d.c_C},
      {"C_C", &d.C_C},   {"C_T", &d.C_T}};
  for (const auto& [name, v] : declared)
    if (v->has_value()) line(std::string("bounds.") + name, num(**v));
  line("sources.R", num(c.sources.R));
  line("sources.S_f", num(c.sources.S_f));
  line("sources.f", list({c.sources.f[0], c.sources.f[1]}));
  line("sources.autonomous", c.sources.autonomous ? "true" : "false");
  for (const char* which : {"phi", "theta"}) {
    const FieldInit& f = std::string(which) == "phi" ? c.initial.phi : c.initial.theta;
    const std::string s = std::string("initial.") + which + "_";
    line(s + "kind", f.kind);
    line(s + "mean", num(f.mean));
    line(s + "amplitude", num(f.amplitude));
    line(s + "seed", fmt::format("{}", f.seed));
    line(s + "mode", fmt::format("[{}, {}]", f.mode[0], f.mode[1]));
    line(s + "radius", num(f.radius));
  }
  line("time.t_final", num(c.time.t_final));
  line("time.dt", num(c.time.dt));
  line("time.integrator", to_string(c.time.integrator));
  line("time.stabilization", num(c.time.stabilization));
  line("time.newton_tol", num(c.time.newton_tol));
  line("time.newton_max_iter", num(c.time.newton_max_iter));
  line("time.max_halvings", num(c.time.max_halvings));
  line("time.output_every", num(c.time.output_every));
  line("experiment.mode", to_string(c.experiment.mode));
  std::string eps = "[";
  for (std::size_t i = 0; i < c.experiment.epsilons.size(); ++i) eps += (i ? ", " : "") + num(c.experiment.epsilons[i]);
  line("experiment.epsilons", eps + "]");
  line("experiment.perturbation", c.experiment.perturbation);
  line("experiment.perturbation_seed", fmt::format("{}", c.experiment.perturbation_seed));
  line("experiment.dt_levels", num(c.experiment.dt_levels));
  return out;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace chb
