#include "fmslab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "fmslab/error.hpp"

namespace fmslab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_unsigned(const std::string& s) {
  if (s.empty() || !std::isdigit(static_cast<unsigned char>(s.front()))) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
  return static_cast<std::uint64_t>(v);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "run.experiment", "run.seed", "run.workers", "run.output", "run.format",
      "model.family", "model.kappa", "model.j_offset", "model.d_offset", "model.k", "model.delta",
      "model.offset_phase", "model.gamma_loss", "model.rabi_offset", "model.beta",
      "model.coupling", "model.gamma_a", "model.gamma_b",
      "trajectory.kind", "trajectory.center_re", "trajectory.center_im", "trajectory.radius",
      "trajectory.omega", "trajectory.start_angle", "trajectory.orientation", "trajectory.steps",
      "trajectory.velocity", "trajectory.offset_re", "trajectory.offset_im",
      "propagation.tolerance", "propagation.max_steps", "propagation.strict",
      "grid.R", "grid.omega", "grid.W", "grid.theta", "grid.lambda", "grid.re", "grid.im",
      "static.angle",
      "dynamic.rank", "dynamic.metric_scale", "dynamic.approach_speed", "dynamic.start_distance",
      "disorder.trials",
      "saito.n_theta",
      "simulate.dark_periods",
      "invariants.germ", "invariants.claimed_tjurina",
      "resurge.series", "resurge.n_max", "resurge.pade_order", "resurge.ray_angle",
      "resurge.sigma", "resurge.action", "resurge.inst_prefactor", "resurge.prefactor_over_lambda",
      "qgt.h_rel", "qgt.band"};
  return keys;
}

struct Checker {
  const ConfigFile& cfg;
  std::vector<Diagnostic>& out;

  void add(const std::string& field, const std::string& msg) { out.push_back({field, msg}); }

  std::optional<double> number(const std::string& key) {
    const auto v = cfg.get(key);
    if (!v) return std::nullopt;
    const auto d = to_double(*v);
    if (!d) add(key, "not a finite number: '" + *v + "'");
    return d;
  }

  std::optional<long long> integer(const std::string& key) {
    const auto v = cfg.get(key);
    if (!v) return std::nullopt;
    const auto d = to_integer(*v);
    if (!d) add(key, "not an integer: '" + *v + "'");
    return d;
  }

  void require(const std::string& key) {
    if (!cfg.has(key)) add(key, "required for this experiment");
  }

  void grid(const std::string& key, bool positive, std::size_t min_points) {
    const auto v = cfg.get(key);
    if (!v) {
      add(key, "required grid is missing");
      return;
    }
    std::vector<double> g;
    try {
      g = parse_grid(*v);
    } catch (const ConfigError& e) {
      add(key, e.what());
      return;
    }
    if (g.empty()) {
      add(key, "grid is empty");
      return;
    }
    if (g.size() < min_points) add(key, "needs at least " + std::to_string(min_points) + " points");
    if (positive && std::any_of(g.begin(), g.end(), [](double x) { return !(x > 0.0); })) {
      add(key, "all values must be > 0");
    }
  }
};

void check_model(Checker& c) {
  const auto fam = c.cfg.get("model.family");
  if (!fam) {
    c.add("model.family", "required for this experiment");
    return;
  }
  Family family;
  try {
    family = parse_family(*fam);
  } catch (const ConfigError& e) {
    c.add("model.family", e.what());
    return;
  }
  for (const char* key : {"model.kappa", "model.j_offset", "model.d_offset", "model.delta",
                          "model.offset_phase", "model.gamma_loss", "model.rabi_offset",
                          "model.beta", "model.coupling", "model.gamma_a", "model.gamma_b"}) {
    c.number(key);
  }
  if (family == Family::TransmonEP2) {
    if (const auto k = c.number("model.kappa"); k && !(*k > 0.0)) c.add("model.kappa", "must be > 0");
  }
  if (family == Family::RankK) {
    if (const auto k = c.integer("model.k"); k && *k < 1) c.add("model.k", "must be >= 1");
  }
  if (family == Family::Rydberg) {
    if (const auto g = c.number("model.gamma_loss"); g && !(*g > 0.0)) {
      c.add("model.gamma_loss", "must be > 0");
    }
  }
}

void check_trajectory(Checker& c, bool loop_only) {
  const std::string kind = c.cfg.get("trajectory.kind").value_or("loop");
  if (kind != "loop" && kind != "sweep") c.add("trajectory.kind", "must be 'loop' or 'sweep'");
  if (loop_only && kind != "loop") c.add("trajectory.kind", "this experiment needs a loop");
  for (const char* key : {"trajectory.center_re", "trajectory.center_im", "trajectory.start_angle",
                          "trajectory.velocity", "trajectory.offset_re", "trajectory.offset_im"}) {
    c.number(key);
  }
  if (const auto r = c.number("trajectory.radius"); r && !(*r >= 0.0)) {
    c.add("trajectory.radius", "must be >= 0");
  }
  if (!c.cfg.has("trajectory.omega")) {
    c.add("trajectory.omega", "required for this experiment");
  } else if (const auto w = c.number("trajectory.omega"); w && !(*w > 0.0)) {
    c.add("trajectory.omega", "must be > 0");
  }
  if (const auto o = c.integer("trajectory.orientation"); o && *o != 1 && *o != -1) {
    c.add("trajectory.orientation", "must be +1 or -1");
  }
  if (const auto n = c.integer("trajectory.steps")) {
    if (*n < 64) c.add("trajectory.steps", "must be >= 64");
    if (!is_power_of_two(*n)) c.add("trajectory.steps", "must be a power of two");
  }
}

void check_propagation(Checker& c) {
  if (const auto t = c.number("propagation.tolerance"); t && !(*t > 0.0)) {
    c.add("propagation.tolerance", "must be > 0");
  }
  if (const auto m = c.integer("propagation.max_steps"); m && (*m < 128 || !is_power_of_two(*m))) {
    c.add("propagation.max_steps", "must be a power of two >= 128");
  }
  if (const auto s = c.cfg.get("propagation.strict"); s && *s != "true" && *s != "false") {
    c.add("propagation.strict", "must be true or false");
  }
}

ModelSpec build_model(const ConfigFile& cfg) {
  const Family family = parse_family(cfg.get("model.family").value_or("TransmonEP2"));
  auto num = [&](const char* key, double fallback) {
    const auto v = cfg.get(key);
    return v ? *to_double(*v) : fallback;
  };
  ModelSpec m;
  switch (family) {
    case Family::TransmonEP2: m = ModelSpec::transmon(num("model.kappa", 1.0)); break;
    case Family::RankK:
      m = ModelSpec::rank_k(static_cast<int>(*to_integer(cfg.get("model.k").value_or("1"))),
                            num("model.delta", 0.0));
      break;
    case Family::Rydberg: m = ModelSpec::rydberg(num("model.gamma_loss", 1.0)); break;
    case Family::PhotonicDimer:
      m = ModelSpec::photonic(num("model.gamma_a", 1.0), num("model.gamma_b", 0.0));
      break;
  }
  m.j_offset = num("model.j_offset", m.j_offset);
  m.d_offset = num("model.d_offset", m.d_offset);
  m.offset_phase = num("model.offset_phase", m.offset_phase);
  m.rabi_offset = num("model.rabi_offset", m.rabi_offset);
  m.beta = num("model.beta", m.beta);
  m.coupling = num("model.coupling", m.coupling);
  return m;
}

TrajectorySpec build_trajectory(const ConfigFile& cfg) {
  auto num = [&](const char* key, double fallback) {
    const auto v = cfg.get(key);
    return v ? *to_double(*v) : fallback;
  };
  TrajectorySpec t;
  t.kind = cfg.get("trajectory.kind").value_or("loop") == "sweep" ? TrajectoryKind::LinearSweep
                                                                  : TrajectoryKind::Loop;
  t.center = cplx(num("trajectory.center_re", 0.0), num("trajectory.center_im", 0.0));
  t.radius = num("trajectory.radius", 0.0);
  t.omega = num("trajectory.omega", 0.05);
  t.start_angle = num("trajectory.start_angle", 0.0);
  t.orientation = static_cast<int>(num("trajectory.orientation", -1.0));
  t.steps = static_cast<int>(num("trajectory.steps", 4096.0));
  t.velocity = num("trajectory.velocity", 0.0);
  t.offset = cplx(num("trajectory.offset_re", 0.0), num("trajectory.offset_im", 0.0));
  return t;
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text) {
  ConfigFile cfg;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    const std::string body = trim(cut == std::string::npos ? line : line.substr(0, cut));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = trim(body.substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    cfg.values_[section.empty() ? key : section + "." + key] = trim(body.substr(eq + 1));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> ConfigFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string format_diagnostics(const std::vector<Diagnostic>& diags) {
  std::ostringstream out;
  for (const auto& d : diags) out << d.field << ": " << d.message << "\n";
  return out.str();
}

std::vector<double> parse_grid(std::string_view text) {
  const std::string s = trim(text);
  std::istringstream words(s);
  std::string head;
  words >> head;
  if (head == "linspace" || head == "logspace") {
    std::string a, b, n;
    words >> a >> b >> n;
    std::string extra;
    const auto lo = to_double(a), hi = to_double(b);
    const auto count = to_integer(n);
    if (!lo || !hi || !count || (words >> extra)) {
      throw ConfigError("grid: expected '" + head + " lo hi n'");
    }
    if (*count < 1) throw ConfigError("grid: point count must be >= 1");
    if (head == "logspace" && (!(*lo > 0.0) || !(*hi > 0.0))) {
      throw ConfigError("grid: logspace bounds must be > 0");
    }
    return head == "linspace" ? linspace(*lo, *hi, static_cast<int>(*count))
                              : logspace(*lo, *hi, static_cast<int>(*count));
  }
  std::vector<double> out;
  std::stringstream items(s);
  std::string item;
  while (std::getline(items, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    const auto v = to_double(t);
    if (!v) throw ConfigError("grid: not a number: '" + t + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<Diagnostic> validate(const ConfigFile& cfg) {
  std::vector<Diagnostic> out;
  Checker c{cfg, out};
  for (const auto& [key, value] : cfg.values()) {
    if (!known_keys().count(key)) c.add(key, "unknown key");
  }
  const auto exp = cfg.get("run.experiment");
  if (!exp) {
    c.add("run.experiment", "missing experiment name");
    return out;
  }
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), *exp) == names.end()) {
    c.add("run.experiment", "unknown experiment '" + *exp + "'");
    return out;
  }
  if (const auto s = cfg.get("run.seed"); s && !to_unsigned(*s)) {
    c.add("run.seed", "not an unsigned 64-bit integer: '" + *s + "'");
  }
  if (const auto w = c.integer("run.workers"); w && *w < 1) c.add("run.workers", "must be >= 1");
  if (const auto f = cfg.get("run.format"); f && *f != "csv" && *f != "json") {
    c.add("run.format", "must be csv or json");
  }
  check_propagation(c);

  const std::string& e = *exp;
  if (e == "simulate") {
    check_model(c);
    check_trajectory(c, false);
    if (const auto n = c.integer("simulate.dark_periods"); n && *n < 0) {
      c.add("simulate.dark_periods", "must be >= 0");
    }
  } else if (e == "scaling-static") {
    check_model(c);
    c.number("static.angle");
    c.grid("grid.R", true, 4);
  } else if (e == "scaling-dynamic") {
    if (!cfg.has("dynamic.rank")) check_model(c);
    if (const auto r = c.integer("dynamic.rank"); r && *r < 0) c.add("dynamic.rank", "must be >= 0");
    for (const char* key : {"dynamic.metric_scale", "dynamic.approach_speed", "dynamic.start_distance"}) {
      if (const auto v = c.number(key); v && !(*v > 0.0)) c.add(key, "must be > 0");
    }
    c.grid("grid.omega", true, 4);
    if (const auto g = cfg.get("grid.omega")) {
      try {
        const auto w = parse_grid(*g);
        if (!w.empty() && *std::min_element(w.begin(), w.end()) > 0.0 &&
            *std::max_element(w.begin(), w.end()) / *std::min_element(w.begin(), w.end()) < 100.0 - 1e-9) {
          c.add("grid.omega", "must span at least two decades");
        }
      } catch (const ConfigError&) {
      }
    }
  } else if (e == "disorder") {
    check_model(c);
    check_trajectory(c, true);
    c.grid("grid.W", false, 1);
    if (const auto g = cfg.get("grid.W")) {
      try {
        const auto w = parse_grid(*g);
        if (std::any_of(w.begin(), w.end(), [](double x) { return x < 0.0; })) {
          c.add("grid.W", "values must be >= 0");
        }
      } catch (const ConfigError&) {
      }
    }
    if (const auto t = c.integer("disorder.trials"); t && *t < 32) c.add("disorder.trials", "must be >= 32");
  } else if (e == "saito-scan") {
    check_model(c);
    check_trajectory(c, true);
    if (const auto n = c.integer("saito.n_theta"); n && *n < 16) c.add("saito.n_theta", "must be >= 16");
  } else if (e == "phantom") {
    check_model(c);
    check_trajectory(c, false);
    if (cfg.get("model.family").value_or("") != "RankK") c.add("model.family", "phantom needs RankK");
    if (const auto d = c.number("model.delta"); !d || *d == 0.0) c.add("model.delta", "must be nonzero");
    if (cfg.get("trajectory.kind").value_or("loop") != "sweep") c.add("trajectory.kind", "phantom needs a sweep");
    c.grid("grid.theta", false, 2);
  } else if (e == "invariants") {
    c.require("invariants.germ");
    c.integer("invariants.claimed_tjurina");
  } else if (e == "resurge") {
    c.grid("grid.lambda", true, 1);
    const std::string series = cfg.get("resurge.series").value_or("euler");
    if (series != "euler" && series != "euler-flipped") {
      c.add("resurge.series", "must be euler or euler-flipped");
    }
    if (const auto n = c.integer("resurge.n_max"); n && (*n < 20 || *n > 170)) {
      c.add("resurge.n_max", "must be in [20, 170]");
    }
    c.integer("resurge.pade_order");
    for (const char* key : {"resurge.ray_angle", "resurge.sigma", "resurge.inst_prefactor"}) c.number(key);
    if (const auto a = c.number("resurge.action"); a && !(*a > 0.0)) c.add("resurge.action", "must be > 0");
  } else if (e == "qgt-map") {
    check_model(c);
    c.grid("grid.re", false, 1);
    c.grid("grid.im", false, 1);
    if (const auto h = c.number("qgt.h_rel"); h && !(*h > 0.0)) c.add("qgt.h_rel", "must be > 0");
    c.integer("qgt.band");
  }
  return out;
}

ExperimentConfig build_config(const ConfigFile& cfg) {
  const auto diags = validate(cfg);
  if (!diags.empty()) throw ConfigError("invalid configuration:\n" + format_diagnostics(diags));
  ExperimentConfig ec;
  ec.source = cfg;
  ec.experiment = *cfg.get("run.experiment");
  if (cfg.has("model.family")) ec.model = build_model(cfg);
  ec.trajectory = build_trajectory(cfg);
  ec.seed = *to_unsigned(cfg.get("run.seed").value_or("0"));
  ec.workers = static_cast<int>(*to_integer(cfg.get("run.workers").value_or("1")));
  ec.output_path = cfg.get("run.output").value_or("");
  ec.format = cfg.get("run.format").value_or("csv") == "json" ? OutputFormat::Json : OutputFormat::Csv;
  ec.propagation.tolerance = ec.number("propagation.tolerance", 1e-6);
  ec.propagation.max_steps = static_cast<int>(ec.integer("propagation.max_steps", 1 << 16));
  ec.propagation.require_convergence = ec.text("propagation.strict", "true") == "true";
  for (const auto& [key, value] : cfg.values()) {
    if (key.rfind("grid.", 0) == 0) ec.grids[key.substr(5)] = parse_grid(value);
  }
  return ec;
}

double ExperimentConfig::number(const std::string& key, double fallback) const {
  const auto v = source.get(key);
  return v ? to_double(*v).value_or(fallback) : fallback;
}

long ExperimentConfig::integer(const std::string& key, long fallback) const {
  const auto v = source.get(key);
  return v ? static_cast<long>(to_integer(*v).value_or(fallback)) : fallback;
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
  return source.get(key).value_or(fallback);
}

}  // namespace fmslab
