#include "fmslab/experiments.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "fmslab/error.hpp"
#include "fmslab/geometry.hpp"
#include "fmslab/invariants.hpp"
#include "fmslab/isometry.hpp"
#include "fmslab/parallel.hpp"
#include "fmslab/resurgence.hpp"
#include "fmslab/scaling.hpp"

namespace fmslab {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json series_json(const RealSeries& s) {
  json out = json::array();
  for (std::size_t i = 0; i < s.size(); ++i) out.push_back(json::array({s.x[i], s.y[i]}));
  return out;
}

json fit_json(const FitResult& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual_rms", f.residual_rms}};
}

json scaling_json(const ScalingReport& r) {
  return {{"sweep_variable", r.sweep_variable}, {"series", series_json(r.series)},
          {"fit", fit_json(r.fit)},             {"expected_exponent", r.expected_exponent},
          {"tolerance", r.tolerance},           {"pass", r.pass}};
}

void add_matrix_rows(DataTable& t, const std::string& name, const CMatrix& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      t.rows.push_back({name, static_cast<long long>(i), static_cast<long long>(j), m(i, j).real(),
                        m(i, j).imag()});
    }
  }
}

ExperimentOutput simulate(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  const MonodromyResult r = propagate(cfg.model, cfg.trajectory, cfg.propagation);
  const IsometryReport iso = find_invariant_pairing(r.normalized);
  const double split = quasienergy_splitting(r.quasienergies, r.period);
  const EpLocation ep = ep_location(cfg.model);
  out.converged.push_back(r.converged);

  json qe = json::array();
  for (const auto& e : r.quasienergies) qe.push_back(complex_json(e));
  out.report["MonodromyResult"] = {
      {"monodromy", matrix_json(r.monodromy)},   {"normalized", matrix_json(r.normalized)},
      {"quasienergies", qe},                     {"unipotent", matrix_json(r.unipotent)},
      {"stokes_invariant", r.stokes_invariant},  {"converged", r.converged},
      {"step_count_used", r.step_count_used},    {"relative_change", r.relative_change},
      {"period", r.period}};
  out.report["quasienergy_splitting"] = split;
  out.report["EpLocation"] = {{"position", complex_json(ep.position)},
                              {"physical", complex_json(ep.physical)},
                              {"order", ep.order}};
  out.report["IsometryReport"] = {{"pairing", matrix_json(iso.pairing)},
                                  {"residual", iso.residual},
                                  {"raw_residual", iso.raw_residual},
                                  {"condition", iso.condition},
                                  {"null_dimension", iso.null_dimension},
                                  {"pass", iso.pass}};
  const long dark = cfg.integer("simulate.dark_periods", 0);
  if (dark > 0) out.report["dark_state_phase"] = dark_state_phase(cfg.model, cfg.trajectory, static_cast<int>(dark));

  auto& t = out.table;
  t.columns = {{"quantity", "-"}, {"i", "1"}, {"j", "1"}, {"re", "1"}, {"im", "1"}};
  add_matrix_rows(t, "monodromy", r.monodromy);
  add_matrix_rows(t, "normalized", r.normalized);
  add_matrix_rows(t, "unipotent", r.unipotent);
  for (std::size_t i = 0; i < r.quasienergies.size(); ++i) {
    t.rows.push_back({std::string("quasienergy"), static_cast<long long>(i), 0LL,
                      r.quasienergies[i].real(), r.quasienergies[i].imag()});
  }
  t.rows.push_back({std::string("stokes_invariant"), 0LL, 0LL, r.stokes_invariant, 0.0});
  t.rows.push_back({std::string("quasienergy_splitting"), 0LL, 0LL, split, 0.0});
  t.rows.push_back({std::string("isometry_residual"), 0LL, 0LL, iso.residual, 0.0});
  return out;
}

ExperimentOutput scaling_static(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  const ScalingReport rep =
      static_gap_scaling(cfg.model, cfg.grids.at("R"), cfg.number("static.angle", 0.0));
  out.report["ScalingReport"] = scaling_json(rep);
  out.table.columns = {{"R", "control"}, {"gap", "rate"}};
  for (std::size_t i = 0; i < rep.series.size(); ++i) {
    out.table.rows.push_back({rep.series.x[i], rep.series.y[i]});
  }
  return out;
}

ExperimentOutput scaling_dynamic(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  BreakdownParams p;
  p.metric_scale = cfg.number("dynamic.metric_scale", 1.0);
  p.approach_speed = cfg.number("dynamic.approach_speed", 1.0);
  p.start_distance = cfg.number("dynamic.start_distance", 1.0);
  const int rank = static_cast<int>(cfg.integer("dynamic.rank", cfg.model.rank()));
  std::vector<DynamicGapPoint> pts;
  const ScalingReport rep = dynamic_gap_scaling(rank, cfg.grids.at("omega"), p, &pts);
  out.report["ScalingReport"] = scaling_json(rep);
  out.report["rank"] = rank;
  out.table.columns = {{"omega", "rate"},
                       {"critical_distance", "control"},
                       {"gap_min", "rate"},
                       {"pullback_gap", "rate"}};
  for (const auto& pt : pts) {
    out.table.rows.push_back({pt.omega, pt.critical_distance, pt.gap_min, pt.pullback_gap});
  }
  return out;
}

ExperimentOutput disorder(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  const int trials = static_cast<int>(cfg.integer("disorder.trials", 64));
  const DisorderResult res = disorder_robustness(cfg.model, cfg.trajectory, cfg.grids.at("W"),
                                                 trials, cfg.seed, cfg.propagation, cfg.workers);
  out.table.columns = {{"W", "rate"},          {"fms_fidelity", "1"},
                       {"fms_stderr", "1"},    {"spectral_fidelity", "1"},
                       {"spectral_stderr", "1"}, {"converged", "1"}};
  json pts = json::array();
  for (const auto& p : res.points) {
    out.table.rows.push_back({p.w, p.fms_mean, p.fms_stderr, p.spectral_mean, p.spectral_stderr,
                              static_cast<long long>(p.all_converged)});
    out.converged.push_back(p.all_converged);
    pts.push_back({{"W", p.w},
                   {"fms_fidelity", p.fms_mean},
                   {"fms_stderr", p.fms_stderr},
                   {"spectral_fidelity", p.spectral_mean},
                   {"spectral_stderr", p.spectral_stderr}});
  }
  out.report["trials"] = trials;
  out.report["points"] = pts;
  return out;
}

ExperimentOutput saito(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  const SaitoScan scan = saito_scan(cfg.model, cfg.trajectory,
                                    static_cast<int>(cfg.integer("saito.n_theta", 0)));
  out.report["SaitoScan"] = {{"peak_locations", scan.peak_locations},
                             {"peak_count", scan.peak_count}};
  if (cfg.model.family == Family::RankK) {
    // A_k germ z^{k+1} belongs to the rank-k model.
    const PolyGerm germ = PolyGerm::parse("z^" + std::to_string(cfg.model.k + 1));
    out.report["germ"] = germ.to_string();
    out.report["peak_consistency"] = peak_consistency(germ, scan);
  }
  out.table.columns = {{"theta", "rad"}, {"amplitude", "1"}, {"signal", "1/rad"}, {"is_peak", "1"}};
  std::size_t next = 0;
  for (std::size_t i = 0; i < scan.theta_grid.size(); ++i) {
    const bool peak = next < scan.peak_locations.size() && scan.peak_locations[next] == scan.theta_grid[i];
    if (peak) ++next;
    out.table.rows.push_back(
        {scan.theta_grid[i], scan.amplitude[i], scan.signal[i], static_cast<long long>(peak)});
  }
  return out;
}

ExperimentOutput phantom(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  const auto& grid = cfg.grids.at("theta");
  std::vector<double> stokes(grid.size()), gap(grid.size());
  std::vector<char> conv(grid.size());
  parallel_for(grid.size(), cfg.workers, [&](std::size_t i) {
    const PhantomScan one = phantom_scan(cfg.model, cfg.trajectory, {grid[i]}, cfg.propagation);
    stokes[i] = one.stokes.y[0];
    gap[i] = one.gap.y[0];
    conv[i] = one.converged[0];
  });
  out.table.columns = {{"theta", "rad"}, {"stokes_invariant", "1"}, {"min_gap", "rate"}, {"converged", "1"}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.table.rows.push_back({grid[i], stokes[i], gap[i], static_cast<long long>(conv[i])});
    out.converged.push_back(conv[i] != 0);
  }
  out.report["stokes"] = stokes;
  out.report["min_gap"] = gap;
  out.report["theta"] = grid;
  return out;
}

ExperimentOutput invariants(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  const PolyGerm f = PolyGerm::parse(cfg.text("invariants.germ", ""));
  std::optional<long> claimed;
  if (cfg.source.has("invariants.claimed_tjurina")) claimed = cfg.integer("invariants.claimed_tjurina", 0);
  InvariantReport rep;
  try {
    rep = analyze_germ(f, claimed);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("invariants: ") + e.what());
  }
  json trace = json::array();
  for (const auto& s : rep.milnor_trace) {
    trace.push_back({{"degree", s.degree}, {"dimension", s.dimension}, {"absorbed", s.absorbed}});
  }
  out.report["InvariantReport"] = {
      {"germ", rep.germ},
      {"milnor", rep.milnor},
      {"tjurina", rep.tjurina},
      {"modality_gap", rep.modality_gap},
      {"truncation_degree_used", rep.truncation_degree_used},
      {"predicted_peaks", rep.predicted_peaks},
      {"claimed_tjurina", claimed ? json(*claimed) : json(nullptr)},
      {"tjurina_discrepancy", rep.tjurina_discrepancy},
      {"stabilization", trace}};
  out.table.columns = {{"germ", "-"},          {"milnor", "1"},
                       {"tjurina", "1"},       {"modality_gap", "1"},
                       {"truncation_degree", "1"}, {"predicted_peaks", "1"},
                       {"claimed_tjurina", "1"}, {"tjurina_discrepancy", "1"}};
  out.table.rows.push_back({rep.germ, static_cast<long long>(rep.milnor),
                            static_cast<long long>(rep.tjurina),
                            static_cast<long long>(rep.modality_gap),
                            static_cast<long long>(rep.truncation_degree_used),
                            static_cast<long long>(rep.predicted_peaks),
                            claimed ? Cell(static_cast<long long>(*claimed)) : Cell(std::string("")),
                            static_cast<long long>(rep.tjurina_discrepancy)});
  return out;
}

ExperimentOutput resurge(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  const bool flipped = cfg.text("resurge.series", "euler") == "euler-flipped";
  const int sign = flipped ? 1 : -1;
  const AsymptoticSeries series = euler_series(static_cast<int>(cfg.integer("resurge.n_max", 40)), sign);
  TransSeriesData ts;
  ts.sigma = cfg.number("resurge.sigma", flipped ? std::numbers::pi : 0.0);
  ts.action = cfg.number("resurge.action", 1.0);
  ts.inst_prefactor = cfg.number("resurge.inst_prefactor", 1.0);
  ts.prefactor_over_lambda = cfg.text("resurge.prefactor_over_lambda", flipped ? "true" : "false") == "true";
  LateralOptions lo;
  lo.pade_order = static_cast<int>(cfg.integer("resurge.pade_order", 0));
  lo.ray_angle = cfg.number("resurge.ray_angle", 0.05);

  const auto& grid = cfg.grids.at("lambda");
  std::vector<ResummationReport> reps(grid.size());
  parallel_for(grid.size(), cfg.workers, [&](std::size_t i) {
    reps[i] = resum(series, grid[i], ts, euler_reference(grid[i], sign), lo);
  });
  out.table.columns = {{"lambda", "1"},          {"optimal_truncation_value", "1"},
                       {"optimal_order", "1"},   {"lateral_plus_re", "1"},
                       {"lateral_plus_im", "1"}, {"lateral_minus_re", "1"},
                       {"lateral_minus_im", "1"}, {"ambiguity", "1"},
                       {"action", "1"},          {"stokes_constant", "1"},
                       {"corrected_value", "1"}, {"oracle_value", "1"},
                       {"abs_error", "1"}};
  json all = json::array();
  for (const auto& r : reps) {
    out.table.rows.push_back({r.lambda, r.optimal_truncation_value,
                              static_cast<long long>(r.optimal_order), r.lateral_plus.real(),
                              r.lateral_plus.imag(), r.lateral_minus.real(), r.lateral_minus.imag(),
                              r.ambiguity, r.action, r.stokes_constant, r.corrected_value,
                              r.oracle_value, r.abs_error});
    all.push_back({{"lambda", r.lambda},
                   {"naive_partial_sums", series_json(r.naive_partial_sums)},
                   {"optimal_truncation_value", r.optimal_truncation_value},
                   {"optimal_order", r.optimal_order},
                   {"lateral_plus", complex_json(r.lateral_plus)},
                   {"lateral_minus", complex_json(r.lateral_minus)},
                   {"ambiguity", r.ambiguity},
                   {"action", r.action},
                   {"stokes_constant", r.stokes_constant},
                   {"corrected_value", r.corrected_value},
                   {"oracle_value", r.oracle_value},
                   {"abs_error", r.abs_error}});
  }
  out.report["ResummationReport"] = all;
  return out;
}

ExperimentOutput qgt_map(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  const auto& re = cfg.grids.at("re");
  const auto& im = cfg.grids.at("im");
  const double h_rel = cfg.number("qgt.h_rel", 1e-4);
  const int band = static_cast<int>(cfg.integer("qgt.band", 0));
  const cplx ep = ep_location(cfg.model).position;
  const std::size_t n = re.size() * im.size();
  std::vector<std::vector<Cell>> rows(n);
  parallel_for(n, cfg.workers, [&](std::size_t idx) {
    const cplx lam(re[idx / im.size()], im[idx % im.size()]);
    const auto eig = eig_small(hamiltonian(cfg.model, lam));
    const cplx split = eig[1].value - eig[0].value;
    QgtValue q{kNaN, kNaN, kNaN, kNaN, cplx(kNaN, kNaN)};
    long long regular = 0;
    const double dist = std::abs(lam - ep);
    if (dist > 0.0) {
      try {
        q = qgt(cfg.model, lam, h_rel * dist, band);
        regular = 1;
      } catch (const NumericalError&) {
        regular = 0;
      }
    }
    rows[idx] = {lam.real(), lam.imag(), q.g_xx, q.g_xy, q.g_yy, q.curvature,
                 q.mixing.real(), q.mixing.imag(), split.real(), split.imag(), regular};
  });
  out.table.columns = {{"re_lambda", "control"}, {"im_lambda", "control"}, {"g_xx", "1/control^2"},
                       {"g_xy", "1/control^2"},  {"g_yy", "1/control^2"},  {"curvature", "1/control^2"},
                       {"mixing_re", "1/control^2"}, {"mixing_im", "1/control^2"},
                       {"splitting_re", "rate"}, {"splitting_im", "rate"}, {"regular", "1"}};
  out.table.rows = std::move(rows);
  out.report["points"] = static_cast<long long>(n);
  return out;
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_real(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? json(*d) : json(nullptr);
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

void write_file(const std::string& path, const std::string& data) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + tmp + "' for writing");
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!f) throw IoError("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move output into place at '" + path + "': " + ec.message());
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  const std::string& e = cfg.experiment;
  if (e == "simulate") return simulate(cfg);
  if (e == "scaling-static") return scaling_static(cfg);
  if (e == "scaling-dynamic") return scaling_dynamic(cfg);
  if (e == "disorder") return disorder(cfg);
  if (e == "saito-scan") return saito(cfg);
  if (e == "phantom") return phantom(cfg);
  if (e == "invariants") return invariants(cfg);
  if (e == "resurge") return resurge(cfg);
  if (e == "qgt-map") return qgt_map(cfg);
  throw ConfigError("run.experiment: unknown experiment '" + e + "'");
}

json config_echo(const ConfigFile& cfg) {
  json echo = json::object();
  for (const auto& [key, value] : cfg.values()) {
    if (key == "run.workers" || key == "run.output" || key == "run.format") continue;
    echo[key] = value;
  }
  return echo;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_csv(const DataTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c].name + "[" + table.columns[c].unit + "]";
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += cell_text(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string render_json(const ExperimentOutput& out, const ConfigFile& cfg,
                        const std::string& experiment) {
  json doc;
  doc["experiment"] = experiment;
  doc["config"] = config_echo(cfg);
  doc["report"] = out.report;
  json cols = json::array();
  for (const auto& c : out.table.columns) cols.push_back({{"name", c.name}, {"unit", c.unit}});
  json rows = json::array();
  for (const auto& r : out.table.rows) {
    json row = json::array();
    for (const auto& c : r) row.push_back(cell_json(c));
    rows.push_back(row);
  }
  doc["columns"] = cols;
  doc["rows"] = rows;
  return doc.dump(2) + "\n";
}

std::string render(const ExperimentOutput& out, const ExperimentConfig& cfg) {
  return cfg.format == OutputFormat::Json ? render_json(out, cfg.source, cfg.experiment)
                                          : render_csv(out.table);
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[digest[i] >> 4];
    s += hex[digest[i] & 15];
  }
  return s;
}

json RunManifest::to_json() const {
  return {{"config", config},
          {"version", version},
          {"wall_time_seconds", wall_time_seconds},
          {"converged", converged},
          {"content_hash", content_hash},
          {"data_path", data_path}};
}

RunManifest run(const ExperimentConfig& cfg, std::string* stdout_sink) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentOutput out = run_experiment(cfg);
  const std::string data = render(out, cfg);

  RunManifest m;
  json full = json::object();
  for (const auto& [key, value] : cfg.source.values()) full[key] = value;
  m.config = full;
  m.converged = out.converged;
  m.content_hash = sha256_hex(data);
  m.data_path = cfg.output_path;
  m.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (cfg.output_path.empty()) {
    if (stdout_sink) *stdout_sink = data;
    return m;
  }
  write_file(cfg.output_path, data);
  write_file(cfg.output_path + ".manifest.json", m.to_json().dump(2) + "\n");
  return m;
}

}  // namespace fmslab
