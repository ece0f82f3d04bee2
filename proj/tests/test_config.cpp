#include <doctest.h>

#include <json.hpp>

#include <string>

#include "fmslab/config.hpp"
#include "fmslab/error.hpp"
#include "fmslab/experiments.hpp"

using namespace fmslab;

namespace {

bool has_field(const std::vector<Diagnostic>& d, const std::string& field) {
  for (const auto& x : d) {
    if (x.field == field) return true;
  }
  return false;
}

const char* kSimulate =
    "# transmon loop\n"
    "[run]\nexperiment = simulate\nseed = 3\n"
    "[model]\nfamily = TransmonEP2 ; inline comment\nkappa = 1\n"
    "[trajectory]\nradius = 0.15\nomega = 0.05\nsteps = 256\n"
    "[propagation]\nstrict = false\n";

}  // namespace

TEST_CASE("config parsing") {
  const ConfigFile cf = ConfigFile::parse(kSimulate);
  CHECK(cf.get("run.experiment") == "simulate");
  CHECK(cf.get("model.family") == "TransmonEP2");
  CHECK(cf.get("trajectory.omega") == "0.05");
  CHECK_FALSE(cf.has("model.delta"));
  CHECK_THROWS_AS(ConfigFile::parse("[run\n"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse("novalue\n"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::load("/nonexistent/cfg.ini"), IoError);
}

TEST_CASE("grid syntax") {
  CHECK(parse_grid("0, 0.5, 1") == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(parse_grid("linspace 0 1 3") == std::vector<double>{0.0, 0.5, 1.0});
  const auto l = parse_grid("logspace 1e-3 1e-1 3");
  CHECK(l.size() == 3);
  CHECK(l[1] == doctest::Approx(1e-2));
  CHECK(parse_grid("").empty());
  CHECK_THROWS_AS(parse_grid("linspace 0 1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("logspace 0 1 3"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1, x"), ConfigError);
}

TEST_CASE("a valid config builds") {
  const ExperimentConfig ec = build_config(ConfigFile::parse(kSimulate));
  CHECK(ec.experiment == "simulate");
  CHECK(ec.model.family == Family::TransmonEP2);
  CHECK(ec.model.j_offset == 0.25);
  CHECK(ec.trajectory.radius == 0.15);
  CHECK(ec.trajectory.steps == 256);
  CHECK(ec.seed == 3);
  CHECK_FALSE(ec.propagation.require_convergence);
  CHECK(ec.propagation.tolerance == 1e-6);
}

TEST_CASE("validation reports every problem at once") {
  ConfigFile cf = ConfigFile::parse(
      "[run]\nexperiment = disorder\nseed = -4\nworkers = 0\nformat = xml\n"
      "[model]\nfamily = RankK\nk = 0\n"
      "[trajectory]\nkind = sweep\nomega = -1\nsteps = 100\n"
      "[grid]\nW = \n"
      "[disorder]\ntrials = 8\nbogus = 1\n");
  const auto d = validate(cf);
  for (const char* field : {"run.seed", "run.workers", "run.format", "model.k", "trajectory.kind",
                            "trajectory.omega", "trajectory.steps", "grid.W", "disorder.trials",
                            "disorder.bogus"}) {
    CAPTURE(field);
    CHECK(has_field(d, field));
  }
  try {
    build_config(cf);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("disorder.bogus: unknown key") != std::string::npos);
  }
}

TEST_CASE("experiment-specific requirements") {
  CHECK(has_field(validate(ConfigFile::parse("[run]\nexperiment = nope\n")), "run.experiment"));
  CHECK(has_field(validate(ConfigFile::parse("[run]\nexperiment = invariants\n")), "invariants.germ"));
  const auto narrow = validate(ConfigFile::parse(
      "[run]\nexperiment = scaling-dynamic\n[dynamic]\nrank = 1\n[grid]\nomega = logspace 1e-2 1e-1 5\n"));
  CHECK(has_field(narrow, "grid.omega"));
  const auto phantom = validate(ConfigFile::parse(
      "[run]\nexperiment = phantom\n[model]\nfamily = TransmonEP2\n[trajectory]\nomega = 0.1\n"
      "[grid]\ntheta = 0, 1\n"));
  CHECK(has_field(phantom, "model.family"));
  CHECK(has_field(phantom, "model.delta"));
  CHECK(has_field(phantom, "trajectory.kind"));
  const auto seed = validate(ConfigFile::parse(
      "[run]\nexperiment = invariants\nseed = 18446744073709551615\n[invariants]\ngerm = x^2\n"));
  CHECK(seed.empty());
  CHECK(build_config(ConfigFile::parse(
                         "[run]\nexperiment = invariants\nseed = 18446744073709551615\n"
                         "[invariants]\ngerm = x^2\n"))
            .seed == 18446744073709551615ULL);
}

TEST_CASE("CSV rendering keeps 17 significant digits and a unit header") {
  DataTable t;
  t.columns = {{"x", "rad"}, {"n", "1"}, {"label", "-"}};
  t.rows.push_back({0.1, 3LL, std::string("a,b")});
  const std::string csv = render_csv(t);
  CHECK(csv == "x[rad],n[1],label[-]\n0.10000000000000001,3,\"a,b\"\n");
  CHECK(format_real(1.0 / 3.0) == "0.33333333333333331");
  CHECK(std::stod(format_real(2.0 / 7.0)) == 2.0 / 7.0);
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config echo ignores worker count and output location") {
  ConfigFile a = ConfigFile::parse(kSimulate), b = ConfigFile::parse(kSimulate);
  a.set("run.workers", "1");
  b.set("run.workers", "4");
  b.set("run.output", "/tmp/x.csv");
  CHECK(config_echo(a) == config_echo(b));
}

TEST_CASE("run writes data and manifest, identically for any worker count") {
  std::string one, four;
  for (int w : {1, 4}) {
    ConfigFile cf = ConfigFile::parse(
        "[run]\nexperiment = resurge\nformat = json\n[grid]\nlambda = 0.05, 0.1, 0.2\n"
        "[resurge]\nseries = euler-flipped\n");
    cf.set("run.workers", std::to_string(w));
    std::string sink;
    const RunManifest m = run(build_config(cf), &sink);
    CHECK(m.content_hash == sha256_hex(sink));
    CHECK(m.version == kArtifactVersion);
    (w == 1 ? one : four) = sink;
  }
  CHECK(one == four);
  const auto doc = nlohmann::json::parse(one);
  CHECK(doc["rows"].size() == 3);
  CHECK(doc["config"]["resurge.series"] == "euler-flipped");
}

TEST_CASE("every experiment runs on a small config") {
  const char* configs[] = {
      kSimulate,
      "[run]\nexperiment = scaling-static\n[model]\nfamily = RankK\nk = 2\n[grid]\nR = logspace 1e-3 1e-1 5\n",
      "[run]\nexperiment = scaling-dynamic\n[model]\nfamily = RankK\nk = 1\n[grid]\nomega = logspace 1e-3 1e-1 5\n",
      "[run]\nexperiment = disorder\n[model]\nfamily = RankK\n[trajectory]\nradius = 1\nomega = 0.2\nsteps = 128\n"
      "[propagation]\nstrict = false\n[grid]\nW = 0, 0.2\n[disorder]\ntrials = 32\n",
      "[run]\nexperiment = saito-scan\n[model]\nfamily = RankK\nk = 1\n[trajectory]\nradius = 1\nomega = 0.1\n"
      "steps = 1024\n[saito]\nn_theta = 256\n",
      "[run]\nexperiment = phantom\n[model]\nfamily = RankK\ndelta = 0.1\n[trajectory]\nkind = sweep\n"
      "omega = 0.5\nvelocity = 0.5\nsteps = 128\n[propagation]\nstrict = false\n[grid]\ntheta = 0, 3\n",
      "[run]\nexperiment = invariants\n[invariants]\ngerm = x^4 + y^4 + (1/3)*x^2*y^2\nclaimed_tjurina = 8\n",
      "[run]\nexperiment = resurge\n[grid]\nlambda = 0.1\n",
      "[run]\nexperiment = qgt-map\n[model]\nfamily = TransmonEP2\n[grid]\nre = -0.1, 0, 0.1\nim = 0, 0.1\n",
  };
  for (const char* text : configs) {
    const ExperimentConfig ec = build_config(ConfigFile::parse(text));
    CAPTURE(ec.experiment);
    const ExperimentOutput out = run_experiment(ec);
    CHECK_FALSE(out.table.columns.empty());
    CHECK_FALSE(out.table.rows.empty());
    for (const auto& row : out.table.rows) CHECK(row.size() == out.table.columns.size());
  }
}

TEST_CASE("invariants experiment reports non-isolated germs as a numerical error") {
  const ExperimentConfig ec =
      build_config(ConfigFile::parse("[run]\nexperiment = invariants\n[invariants]\ngerm = x^2*y^2\n"));
  CHECK_THROWS_AS(run_experiment(ec), NumericalError);
}
