#include <CLI11.hpp>

#include <iostream>

#include "fmslab/config.hpp"
#include "fmslab/error.hpp"
#include "fmslab/experiments.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerics = 3, kIo = 4 };

struct Options {
  std::string config;
  std::string out;
  std::string seed;
  int workers = 0;
  std::string format;
};

fmslab::ConfigFile load_with_overrides(const std::string& experiment, const Options& o) {
  fmslab::ConfigFile cfg = fmslab::ConfigFile::load(o.config);
  if (const auto declared = cfg.get("run.experiment"); declared && *declared != experiment) {
    throw fmslab::ConfigError("run.experiment: config declares '" + *declared +
                              "' but the subcommand is '" + experiment + "'");
  }
  cfg.set("run.experiment", experiment);
  if (!o.out.empty()) cfg.set("run.output", o.out);
  if (!o.seed.empty()) cfg.set("run.seed", o.seed);
  if (o.workers > 0) cfg.set("run.workers", std::to_string(o.workers));
  if (!o.format.empty()) cfg.set("run.format", o.format);
  return cfg;
}

int run_subcommand(const std::string& experiment, const Options& o) {
  const fmslab::ConfigFile cfg = load_with_overrides(experiment, o);
  const fmslab::ExperimentConfig ec = fmslab::build_config(cfg);
  std::string sink;
  const fmslab::RunManifest m = fmslab::run(ec, &sink);
  if (ec.output_path.empty()) {
    std::cout << sink;
  } else {
    std::cerr << "wrote " << ec.output_path << " (sha256 " << m.content_hash << ")\n";
  }
  return kOk;
}

int validate_subcommand(const Options& o) {
  fmslab::ConfigFile cfg = fmslab::ConfigFile::load(o.config);
  if (!o.format.empty()) cfg.set("run.format", o.format);
  const auto diags = fmslab::validate(cfg);
  if (diags.empty()) {
    std::cout << "ok\n";
    return kOk;
  }
  std::cout << fmslab::format_diagnostics(diags);
  return kConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet-monodromy laboratory for non-Hermitian two-level systems"};
  app.require_subcommand(1);
  Options opts;

  auto add_common = [&](CLI::App* sub, bool full) {
    sub->add_option("--config", opts.config, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--format", opts.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    if (!full) return;
    sub->add_option("--out", opts.out, "data file to write (stdout if omitted)");
    sub->add_option("--seed", opts.seed, "64-bit seed");
    sub->add_option("--workers", opts.workers, "concurrent workers")->check(CLI::PositiveNumber);
  };

  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& name : fmslab::experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    add_common(sub, true);
    subs.emplace_back(name, sub);
  }
  auto* validate = app.add_subcommand("validate", "check a config file and list every problem");
  add_common(validate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (validate->parsed()) return validate_subcommand(opts);
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) return run_subcommand(name, opts);
    }
  } catch (const fmslab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const fmslab::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerics;
  } catch (const fmslab::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  }
  return kConfig;
}
