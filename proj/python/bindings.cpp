#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "fmslab/config.hpp"
#include "fmslab/error.hpp"
#include "fmslab/experiments.hpp"
#include "fmslab/floquet.hpp"
#include "fmslab/geometry.hpp"
#include "fmslab/invariants.hpp"
#include "fmslab/isometry.hpp"
#include "fmslab/resurgence.hpp"
#include "fmslab/scaling.hpp"

namespace py = pybind11;
using namespace fmslab;

namespace {

using Dense = Eigen::MatrixXcd;

Dense dense(const CMatrix& m) { return m; }

CMatrix small(const Dense& m) {
  if (m.rows() > kMaxDim || m.cols() > kMaxDim) {
    throw NumericalError("matrix larger than " + std::to_string(kMaxDim) + "x" + std::to_string(kMaxDim));
  }
  return m;
}

py::dict series_dict(const RealSeries& s) {
  py::dict d;
  d["x"] = s.x;
  d["y"] = s.y;
  return d;
}

py::dict fit_dict(const FitResult& f) {
  py::dict d;
  d["slope"] = f.slope;
  d["intercept"] = f.intercept;
  d["residual_rms"] = f.residual_rms;
  return d;
}

py::dict scaling_dict(const ScalingReport& r) {
  py::dict d;
  d["sweep_variable"] = r.sweep_variable;
  d["series"] = series_dict(r.series);
  d["fit"] = fit_dict(r.fit);
  d["expected_exponent"] = r.expected_exponent;
  d["tolerance"] = r.tolerance;
  d["passed"] = r.pass;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Floquet-monodromy laboratory core";
  m.attr("__version__") = kArtifactVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::enum_<Family>(m, "Family")
      .value("TransmonEP2", Family::TransmonEP2)
      .value("RankK", Family::RankK)
      .value("Rydberg", Family::Rydberg)
      .value("PhotonicDimer", Family::PhotonicDimer);

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init<>())
      .def_static("transmon", &ModelSpec::transmon, py::arg("kappa") = 1.0)
      .def_static("rank_k", &ModelSpec::rank_k, py::arg("k"), py::arg("delta") = 0.0)
      .def_static("rydberg", &ModelSpec::rydberg, py::arg("gamma_loss") = 1.0)
      .def_static("photonic", &ModelSpec::photonic, py::arg("gamma_a") = 1.0, py::arg("gamma_b") = 0.0)
      .def_readwrite("family", &ModelSpec::family)
      .def_readwrite("kappa", &ModelSpec::kappa)
      .def_readwrite("k", &ModelSpec::k)
      .def_readwrite("delta", &ModelSpec::delta)
      .def_readwrite("offset_phase", &ModelSpec::offset_phase)
      .def_readwrite("gamma_loss", &ModelSpec::gamma_loss)
      .def_readwrite("gamma_a", &ModelSpec::gamma_a)
      .def_readwrite("gamma_b", &ModelSpec::gamma_b)
      .def_property_readonly("rank", &ModelSpec::rank)
      .def("__repr__", [](const ModelSpec& s) {
        return "ModelSpec(" + std::string(family_name(s.family)) + ")";
      });

  py::enum_<TrajectoryKind>(m, "TrajectoryKind")
      .value("Loop", TrajectoryKind::Loop)
      .value("LinearSweep", TrajectoryKind::LinearSweep);

  py::class_<TrajectorySpec>(m, "TrajectorySpec")
      .def(py::init([](cplx center, double radius, double omega, int steps) {
             TrajectorySpec t;
             t.center = center;
             t.radius = radius;
             t.omega = omega;
             t.steps = steps;
             return t;
           }),
           py::arg("center") = cplx(0.0), py::arg("radius") = 0.0, py::arg("omega") = 0.05,
           py::arg("steps") = 4096)
      .def_readwrite("kind", &TrajectorySpec::kind)
      .def_readwrite("center", &TrajectorySpec::center)
      .def_readwrite("radius", &TrajectorySpec::radius)
      .def_readwrite("omega", &TrajectorySpec::omega)
      .def_readwrite("start_angle", &TrajectorySpec::start_angle)
      .def_readwrite("orientation", &TrajectorySpec::orientation)
      .def_readwrite("steps", &TrajectorySpec::steps)
      .def_readwrite("velocity", &TrajectorySpec::velocity)
      .def_readwrite("offset", &TrajectorySpec::offset)
      .def_property_readonly("period", &TrajectorySpec::period);

  py::class_<PropagateOptions>(m, "PropagateOptions")
      .def(py::init([](double tolerance, int max_steps, bool require_convergence) {
             return PropagateOptions{tolerance, max_steps, require_convergence};
           }),
           py::arg("tolerance") = 1e-8, py::arg("max_steps") = 1 << 16,
           py::arg("require_convergence") = true)
      .def_readwrite("tolerance", &PropagateOptions::tolerance)
      .def_readwrite("max_steps", &PropagateOptions::max_steps)
      .def_readwrite("require_convergence", &PropagateOptions::require_convergence);

  m.def("hamiltonian", [](const ModelSpec& model, cplx lambda) { return dense(hamiltonian(model, lambda)); },
        py::arg("model"), py::arg("lam"));
  m.def("ep_location", [](const ModelSpec& model) { return ep_location(model).position; });
  m.def("trajectory_point", &trajectory_point, py::arg("traj"), py::arg("t"));

  m.def("eig_small", [](const Dense& a) {
    std::vector<cplx> values;
    Dense vectors(a.rows(), a.rows());
    const auto pairs = eig_small(small(a));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      values.push_back(pairs[i].value);
      vectors.col(static_cast<Eigen::Index>(i)) = pairs[i].vector;
    }
    return py::make_tuple(values, vectors);
  });
  m.def("expm", [](const Dense& a) { return dense(expm(small(a))); });
  m.def("normalize", [](const Dense& a) { return dense(normalize(small(a))); });

  m.def(
      "propagate",
      [](const ModelSpec& model, const TrajectorySpec& traj, const PropagateOptions& opts) {
        const MonodromyResult r = propagate(model, traj, opts);
        py::dict d;
        d["monodromy"] = dense(r.monodromy);
        d["normalized"] = dense(r.normalized);
        d["unipotent"] = dense(r.unipotent);
        d["quasienergies"] = r.quasienergies;
        d["splitting"] = quasienergy_splitting(r.quasienergies, r.period);
        d["stokes_invariant"] = r.stokes_invariant;
        d["converged"] = r.converged;
        d["step_count_used"] = r.step_count_used;
        d["period"] = r.period;
        d["relative_change"] = r.relative_change;
        return d;
      },
      py::arg("model"), py::arg("traj"), py::arg("opts") = PropagateOptions{});

  m.def(
      "saito_scan",
      [](const ModelSpec& model, const TrajectorySpec& traj, int n_theta) {
        const SaitoScan s = saito_scan(model, traj, n_theta);
        py::dict d;
        d["theta"] = s.theta_grid;
        d["amplitude"] = s.amplitude;
        d["signal"] = s.signal;
        d["peak_locations"] = s.peak_locations;
        d["peak_count"] = s.peak_count;
        return d;
      },
      py::arg("model"), py::arg("traj"), py::arg("n_theta") = 0);

  m.def(
      "qgt",
      [](const ModelSpec& model, cplx lambda, double h, int band) {
        const QgtValue q = qgt(model, lambda, h, band);
        py::dict d;
        d["g_xx"] = q.g_xx;
        d["g_xy"] = q.g_xy;
        d["g_yy"] = q.g_yy;
        d["curvature"] = q.curvature;
        d["mixing"] = q.mixing;
        return d;
      },
      py::arg("model"), py::arg("lam"), py::arg("h") = 1e-5, py::arg("band") = 0);

  m.def("static_gap_scaling",
        [](const ModelSpec& model, const std::vector<double>& grid, double angle) {
          return scaling_dict(static_gap_scaling(model, grid, angle));
        },
        py::arg("model"), py::arg("r_grid"), py::arg("angle") = 0.0);
  m.def("dynamic_gap_scaling",
        [](int rank, const std::vector<double>& grid) { return scaling_dict(dynamic_gap_scaling(rank, grid)); },
        py::arg("rank"), py::arg("omega_grid"));

  m.def("milnor", [](const std::string& germ) { return milnor(PolyGerm::parse(germ)); });
  m.def("tjurina", [](const std::string& germ) { return tjurina(PolyGerm::parse(germ)); });
  m.def(
      "analyze_germ",
      [](const std::string& germ, std::optional<long> claimed) {
        const InvariantReport r = analyze_germ(PolyGerm::parse(germ), claimed);
        py::dict d;
        d["germ"] = r.germ;
        d["milnor"] = r.milnor;
        d["tjurina"] = r.tjurina;
        d["modality_gap"] = r.modality_gap;
        d["predicted_peaks"] = r.predicted_peaks;
        d["truncation_degree"] = r.truncation_degree_used;
        d["tjurina_discrepancy"] = r.tjurina_discrepancy;
        return d;
      },
      py::arg("germ"), py::arg("claimed_tjurina") = py::none());

  m.def("euler_series", [](int n_max, int sign) { return euler_series(n_max, sign).coeffs; },
        py::arg("n_max"), py::arg("sign") = -1);
  m.def("euler_reference", &euler_reference, py::arg("lam"), py::arg("sign") = -1);
  m.def(
      "borel_lateral",
      [](const std::vector<double>& coeffs, double lambda, int side) {
        return borel_lateral(AsymptoticSeries{coeffs, 1}, lambda, side);
      },
      py::arg("coeffs"), py::arg("lam"), py::arg("side"));
  m.def(
      "resum",
      [](const std::vector<double>& coeffs, double lambda, double action, double sigma,
         double inst_prefactor, bool prefactor_over_lambda, double oracle) {
        TransSeriesData ts;
        ts.action = action;
        ts.sigma = sigma;
        ts.inst_prefactor = inst_prefactor;
        ts.prefactor_over_lambda = prefactor_over_lambda;
        const ResummationReport r = resum(AsymptoticSeries{coeffs, 1}, lambda, ts, oracle);
        py::dict d;
        d["optimal_truncation_value"] = r.optimal_truncation_value;
        d["optimal_order"] = r.optimal_order;
        d["lateral_plus"] = r.lateral_plus;
        d["lateral_minus"] = r.lateral_minus;
        d["ambiguity"] = r.ambiguity;
        d["corrected_value"] = r.corrected_value;
        d["abs_error"] = r.abs_error;
        return d;
      },
      py::arg("coeffs"), py::arg("lam"), py::arg("action") = 1.0, py::arg("sigma") = 0.0,
      py::arg("inst_prefactor") = 1.0, py::arg("prefactor_over_lambda") = false, py::arg("oracle") = 0.0);

  m.def("find_invariant_pairing", [](const Dense& s) {
    const IsometryReport r = find_invariant_pairing(small(s));
    py::dict d;
    d["pairing"] = dense(r.pairing);
    d["residual"] = r.residual;
    d["condition"] = r.condition;
    d["null_dimension"] = r.null_dimension;
    d["passed"] = r.pass;
    d["diagnostic"] = r.diagnostic;
    return d;
  });

  m.def(
      "run_config",
      [](const std::string& text, int workers) {
        ConfigFile cfg = ConfigFile::parse(text);
        if (workers > 0) cfg.set("run.workers", std::to_string(workers));
        cfg.erase("run.output");
        std::string sink;
        const RunManifest manifest = run(build_config(cfg), &sink);
        return py::make_tuple(sink, manifest.content_hash);
      },
      py::arg("text"), py::arg("workers") = 0,
      "Run an experiment config given as text; returns (rendered data, sha256 of the data).");
  m.def("validate_config", [](const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& d : validate(ConfigFile::parse(text))) out.emplace_back(d.field, d.message);
    return out;
  });
}
