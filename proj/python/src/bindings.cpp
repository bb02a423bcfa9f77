// Copyright 2026 The kcsr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Record series are returned as dicts of NumPy arrays;
// operators and states cross the boundary as dense NumPy matrices.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "kcsr/analysis.hpp"
#include "kcsr/commands.hpp"
#include "kcsr/config.hpp"
#include "kcsr/lindblad.hpp"
#include "kcsr/observables.hpp"
#include "kcsr/operators.hpp"
#include "kcsr/states.hpp"
#include "kcsr/trajectories.hpp"

namespace py = pybind11;
using namespace kcsr;

namespace {

py::array_t<double> vector_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

/// t, n, I (T x 3), I_total, nk (T x N), S_half.
py::dict series_dict(const std::vector<ObservableRecord>& series) {
  const auto rows = static_cast<py::ssize_t>(series.size());
  const py::ssize_t modes = series.empty() ? 0 : static_cast<py::ssize_t>(series.front().momentum_occ.size());
  py::array_t<double> t(rows), n(rows), total(rows), entropy(rows);
  py::array_t<double> intensity({rows, py::ssize_t{3}});
  py::array_t<double> nk({rows, modes});
  auto tv = t.mutable_unchecked<1>();
  auto nv = n.mutable_unchecked<1>();
  auto totv = total.mutable_unchecked<1>();
  auto sv = entropy.mutable_unchecked<1>();
  auto iv = intensity.mutable_unchecked<2>();
  auto kv = nk.mutable_unchecked<2>();
  for (py::ssize_t r = 0; r < rows; ++r) {
    const auto& rec = series[static_cast<std::size_t>(r)];
    tv(r) = rec.time;
    nv(r) = rec.n_total;
    totv(r) = rec.intensity_total;
    sv(r) = rec.entropy_halfchain;
    for (py::ssize_t c = 0; c < 3; ++c) iv(r, c) = rec.intensity[static_cast<std::size_t>(c)];
    for (py::ssize_t m = 0; m < modes; ++m) {
      kv(r, m) = static_cast<std::size_t>(m) < rec.momentum_occ.size() ? rec.momentum_occ[static_cast<std::size_t>(m)]
                                                                        : kNaN;
    }
  }
  py::dict d;
  d["t"] = t;
  d["n"] = n;
  d["I"] = intensity;
  d["I_total"] = total;
  d["nk"] = nk;
  d["S_half"] = entropy;
  return d;
}

std::vector<ObservableRecord> sample_records(const MasterRun& run) {
  std::vector<ObservableRecord> out;
  out.reserve(run.samples.size());
  for (const auto& s : run.samples) out.push_back(s.obs);
  return out;
}

py::dict master_dict(const MasterRun& run) {
  py::dict d = series_dict(sample_records(run));
  std::vector<double> trace, herm, min_eig;
  for (const auto& s : run.samples) {
    trace.push_back(s.trace_error);
    herm.push_back(s.hermiticity_error);
    min_eig.push_back(s.min_eigenvalue);
  }
  d["trace_error"] = vector_array(trace);
  d["hermiticity_error"] = vector_array(herm);
  d["min_eigenvalue"] = vector_array(min_eig);
  d["steady_reached"] = run.steady.reached;
  d["steady_time"] = run.steady.time;
  d["final_state"] = run.final_state.data;
  d["accepted_steps"] = run.counters.accepted;
  d["rejected_steps"] = run.counters.rejected;
  return d;
}

py::dict ensemble_dict(const EnsembleResult& e) {
  py::dict d;
  d["mean"] = series_dict(e.mean);
  d["std_error"] = series_dict(e.std_error);
  d["final_n"] = vector_array(e.final_n);
  d["final_entropy"] = vector_array(e.final_entropy);
  d["hist_edges"] = vector_array(e.entropy_hist.edges);
  d["hist_counts"] = e.entropy_hist.counts;
  d["trivial_fraction"] = e.trivial_fraction;
  d["mean_final_entropy"] = e.mean_final_entropy;
  d["total_jumps"] = e.total_jumps;
  d["dark_count"] = e.dark_count;
  return d;
}

PureState pure_from(const ComplexVector& amplitudes) {
  PureState psi;
  psi.amplitudes = amplitudes;
  sites_from_dimension(amplitudes.size());
  return psi;
}

DensityMatrix density_from(const ComplexMatrix& data) {
  if (data.rows() != data.cols()) throw ConfigError("density matrix must be square");
  sites_from_dimension(data.rows());
  DensityMatrix rho;
  rho.data = data;
  return rho;
}

RunConfig config_from_text(const std::string& text) { return parse_config(text, "config").config; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Kinetically constrained superradiance on a periodic Rydberg chain";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());

  py::class_<ChainParams>(m, "ChainParams")
      .def(py::init([](int n_sites, double delta, double j_int, double gamma_prefactor) {
             ChainParams p{n_sites, delta, j_int, gamma_prefactor};
             p.validate(1);
             return p;
           }),
           py::arg("n_sites") = 6, py::arg("delta") = 1.0, py::arg("j_int") = 0.2, py::arg("gamma_prefactor") = 1.0)
      .def_readwrite("n_sites", &ChainParams::n_sites)
      .def_readwrite("delta", &ChainParams::delta)
      .def_readwrite("j_int", &ChainParams::j_int)
      .def_readwrite("gamma_prefactor", &ChainParams::gamma_prefactor)
      .def("channel_frequency", &ChainParams::channel_frequency, py::arg("xi"))
      .def("channel_rate", &ChainParams::channel_rate, py::arg("xi"))
      .def("__repr__", [](const ChainParams& p) {
        std::ostringstream os;
        os << "ChainParams(n_sites=" << p.n_sites << ", delta=" << p.delta << ", j_int=" << p.j_int
           << ", gamma_prefactor=" << p.gamma_prefactor << ")";
        return os.str();
      });

  py::enum_<EmissionMode>(m, "EmissionMode").value("kc", EmissionMode::kc).value("dicke", EmissionMode::dicke);

  py::class_<Model>(m, "Model")
      .def_readonly("params", &Model::params)
      .def_readonly("mode", &Model::mode)
      .def_property_readonly("dimension", &Model::dimension)
      .def_property_readonly("hamiltonian", [](const Model& mo) { return mo.hamiltonian.to_dense(); })
      .def_property_readonly("channel_xi",
                             [](const Model& mo) {
                               std::vector<int> out;
                               for (const auto& c : mo.channels) out.push_back(c.xi);
                               return out;
                             })
      .def_property_readonly("channel_rates",
                             [](const Model& mo) {
                               std::vector<double> out;
                               for (const auto& c : mo.channels) out.push_back(c.rate);
                               return out;
                             })
      .def(
          "jump_operator", [](const Model& mo, std::size_t i) { return mo.channels.at(i).op.to_dense(); },
          py::arg("index"));

  m.def("make_kc_model", &make_kc_model, py::arg("params"));
  m.def(
      "make_dicke_model",
      [](const ChainParams& p, std::optional<double> rate) {
        return make_dicke_model(p, rate ? *rate : default_dicke_rate(p));
      },
      py::arg("params"), py::arg("dicke_rate") = py::none());
  m.def("default_dicke_rate", &default_dicke_rate, py::arg("params"));

  m.def(
      "hamiltonian", [](const ChainParams& p) { return build_hamiltonian(p).to_dense(); }, py::arg("params"));
  m.def(
      "constrained_jump", [](const ChainParams& p, int xi) { return build_constrained_jump(p, xi).op.to_dense(); },
      py::arg("params"), py::arg("xi"));
  m.def(
      "collective_lowering", [](const ChainParams& p) { return build_collective_lowering(p).to_dense(); },
      py::arg("params"));
  m.def(
      "momentum_lowering", [](const ChainParams& p, int mode) { return build_momentum_lowering_mode(p, mode).to_dense(); },
      py::arg("params"), py::arg("mode"));
  m.def("momentum_grid", &momentum_grid, py::arg("n_sites"));
  m.def(
      "eigenoperator_residual",
      [](const ChainParams& p, int xi) { return verify_eigenoperator(build_hamiltonian(p), build_constrained_jump(p, xi)); },
      py::arg("params"), py::arg("xi"));

  m.def(
      "fully_inverted", [](int n) { return PureState::fully_inverted(n).amplitudes; }, py::arg("n_sites"));
  m.def(
      "vacuum", [](int n) { return PureState::vacuum(n).amplitudes; }, py::arg("n_sites"));
  m.def(
      "excitation_number", [](const ComplexVector& v) { return excitation_number(pure_from(v)); },
      py::arg("amplitudes"));
  m.def(
      "entanglement_entropy",
      [](const ComplexVector& v, std::optional<std::vector<int>> keep) {
        const PureState psi = pure_from(v);
        return entanglement_entropy(psi, keep ? *keep : halfchain_sites(sites_from_dimension(v.size())));
      },
      py::arg("amplitudes"), py::arg("keep_sites") = py::none());
  m.def(
      "measure",
      [](const Model& mo, const ComplexMatrix& rho) { return series_dict({ObservableSet(mo).measure(density_from(rho))}); },
      py::arg("model"), py::arg("rho"), "Observables of a density matrix as a one-row series.");

  m.def(
      "evolve_master",
      [](const Model& mo, std::optional<ComplexMatrix> rho0, double t_max, double sample_interval, double rel_tol,
         double abs_tol, double steady_tol, bool stop_at_steady) {
        EvolutionConfig cfg;
        cfg.t_max = t_max;
        cfg.sample_interval = sample_interval;
        cfg.rel_tol = rel_tol;
        cfg.abs_tol = abs_tol;
        cfg.steady_tol = steady_tol;
        cfg.stop_at_steady = stop_at_steady;
        const DensityMatrix rho = rho0 ? density_from(*rho0)
                                       : DensityMatrix::from_pure(PureState::fully_inverted(mo.params.n_sites));
        MasterRun run;
        {
          py::gil_scoped_release release;
          run = evolve_master(rho, mo, cfg);
        }
        return master_dict(run);
      },
      py::arg("model"), py::arg("rho0") = py::none(), py::arg("t_max") = 10.0, py::arg("sample_interval") = 0.05,
      py::arg("rel_tol") = 1e-8, py::arg("abs_tol") = 1e-10, py::arg("steady_tol") = 1e-6,
      py::arg("stop_at_steady") = false, "Master-equation run from rho0 (default: fully inverted).");

  m.def(
      "run_ensemble",
      [](const Model& mo, std::optional<ComplexVector> psi0, int n_traj, double t_max, double record_cadence,
         std::uint64_t master_seed, int threads, double dt, int hist_bins) {
        TrajectoryConfig cfg;
        cfg.n_traj = n_traj;
        cfg.t_max = t_max;
        cfg.record_cadence = record_cadence;
        cfg.master_seed = master_seed;
        cfg.threads = threads;
        cfg.dt = dt;
        cfg.hist_bins = hist_bins;
        const PureState psi = psi0 ? pure_from(*psi0) : PureState::fully_inverted(mo.params.n_sites);
        EnsembleResult result;
        {
          py::gil_scoped_release release;
          const TrajectoryEngine engine(mo);
          result = run_ensemble(engine, psi, cfg);
        }
        return ensemble_dict(result);
      },
      py::arg("model"), py::arg("psi0") = py::none(), py::arg("n_traj") = 100, py::arg("t_max") = 10.0,
      py::arg("record_cadence") = 0.05, py::arg("master_seed") = 20260101, py::arg("threads") = 0,
      py::arg("dt") = 0.0, py::arg("hist_bins") = 40, "Quantum-jump ensemble from psi0 (default: fully inverted).");

  m.def(
      "extract_burst",
      [](const std::vector<double>& t, const std::vector<double>& intensity) {
        const BurstFeatures b = extract_burst(t, intensity);
        py::dict d;
        d["i_max"] = b.i_max;
        d["t_peak"] = b.t_peak;
        d["width"] = b.width;
        d["t_delay"] = b.t_delay;
        d["flagged"] = b.flagged();
        d["left_truncated"] = b.left_truncated;
        d["right_truncated"] = b.right_truncated;
        return d;
      },
      py::arg("t"), py::arg("intensity"));
  m.def(
      "fit_scaling",
      [](const std::vector<double>& sizes, const std::vector<double>& values, const std::string& model) {
        const ScalingFit f = fit_scaling(sizes, values, parse_scaling_model(model));
        py::dict d;
        d["model"] = to_string(f.model);
        d["a"] = f.a;
        d["b"] = f.b;
        d["r_squared"] = f.r_squared;
        d["residuals"] = vector_array(f.residuals);
        return d;
      },
      py::arg("sizes"), py::arg("values"), py::arg("model") = "power_law");
  m.def(
      "dicke_ladder",
      [](int n, double gamma, const std::vector<double>& t) {
        const LadderSeries s = dicke_ladder_reference(n, gamma, t);
        py::dict d;
        d["t"] = vector_array(s.times);
        d["n"] = vector_array(s.excitations);
        d["I"] = vector_array(s.intensity);
        return d;
      },
      py::arg("n_sites"), py::arg("gamma"), py::arg("t"));
  m.def("balance_law_error", &balance_law_error, py::arg("t"), py::arg("n"), py::arg("intensity"), py::arg("floor"));

  m.def(
      "parse_config", [](const std::string& text) { return emit_config(config_from_text(text)); }, py::arg("text"),
      "Parses and resolves a config text; returns the canonical emitted form.");
  m.def(
      "run_command",
      [](const std::string& name, const std::string& config_text) {
        const RunConfig cfg = config_from_text(config_text);
        std::ostringstream log;
        {
          py::gil_scoped_release release;
          if (name == "evolve") {
            command_evolve(cfg, log);
          } else if (name == "trajectories") {
            command_trajectories(cfg, log);
          } else if (name == "scaling") {
            command_scaling(cfg, log);
          } else if (name == "dicke") {
            command_dicke(cfg, log);
          } else if (name == "verify") {
            const auto checks = command_verify(cfg, log);
            for (const auto& c : checks) {
              if (!c.passed) throw InvariantError("verify: " + c.name + " failed: " + c.detail);
            }
          } else {
            throw ConfigError("unknown command '" + name + "'");
          }
        }
        return log.str();
      },
      py::arg("name"), py::arg("config_text"), "Runs a CLI subcommand; returns its log.");
}
