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

#include "kcsr/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include <json.hpp>

#include "kcsr/analysis.hpp"
#include "kcsr/io.hpp"
#include "kcsr/plot.hpp"

namespace kcsr {

namespace {

using Json = nlohmann::ordered_json;

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void write_artifact(const std::string& path, const std::string& content, std::ostream& log) {
  write_text_file(path, content);
  log << "wrote " << path << '\n';
}

void write_json(const std::string& path, const Json& value, std::ostream& log) {
  write_artifact(path, value.dump(2) + "\n", log);
}

void write_resolved_config(const RunConfig& config, std::ostream& log) {
  write_artifact(join(config.output_dir, "resolved_config.txt"), emit_config(config), log);
}

double dicke_rate_of(const RunConfig& config) {
  return config.dicke_rate ? *config.dicke_rate : default_dicke_rate(config.params);
}

Json burst_json(const BurstFeatures& f) {
  return Json{{"i_max", number(f.i_max)},
              {"t_peak", number(f.t_peak)},
              {"width", number(f.width)},
              {"t_delay", number(f.t_delay)},
              {"interior_peak", f.interior_peak},
              {"left_truncated", f.left_truncated},
              {"right_truncated", f.right_truncated},
              {"flagged", f.flagged()}};
}

Json fit_json(const ScalingFit& f) {
  Json residuals = Json::array();
  for (double r : f.residuals) residuals.push_back(number(r));
  return Json{{"model", to_string(f.model)},
              {"a", number(f.a)},
              {"b", number(f.b)},
              {"r_squared", number(f.r_squared)},
              {"residuals", residuals}};
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Burst features of every channel with data plus the total intensity.
Json bursts_json(const std::vector<ObservableRecord>& series) {
  Json out = Json::object();
  const auto times = series_times(series);
  if (times.size() < 10) return out;
  for (int xi = 0; xi < 3; ++xi) {
    const auto values = series_intensity(series, xi);
    if (all_finite(values)) out["I_" + std::to_string(xi)] = burst_json(extract_burst(times, values));
  }
  out["I_total"] = burst_json(extract_burst(times, series_total_intensity(series)));
  return out;
}

std::vector<ObservableRecord> master_records(const MasterRun& run) {
  std::vector<ObservableRecord> out;
  out.reserve(run.samples.size());
  for (const auto& s : run.samples) out.push_back(s.obs);
  return out;
}

Json invariants_json(const MasterRun& run) {
  double trace = 0.0, herm = 0.0, min_eig = kNaN;
  for (const auto& s : run.samples) {
    trace = std::max(trace, s.trace_error);
    herm = std::max(herm, s.hermiticity_error);
    if (std::isfinite(s.min_eigenvalue)) min_eig = std::isfinite(min_eig) ? std::min(min_eig, s.min_eigenvalue) : s.min_eigenvalue;
  }
  return Json{{"max_trace_error", trace}, {"max_hermiticity_error", herm}, {"min_eigenvalue", number(min_eig)}};
}

std::string channel_label(int channel) {
  return channel == kCollectiveChannel ? std::string("collective") : "xi" + std::to_string(channel);
}

// t, then emitted_<c> and rate_<c> per channel: jump counts inside each record
// interval and the per-trajectory rate they imply.
CsvTable emission_table(const EnsembleResult& ens, const Model& model, int n_traj) {
  CsvTable table;
  table.header = {"t"};
  for (const auto& ch : model.channels) {
    table.header.push_back("emitted_" + channel_label(ch.xi));
    table.header.push_back("rate_" + channel_label(ch.xi));
  }
  for (std::size_t i = 0; i < ens.mean.size(); ++i) {
    const double t = ens.mean[i].time;
    const double span = i == 0 ? 0.0 : t - ens.mean[i - 1].time;
    std::vector<double> row{t};
    for (std::size_t c = 0; c < model.channels.size(); ++c) {
      const double count = static_cast<double>(ens.emissions[i][c]);
      row.push_back(count);
      row.push_back(span > 0.0 ? count / (span * n_traj) : kNaN);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void maybe_plot(const RunConfig& config, std::ostream& log) {
  if (config.wants("svg_plots")) command_plot(config.output_dir, "", log);
}

// --- plotting -------------------------------------------------------------

std::vector<PlotSeries> columns_vs(const CsvTable& table, const std::string& x_name,
                                   const std::vector<std::string>& names) {
  const auto x = table.column(x_name);
  std::vector<PlotSeries> out;
  for (const auto& name : names) {
    if (!table.has_column(name)) continue;
    out.push_back({name, x, table.column(name)});
  }
  return out;
}

std::vector<std::string> with_prefix(const CsvTable& table, const std::string& prefix) {
  std::vector<std::string> out;
  for (const auto& h : table.header) {
    if (h.rfind(prefix, 0) == 0) out.push_back(h);
  }
  return out;
}

std::string replace_extension(const std::string& path, const std::string& ext) {
  std::filesystem::path p(path);
  p.replace_extension(ext);
  return p.string();
}

void render(const std::string& path, const std::string& svg, std::vector<std::string>& written, std::ostream& log) {
  write_artifact(path, svg, log);
  written.push_back(path);
}

// Known artifacts get dedicated plots; returns false for an unrecognised name.
bool plot_known(const std::string& dir, const std::string& name, std::vector<std::string>& written,
                std::ostream& log) {
  const std::string path = join(dir, name);
  if (name == "timeseries.csv") {
    const CsvTable t = read_csv(path);
    render(join(dir, "intensity.svg"),
           line_plot_svg(columns_vs(t, "t", {"I_0", "I_1", "I_2", "I_total"}), {"Emitted intensity", "t", "I"}),
           written, log);
    render(join(dir, "excitations.svg"), line_plot_svg(columns_vs(t, "t", {"n"}), {"Excitations", "t", "n"}),
           written, log);
    render(join(dir, "nk_ratio.svg"),
           line_plot_svg(columns_vs(t, "t", with_prefix(t, "nk_ratio_")), {"Momentum fractions", "t", "n_k / n"}),
           written, log);
  } else if (name == "momentum.csv") {
    const CsvTable t = read_csv(path);
    render(join(dir, "momentum.svg"),
           line_plot_svg(columns_vs(t, "t", with_prefix(t, "nk_")), {"Momentum occupations", "t", "n_k"}), written,
           log);
  } else if (name == "entropy.csv") {
    const CsvTable t = read_csv(path);
    render(join(dir, "entropy.svg"),
           line_plot_svg(columns_vs(t, "t", {"S_mean"}), {"Trajectory-averaged entropy", "t", "S (nats)"}), written,
           log);
  } else if (name == "entropy_hist.csv") {
    const CsvTable t = read_csv(path);
    std::vector<double> edges = t.column("bin_lo");
    const auto hi = t.column("bin_hi");
    if (!hi.empty()) edges.push_back(hi.back());
    std::vector<std::uint64_t> counts;
    for (double c : t.column("count")) counts.push_back(static_cast<std::uint64_t>(std::llround(c)));
    render(join(dir, "entropy_hist.svg"),
           histogram_svg(edges, counts, {"Final entropy", "S (nats)", "trajectories"}), written, log);
  } else if (name == "dicke_ladder.csv") {
    const CsvTable t = read_csv(path);
    render(join(dir, "dicke_ladder.svg"),
           line_plot_svg(columns_vs(t, "t", {"I", "n"}), {"Collective ladder", "t", "value"}), written, log);
  } else if (name == "scaling.csv") {
    const CsvTable t = read_csv(path);
    PlotOptions opts{"Burst scaling", "N", "value"};
    opts.log_x = opts.log_y = opts.markers = true;
    render(join(dir, "scaling.svg"), line_plot_svg(columns_vs(t, "N", {"I_max", "width", "t_peak"}), opts), written,
           log);
  } else {
    return false;
  }
  return true;
}

const std::vector<std::string> kPlottable{"timeseries.csv", "momentum.csv",    "entropy.csv",
                                          "entropy_hist.csv", "dicke_ladder.csv", "scaling.csv"};

// --- verify ---------------------------------------------------------------

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

RunConfig resized(RunConfig c, int n) {
  c.params.n_sites = n;
  return c;
}

DensityMatrix random_density(int n_sites, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const Index d = basis_dimension(n_sites);
  ComplexMatrix a(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  DensityMatrix rho;
  rho.data = a * a.adjoint();
  rho.data /= rho.data.trace();
  return rho;
}

// Dense reference for the packed evolution: exp(L t) vec(rho0).
ComplexMatrix propagate_dense(const Model& model, const DensityMatrix& rho0, double t) {
  const ComplexMatrix l = dense_liouvillian(model);
  const Index d = rho0.dim();
  const ComplexVector v0 = Eigen::Map<const ComplexVector>(rho0.data.data(), d * d);
  const ComplexVector v = (l * t).exp() * v0;
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

}  // namespace

std::vector<int> default_sweep(EmissionMode mode) {
  if (mode == EmissionMode::dicke) return {4, 5, 6, 7, 8, 9, 10, 11, 12};
  return {4, 6, 8};
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const InvariantError*>(&error)) return 1;
  if (dynamic_cast<const ConfigError*>(&error)) return 2;
  return 3;
}

void command_evolve(const RunConfig& config, std::ostream& log) {
  if (config.engine == Engine::trajectories) {
    command_trajectories(config, log);
    return;
  }
  write_resolved_config(config, log);
  const Model model = build_model(config);
  const MasterRun run = evolve_master(DensityMatrix::from_pure(build_initial_state(config)), model, config.evolution);
  const auto series = master_records(run);
  const std::string& dir = config.output_dir;
  if (config.wants("timeseries")) write_artifact(join(dir, "timeseries.csv"), to_csv(timeseries_table(series, config.params)), log);
  if (config.wants("momentum")) write_artifact(join(dir, "momentum.csv"), to_csv(momentum_table(series, config.params.n_sites)), log);

  const auto& last = series.back();
  Json summary{{"command", "evolve"},
               {"mode", to_string(config.mode)},
               {"engine", "master"},
               {"N", config.params.n_sites},
               {"samples", series.size()},
               {"final", Json{{"t", last.time},
                              {"n", last.n_total},
                              {"density", last.n_total / config.params.n_sites},
                              {"I_total", last.intensity_total}}},
               {"steady", Json{{"reached", run.steady.reached}, {"time", number(run.steady.time)}}},
               {"invariants", invariants_json(run)},
               {"integrator", Json{{"accepted", run.counters.accepted},
                                   {"rejected", run.counters.rejected},
                                   {"rhs_evaluations", run.counters.rhs_evaluations}}}};
  if (config.wants("burst")) summary["bursts"] = bursts_json(series);
  write_json(join(dir, "summary.json"), summary, log);
  maybe_plot(config, log);
}

void command_trajectories(const RunConfig& config, std::ostream& log) {
  write_resolved_config(config, log);
  const Model model = build_model(config);
  const TrajectoryEngine engine(model, config.trajectory.entropy_cut);
  TrajectoryConfig tc = config.trajectory;
  tc.keep_records = true;
  const EnsembleResult ens = run_ensemble(engine, build_initial_state(config), tc);
  const std::string& dir = config.output_dir;
  const int n = config.params.n_sites;

  if (config.wants("timeseries")) {
    write_artifact(join(dir, "timeseries.csv"), to_csv(timeseries_table(ens.mean, config.params)), log);
    write_artifact(join(dir, "ensemble_mean.csv"), to_csv(observable_table(ens.mean, n)), log);
    write_artifact(join(dir, "ensemble_stderr.csv"), to_csv(observable_table(ens.std_error, n)), log);
  }
  if (config.wants("momentum")) write_artifact(join(dir, "momentum.csv"), to_csv(momentum_table(ens.mean, n)), log);
  write_artifact(join(dir, "entropy.csv"), to_csv(entropy_table(ens.mean, ens.std_error)), log);
  write_artifact(join(dir, "entropy_series.csv"), to_csv(trajectory_entropy_table(ens.records)), log);
  write_artifact(join(dir, "jumps.csv"), to_csv(jump_table(ens.records)), log);
  write_artifact(join(dir, "emissions.csv"), to_csv(emission_table(ens, model, tc.n_traj)), log);
  if (config.wants("entropy_hist")) write_artifact(join(dir, "entropy_hist.csv"), to_csv(histogram_table(ens.entropy_hist)), log);

  const SteadySummary steady = steady_state_summary(ens, n);
  Json summary{{"command", "trajectories"},
               {"mode", to_string(config.mode)},
               {"N", n},
               {"n_traj", tc.n_traj},
               {"master_seed", tc.master_seed},
               {"dt", engine.resolved_dt(tc)},
               {"trivial_fraction", ens.trivial_fraction},
               {"mean_final_entropy", ens.mean_final_entropy},
               {"dark_count", ens.dark_count},
               {"total_jumps", ens.total_jumps},
               {"final_n_mean", ens.mean.back().n_total},
               {"density", steady.density},
               {"all_dark", steady.steady_reached}};
  if (config.wants("burst")) summary["bursts"] = bursts_json(ens.mean);
  write_json(join(dir, "summary.json"), summary, log);
  maybe_plot(config, log);
}

void command_scaling(const RunConfig& config, std::ostream& log) {
  write_resolved_config(config, log);
  const std::vector<int> sizes = config.sweep.empty() ? default_sweep(config.mode) : config.sweep;
  const std::string& dir = config.output_dir;
  Json fits{{"command", "scaling"}, {"mode", to_string(config.mode)}, {"sizes", sizes}};
  CsvTable table;

  if (config.mode == EmissionMode::dicke) {
    const double gamma = dicke_rate_of(config);
    const double dt = 1e-4 / gamma;
    log << "scaling: collective ladder, gamma = " << format_double(gamma) << ", " << sizes.size() << " sizes\n";
    const DickeScaling ds = dicke_scaling(sizes, gamma, config.evolution.t_max, dt);
    table.header = {"N", "I_max", "width", "t_peak", "flagged"};
    Json features = Json::array();
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const auto& f = ds.features[i];
      table.rows.push_back({static_cast<double>(sizes[i]), f.i_max, f.width, f.t_peak, f.flagged() ? 1.0 : 0.0});
      features.push_back(burst_json(f));
    }
    std::vector<double> ns(sizes.begin(), sizes.end()), widths;
    for (const auto& f : ds.features) widths.push_back(f.width);
    fits["source"] = "ladder";
    fits["gamma"] = gamma;
    fits["dt"] = dt;
    fits["i_max"] = fit_json(ds.peak_fit);
    fits["width"] = fit_json(ds.width_fit);
    fits["width_inverse_n"] = fit_json(fit_scaling(ns, widths, ScalingModel::inverse_n));
    fits["t_delay"] = fit_json(ds.delay_fit);
    fits["features"] = features;
  } else {
    table.header = {"N", "I_max", "width", "t_peak", "flagged", "t_peak_0", "t_peak_1", "t_peak_2", "density",
                    "steady_reached"};
    std::vector<double> ns, peaks, widths, density;
    std::array<std::vector<double>, 3> delays;
    Json features = Json::array();
    for (int n : sizes) {
      RunConfig c = config;
      c.params.n_sites = n;
      c.initial = InitialState::inverted;
      if (auto issue = check_config(c)) throw ConfigError("sweep N = " + std::to_string(n) + ": " + issue->message);
      log << "scaling: master run N = " << n << '\n';
      const MasterRun run = evolve_master(DensityMatrix::from_pure(build_initial_state(c)), build_model(c), c.evolution);
      const auto series = master_records(run);
      const auto times = series_times(series);
      const BurstFeatures total = extract_burst(times, series_total_intensity(series));
      std::vector<double> row{static_cast<double>(n), total.i_max, total.width, total.t_peak,
                              total.flagged() ? 1.0 : 0.0};
      Json entry{{"N", n}, {"I_total", burst_json(total)}};
      for (int xi = 0; xi < 3; ++xi) {
        const BurstFeatures f = extract_burst(times, series_intensity(series, xi));
        row.push_back(f.t_peak);
        delays[static_cast<std::size_t>(xi)].push_back(f.t_peak);
        entry["I_" + std::to_string(xi)] = burst_json(f);
      }
      const SteadySummary s = steady_state_summary(run, n);
      row.push_back(s.density);
      row.push_back(s.steady_reached ? 1.0 : 0.0);
      table.rows.push_back(std::move(row));
      entry["density"] = s.density;
      entry["steady_reached"] = s.steady_reached;
      features.push_back(entry);
      ns.push_back(n);
      peaks.push_back(total.i_max);
      widths.push_back(total.width);
      density.push_back(s.density);
    }
    fits["source"] = "master";
    fits["i_max"] = fit_json(fit_scaling(ns, peaks, ScalingModel::power_law));
    if (all_finite(widths)) fits["width"] = fit_json(fit_scaling(ns, widths, ScalingModel::power_law));
    // The xi = 2 channel and the total peak at t = 0 on an inverted start, so
    // their delay carries no size dependence worth fitting.
    Json delay = Json::object();
    for (int xi = 0; xi < 2; ++xi) {
      delay["I_" + std::to_string(xi)] = fit_json(fit_scaling(ns, delays[static_cast<std::size_t>(xi)], ScalingModel::log_over_n));
    }
    delay["I_2"] = Json{{"excluded", true}};
    delay["I_total"] = Json{{"excluded", true}};
    fits["t_delay"] = delay;
    fits["density"] = density;
    fits["features"] = features;
  }
  if (config.wants("scaling_sweep")) write_artifact(join(dir, "scaling.csv"), to_csv(table), log);
  write_json(join(dir, "fits.json"), fits, log);
  maybe_plot(config, log);
}

void command_dicke(const RunConfig& config, std::ostream& log) {
  write_resolved_config(config, log);
  const int n = config.params.n_sites;
  const double gamma = dicke_rate_of(config);
  const std::string& dir = config.output_dir;
  const auto grid = sample_times(0.0, config.evolution.t_max, config.evolution.sample_interval);
  const LadderSeries ladder = dicke_ladder_reference(n, gamma, grid);
  write_artifact(join(dir, "dicke_ladder.csv"), to_csv(ladder_table(ladder)), log);

  const LadderSeries fine = dicke_ladder_reference(n, gamma, config.evolution.t_max, 1e-4 / gamma);
  double max_rate = 0.0;
  for (int k = 0; k <= n; ++k) max_rate = std::max(max_rate, dicke_ladder_rate(n, k, gamma));
  Json out{{"command", "dicke"},
           {"N", n},
           {"gamma", gamma},
           {"max_ladder_rate", max_rate},
           {"burst", fine.times.size() >= 10 ? burst_json(extract_burst(fine.times, fine.intensity)) : Json(nullptr)}};

  if (n <= 8) {
    RunConfig c = config;
    c.mode = EmissionMode::dicke;
    c.dicke_rate = gamma;
    c.initial = InitialState::inverted;
    EvolutionConfig ec = c.evolution;
    ec.rel_tol = std::min(ec.rel_tol, 1e-10);
    ec.abs_tol = std::min(ec.abs_tol, 1e-12);
    ec.stop_at_steady = false;
    log << "dicke: master-equation comparison at N = " << n << '\n';
    const MasterRun run = evolve_master(DensityMatrix::from_pure(build_initial_state(c)), build_model(c), ec);
    double dn = 0.0, di = 0.0;
    for (std::size_t i = 0; i < run.samples.size() && i < ladder.times.size(); ++i) {
      dn = std::max(dn, std::abs(run.samples[i].obs.n_total - ladder.excitations[i]));
      di = std::max(di, std::abs(run.samples[i].obs.intensity_total - ladder.intensity[i]));
    }
    out["master_comparison"] = Json{{"max_abs_n_difference", dn}, {"max_abs_intensity_difference", di}};
  }
  write_json(join(dir, "dicke_burst.json"), out, log);
  maybe_plot(config, log);
}

std::vector<CheckResult> command_verify(const RunConfig& config, std::ostream& report) {
  std::vector<CheckResult> results;
  auto record = [&](const std::string& name, bool passed, const std::string& detail) {
    results.push_back({name, passed, detail});
    report << (passed ? "[PASS] " : "[FAIL] ") << name << ": " << detail << '\n';
  };
  // Each check runs in isolation so one failure does not hide the rest.
  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      record(name, false, std::string("threw: ") + e.what());
    }
  };
  const ChainParams& p = config.params;
  const int n_master = std::min(p.n_sites, 8);
  const int n_small = std::min(p.n_sites, 4);
  std::mt19937_64 rng(config.trajectory.master_seed);

  guarded("operator partition", [&] {
    const Model kc = make_kc_model(p);
    SparseOperator sum = kc.channels[0].op + kc.channels[1].op + kc.channels[2].op;
    const double err = (sum - build_collective_lowering(p)).max_abs();
    record("operator partition", err < 1e-12, "max |sum_xi S_xi - S| = " + sci(err));
  });

  guarded("eigenoperator identity", [&] {
    const Model kc = make_kc_model(p);
    double err = 0.0;
    for (const auto& ch : kc.channels) err = std::max(err, verify_eigenoperator(kc.hamiltonian, ch));
    record("eigenoperator identity", err < 1e-12, "max |[H, S_xi] + omega_xi S_xi| = " + sci(err));
  });

  guarded("effective hamiltonian", [&] {
    const Model model = build_model(config);
    const ComplexMatrix heff = effective_hamiltonian(model.hamiltonian, model.channels).to_dense();
    const ComplexMatrix herm = 0.5 * (heff + heff.adjoint());
    const ComplexMatrix anti = (heff - heff.adjoint()) / (2.0 * kI);
    const double err = (herm - model.hamiltonian.to_dense()).cwiseAbs().maxCoeff();
    const double max_diag = anti.diagonal().real().maxCoeff();
    record("effective hamiltonian", err < 1e-12 && max_diag <= 1e-12,
           "Hermitian part vs H " + sci(err) + ", max decay diagonal " + sci(max_diag));
  });

  guarded("rhs trace and hermiticity", [&] {
    const Model model = build_model(resized(config, std::min(p.n_sites, 5)));
    const DensityMatrix rho = random_density(model.params.n_sites, rng);
    const ComplexMatrix d = lindblad_rhs(rho, model.hamiltonian, model.channels);
    const double tr = std::abs(d.trace());
    const double herm = (d - d.adjoint()).cwiseAbs().maxCoeff();
    record("rhs trace and hermiticity", tr < 1e-12 && herm < 1e-12, "|tr L rho| = " + sci(tr) + ", herm " + sci(herm));
  });

  guarded("blocked generator", [&] {
    const int n = std::min(p.n_sites, 5);
    const Model model = build_model(resized(config, n));
    std::vector<int> orders;
    for (int o = -n; o <= n; ++o) orders.push_back(o);
    const BlockedLiouvillian blocked(model, orders);
    const DensityMatrix rho = random_density(n, rng);
    ComplexVector dx(blocked.packed_size());
    blocked.apply(blocked.pack(rho), dx);
    const ComplexMatrix dense = lindblad_rhs(rho, model.hamiltonian, model.channels);
    const double err = (blocked.unpack(dx, 0.0).data - dense).cwiseAbs().maxCoeff();
    record("blocked generator", err < 1e-11, "max |blocked - dense| = " + sci(err));
  });

  guarded("master invariants", [&] {
    RunConfig c = config;
    c.params.n_sites = n_master;
    EvolutionConfig ec = c.evolution;
    ec.t_max = std::min(ec.t_max, 2.0);
    ec.sample_interval = 1e-3;
    ec.rel_tol = 1e-10;
    ec.abs_tol = 1e-12;
    ec.stop_at_steady = false;
    ec.monitor_positivity = true;
    const MasterRun run = evolve_master(DensityMatrix::from_pure(build_initial_state(c)), build_model(c), ec);
    const auto series = master_records(run);
    double trace = 0.0, herm = 0.0, sum_rule = 0.0, rise = 0.0, min_eig = 1.0, i_peak = 0.0;
    for (std::size_t i = 0; i < run.samples.size(); ++i) {
      const auto& s = run.samples[i];
      trace = std::max(trace, s.trace_error);
      herm = std::max(herm, s.hermiticity_error);
      if (std::isfinite(s.min_eigenvalue)) min_eig = std::min(min_eig, s.min_eigenvalue);
      double nk = 0.0;
      for (double v : s.obs.momentum_occ) nk += v;
      sum_rule = std::max(sum_rule, std::abs(nk - s.obs.n_total));
      if (i > 0) rise = std::max(rise, s.obs.n_total - run.samples[i - 1].obs.n_total);
      i_peak = std::max(i_peak, s.obs.intensity_total);
    }
    record("trace conservation", trace < 1e-9, "max |tr rho - 1| = " + sci(trace));
    record("hermiticity", herm < 1e-10, "max |rho - rho^+| = " + sci(herm));
    record("momentum sum rule", sum_rule < 1e-8, "max |sum_k n_k - n| = " + sci(sum_rule));
    record("monotone excitation number", rise <= 1e-10, "largest increase of n = " + sci(rise));
    record("positivity", min_eig >= -1e-8, "min eigenvalue = " + sci(min_eig));
    const double bal = balance_law_error(series_times(series), [&] {
      std::vector<double> v;
      for (const auto& r : series) v.push_back(r.n_total);
      return v;
    }(), series_total_intensity(series), 1e-6 * i_peak);
    record("balance law", bal < 1e-4, "max |dn/dt + I| / I = " + sci(bal) + " (N = " + std::to_string(n_master) + ")");
  });

  guarded("steady-state detection", [&] {
    RunConfig c = config;
    c.params.n_sites = n_master;
    const MasterRun run = evolve_master(DensityMatrix::from_pure(build_initial_state(c)), build_model(c), c.evolution);
    const SteadyState s = detect_steady_state(run.samples, c.evolution.steady_tol, c.evolution.steady_window);
    const bool consistent = s.reached == run.steady.reached && (!s.reached || s.time == run.steady.time);
    record("steady-state detection", consistent,
           s.reached ? "steady from t = " + format_double(s.time) + ", n = " + format_double(run.samples.back().obs.n_total)
                     : "not reached by t_max = " + format_double(c.evolution.t_max) + " (informational)");
  });

  guarded("dense propagator oracle", [&] {
    RunConfig c = config;
    c.params.n_sites = n_small;
    const Model model = build_model(c);
    const double gamma0 = model.channels.front().rate;
    EvolutionConfig ec;
    ec.t_max = 5.0 / gamma0;
    ec.sample_interval = ec.t_max;
    ec.rel_tol = 1e-11;
    ec.abs_tol = 1e-13;
    const DensityMatrix rho0 = DensityMatrix::from_pure(build_initial_state(c));
    const MasterRun run = evolve_master(rho0, model, ec);
    const double err = (run.final_state.data - propagate_dense(model, rho0, ec.t_max)).cwiseAbs().maxCoeff();
    record("dense propagator oracle", err < 1e-6,
           "max entry difference at t = 5 / gamma_0 = " + sci(err) + " (N = " + std::to_string(n_small) + ")");
  });

  guarded("trajectory ensemble", [&] {
    RunConfig c = config;
    c.params.n_sites = n_small;
    const Model model = build_model(c);
    TrajectoryConfig tc;
    tc.t_max = 1.0;
    tc.record_cadence = 0.25;
    tc.n_traj = 400;
    tc.master_seed = config.trajectory.master_seed;
    tc.threads = config.trajectory.threads;
    const TrajectoryEngine engine(model);
    const EnsembleResult ens = run_ensemble(engine, build_initial_state(c), tc);
    EvolutionConfig ec;
    ec.t_max = tc.t_max;
    ec.sample_interval = tc.record_cadence;
    const MasterRun run = evolve_master(DensityMatrix::from_pure(build_initial_state(c)), model, ec);
    double worst = 0.0;
    for (std::size_t i = 0; i < ens.mean.size() && i < run.samples.size(); ++i) {
      const double se = ens.std_error[i].n_total;
      const double diff = std::abs(ens.mean[i].n_total - run.samples[i].obs.n_total);
      worst = std::max(worst, se > 0.0 ? diff / se : (diff < 1e-9 ? 0.0 : INFINITY));
    }
    record("trajectory ensemble", worst < 4.0, "largest |mean n - master n| = " + format_double(worst) + " standard errors");
  });

  guarded("collective ladder", [&] {
    ChainParams two = p;
    two.n_sites = 2;
    const double rate = dicke_rate_of(config);
    const Model model = make_dicke_model(two, rate);
    EvolutionConfig ec;
    ec.t_max = 3.0 / rate;
    ec.sample_interval = ec.t_max / 30.0;
    ec.rel_tol = 1e-11;
    ec.abs_tol = 1e-13;
    const MasterRun run = evolve_master(DensityMatrix::from_pure(PureState::fully_inverted(2)), model, ec);
    std::vector<double> times;
    for (const auto& s : run.samples) times.push_back(s.obs.time);
    const LadderSeries ladder = dicke_ladder_reference(2, rate, times);
    double err = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      err = std::max(err, std::abs(run.samples[i].obs.n_total - ladder.excitations[i]));
      err = std::max(err, std::abs(run.samples[i].obs.intensity_total - ladder.intensity[i]) / rate);
    }
    record("collective ladder", err < 1e-8, "max master vs ladder difference at N = 2: " + sci(err));
  });

  guarded("entanglement entropy", [&] {
    PureState bell;
    bell.amplitudes = ComplexVector::Zero(4);
    bell.amplitudes(0) = bell.amplitudes(3) = 1.0 / std::sqrt(2.0);
    const double s = entanglement_entropy(bell, {0});
    const double err = std::abs(s - std::log(2.0));
    record("entanglement entropy", err < 1e-12, "Bell pair entropy - ln 2 = " + sci(err));
  });

  guarded("config round trip", [&] {
    const bool same = parse_config(emit_config(config), "emitted").config == config;
    record("config round trip", same, same ? "parse(emit(config)) == config" : "emitted config parses differently");
  });

  std::size_t failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  report << (failed == 0 ? "all " + std::to_string(results.size()) + " checks passed"
                         : std::to_string(failed) + " of " + std::to_string(results.size()) + " checks failed")
         << '\n';
  return results;
}

std::vector<std::string> command_plot(const std::string& dir, const std::string& input, std::ostream& log) {
  std::vector<std::string> written;
  if (!input.empty()) {
    const std::filesystem::path path(input);
    const std::string parent = path.has_parent_path() ? path.parent_path().string() : ".";
    if (plot_known(parent, path.filename().string(), written, log)) return written;
    const CsvTable t = read_csv(input);
    std::vector<std::string> ys(t.header.begin() + 1, t.header.end());
    render(replace_extension(input, ".svg"),
           line_plot_svg(columns_vs(t, t.header.front(), ys), {path.stem().string(), t.header.front(), "value"}),
           written, log);
    return written;
  }
  for (const auto& name : kPlottable) {
    if (std::filesystem::exists(join(dir, name))) plot_known(dir, name, written, log);
  }
  if (written.empty()) throw ConfigError("plot: no known CSV artifacts in '" + dir + "'");
  return written;
}

}  // namespace kcsr
