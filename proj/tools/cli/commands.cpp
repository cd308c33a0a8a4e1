// Copyright 2026 The urc Authors
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

#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <limits>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cli/config.hpp"
#include "cli/io.hpp"
#include "urc/docs.hpp"
#include "urc/error.hpp"
#include "urc/functionals.hpp"
#include "urc/verify.hpp"

namespace urc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kUnitNotes = {"units: durations in 2pi/rate, lambda in units of the rate"};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Session {
  ExperimentConfig cfg;
  fs::path dir;
  RunStamp prov;
  std::string command;
  std::string timestamp = utc_timestamp();
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  json wall = json::object();
  bool partial = false;
  std::ostream* err = nullptr;

  void write(const Table& t) const {
    const json side = {{"command", command},   {"timestamp", timestamp},         {"wall_seconds", wall},
                       {"partial", partial},   {"total_seconds", seconds_since(t0)}};
    write_table(dir, t, prov, side, kUnitNotes);
  }
  void log(const std::string& line) const { *err << "[" << command << "] " << line << std::endl; }
};

Session open_session(ExperimentConfig cfg, const std::optional<std::string>& out_flag, std::string command,
                     std::ostream& err) {
  Session s;
  const std::optional<std::string> out = out_flag ? out_flag : cfg.output;
  if (!out) throw ConfigError("no output directory: pass --out or set 'output'");
  s.dir = *out;
  s.prov = {cfg.hash, cfg.options.seed};
  s.cfg = std::move(cfg);
  s.command = std::move(command);
  s.err = &err;
  return s;
}

void write_config(const Session& s) {
  json stored = s.cfg.resolved;
  stored.erase("output");
  std::string tag = s.command;
  std::replace(tag.begin(), tag.end(), '-', '_');
  write_atomic(s.dir / ("config_" + tag + ".json"), stored.dump(2) + "\n");
}

std::string pulse_name(const Job& j) { return "pulse_" + j.method + ".csv"; }

std::map<std::string, std::string> pulse_meta(const Job& j, const OptimizationResult& r) {
  return {{"method", j.id},
          {"job_hash", j.job_hash},
          {"model", j.objective.model.label()},
          {"segments", std::to_string(j.objective.segments)},
          {"channels", std::to_string(j.objective.model.n_channels())},
          {"duration", format_double(j.dimensionless(j.objective.duration))},
          {"rate", format_double(j.rate)},
          {"total", format_double(r.value.total)},
          {"success", r.success ? "1" : "0"}};
}

// ---- optimize ----

int cmd_optimize(Session& s) {
  std::filesystem::create_directories(s.dir);
  write_config(s);
  Table summary("summary", {"method", "duration", "segments", "total", "j0", "jrob", "success", "best_start",
                            "starts_run", "finite_starts"});
  Table starts("starts", {"method", "start", "seed", "total", "j0", "jrob", "iterations", "stop_reason", "finite"});
  Table trace("trace", {"method", "start", "iteration", "value"});
  for (const Job& j : s.cfg.jobs) {
    const auto t0 = std::chrono::steady_clock::now();
    const OptimizationResult r = optimize_pulse(j.objective, s.cfg.options);
    s.wall[j.method] = seconds_since(t0);
    std::size_t finite = 0;
    for (std::size_t i = 0; i < r.starts.size(); ++i) {
      const StartResult& st = r.starts[i];
      finite += st.finite ? 1 : 0;
      starts.row().cell(j.method).cell(static_cast<std::uint64_t>(i)).cell(st.seed).cell(st.value.total)
          .cell(st.value.j0).cell(st.value.jrob).cell(st.iterations).cell(st.stop_reason).flag(st.finite);
      for (const TracePoint& tp : st.trace) {
        trace.row().cell(j.method).cell(static_cast<std::uint64_t>(i)).cell(tp.iteration).cell(tp.value);
      }
    }
    if (finite == 0) s.partial = true;
    summary.row().cell(j.method).cell(j.dimensionless(j.objective.duration)).cell(j.objective.segments)
        .cell(r.value.total).cell(r.value.j0).cell(r.value.jrob).flag(r.success)
        .cell(static_cast<std::uint64_t>(r.best_start)).cell(static_cast<std::uint64_t>(r.starts.size()))
        .cell(static_cast<std::uint64_t>(finite));
    write_atomic(s.dir / pulse_name(j), render_pulse(r.best, s.prov, pulse_meta(j, r)));
    s.log(fmt::format("{}: total {:.3e} (J0 {:.3e}, Jrob {:.3e}), success {}, {:.1f} s", j.id, r.value.total,
                      r.value.j0, r.value.jrob, r.success, seconds_since(t0)));
  }
  s.write(summary);
  s.write(starts);
  s.write(trace);
  return s.partial ? kNumericFailure : kOk;
}

// ---- scan-mct ----

json point_json(const Session& s, const Job& j, std::size_t i, double duration, const OptimizationResult& r) {
  json starts = json::array();
  for (const StartResult& st : r.starts) {
    starts.push_back({{"seed", st.seed},
                      {"total", st.value.total},
                      {"j0", st.value.j0},
                      {"jrob", st.value.jrob},
                      {"iterations", st.iterations},
                      {"stop_reason", st.stop_reason},
                      {"finite", st.finite}});
  }
  std::vector<double> values(r.best.values().data(), r.best.values().data() + r.best.values().size());
  return {{"config_hash", s.cfg.hash},
          {"job_hash", j.job_hash},
          {"index", i},
          {"duration", duration},
          {"total", r.value.total},
          {"j0", r.value.j0},
          {"jrob", r.value.jrob},
          {"success", r.success},
          {"best_start", r.best_start},
          {"segments", r.best.segments()},
          {"channels", r.best.channels()},
          {"pulse", values},
          {"starts", starts}};
}

std::optional<OptimizationResult> read_point(const Session& s, const Job& j, const fs::path& path, std::size_t i,
                                             double duration) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json p;
  try {
    p = json::parse(in);
    if (p.at("config_hash") != s.cfg.hash || p.at("job_hash") != j.job_hash || p.at("index") != i ||
        p.at("duration").get<double>() != duration) {
      return std::nullopt;
    }
    OptimizationResult r;
    const auto segments = p.at("segments").get<Eigen::Index>();
    const auto channels = p.at("channels").get<Eigen::Index>();
    const auto values = p.at("pulse").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(values.size()) != segments * channels) return std::nullopt;
    Pulse::Table t(segments, channels);
    std::copy(values.begin(), values.end(), t.data());
    r.best = Pulse(std::move(t), duration * j.time_unit / static_cast<double>(segments));
    r.value = {p.at("total").get<double>(), p.at("j0").get<double>(), p.at("jrob").get<double>()};
    r.success = p.at("success").get<bool>();
    r.best_start = p.at("best_start").get<std::size_t>();
    r.seed = s.cfg.options.seed;
    for (const json& st : p.at("starts")) {
      StartResult sr;
      sr.seed = st.at("seed").get<std::uint64_t>();
      sr.value = {st.at("total").get<double>(), st.at("j0").get<double>(), st.at("jrob").get<double>()};
      sr.iterations = st.at("iterations").get<int>();
      sr.stop_reason = st.at("stop_reason").get<std::string>();
      sr.finite = st.at("finite").get<bool>();
      r.starts.push_back(std::move(sr));
    }
    return r;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

int cmd_scan(Session& s) {
  std::filesystem::create_directories(s.dir);
  write_config(s);
  Table scan("scan", {"method", "index", "duration", "total", "j0", "jrob", "success", "starts_run"});
  Table mct("mct", {"method", "found", "t_mct", "resolution"});
  for (const Job& j : s.cfg.jobs) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> grid;
    for (double t : j.scan_grid) grid.push_back(t * j.time_unit);
    const fs::path points = s.dir / "points" / j.method;
    std::size_t reused = 0;
    auto on_point = [&](std::size_t i, const OptimizationResult& r) {
      write_atomic(points / fmt::format("{:04}.json", i), point_json(s, j, i, j.scan_grid[i], r).dump(1) + "\n");
      s.log(fmt::format("{} at {}: best {:.3e}, success {}", j.id, format_double(j.scan_grid[i]), r.value.total,
                        r.success));
    };
    auto cached = [&](std::size_t i) {
      auto r = read_point(s, j, points / fmt::format("{:04}.json", i), i, j.scan_grid[i]);
      if (r) ++reused;
      return r;
    };
    const MCTScanResult r = mct_scan(j.objective, grid, s.cfg.options, on_point, cached);
    s.wall[j.method] = seconds_since(t0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const OptimizationResult& p = r.points[i];
      scan.row().cell(j.method).cell(static_cast<std::uint64_t>(i)).cell(j.scan_grid[i]).cell(p.value.total)
          .cell(p.value.j0).cell(p.value.jrob).flag(p.success).cell(static_cast<std::uint64_t>(p.starts.size()));
    }
    mct.row().cell(j.method).flag(r.t_mct.has_value()).cell(r.t_mct ? j.dimensionless(*r.t_mct) : 0.0)
        .cell(j.dimensionless(r.resolution));
    s.log(fmt::format("{}: t_mct {} ({} of {} points reused)", j.id,
                      r.t_mct ? format_double(j.dimensionless(*r.t_mct)) : std::string("not found"), reused,
                      grid.size()));
  }
  s.write(scan);
  s.write(mct);
  return kOk;
}

// ---- verify ----

std::vector<double> fit_grid(const VerifySpec& v, double tf) {
  std::vector<double> out;
  const int half = v.fit_points / 2;
  for (int i = -half; i <= half; ++i) out.push_back(v.fit_window / tf * i / half);
  return out;
}

CMatrix noise_state(const Job& j, const NoiseSpec& n) {
  const TargetSpec& t = j.objective.target;
  if (!t.is_unitary()) return t.initial_state();
  const Eigen::Index d = j.objective.model.dim();
  CMatrix sigma = CMatrix::Zero(d, d);
  sigma(n.state, n.state) = 1.0;
  return sigma;
}

std::vector<Probe> select(const Job& j, const std::vector<std::string>& names) {
  if (names.empty()) return j.probes;
  const auto known = named_probes(j.objective.model.dim());
  std::vector<Probe> out;
  for (const auto& n : names) out.push_back({n, known.at(n)});
  return out;
}

void fit_row(Table& t, const Job& j, const std::string& probe, const SweepCurve& c, double predicted, double tf) {
  t.row().cell(j.method).cell(probe);
  try {
    const CurvatureFit f = curvature_check(c, predicted);
    t.cell(f.chi / (tf * tf)).cell(predicted / (tf * tf)).cell(f.deviation).cell(static_cast<std::uint64_t>(f.points))
        .cell(f.lambda_max * tf);
  } catch (const InputError&) {
    t.cell(std::string("nan")).cell(predicted / (tf * tf)).cell(std::string("nan")).cell(std::uint64_t{0}).cell(0.0);
  }
}

int cmd_verify(Session& s, const std::vector<Pulse>& pulses) {
  std::filesystem::create_directories(s.dir);
  write_config(s);
  const VerifySpec& v = s.cfg.verify;
  const int threads = s.cfg.options.threads;
  Table summary("verify_summary", {"method", "duration", "segments", "j0", "fidelity_at_zero", "jrob",
                                   "one_design_max", "one_design_sum_squares", "mtilde_norm2_matched"});
  Table sweep("sweep", {"method", "probe", "lambda", "fidelity", "infidelity"});
  Table curvature("curvature", {"method", "probe", "chi_over_tf2", "predicted_over_tf2", "deviation", "points",
                                "lambda_tf_max"});
  Table random("random", {"method", "lambda", "fidelity", "infidelity"});
  Table realizations("random_realizations", {"method", "realization", "lambda", "fidelity"});
  Table design("one_design", {"method", "element", "class", "deviation"});
  Table noise("noise", {"method", "probe", "correlation", "tau", "lambda", "predicted", "mc_infidelity", "stderr",
                        "trajectories", "z"});

  for (std::size_t ji = 0; ji < s.cfg.jobs.size(); ++ji) {
    const Job& j = s.cfg.jobs[ji];
    const Pulse& pulse = pulses[ji];
    const auto t0 = std::chrono::steady_clock::now();
    const ControlModel& m = j.objective.model;
    const TargetSpec& target = j.objective.target;
    const Propagation prop = propagate_segments(m, pulse);
    const double tf = prop.duration();
    const FunctionalValue fv = evaluate(j.objective, prop);

    std::vector<double> lambdas;
    for (double l : v.lambdas) lambdas.push_back(l * j.rate);
    const std::vector<double> fit = fit_grid(v, tf);
    double f0 = 1.0 - fv.j0;
    for (const Probe& p : select(j, v.probes)) {
      const SweepCurve c = fidelity_sweep(m, pulse, target, p.op, lambdas, p.name);
      f0 = c.at_zero();
      for (std::size_t i = 0; i < lambdas.size(); ++i) {
        sweep.row().cell(j.method).cell(p.name).cell(v.lambdas[i]).cell(c.fidelities[i]).cell(1.0 - c.fidelities[i]);
      }
      const double predicted = target.is_unitary() ? chi_unitary(prop, p.op)
                                                   : chi_state(prop, p.op, target.initial_state());
      fit_row(curvature, j, p.name, fidelity_sweep(m, pulse, target, p.op, fit, p.name), predicted, tf);
    }
    if (v.random > 0) {
      const SweepCurve c = random_direction_sweep(m, pulse, target, v.random, lambdas, v.seed, std::nullopt, threads);
      for (std::size_t i = 0; i < lambdas.size(); ++i) {
        random.row().cell(j.method).cell(v.lambdas[i]).cell(c.fidelities[i]).cell(1.0 - c.fidelities[i]);
      }
      for (std::size_t r = 0; r < c.realizations.size(); ++r) {
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
          realizations.row().cell(j.method).cell(static_cast<std::uint64_t>(r)).cell(v.lambdas[i])
              .cell(c.realizations[r][i]);
        }
      }
      const auto dirs = sample_directions(DirectionSpace::for_dimension(m.dim()), v.random, v.seed);
      for (std::size_t r = 0; r < dirs.size(); ++r) {
        const double predicted = target.is_unitary() ? chi_unitary(prop, dirs[r])
                                                     : chi_state(prop, dirs[r], target.initial_state());
        fit_row(curvature, j, fmt::format("random_{}", r), fidelity_sweep(m, pulse, target, dirs[r], fit), predicted,
                tf);
      }
    }
    // State targets have no twirl check.
    double max_dev = std::numeric_limits<double>::quiet_NaN();
    double sum_sq = max_dev;
    double mtilde = max_dev;
    if (target.is_unitary()) {
      const OperatorBasis basis = m.dim() == 2 ? pauli_basis(1) : symmetric_subspace_basis(static_cast<int>(m.dim() - 1));
      const std::size_t n = std::max(v.one_design_samples, static_cast<std::size_t>(pulse.segments()));
      const OneDesignReport r = one_design_check(m, pulse, basis, n);
      for (std::size_t k = 0; k < r.deviations.size(); ++k) {
        design.row().cell(j.method).cell(static_cast<std::uint64_t>(k)).cell(basis.class_of(k)).cell(r.deviations[k]);
      }
      max_dev = r.max_deviation;
      sum_sq = r.sum_squares;
      mtilde = build_Mtilde(build_M0(prop, Quadrature::riemann(r.substeps)), basis, {0}).frobenius_norm2();
    }
    if (v.noise.enabled) {
      const NoiseSpec& n = v.noise;
      const Correlation corr = j.correlation(n);
      const CMatrix sigma = noise_state(j, n);
      const double lambda = n.lambda * j.rate;
      for (const Probe& p : select(j, n.probes)) {
        const CVector vv = vectorize(p.op);
        const double predicted =
            lambda * lambda * (vv.adjoint() * noise_kernel(prop, sigma, corr, n.substeps).matrix * vv)(0).real();
        const NoiseEstimate e =
            noise_monte_carlo(m, pulse, sigma, p.op, corr, lambda, n.trajectories, v.seed, n.substeps, threads);
        const double mc = 1.0 - e.mean;
        noise.row().cell(j.method).cell(p.name).cell(std::string(n.white ? "white" : "exponential"))
            .cell(n.white ? 0.0 : n.tau).cell(n.lambda).cell(predicted).cell(mc).cell(e.stderr_mean)
            .cell(static_cast<std::uint64_t>(e.trajectories)).cell(e.stderr_mean > 0 ? (mc - predicted) / e.stderr_mean : 0.0);
      }
    }
    summary.row().cell(j.method).cell(j.dimensionless(tf)).cell(pulse.segments()).cell(fv.j0).cell(f0).cell(fv.jrob)
        .cell(max_dev).cell(sum_sq).cell(mtilde);
    s.wall[j.method] = seconds_since(t0);
    s.log(fmt::format("{}: J0 {:.3e}, Jrob {:.3e}, {:.1f} s", j.id, fv.j0, fv.jrob, seconds_since(t0)));
  }
  s.write(summary);
  s.write(sweep);
  s.write(curvature);
  if (v.random > 0) {
    s.write(random);
    s.write(realizations);
  }
  if (design.rows() > 0) s.write(design);
  if (v.noise.enabled) s.write(noise);
  return kOk;
}

std::vector<Pulse> load_pulses(const ExperimentConfig& cfg, const fs::path& path, bool allow_mismatch) {
  std::vector<Pulse> out;
  const bool dir = fs::is_directory(path);
  if (!dir && cfg.jobs.size() > 1) {
    throw ConfigError(fmt::format("{} jobs need a directory of pulse files, got {}", cfg.jobs.size(), path.string()));
  }
  for (const Job& j : cfg.jobs) {
    const fs::path file = dir ? path / pulse_name(j) : path;
    PulseFile f = read_pulse(file, j.objective.dt());
    if (f.pulse.segments() != j.objective.segments || f.pulse.channels() != j.objective.model.n_channels()) {
      throw ConfigError(fmt::format("{}: pulse is {}x{}, '{}' expects {} segments and {} channels", file.string(),
                                    f.pulse.segments(), f.pulse.channels(), j.id, j.objective.segments,
                                    j.objective.model.n_channels()));
    }
    const auto it = f.meta.find("job_hash");
    if (!allow_mismatch && (it == f.meta.end() || it->second != j.job_hash)) {
      throw ConfigError(fmt::format("{}: pulse was produced for a different configuration of '{}' (hash {} vs {}); "
                                    "pass --allow-hash-mismatch to verify anyway",
                                    file.string(), j.id, it == f.meta.end() ? "missing" : it->second, j.job_hash));
    }
    out.push_back(std::move(f.pulse));
  }
  return out;
}

// ---- fixtures ----

std::string render_matrix(const CMatrix& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out += fmt::format("{}{:.17g}{:+.17g}i", c ? "  " : "", m(r, c).real(), m(r, c).imag());
    }
    out += "\n";
  }
  return out;
}

int cmd_fixtures(const std::string& action, const std::string& name, std::ostream& out) {
  const auto fixtures = fixture_targets();
  if (action == "list") {
    for (const auto& [k, v] : fixtures) out << k << "\n";
    return kOk;
  }
  if (name.empty()) throw ConfigError("fixtures dump needs a name");
  const auto it = fixtures.find(name);
  if (it == fixtures.end()) throw ConfigError(fmt::format("unknown fixture '{}'", name));
  const TargetSpec& t = it->second;
  if (t.is_unitary()) {
    out << fmt::format("# {} unitary {}x{}\n", name, t.dim(), t.dim()) << render_matrix(t.unitary_target());
    if (name == "two_qubit_random") {
      out << "# as printed, before the nearest-unitary projection\n" << render_matrix(two_qubit_random_raw());
    }
  } else {
    out << fmt::format("# {} initial state {}x{}\n", name, t.dim(), t.dim()) << render_matrix(t.initial_state());
    out << fmt::format("# {} target state {}x{}\n", name, t.dim(), t.dim()) << render_matrix(t.target_state());
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Universally robust quantum control", "urc"};
  app.require_subcommand(1);
  std::optional<std::string> config;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> preset;
  std::string pulse;
  bool allow_mismatch = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Experiment configuration (JSON)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Master seed, overrides the config");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--preset", preset, "Named preset or preset group");
  };
  CLI::App* opt = app.add_subcommand("optimize", "Optimize pulses");
  common(opt);
  CLI::App* scan = app.add_subcommand("scan-mct", "Scan durations for the minimal control time");
  common(scan);
  CLI::App* ver = app.add_subcommand("verify", "Verify the robustness of stored pulses");
  common(ver);
  ver->add_option("--pulse", pulse, "Pulse file, or a directory holding pulse_<method>.csv")->required();
  ver->add_flag("--allow-hash-mismatch", allow_mismatch, "Verify pulses produced under a different configuration");
  CLI::App* fix = app.add_subcommand("fixtures", "List or print target fixtures");
  std::string action;
  std::string name;
  fix->add_option("action", action, "list or dump")->required()->check(CLI::IsMember({"list", "dump"}));
  fix->add_option("name", name, "Fixture name for dump");
  CLI::App* cat = app.add_subcommand("catalog", "Print the preset catalog (Markdown)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (fix->parsed()) return cmd_fixtures(action, name, out);
    if (cat->parsed()) {
      out << generate_preset_catalog();
      return kOk;
    }
    const Overrides ov{preset, seed, threads};
    const std::optional<fs::path> path = config ? std::optional<fs::path>(*config) : std::nullopt;
    if (opt->parsed()) {
      Session s = open_session(load_config(path, ov, Command::optimize), out_dir, "optimize", err);
      return cmd_optimize(s);
    }
    if (scan->parsed()) {
      Session s = open_session(load_config(path, ov, Command::scan_mct), out_dir, "scan-mct", err);
      return cmd_scan(s);
    }
    ExperimentConfig cfg = load_config(path, ov, Command::verify);
    const std::vector<Pulse> pulses = load_pulses(cfg, pulse, allow_mismatch);
    Session s = open_session(std::move(cfg), out_dir, "verify", err);
    return cmd_verify(s, pulses);
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << std::endl;
    return kNumericFailure;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << std::endl;
    return kConfigError;
  } catch (const InputError& e) {
    err << "configuration error: " << e.what() << std::endl;
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << std::endl;
    return kNumericFailure;
  }
}

}  // namespace urc::cli
