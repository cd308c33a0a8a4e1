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

#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "cli/io.hpp"
#include "urc/error.hpp"

namespace urc::cli {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Forward iterator over the source text that counts the newlines it passes.
struct LineCountingIterator {
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  std::size_t* line = nullptr;

  reference operator*() const { return *p; }
  LineCountingIterator& operator++() {
    if (*p == '\n') ++*line;
    ++p;
    return *this;
  }
  LineCountingIterator operator++(int) {
    auto old = *this;
    ++*this;
    return old;
  }
  bool operator==(const LineCountingIterator& o) const { return p == o.p; }
};

// Records the line at which every value starts.
class LineRecorder : public nlohmann::json_sax<json> {
 public:
  LineRecorder(const std::size_t& line, LineMap& lines) : line_(line), lines_(lines) {}

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }
  bool start_object(std::size_t) override { return open(false); }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override { return open(true); }
  bool end_array() override { return close(); }
  bool key(string_t& k) override {
    frames_.back().key = k;
    lines_[frames_.back().path + "/" + k] = line_;
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }

 private:
  struct Frame {
    bool array = false;
    std::size_t index = 0;
    std::string key;
    std::string path;
  };

  std::string child() {
    if (frames_.empty()) return "";
    Frame& f = frames_.back();
    if (f.array) return f.path + "/" + std::to_string(f.index++);
    return f.path + "/" + f.key;
  }
  bool value() {
    const std::string path = child();
    lines_.try_emplace(path, line_);
    return true;
  }
  bool open(bool array) {
    const std::string path = child();
    lines_.try_emplace(path, line_);
    frames_.push_back({array, 0, "", path});
    return true;
  }
  bool close() {
    frames_.pop_back();
    return true;
  }

  const std::size_t& line_;
  LineMap& lines_;
  std::vector<Frame> frames_;
};

class Reader {
 public:
  Reader(const LineMap& lines, std::string source) : lines_(lines), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    throw ConfigError(fmt::format("{}:{}: {}", source_, line_of(path), message));
  }

  std::size_t line_of(std::string path) const {
    while (true) {
      if (auto it = lines_.find(path); it != lines_.end()) return it->second;
      if (path.empty()) return 1;
      path = path.substr(0, path.rfind('/'));
    }
  }

  void keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(path, fmt::format("'{}' must be an object", name(path)));
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.contains(k)) {
        fail(path + "/" + k, path.empty() ? fmt::format("unknown key '{}'", k)
                                          : fmt::format("unknown key '{}' in '{}'", k, name(path)));
      }
    }
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, fmt::format("'{}' must be a number", name(path)));
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, fmt::format("'{}' must be finite", name(path)));
    return x;
  }
  double positive(const json& v, const std::string& path) const {
    const double x = number(v, path);
    if (!(x > 0.0)) fail(path, fmt::format("'{}' must be positive", name(path)));
    return x;
  }
  std::int64_t integer(const json& v, const std::string& path, std::int64_t min) const {
    if (!v.is_number_integer()) fail(path, fmt::format("'{}' must be an integer", name(path)));
    const auto x = v.get<std::int64_t>();
    if (x < min) fail(path, fmt::format("'{}' must be at least {}", name(path), min));
    return x;
  }
  std::uint64_t unsigned_integer(const json& v, const std::string& path) const {
    if (!v.is_number_unsigned()) fail(path, fmt::format("'{}' must be a non-negative integer", name(path)));
    return v.get<std::uint64_t>();
  }
  bool boolean(const json& v, const std::string& path) const {
    if (!v.is_boolean()) fail(path, fmt::format("'{}' must be true or false", name(path)));
    return v.get<bool>();
  }
  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, fmt::format("'{}' must be a string", name(path)));
    return v.get<std::string>();
  }
  std::string choice(const json& v, const std::string& path, const std::set<std::string>& options) const {
    const std::string s = string(v, path);
    if (!options.contains(s)) {
      std::string list;
      for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
      fail(path, fmt::format("'{}' must be one of {}", name(path), list));
    }
    return s;
  }
  const json& array(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, fmt::format("'{}' must be an array", name(path)));
    return v;
  }
  std::vector<double> numbers(const json& v, const std::string& path) const {
    std::vector<double> out;
    std::size_t i = 0;
    for (const json& x : array(v, path)) out.push_back(number(x, path + "/" + std::to_string(i++)));
    return out;
  }
  std::vector<std::string> strings(const json& v, const std::string& path) const {
    std::vector<std::string> out;
    std::size_t i = 0;
    for (const json& x : array(v, path)) out.push_back(string(x, path + "/" + std::to_string(i++)));
    return out;
  }
  Complex complex(const json& v, const std::string& path) const {
    if (v.is_number()) return {number(v, path), 0.0};
    if (v.is_array() && v.size() == 2) return {number(v[0], path + "/0"), number(v[1], path + "/1")};
    fail(path, "complex entries are numbers or [re, im] pairs");
  }
  CMatrix matrix(const json& v, const std::string& path) const {
    const json& rows = array(v, path);
    if (rows.empty()) fail(path, "matrix has no rows");
    const auto n = static_cast<Eigen::Index>(rows.size());
    CMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const std::string rp = path + "/" + std::to_string(r);
      const json& row = array(rows[static_cast<std::size_t>(r)], rp);
      if (static_cast<Eigen::Index>(row.size()) != n) fail(rp, "matrix must be square");
      for (Eigen::Index c = 0; c < n; ++c) m(r, c) = complex(row[static_cast<std::size_t>(c)], rp + "/" + std::to_string(c));
    }
    return m;
  }
  CVector ket(const json& v, const std::string& path) const {
    const json& entries = array(v, path);
    if (entries.empty()) fail(path, "state has no entries");
    CVector k(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) k(static_cast<Eigen::Index>(i)) = complex(entries[i], path + "/" + std::to_string(i));
    return k;
  }

  static std::string name(const std::string& path) {
    if (path.empty()) return "config";
    return path.substr(1);
  }

 private:
  const LineMap& lines_;
  std::string source_;
};

std::vector<double> default_lambdas() {
  std::vector<double> out;
  for (int i = -10; i <= 10; ++i) out.push_back(i / 100.0);
  return out;
}

std::vector<Probe> probes_by_name(const Reader& rd, const std::vector<std::string>& names, const std::string& path,
                                  Eigen::Index dim) {
  const auto known = named_probes(dim);
  std::vector<Probe> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto it = known.find(names[i]);
    if (it == known.end()) {
      std::string list;
      for (const auto& [k, v] : known) list += (list.empty() ? "" : ", ") + k;
      rd.fail(path + "/" + std::to_string(i), fmt::format("unknown probe '{}' (known: {})", names[i], list));
    }
    out.push_back({it->first, it->second});
  }
  return out;
}

OperatorBasis basis_by_name(const Reader& rd, const std::string& name, const std::string& path, Eigen::Index dim) {
  if (name == "pauli") {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) ++n;
    if ((Eigen::Index{1} << n) != dim) rd.fail(path, fmt::format("pauli basis needs a power-of-two dimension, got {}", dim));
    return pauli_basis(n);
  }
  return symmetric_subspace_basis(static_cast<int>(dim - 1));
}

Job custom_job(const Reader& rd, const json& e) {
  const std::string p = "/experiment";
  rd.keys(e, p, {"name", "model", "target", "robustness", "probes"});
  const std::string method = e.contains("name") ? rd.string(e["name"], p + "/name") : "custom";

  if (!e.contains("model")) rd.fail(p, "experiment needs a 'model'");
  const json& m = e["model"];
  rd.keys(m, p + "/model", {"family", "rate", "qubits", "clamp"});
  if (!m.contains("family")) rd.fail(p + "/model", "model needs a 'family'");
  const std::string family = rd.choice(m["family"], p + "/model/family", {"single_qubit", "collective_spin"});
  const double rate = m.contains("rate") ? rd.positive(m["rate"], p + "/model/rate") : 1.0;
  const double time_unit = kTwoPi / rate;
  std::optional<double> clamp;
  if (m.contains("clamp")) clamp = rd.positive(m["clamp"], p + "/model/clamp");
  std::optional<ControlModel> model;
  if (family == "single_qubit") {
    if (m.contains("qubits")) rd.fail(p + "/model/qubits", "'qubits' applies to collective_spin only");
    if (clamp) rd.fail(p + "/model/clamp", "'clamp' applies to amplitude controls only");
    model = single_qubit_rabi_model(rate);
  } else {
    const auto n = m.contains("qubits") ? rd.integer(m["qubits"], p + "/model/qubits", 1) : 2;
    if (n > 12) rd.fail(p + "/model/qubits", "at most 12 qubits");
    model = collective_spin_model(rate, static_cast<int>(n), clamp);
  }
  const Eigen::Index d = model->dim();

  if (!e.contains("target")) rd.fail(p, "experiment needs a 'target'");
  const json& t = e["target"];
  const std::string tp = p + "/target";
  rd.keys(t, tp, {"fixture", "unitary", "initial", "final"});
  std::optional<TargetSpec> target;
  try {
    if (t.contains("fixture")) {
      if (t.size() != 1) rd.fail(tp, "'fixture' excludes the other target keys");
      const auto fixtures = fixture_targets();
      const std::string name = rd.string(t["fixture"], tp + "/fixture");
      auto it = fixtures.find(name);
      if (it == fixtures.end()) rd.fail(tp + "/fixture", fmt::format("unknown fixture '{}'", name));
      target = it->second;
    } else if (t.contains("unitary")) {
      if (t.size() != 1) rd.fail(tp, "'unitary' excludes the other target keys");
      target = TargetSpec::unitary(rd.matrix(t["unitary"], tp + "/unitary"));
    } else {
      if (!t.contains("initial") || !t.contains("final")) rd.fail(tp, "state targets need 'initial' and 'final'");
      target = TargetSpec::state(rd.ket(t["initial"], tp + "/initial"), rd.ket(t["final"], tp + "/final"));
    }
  } catch (const InputError& err) {
    rd.fail(tp, err.what());
  } catch (const InvariantError& err) {
    rd.fail(tp, err.what());
  }
  if (target->dim() != d) rd.fail(tp, fmt::format("target dimension {} does not match model dimension {}", target->dim(), d));

  Robustness robustness = NoRobustness{};
  if (e.contains("robustness")) {
    const json& r = e["robustness"];
    const std::string rp = p + "/robustness";
    rd.keys(r, rp, {"kind", "perturbation", "basis", "excluded"});
    if (!r.contains("kind")) rd.fail(rp, "robustness needs a 'kind'");
    const std::string kind = rd.choice(r["kind"], rp + "/kind", {"none", "known", "universal"});
    if (kind == "known") {
      if (!r.contains("perturbation")) rd.fail(rp, "known robustness needs a 'perturbation'");
      if (r.contains("basis") || r.contains("excluded")) rd.fail(rp, "'basis' and 'excluded' apply to universal robustness");
      CMatrix v;
      if (r["perturbation"].is_string()) {
        v = probes_by_name(rd, {r["perturbation"].get<std::string>()}, rp + "/perturbation", d).front().op;
      } else {
        v = rd.matrix(r["perturbation"], rp + "/perturbation");
        if (v.rows() != d) rd.fail(rp + "/perturbation", "perturbation dimension does not match the model");
        if (!is_hermitian(v)) rd.fail(rp + "/perturbation", "perturbation must be Hermitian");
      }
      robustness = KnownV{v};
    } else if (kind == "universal") {
      if (r.contains("perturbation")) rd.fail(rp + "/perturbation", "'perturbation' applies to known robustness");
      const std::string bname = r.contains("basis") ? rd.choice(r["basis"], rp + "/basis", {"pauli", "symmetric"})
                                                    : (d == 2 ? "pauli" : "symmetric");
      Universal u{basis_by_name(rd, bname, rp + "/basis", d), {0}};
      if (r.contains("excluded")) {
        u.excluded.clear();
        std::size_t i = 0;
        for (const json& x : rd.array(r["excluded"], rp + "/excluded")) {
          u.excluded.insert(static_cast<int>(rd.integer(x, rp + "/excluded/" + std::to_string(i++), 0)));
        }
      }
      robustness = std::move(u);
    } else if (r.size() > 1) {
      rd.fail(rp, "robustness 'none' takes no other keys");
    }
  }
  std::vector<std::string> names;
  if (e.contains("probes")) {
    names = rd.strings(e["probes"], p + "/probes");
  } else {
    for (const auto& [k, v] : named_probes(d)) names.push_back(k);
  }
  return Job{method,
             method,
             Objective{*model, *target, std::move(robustness), 1.0, 40, time_unit},
             rate,
             time_unit,
             probes_by_name(rd, names, p + "/probes", d),
             {},
             {}};
}

}  // namespace

Correlation Job::correlation(const NoiseSpec& noise) const {
  if (noise.white) return Correlation::white(noise.strength * time_unit);
  return Correlation::exponential(noise.tau * time_unit, noise.strength);
}

std::map<std::string, CMatrix> named_probes(Eigen::Index dim) {
  std::map<std::string, CMatrix> out;
  if (dim == 2) {
    out.emplace("sx", pauli::x());
    out.emplace("sy", pauli::y());
    out.emplace("sz", pauli::z());
    return out;
  }
  const SpinOperators s = spin_operators(static_cast<int>(dim - 1));
  out.emplace("Sx", s.x);
  out.emplace("Sy", s.y);
  out.emplace("Sz", s.z);
  out.emplace("Sx2", s.x * s.x);
  out.emplace("Sy2", s.y * s.y);
  out.emplace("Sz2", s.z * s.z);
  return out;
}

json parse_with_lines(const std::string& text, const std::string& source, LineMap& lines) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    if (auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
    const std::size_t end = std::min(e.byte > 0 ? e.byte - 1 : 0, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n');
    throw ConfigError(fmt::format("{}:{}: {}", source, line, what));
  }
  std::size_t line = 1;
  LineRecorder recorder(line, lines);
  LineCountingIterator first{text.data(), &line};
  LineCountingIterator last{text.data() + text.size(), &line};
  json::sax_parse(first, last, &recorder);
  return doc;
}

ExperimentConfig resolve_config(json doc, const LineMap& lines, const std::string& source,
                                const Overrides& overrides, Command command) {
  const Reader rd(lines, source);
  rd.keys(doc, "", {"preset", "methods", "experiment", "pulse", "weight", "optimizer", "verify", "output"});
  if (overrides.preset) {
    if (doc.contains("experiment")) rd.fail("/experiment", "--preset conflicts with an inline experiment");
    doc["preset"] = *overrides.preset;
  }
  if (doc.contains("preset") == doc.contains("experiment")) {
    rd.fail("", "config needs exactly one of 'preset' or 'experiment'");
  }

  ExperimentConfig cfg;
  json resolved = json::object();

  // Jobs.
  if (doc.contains("preset")) {
    const std::string name = rd.string(doc["preset"], "/preset");
    std::vector<Preset> chosen;
    for (const Preset& p : preset_registry()) {
      if (p.name == name || p.group == name) chosen.push_back(p);
    }
    if (chosen.empty()) rd.fail("/preset", fmt::format("unknown preset or group '{}'", name));
    if (doc.contains("methods")) {
      const auto methods = rd.strings(doc["methods"], "/methods");
      std::vector<Preset> subset;
      for (std::size_t i = 0; i < methods.size(); ++i) {
        auto it = std::find_if(chosen.begin(), chosen.end(), [&](const Preset& p) { return p.method == methods[i]; });
        if (it == chosen.end()) rd.fail("/methods/" + std::to_string(i), fmt::format("'{}' is not a method of '{}'", methods[i], name));
        subset.push_back(*it);
      }
      chosen = std::move(subset);
    }
    resolved["preset"] = name;
    resolved["methods"] = json::array();
    for (const Preset& p : chosen) {
      resolved["methods"].push_back(p.method);
      cfg.jobs.push_back(Job{p.name, p.method, p.objective, kTwoPi / p.time_unit, p.time_unit, p.probes, p.scan_grid, {}});
    }
  } else {
    if (doc.contains("methods")) rd.fail("/methods", "'methods' selects from a preset group");
    cfg.jobs.push_back(custom_job(rd, doc["experiment"]));
    resolved["experiment"] = doc["experiment"];
  }

  // Pulse template overrides, in dimensionless time.
  json pulse = json::object();
  if (doc.contains("pulse")) {
    const json& p = doc["pulse"];
    rd.keys(p, "/pulse", {"segments", "duration", "scan"});
    if (p.contains("segments")) {
      const auto n = rd.integer(p["segments"], "/pulse/segments", 1);
      for (Job& j : cfg.jobs) j.objective.segments = n;
      pulse["segments"] = n;
    }
    if (p.contains("duration")) {
      const double t = rd.positive(p["duration"], "/pulse/duration");
      for (Job& j : cfg.jobs) j.objective.duration = t * j.time_unit;
      pulse["duration"] = t;
    }
    if (p.contains("scan")) {
      std::vector<double> grid;
      const json& s = p["scan"];
      if (s.is_object()) {
        rd.keys(s, "/pulse/scan", {"start", "stop", "step"});
        for (const char* k : {"start", "stop", "step"}) {
          if (!s.contains(k)) rd.fail("/pulse/scan", fmt::format("scan range needs '{}'", k));
        }
        const double a = rd.positive(s["start"], "/pulse/scan/start");
        const double b = rd.positive(s["stop"], "/pulse/scan/stop");
        const double h = rd.positive(s["step"], "/pulse/scan/step");
        if (b < a) rd.fail("/pulse/scan/stop", "'stop' is below 'start'");
        const auto n = static_cast<long>(std::floor((b - a) / h + 1e-9));
        if (n > 10000) rd.fail("/pulse/scan", "scan grid has more than 10001 points");
        for (long i = 0; i <= n; ++i) grid.push_back(a + static_cast<double>(i) * h);
      } else {
        grid = rd.numbers(s, "/pulse/scan");
        if (grid.empty()) rd.fail("/pulse/scan", "scan grid is empty");
        for (std::size_t i = 0; i < grid.size(); ++i) {
          if (!(grid[i] > 0.0)) rd.fail("/pulse/scan/" + std::to_string(i), "scan durations must be positive");
          if (i > 0 && !(grid[i] > grid[i - 1])) rd.fail("/pulse/scan/" + std::to_string(i), "scan grid must be strictly increasing");
        }
      }
      for (Job& j : cfg.jobs) j.scan_grid = grid;
      pulse["scan"] = grid;
    }
  }
  if (!pulse.empty()) resolved["pulse"] = pulse;
  if (doc.contains("weight")) {
    const double w = rd.number(doc["weight"], "/weight");
    if (w < 0.0) rd.fail("/weight", "'weight' must be non-negative");
    for (Job& j : cfg.jobs) j.objective.weight = w;
    resolved["weight"] = w;
  }
  for (const Job& j : cfg.jobs) {
    try {
      j.objective.validate();
    } catch (const ConfigError& e) {
      rd.fail(doc.contains("experiment") ? "/experiment" : "/preset", e.what());
    }
  }
  if (command == Command::scan_mct) {
    for (const Job& j : cfg.jobs) {
      if (j.scan_grid.empty()) rd.fail("/pulse", fmt::format("'{}' has no scan grid; set pulse.scan", j.id));
    }
  }

  // Optimizer.
  OptimizeOptions& o = cfg.options;
  o.stop_at_first_success = command == Command::scan_mct;
  std::string gradient = "auto";
  if (doc.contains("optimizer")) {
    const json& op = doc["optimizer"];
    const std::string p = "/optimizer";
    rd.keys(op, p, {"seed", "starts", "threshold", "max_iterations", "gradient", "fd_step", "gradient_tolerance",
                    "function_tolerance", "stop_at_first_success", "initial_guess"});
    if (op.contains("seed")) o.seed = rd.unsigned_integer(op["seed"], p + "/seed");
    if (op.contains("starts")) o.n_starts = static_cast<int>(rd.integer(op["starts"], p + "/starts", 1));
    if (op.contains("threshold")) o.success_threshold = rd.positive(op["threshold"], p + "/threshold");
    if (op.contains("max_iterations")) o.max_iterations = static_cast<int>(rd.integer(op["max_iterations"], p + "/max_iterations", 0));
    if (op.contains("gradient")) gradient = rd.choice(op["gradient"], p + "/gradient", {"auto", "fd"});
    if (op.contains("fd_step")) o.fd_step = rd.positive(op["fd_step"], p + "/fd_step");
    if (op.contains("gradient_tolerance")) o.gradient_tolerance = rd.positive(op["gradient_tolerance"], p + "/gradient_tolerance");
    if (op.contains("function_tolerance")) o.function_tolerance = rd.positive(op["function_tolerance"], p + "/function_tolerance");
    if (op.contains("stop_at_first_success")) o.stop_at_first_success = rd.boolean(op["stop_at_first_success"], p + "/stop_at_first_success");
    if (op.contains("initial_guess")) rd.choice(op["initial_guess"], p + "/initial_guess", {"scaled_random"});
  }
  if (overrides.seed) o.seed = *overrides.seed;
  if (overrides.threads) o.threads = *overrides.threads;
  if (o.threads < 1) throw ConfigError("--threads must be at least 1");
  o.gradient = gradient == "fd" ? GradientMode::finite_difference : GradientMode::analytic_when_available;
  resolved["optimizer"] = {{"seed", o.seed},
                           {"starts", o.n_starts},
                           {"threshold", o.success_threshold},
                           {"max_iterations", o.max_iterations},
                           {"gradient", gradient},
                           {"fd_step", o.fd_step},
                           {"gradient_tolerance", o.gradient_tolerance},
                           {"function_tolerance", o.function_tolerance},
                           {"stop_at_first_success", o.stop_at_first_success},
                           {"initial_guess", "scaled_random"}};

  // Verification.
  VerifySpec& v = cfg.verify;
  v.lambdas = default_lambdas();
  v.seed = o.seed;
  bool seed_given = false;
  if (doc.contains("verify")) {
    const json& vj = doc["verify"];
    const std::string p = "/verify";
    rd.keys(vj, p, {"lambdas", "fit_window", "fit_points", "random", "probes", "one_design_samples", "seed", "noise"});
    if (vj.contains("lambdas")) {
      v.lambdas = rd.numbers(vj["lambdas"], p + "/lambdas");
      if (std::find(v.lambdas.begin(), v.lambdas.end(), 0.0) == v.lambdas.end()) {
        rd.fail(p + "/lambdas", "lambda grid must contain 0");
      }
    }
    if (vj.contains("fit_window")) v.fit_window = rd.positive(vj["fit_window"], p + "/fit_window");
    if (vj.contains("fit_points")) {
      v.fit_points = static_cast<int>(rd.integer(vj["fit_points"], p + "/fit_points", 5));
      if (v.fit_points % 2 == 0) rd.fail(p + "/fit_points", "'fit_points' must be odd so the grid holds 0");
    }
    if (vj.contains("random")) v.random = static_cast<std::size_t>(rd.integer(vj["random"], p + "/random", 0));
    if (vj.contains("probes")) {
      v.probes = rd.strings(vj["probes"], p + "/probes");
      for (const Job& j : cfg.jobs) probes_by_name(rd, v.probes, p + "/probes", j.objective.model.dim());
    }
    if (vj.contains("one_design_samples")) {
      v.one_design_samples = static_cast<std::size_t>(rd.integer(vj["one_design_samples"], p + "/one_design_samples", 1));
    }
    if (vj.contains("seed")) {
      v.seed = rd.unsigned_integer(vj["seed"], p + "/seed");
      seed_given = true;
    }
    if (vj.contains("noise")) {
      NoiseSpec& n = v.noise;
      const json& nj = vj["noise"];
      const std::string np = p + "/noise";
      rd.keys(nj, np, {"correlation", "tau", "strength", "lambda", "trajectories", "substeps", "probes", "state"});
      n.enabled = true;
      if (!nj.contains("correlation")) rd.fail(np, "noise needs a 'correlation'");
      n.white = rd.choice(nj["correlation"], np + "/correlation", {"white", "exponential"}) == "white";
      if (nj.contains("tau")) {
        if (n.white) rd.fail(np + "/tau", "'tau' applies to exponential correlation only");
        n.tau = rd.positive(nj["tau"], np + "/tau");
      }
      if (nj.contains("strength")) n.strength = rd.positive(nj["strength"], np + "/strength");
      if (nj.contains("lambda")) n.lambda = rd.number(nj["lambda"], np + "/lambda");
      if (nj.contains("trajectories")) n.trajectories = static_cast<std::size_t>(rd.integer(nj["trajectories"], np + "/trajectories", 100));
      if (nj.contains("substeps")) n.substeps = static_cast<int>(rd.integer(nj["substeps"], np + "/substeps", 1));
      if (nj.contains("probes")) {
        n.probes = rd.strings(nj["probes"], np + "/probes");
        for (const Job& j : cfg.jobs) probes_by_name(rd, n.probes, np + "/probes", j.objective.model.dim());
      }
      if (nj.contains("state")) {
        n.state = rd.integer(nj["state"], np + "/state", 0);
        for (const Job& j : cfg.jobs) {
          if (n.state >= j.objective.model.dim()) rd.fail(np + "/state", "basis state index exceeds the model dimension");
        }
      }
    }
  }
  if (overrides.seed && !seed_given) v.seed = *overrides.seed;
  resolved["verify"] = {{"lambdas", v.lambdas},           {"fit_window", v.fit_window},
                        {"fit_points", v.fit_points},     {"random", v.random},
                        {"one_design_samples", v.one_design_samples}, {"seed", v.seed}};
  if (!v.probes.empty()) resolved["verify"]["probes"] = v.probes;
  if (v.noise.enabled) {
    json n = {{"correlation", v.noise.white ? "white" : "exponential"},
              {"strength", v.noise.strength},
              {"lambda", v.noise.lambda},
              {"trajectories", v.noise.trajectories},
              {"substeps", v.noise.substeps},
              {"state", v.noise.state}};
    if (!v.noise.white) n["tau"] = v.noise.tau;
    if (!v.noise.probes.empty()) n["probes"] = v.noise.probes;
    resolved["verify"]["noise"] = n;
  }

  if (doc.contains("output")) cfg.output = rd.string(doc["output"], "/output");

  cfg.hash = fnv1a_hex(resolved.dump());
  if (cfg.output) resolved["output"] = *cfg.output;
  cfg.resolved = resolved;

  for (Job& j : cfg.jobs) {
    json id = {{"id", j.id},
               {"segments", j.objective.segments},
               {"duration", format_double(j.dimensionless(j.objective.duration))},
               {"weight", j.objective.weight}};
    if (doc.contains("experiment")) id["experiment"] = doc["experiment"];
    j.job_hash = fnv1a_hex(id.dump());
  }
  return cfg;
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path, const Overrides& overrides,
                             Command command) {
  LineMap lines;
  if (!path) {
    if (!overrides.preset) throw ConfigError("give --config or --preset");
    return resolve_config(json::object(), lines, "<preset>", overrides, command);
  }
  std::ifstream in(*path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path->string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  json doc = parse_with_lines(text, path->string(), lines);
  return resolve_config(std::move(doc), lines, path->string(), overrides, command);
}

}  // namespace urc::cli
