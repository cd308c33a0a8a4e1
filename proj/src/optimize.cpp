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

#include "urc/optimize.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "urc/error.hpp"
#include "urc/parallel.hpp"

namespace urc {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using FG = std::function<double(const RVector&, RVector*)>;

struct LinePoint {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;
  RVector g;
};

constexpr double kArmijo = 1e-4;
constexpr double kCurvature = 0.9;

// Strong Wolfe line search (bracketing then zoom with safeguarded quadratic steps).
std::optional<LinePoint> wolfe_search(const FG& fg, const RVector& x, double f0, double slope0,
                                      const RVector& p, double alpha0) {
  auto value = [&](double a) { return fg(x + a * p, nullptr); };
  auto full = [&](double a) {
    LinePoint lp;
    lp.alpha = a;
    lp.g.resize(x.size());
    lp.f = fg(x + a * p, &lp.g);
    lp.slope = lp.g.dot(p);
    return lp;
  };
  auto armijo = [&](double a, double f) { return f <= f0 + kArmijo * a * slope0; };

  std::optional<LinePoint> best_armijo;
  auto zoom = [&](double lo, double f_lo, double slope_lo, double hi, double f_hi) -> std::optional<LinePoint> {
    for (int it = 0; it < 40; ++it) {
      const double width = hi - lo;
      double a = lo + 0.5 * width;
      const double denom = 2.0 * (f_hi - f_lo - slope_lo * width);
      if (denom > 0.0) {
        const double q = lo - slope_lo * width * width / denom;
        const double a_min = std::min(lo, hi) + 0.1 * std::abs(width);
        const double a_max = std::max(lo, hi) - 0.1 * std::abs(width);
        if (std::isfinite(q) && q >= a_min && q <= a_max) a = q;
      }
      if (std::abs(width) < 1e-16 * std::max(1.0, std::abs(lo))) break;
      const double fa = value(a);
      if (!armijo(a, fa) || fa >= f_lo) {
        hi = a;
        f_hi = fa;
        continue;
      }
      LinePoint lp = full(a);
      if (!best_armijo || lp.f < best_armijo->f) best_armijo = lp;
      if (std::abs(lp.slope) <= -kCurvature * slope0) return lp;
      if (lp.slope * (hi - lo) >= 0.0) {
        hi = lo;
        f_hi = f_lo;
      }
      lo = a;
      f_lo = lp.f;
      slope_lo = lp.slope;
    }
    return best_armijo;
  };

  double prev = 0.0;
  double f_prev = f0;
  double slope_prev = slope0;
  double a = alpha0;
  for (int it = 0; it < 60; ++it) {
    const double fa = value(a);
    if (!armijo(a, fa) || (it > 0 && fa >= f_prev)) return zoom(prev, f_prev, slope_prev, a, fa);
    LinePoint lp = full(a);
    best_armijo = lp;
    if (std::abs(lp.slope) <= -kCurvature * slope0) return lp;
    if (lp.slope >= 0.0) return zoom(a, lp.f, lp.slope, prev, f_prev);
    prev = a;
    f_prev = lp.f;
    slope_prev = lp.slope;
    a *= 2.0;
  }
  return best_armijo;
}

FG objective_fg(const Objective& objective, const Pulse& templ, const OptimizeOptions& options) {
  const bool analytic = options.gradient == GradientMode::analytic_when_available && has_analytic_gradient(objective);
  return [&objective, templ, analytic, h = options.fd_step](const RVector& x, RVector* g) {
    const Pulse p = templ.with_parameters(x);
    const double f = evaluate(objective, p).total;
    if (g) {
      *g = analytic ? objective_gradient(objective, p).values
                    : grad_finite_difference(objective, p, h).values;
      if (!g->allFinite()) throw NumericError("non-finite gradient");
    }
    return f;
  };
}

}  // namespace

void OptimizeOptions::validate() const {
  if (max_iterations < 0) throw ConfigError("max_iterations must be non-negative");
  if (!(gradient_tolerance > 0.0) || !(function_tolerance > 0.0)) throw ConfigError("tolerances must be positive");
  if (!(success_threshold > 0.0)) throw ConfigError("success threshold must be positive");
  if (!(fd_step > 0.0)) throw ConfigError("finite-difference step must be positive");
  if (n_starts < 1) throw ConfigError("n_starts must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t start, std::uint64_t grid) {
  return splitmix(splitmix(splitmix(master) ^ start) ^ (grid * 0xd1b54a32d192ed03ULL));
}

Pulse initial_guess(const Objective& objective, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> amplitude(0.0, objective.model.scale());
  const Eigen::Index nc = objective.model.n_channels();
  Pulse::Table t(objective.segments, nc);
  for (Eigen::Index k = 0; k < objective.segments; ++k) {
    for (Eigen::Index c = 0; c < nc; ++c) {
      const bool is_phase = objective.model.channels()[static_cast<std::size_t>(c)].kind == ChannelKind::phase;
      t(k, c) = is_phase ? phase(rng) : amplitude(rng);
    }
  }
  return {t, objective.dt()};
}

MinimizeResult bfgs_minimize(const FG& fg, RVector x0, const OptimizeOptions& options) {
  MinimizeResult out;
  const Eigen::Index n = x0.size();
  RVector x = std::move(x0);
  RVector g(n);
  double f = fg(x, &g);
  if (!std::isfinite(f)) throw NumericError("non-finite functional at the initial point");
  out.trace.push_back({0, f});
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;
  out.stop_reason = "max_iterations";
  int it = 0;
  while (true) {
    if (options.stop_below > 0.0 && f < options.stop_below) {
      out.stop_reason = "below_target";
      break;
    }
    if (g.norm() < options.gradient_tolerance) {
      out.stop_reason = "gradient";
      break;
    }
    if (it >= options.max_iterations) break;
    RVector p = -h * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      h.setIdentity();
      scaled = false;
      p = -g;
      slope = -g.squaredNorm();
    }
    double alpha0 = 1.0;
    if (!scaled) alpha0 = std::min(1.0, 1.0 / std::max(g.norm(), 1e-300));
    auto step = wolfe_search(fg, x, f, slope, p, alpha0);
    if (!step && !scaled) {
      out.stop_reason = "line_search";
      break;
    }
    if (!step) {
      h.setIdentity();
      scaled = false;
      continue;
    }
    ++it;
    const RVector s = step->alpha * p;
    const RVector y = step->g - g;
    const double decrease = f - step->f;
    x += s;
    f = step->f;
    g = step->g;
    out.trace.push_back({it, f});
    if (decrease < options.function_tolerance) {
      out.stop_reason = "function";
      break;
    }
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        h *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const RVector hy = h * y;
      const double yhy = y.dot(hy);
      h += ((1.0 + rho * yhy) * rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
    }
  }
  out.x = std::move(x);
  out.f = f;
  out.iterations = it;
  return out;
}

OptimizationResult optimize_pulse(const Objective& objective, const OptimizeOptions& options,
                                  const std::optional<Pulse>& initial) {
  objective.validate();
  options.validate();
  if (initial && (initial->segments() != objective.segments || initial->channels() != objective.model.n_channels())) {
    throw ConfigError("initial pulse does not match the objective template");
  }
  const auto t0 = std::chrono::steady_clock::now();
  OptimizationResult result;
  result.seed = options.seed;
  const auto n = static_cast<std::size_t>(options.n_starts);
  std::vector<StartResult> starts(n);
  std::vector<char> done(n, 0);
  std::atomic<std::size_t> first_success{n};

  auto run = [&](std::size_t s) {
    if (options.stop_at_first_success && s > first_success.load()) return;
    StartResult& r = starts[s];
    r.seed = derive_seed(options.seed, s, options.grid_index);
    const Pulse start = (s == 0 && initial) ? *initial : initial_guess(objective, r.seed);
    r.pulse = start;
    try {
      const MinimizeResult m = bfgs_minimize(objective_fg(objective, start, options), start.parameters(), options);
      r.pulse = start.with_parameters(m.x);
      r.value = evaluate(objective, r.pulse);
      r.trace = m.trace;
      r.iterations = m.iterations;
      r.stop_reason = m.stop_reason;
    } catch (const NumericError& e) {
      r.finite = false;
      r.stop_reason = fmt::format("discarded: {}", e.what());
      r.value = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 0.0};
    }
    done[s] = 1;
    if (r.finite && r.value.total < options.success_threshold) {
      std::size_t cur = first_success.load();
      while (s < cur && !first_success.compare_exchange_weak(cur, s)) {
      }
    }
  };
  parallel_for(n, options.threads, run);

  // Keep the prefix up to the first success so the outcome does not depend on scheduling.
  std::size_t keep = n;
  if (options.stop_at_first_success && first_success.load() < n) keep = first_success.load() + 1;
  starts.resize(keep);
  std::size_t best = 0;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    if (starts[s].value.total < starts[best].value.total) best = s;
  }
  result.best_start = best;
  result.best = starts[best].pulse;
  result.value = starts[best].value;
  result.success = starts[best].finite && result.value.total < options.success_threshold;
  result.starts = std::move(starts);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

MCTScanResult mct_scan(const Objective& tmpl, const std::vector<double>& grid, const OptimizeOptions& options,
                       const std::function<void(std::size_t, const OptimizationResult&)>& on_point,
                       const std::function<std::optional<OptimizationResult>(std::size_t)>& cached) {
  if (grid.empty()) throw ConfigError("scan grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw ConfigError("scan durations must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError("scan grid must be strictly increasing");
  }
  MCTScanResult out;
  out.grid = grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::optional<OptimizationResult> r = cached ? cached(i) : std::nullopt;
    if (!r) {
      Objective o = tmpl;
      o.duration = grid[i];
      OptimizeOptions opt = options;
      opt.grid_index = i;
      r = optimize_pulse(o, opt);
      if (on_point) on_point(i, *r);
    }
    out.best.push_back(r->value.total);
    out.success.push_back(r->success);
    out.points.push_back(std::move(*r));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!out.success[i]) continue;
    out.t_mct = grid[i];
    double step = 0.0;
    if (i > 0) step = std::max(step, grid[i] - grid[i - 1]);
    if (i + 1 < grid.size()) step = std::max(step, grid[i + 1] - grid[i]);
    out.resolution = step;
    break;
  }
  return out;
}

}  // namespace urc
