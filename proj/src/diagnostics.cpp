#include "mjflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "mjflow/geometry.hpp"

namespace mjflow {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

template <class T>
nlohmann::ordered_json optional_value(const std::optional<T>& v) {
  if (v) return *v;
  return nullptr;
}

}  // namespace

RunReport convergence_report(const ProblemParams& p, const Trajectory& traj,
                             std::optional<double> delta) {
  if (traj.snapshots.empty() || !traj.final) {
    throw InvalidParameters("trajectory has no snapshots");
  }
  const FlowProblem problem(p);
  const DerivedConstants d = classify(p);
  const FlowState& last = traj.final_state();
  const auto& tau = last.grid().tau();

  RunReport r;
  r.regime = d.regime;
  r.lambda = d.lambda;
  r.converged = traj.converged;

  std::optional<LimitProfile> limit;
  if (d.regime != Regime::OutOfTheorem) limit = limit_profile(p);

  const double left = d.lambda.value_or(1.0);
  const double dl = delta.value_or(0.05 * (p.b() - left));
  if (!(dl > 0.0 && dl < 0.25 * (p.b() - left))) {
    throw InvalidParameters("delta must lie in (0, (b - lambda)/4)");
  }

  const std::vector<double> slope = slope_profile(last);
  const std::vector<double> eta = eta_profile(problem, last);
  std::vector<double> window_eta;
  double sup = 0.0;
  double c1 = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const bool inside = tau[i] >= left + dl && tau[i] <= p.b() - dl;
    if (inside) window_eta.push_back(eta[i]);
    if (!limit) continue;
    sup = std::max(sup, std::abs(last.excess()[i] - limit->excess(tau[i])));
    if (inside) c1 = std::max(c1, std::abs(slope[i] - limit->slope(tau[i])));
  }
  r.eta_infinity_estimate = median(window_eta);
  if (limit) {
    r.sup_dist_to_sigma = sup;
    r.c1_dist_on_compact = c1;
    r.eta_target = d.regime == Regime::Stable ? d.c_k : aux_constants(p, left).slope;
  }

  r.energy_monotone = true;
  for (std::size_t j = 1; j < traj.energy_history.size(); ++j) {
    if (traj.energy_history[j].e > traj.energy_history[j - 1].e + kEnergySlack) {
      r.energy_monotone = false;
    }
  }
  r.time_monotone = traj.max_step_increase <= kTimeMonotoneSlack;

  const double trace_cap =
      max_of(trace_profile(problem, traj.snapshots.front())) + p.k() * (p.b() - 1.0) + kTraceSlack;
  r.barrier_ok = true;
  r.trace_bound_ok = true;
  for (const FlowState& s : traj.snapshots) {
    for (std::size_t i = 0; i < tau.size(); ++i) {
      const double floor = limit ? limit->excess(tau[i]) : 0.0;
      if (s.excess()[i] < floor - kBarrierSlack) r.barrier_ok = false;
    }
    if (max_of(trace_profile(problem, s)) > trace_cap) r.trace_bound_ok = false;
  }
  return r;
}

std::string to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["regime"] = std::string(to_string(r.regime));
  j["lambda"] = optional_value(r.lambda);
  j["sup_dist_to_sigma"] = optional_value(r.sup_dist_to_sigma);
  j["c1_dist_on_compact"] = optional_value(r.c1_dist_on_compact);
  j["eta_infinity_estimate"] = r.eta_infinity_estimate;
  j["eta_target"] = optional_value(r.eta_target);
  j["energy_monotone"] = r.energy_monotone;
  j["time_monotone"] = r.time_monotone;
  j["barrier_ok"] = r.barrier_ok;
  j["trace_bound_ok"] = r.trace_bound_ok;
  j["converged"] = r.converged;
  return j.dump(2);
}

ComparisonResult comparison_check(const FlowProblem& problem, const FlowConfig& config,
                                  const FlowState& init1, const FlowState& init2, double t_end) {
  if (!(init1.grid() == init2.grid())) throw InvalidParameters("initial data use different grids");
  if (init1.t() != init2.t()) throw InvalidParameters("initial data start at different times");
  FlowConfig cfg = config;
  cfg.tol = 0.0;
  cfg.t_max = t_end;
  const Trajectory t1 = run(problem, cfg, init1);
  const Trajectory t2 = run(problem, cfg, init2);

  ComparisonResult out;
  const std::size_t count = std::min(t1.snapshots.size(), t2.snapshots.size());
  out.non_increasing = t1.snapshots.size() == t2.snapshots.size();
  for (std::size_t j = 0; j < count; ++j) {
    const auto& u1 = t1.snapshots[j].excess();
    const auto& u2 = t2.snapshots[j].excess();
    double gap = 0.0;
    for (std::size_t i = 0; i < u1.size(); ++i) gap = std::max(gap, std::abs(u1[i] - u2[i]));
    if (!out.history.empty() && gap > out.history.back().gap + kGapSlack) {
      out.non_increasing = false;
    }
    out.history.push_back({t1.snapshots[j].t(), gap});
  }
  out.terminal_gap = out.history.empty() ? 0.0 : out.history.back().gap;
  return out;
}

ScalingResult scaling_check(int n, double a, double a0, double b, double b0, double k,
                            const FlowConfig& config, int cells, InitKind init, double t_end,
                            double tolerance) {
  const ScaledProblem scaled = scale_parameters(n, a, a0, b, b0, k);
  const FlowProblem base = FlowProblem::from_classes(n, a, a0, b, b0, k);
  const FlowProblem unit(scaled.params);
  const double tf = scaled.time_factor;

  FlowConfig base_cfg;
  base_cfg.cfl = config.cfl;
  base_cfg.execution = config.execution;
  base_cfg.snapshot_interval = config.snapshot_interval;
  base_cfg.tol = 0.0;
  base_cfg.t_max = t_end;
  FlowConfig unit_cfg = base_cfg;
  unit_cfg.t_max = t_end * tf;
  unit_cfg.snapshot_interval = config.snapshot_interval * tf;

  const Trajectory tb = run(base, base_cfg, initial_profile(base, make_grid(base, cells), init));
  const Trajectory tu = run(unit, unit_cfg, initial_profile(unit, make_grid(unit, cells), init));

  ScalingResult out;
  out.compared = std::min(tb.snapshots.size(), tu.snapshots.size());
  for (std::size_t j = 0; j < out.compared; ++j) {
    const FlowState& sb = tb.snapshots[j];
    const FlowState& su = tu.snapshots[j];
    out.max_time_mismatch = std::max(out.max_time_mismatch, std::abs(su.t() - tf * sb.t()));
    for (std::size_t i = 0; i < sb.size(); ++i) {
      const double diff = std::abs(sb.excess()[i] - a0 * su.excess()[i]);
      out.max_difference = std::max(out.max_difference, diff);
    }
  }
  out.ok = tb.snapshots.size() == tu.snapshots.size() && out.max_difference <= tolerance &&
           out.max_time_mismatch <= tolerance * std::max(1.0, tf * t_end);
  return out;
}

}  // namespace mjflow
