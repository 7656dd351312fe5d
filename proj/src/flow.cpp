#include "mjflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mjflow/closed_form.hpp"
#include "mjflow/kernels.hpp"

namespace mjflow {

namespace {

constexpr double kRangeSlack = 1e-12;
constexpr double kSlopeSlack = 1e-8;

std::string at_node(const char* what, std::size_t i, double t) {
  std::ostringstream os;
  os << what << " at node " << i << ", t=" << t;
  return os.str();
}

// Owns the stencil and work buffers of one integration.
class Integrator {
 public:
  Integrator(const FlowProblem& problem, const FlowConfig& config, const Grid& grid)
      : problem_(problem),
        config_(config),
        q_(config.mobility(problem)),
        stencil_(build_stencil(problem, grid)),
        rate_(grid.size()),
        stage_(grid.size()),
        stage_rate_(grid.size()),
        next_(grid.size()) {}

  const std::vector<double>& rate() const { return rate_; }

  kernels::RateStats evaluate(std::span<const double> u) { return evaluate(u, rate_); }

  double dt_for(const kernels::RateStats& stats) const {
    const double h = stencil_.spacing;
    const double denom = 2.0 * stats.max_mobility + h * stats.max_drift;
    if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
    return config_.cfl * h * h / denom;
  }

  // Advances state by dt; rate() must hold the rate at the current state.
  void heun(FlowState& state, double dt) {
    const auto& u = state.excess();
    if (config_.execution == Execution::Parallel) {
      kernels::euler_stage_parallel(u, rate_, dt, stage_);
    } else {
      kernels::euler_stage_serial(u, rate_, dt, stage_);
    }
    evaluate(stage_, stage_rate_);
    if (config_.execution == Execution::Parallel) {
      kernels::heun_combine_parallel(u, stage_, stage_rate_, dt, next_);
    } else {
      kernels::heun_combine_serial(u, stage_, stage_rate_, dt, next_);
    }
  }

  // Checks next_ and swaps it into state. Returns max(u_new - u_old).
  double commit(FlowState& state, double dt, bool* slope_violation) {
    const double span = problem_.psi_span();
    const double h = stencil_.spacing;
    const auto& u = state.excess();
    double increase = -std::numeric_limits<double>::infinity();
    bool bad_slope = false;
    for (std::size_t i = 0; i < next_.size(); ++i) {
      const double v = next_[i];
      if (!std::isfinite(v)) throw FlowFailure(at_node("non-finite value", i, state.t()), state);
      if (v < -kRangeSlack * span || v > span * (1.0 + kRangeSlack)) {
        throw FlowFailure(at_node("range violation", i, state.t()), state);
      }
      increase = std::max(increase, v - u[i]);
      if (i > 0 && v - next_[i - 1] < -kSlopeSlack * h) bad_slope = true;
    }
    std::swap(state.mutable_excess(), next_);
    state.advance(dt);
    if (slope_violation) *slope_violation = bad_slope;
    return increase;
  }

 private:
  kernels::RateStats evaluate(std::span<const double> u, std::span<double> out) {
    if (config_.execution == Execution::Parallel) {
      return kernels::flow_rate_parallel(stencil_, q_, u, out);
    }
    return kernels::flow_rate_serial(stencil_, q_, u, out);
  }

  const FlowProblem& problem_;
  const FlowConfig& config_;
  QProfile q_;
  Stencil stencil_;
  std::vector<double> rate_;
  std::vector<double> stage_;
  std::vector<double> stage_rate_;
  std::vector<double> next_;
};

void check_state(const FlowProblem& problem, const FlowState& state) {
  if (state.grid().lo() != problem.tau_lo || state.grid().hi() != problem.tau_hi) {
    throw InvalidParameters("state grid does not span the problem interval");
  }
}

// Normalized-problem value psi1(tau1) - 1 for the Lemma 3.1 profile.
double concave_excess(int n, double b, double a, double tau) {
  return (a - 1.0) * (std::pow(tau, -n) - 1.0) / (std::pow(b, -n) - 1.0);
}

double bump(int n, double b, double tau, double scale) {
  return (tau - 1.0) * (b - tau) / (scale * std::pow(tau, n));
}

double bump_slope(int n, double b, double tau, double scale) {
  const double num = (b + 1.0 - 2.0 * tau) * tau - n * (tau - 1.0) * (b - tau);
  return num / (scale * std::pow(tau, n + 1));
}

double tilde_excess(const ClosedFormProfile& tilde, double tau) {
  return tilde.quad_coef() * tau * tau + tilde.lin_coef() * tau +
         tilde.inv_coef() * std::pow(tau, 1 - tilde.params().n()) - 1.0;
}

std::vector<double> supercritical_excess(const FlowProblem& problem, const Grid& grid,
                                         double scale) {
  const ProblemParams p = problem.normalized();
  const ClosedFormProfile tilde = psi_stable(p);
  std::vector<double> u(grid.size());
  const auto& tau = grid.tau();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t1 = tau[i] / problem.tau_lo;
    u[i] = problem.psi_lo * (tilde_excess(tilde, t1) + bump(p.n(), p.b(), t1, scale));
  }
  u.front() = 0.0;
  u.back() = problem.psi_span();
  return u;
}

}  // namespace

FlowState::FlowState(const FlowProblem& problem, Grid grid, std::vector<double> excess, double t,
                     long step_count)
    : grid_(std::move(grid)),
      excess_(std::move(excess)),
      t_(t),
      step_count_(step_count),
      psi_lo_(problem.psi_lo) {
  if (excess_.size() != grid_.size()) throw InvalidParameters("state does not match the grid");
}

std::vector<double> FlowState::psi_values() const {
  std::vector<double> out(excess_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = psi(i);
  return out;
}

void FlowConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw InvalidParameters("cfl must lie in (0, 1]");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw InvalidParameters("t_max must be >= 0");
  if (!(tol >= 0.0) || !std::isfinite(tol)) throw InvalidParameters("tol must be >= 0");
  if (!(snapshot_interval > 0.0) || !std::isfinite(snapshot_interval)) {
    throw InvalidParameters("snapshot_interval must be positive");
  }
}

QProfile FlowConfig::mobility(const FlowProblem& problem) const {
  if (!q) return QProfile::canonical(problem.psi_lo, problem.psi_hi);
  if (q->lo() != problem.psi_lo || q->hi() != problem.psi_hi) {
    throw InvalidParameters("mobility range does not match the boundary values");
  }
  return *q;
}

std::vector<double> p_operator(const FlowProblem& problem, const Grid& grid,
                               const std::vector<double>& psi) {
  if (psi.size() != grid.size()) throw InvalidParameters("psi does not match the grid");
  const Stencil st = build_stencil(problem, grid);
  std::vector<double> u(psi.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = psi[i] - problem.psi_lo;
  std::vector<double> out(psi.size());
  kernels::apply_operator_serial(st, u, out);
  return out;
}

double supercritical_bump_scale(const FlowProblem& problem, const Grid& grid) {
  const ProblemParams p = problem.normalized();
  const DerivedConstants d = classify(p);
  if (d.regime != Regime::Stable) {
    throw RegimeMismatch("perturbed initial data needs c_k + k > n - 1");
  }
  const ClosedFormProfile tilde = psi_stable(p);
  const Stencil st = build_stencil(problem, grid);
  const auto& tau = grid.tau();

  std::optional<double> increasing_only;
  for (int e = 1; e <= 40; ++e) {
    const double scale = std::ldexp(1.0, e);
    bool increasing = true;
    for (double x : tau) {
      const double t1 = x / problem.tau_lo;
      if (!(tilde.slope(t1) + bump_slope(p.n(), p.b(), t1, scale) > 0.0)) {
        increasing = false;
        break;
      }
    }
    if (!increasing) continue;
    if (!increasing_only) increasing_only = scale;
    const std::vector<double> u = supercritical_excess(problem, grid, scale);
    std::vector<double> pv(u.size());
    kernels::apply_operator_serial(st, u, pv);
    if (std::all_of(pv.begin(), pv.end(), [](double v) { return v <= 0.0; })) return scale;
  }
  if (increasing_only) return *increasing_only;
  throw InvalidParameters("no bump scale up to 2^40 keeps the perturbed profile increasing");
}

FlowState initial_profile(const FlowProblem& problem, const Grid& grid, InitKind kind,
                          const std::vector<double>& custom_psi) {
  if (grid.lo() != problem.tau_lo || grid.hi() != problem.tau_hi) {
    throw InvalidParameters("grid does not span the problem interval");
  }
  const auto& tau = grid.tau();
  const double span = problem.psi_span();
  std::vector<double> u(grid.size());

  switch (kind) {
    case InitKind::SubcriticalConcave: {
      const double b1 = problem.tau_hi / problem.tau_lo;
      const double a1 = problem.psi_hi / problem.psi_lo;
      for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = problem.psi_lo * concave_excess(problem.n, b1, a1, tau[i] / problem.tau_lo);
      }
      break;
    }
    case InitKind::SupercriticalPerturbed:
      u = supercritical_excess(problem, grid, supercritical_bump_scale(problem, grid));
      break;
    case InitKind::StraightLine:
      for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = span * (tau[i] - problem.tau_lo) / (problem.tau_hi - problem.tau_lo);
      }
      break;
    case InitKind::Custom: {
      if (custom_psi.size() != grid.size()) {
        throw InvalidParameters("custom initial data must have one value per grid node");
      }
      if (custom_psi.front() != problem.psi_lo || custom_psi.back() != problem.psi_hi) {
        throw InvalidParameters("custom initial data must match the boundary values");
      }
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (!std::isfinite(custom_psi[i])) {
          throw InvalidParameters("custom initial data must be finite");
        }
        if (i > 0 && custom_psi[i] < custom_psi[i - 1]) {
          throw InvalidParameters("custom initial data must be non-decreasing (node " +
                                  std::to_string(i) + ")");
        }
        u[i] = custom_psi[i] - problem.psi_lo;
      }
      break;
    }
  }
  u.front() = 0.0;
  u.back() = span;
  return FlowState(problem, grid, std::move(u));
}

double stable_dt(const FlowProblem& problem, const FlowConfig& config, const FlowState& state) {
  config.validate();
  check_state(problem, state);
  Integrator integ(problem, config, state.grid());
  const double dt = integ.dt_for(integ.evaluate(state.excess()));
  if (!std::isfinite(dt)) {
    const double h = state.grid().spacing();
    return config.cfl * h * h;
  }
  return dt;
}

FlowState step(const FlowProblem& problem, const FlowConfig& config, const FlowState& state) {
  return step(problem, config, state, stable_dt(problem, config, state));
}

FlowState step(const FlowProblem& problem, const FlowConfig& config, const FlowState& state,
               double dt) {
  config.validate();
  check_state(problem, state);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameters("time step must be positive");
  Integrator integ(problem, config, state.grid());
  FlowState next = state;
  integ.evaluate(next.excess());
  integ.heun(next, dt);
  integ.commit(next, dt, nullptr);
  return next;
}

Trajectory run(const FlowProblem& problem, const FlowConfig& config, const FlowState& initial,
               const SnapshotObserver& observer) {
  config.validate();
  check_state(problem, initial);
  Integrator integ(problem, config, initial.grid());
  Trajectory traj;
  FlowState state = initial;

  auto record = [&](const FlowState& s) {
    traj.snapshots.push_back(s);
    traj.energy_history.push_back({s.t(), reduced_energy(problem, s)});
    if (observer) observer(s);
  };
  record(state);

  const double interval = config.snapshot_interval;
  long next_index = static_cast<long>(std::floor(state.t() / interval)) + 1;
  double max_increase = -std::numeric_limits<double>::infinity();

  for (;;) {
    const kernels::RateStats stats = integ.evaluate(state.excess());
    traj.final_residual = stats.max_abs_rate;
    if (config.tol > 0.0 && stats.max_abs_rate < config.tol) {
      traj.converged = true;
      break;
    }
    if (state.t() >= config.t_max) break;

    const double snap_time = static_cast<double>(next_index) * interval;
    const double target = std::min(snap_time, config.t_max);
    double dt = integ.dt_for(stats);
    const bool lands = state.t() + dt >= target;
    if (lands) dt = target - state.t();

    integ.heun(state, dt);
    bool bad_slope = false;
    max_increase = std::max(max_increase, integ.commit(state, dt, &bad_slope));
    if (bad_slope) ++traj.monotonicity_violations;

    if (lands) {
      state.set_time(target);
      if (target == snap_time) {
        record(state);
        ++next_index;
      }
    }
  }

  traj.max_step_increase = std::isfinite(max_increase) ? max_increase : 0.0;
  if (traj.snapshots.back().t() != state.t() ||
      traj.snapshots.back().step_count() != state.step_count()) {
    record(state);
  }
  traj.final = state;
  return traj;
}

std::vector<double> slope_profile(const FlowState& state) {
  const auto& u = state.excess();
  const double h = state.grid().spacing();
  const std::size_t m = u.size() - 1;
  std::vector<double> d(u.size());
  d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
  for (std::size_t i = 1; i < m; ++i) d[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
  d[m] = (3.0 * u[m] - 4.0 * u[m - 1] + u[m - 2]) / (2.0 * h);
  return d;
}

std::vector<double> trace_profile(const FlowProblem& problem, const FlowState& state) {
  std::vector<double> out = slope_profile(state);
  const auto& tau = state.grid().tau();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += (problem.n - 1) * state.psi(i) / tau[i];
  return out;
}

std::vector<double> eta_profile(const FlowProblem& problem, const FlowState& state) {
  std::vector<double> out = trace_profile(problem, state);
  const auto& tau = state.grid().tau();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= problem.k * tau[i];
  return out;
}

double reduced_energy(const FlowProblem& problem, const FlowState& state) {
  return discrete_energy(problem, state.grid(), state.excess());
}

}  // namespace mjflow
