#pragma once

// Explicit method-of-lines integrator for  d psi/dt = Q(psi) P[psi]  with psi pinned at
// both ends. The state carries the excess u = psi - psi_lo, so the degenerate end where
// psi collapses onto psi_lo keeps full relative precision.

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mjflow/discretization.hpp"

namespace mjflow {

class FlowState {
 public:
  FlowState(const FlowProblem& problem, Grid grid, std::vector<double> excess, double t = 0.0,
            long step_count = 0);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& excess() const { return excess_; }
  std::vector<double>& mutable_excess() { return excess_; }
  double t() const { return t_; }
  long step_count() const { return step_count_; }
  double psi_lo() const { return psi_lo_; }

  double psi(std::size_t i) const { return psi_lo_ + excess_[i]; }
  std::vector<double> psi_values() const;
  std::size_t size() const { return excess_.size(); }

  void advance(double dt) {
    t_ += dt;
    ++step_count_;
  }
  void set_time(double t) { t_ = t; }

 private:
  Grid grid_;
  std::vector<double> excess_;
  double t_;
  long step_count_;
  double psi_lo_;
};

enum class Execution { Serial, Parallel };

struct FlowConfig {
  std::optional<QProfile> q;  // canonical when empty
  double cfl = 0.4;
  double t_max = 200.0;
  double tol = 1e-8;
  double snapshot_interval = 1.0;
  Execution execution = Execution::Parallel;

  /// Throws InvalidParameters. tol = 0 disables the steady-state exit.
  void validate() const;
  QProfile mobility(const FlowProblem& problem) const;
};

struct EnergySample {
  double t;
  double e;
};

struct Trajectory {
  std::vector<FlowState> snapshots;
  std::vector<EnergySample> energy_history;
  std::optional<FlowState> final;
  bool converged = false;
  double final_residual = 0.0;
  long monotonicity_violations = 0;  // steps after which psi' < -1e-8 somewhere
  double max_step_increase = 0.0;    // max over steps and nodes of psi_new - psi_old

  const FlowState& final_state() const { return *final; }
};

/// Range violation or non-finite value; carries the last state that passed the checks.
class FlowFailure : public std::runtime_error {
 public:
  FlowFailure(const std::string& what, FlowState last_good)
      : std::runtime_error(what), last_good_(std::move(last_good)) {}
  const FlowState& last_good() const { return last_good_; }

 private:
  FlowState last_good_;
};

/// P[psi] on the grid, zero at the pinned ends.
std::vector<double> p_operator(const FlowProblem& problem, const Grid& grid,
                               const std::vector<double>& psi);

enum class InitKind { SubcriticalConcave, SupercriticalPerturbed, StraightLine, Custom };

/// Smallest power of two N >= 2 for which psi_tilde + (tau-1)(b-tau)/(N tau^n) has positive
/// slope at every node and P <= 0 at every interior node of the grid. Falls back to the
/// smallest N with positive slope when no N up to 2^40 also satisfies P <= 0.
/// Requires c_k + k > n-1 on the normalized problem.
double supercritical_bump_scale(const FlowProblem& problem, const Grid& grid);

/// custom_psi is required for InitKind::Custom and must match the grid, carry the boundary
/// values and be non-decreasing.
FlowState initial_profile(const FlowProblem& problem, const Grid& grid, InitKind kind,
                          const std::vector<double>& custom_psi = {});

double stable_dt(const FlowProblem& problem, const FlowConfig& config, const FlowState& state);

/// One Heun (SSP-RK2) step. Throws FlowFailure on range violation or non-finite values.
FlowState step(const FlowProblem& problem, const FlowConfig& config, const FlowState& state);
FlowState step(const FlowProblem& problem, const FlowConfig& config, const FlowState& state,
               double dt);

using SnapshotObserver = std::function<void(const FlowState&)>;

/// Integrates until max|Q P| < tol or t reaches t_max. Snapshots are taken at t = 0, at every
/// multiple of snapshot_interval (the step is shortened to land on it) and at the end.
Trajectory run(const FlowProblem& problem, const FlowConfig& config, const FlowState& initial,
               const SnapshotObserver& observer = {});

/// psi' at every node: central differences inside, one-sided second order at the ends.
std::vector<double> slope_profile(const FlowState& state);
/// Lambda = psi' + (n-1) psi / tau.
std::vector<double> trace_profile(const FlowProblem& problem, const FlowState& state);
/// eta = psi' + (n-1) psi / tau - k tau.
std::vector<double> eta_profile(const FlowProblem& problem, const FlowState& state);

/// e = integral of (psi' + (n-1)psi/tau - k(tau - beta))^2 tau^(n-1), midpoint rule per cell.
double reduced_energy(const FlowProblem& problem, const FlowState& state);

}  // namespace mjflow
