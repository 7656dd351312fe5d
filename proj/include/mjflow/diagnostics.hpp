#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mjflow/flow.hpp"
#include "mjflow/params.hpp"

namespace mjflow {

inline constexpr double kEnergySlack = 1e-8;
inline constexpr double kTimeMonotoneSlack = 1e-10;
inline constexpr double kBarrierSlack = 1e-6;
inline constexpr double kTraceSlack = 1e-6;
inline constexpr double kGapSlack = 1e-8;

/// Distances are measured against sigma in the critical and unstable regimes and against
/// psi_tilde in the stable regime. When c_k + k <= 0 there is no limit profile: distances and
/// eta_target are empty and the barrier is the floor psi >= 1.
struct RunReport {
  Regime regime = Regime::Stable;
  std::optional<double> lambda;
  std::optional<double> sup_dist_to_sigma;
  std::optional<double> c1_dist_on_compact;  // max |psi' - sigma'| over [lambda + delta, b - delta]
  double eta_infinity_estimate = 0.0;        // median of eta over the same window
  std::optional<double> eta_target;
  bool energy_monotone = false;
  bool time_monotone = false;
  bool barrier_ok = false;
  bool trace_bound_ok = false;
  bool converged = false;
};

/// delta defaults to 0.05 (b - lambda), with lambda = 1 in the stable regime.
/// Throws InvalidParameters for an empty trajectory or delta outside (0, (b - lambda)/4).
RunReport convergence_report(const ProblemParams& p, const Trajectory& traj,
                             std::optional<double> delta = std::nullopt);

/// Fixed key order, stable across runs.
std::string to_json(const RunReport& report);

struct GapSample {
  double t;
  double gap;
};

struct ComparisonResult {
  bool non_increasing = false;
  std::vector<GapSample> history;
  double terminal_gap = 0.0;
};

/// Runs both initial data to t_end with the steady-state exit disabled, so the snapshot times
/// coincide, and checks that max|psi1 - psi2| never grows by more than kGapSlack.
ComparisonResult comparison_check(const FlowProblem& problem, const FlowConfig& config,
                                  const FlowState& init1, const FlowState& init2, double t_end);

struct ScalingResult {
  bool ok = false;
  double max_difference = 0.0;
  double max_time_mismatch = 0.0;
  std::size_t compared = 0;
};

/// Runs the unnormalized classes and their normalization side by side and compares
/// psi(tau, t) with a0 psi1(tau / b0, t a0 / b0^2) at every snapshot.
ScalingResult scaling_check(int n, double a, double a0, double b, double b0, double k,
                            const FlowConfig& config, int cells, InitKind init, double t_end,
                            double tolerance = 1e-6);

}  // namespace mjflow
