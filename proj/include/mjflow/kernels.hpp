#pragma once

// Per-node kernels of the explicit integrator. Each kernel has a serial reference
// implementation and an OpenMP version; both perform identical floating-point operations
// per node, so their results agree bit for bit.

#include <span>

#include "mjflow/discretization.hpp"

namespace mjflow::kernels {

struct RateStats {
  double max_abs_rate = 0.0;
  double max_mobility = 0.0;
  double max_drift = 0.0;  // max (n-1) Q / tau
};

/// P at interior nodes; boundary entries are set to 0.
void apply_operator_serial(const Stencil& st, std::span<const double> excess,
                           std::span<double> out);
void apply_operator_parallel(const Stencil& st, std::span<const double> excess,
                             std::span<double> out);

/// rate = Q(psi) P[psi] at interior nodes, 0 at the pinned ends.
RateStats flow_rate_serial(const Stencil& st, const QProfile& q, std::span<const double> excess,
                           std::span<double> rate);
RateStats flow_rate_parallel(const Stencil& st, const QProfile& q,
                             std::span<const double> excess, std::span<double> rate);

/// out = base + dt * rate
void euler_stage_serial(std::span<const double> base, std::span<const double> rate, double dt,
                        std::span<double> out);
void euler_stage_parallel(std::span<const double> base, std::span<const double> rate, double dt,
                          std::span<double> out);

/// out = (base + stage + dt * rate) / 2, the second Heun stage.
void heun_combine_serial(std::span<const double> base, std::span<const double> stage,
                         std::span<const double> rate, double dt, std::span<double> out);
void heun_combine_parallel(std::span<const double> base, std::span<const double> stage,
                           std::span<const double> rate, double dt, std::span<double> out);

}  // namespace mjflow::kernels
