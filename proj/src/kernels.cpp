#include "mjflow/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace mjflow::kernels {

namespace {

// Below this many nodes the fork/join cost exceeds the work.
constexpr std::ptrdiff_t kParallelThreshold = 4096;

inline double stencil_at(const Stencil& st, std::span<const double> u, std::size_t i) {
  return st.lower[i] * u[i - 1] + st.diag[i] * u[i] + st.upper[i] * u[i + 1] + st.forcing[i];
}

}  // namespace

void apply_operator_serial(const Stencil& st, std::span<const double> excess,
                           std::span<double> out) {
  const std::size_t size = st.size();
  out[0] = 0.0;
  out[size - 1] = 0.0;
  for (std::size_t i = 1; i + 1 < size; ++i) out[i] = stencil_at(st, excess, i);
}

void apply_operator_parallel(const Stencil& st, std::span<const double> excess,
                             std::span<double> out) {
  const auto size = static_cast<std::ptrdiff_t>(st.size());
  if (size < kParallelThreshold) return apply_operator_serial(st, excess, out);
  out[0] = 0.0;
  out[size - 1] = 0.0;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 1; i < size - 1; ++i) {
    out[i] = stencil_at(st, excess, static_cast<std::size_t>(i));
  }
}

RateStats flow_rate_serial(const Stencil& st, const QProfile& q, std::span<const double> excess,
                           std::span<double> rate) {
  const std::size_t size = st.size();
  RateStats stats;
  rate[0] = 0.0;
  rate[size - 1] = 0.0;
  for (std::size_t i = 1; i + 1 < size; ++i) {
    const double mob = q.at_excess(excess[i]);
    const double r = mob * stencil_at(st, excess, i);
    rate[i] = r;
    stats.max_abs_rate = std::max(stats.max_abs_rate, std::abs(r));
    stats.max_mobility = std::max(stats.max_mobility, mob);
    stats.max_drift = std::max(stats.max_drift, st.drift[i] * mob);
  }
  return stats;
}

RateStats flow_rate_parallel(const Stencil& st, const QProfile& q,
                             std::span<const double> excess, std::span<double> rate) {
  const auto size = static_cast<std::ptrdiff_t>(st.size());
  if (size < kParallelThreshold) return flow_rate_serial(st, q, excess, rate);
  double max_rate = 0.0;
  double max_mob = 0.0;
  double max_drift = 0.0;
  rate[0] = 0.0;
  rate[size - 1] = 0.0;
#pragma omp parallel for schedule(static) reduction(max : max_rate, max_mob, max_drift)
  for (std::ptrdiff_t j = 1; j < size - 1; ++j) {
    const auto i = static_cast<std::size_t>(j);
    const double mob = q.at_excess(excess[i]);
    const double r = mob * stencil_at(st, excess, i);
    rate[i] = r;
    max_rate = std::max(max_rate, std::abs(r));
    max_mob = std::max(max_mob, mob);
    max_drift = std::max(max_drift, st.drift[i] * mob);
  }
  return RateStats{max_rate, max_mob, max_drift};
}

void euler_stage_serial(std::span<const double> base, std::span<const double> rate, double dt,
                        std::span<double> out) {
  for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + dt * rate[i];
}

void euler_stage_parallel(std::span<const double> base, std::span<const double> rate, double dt,
                          std::span<double> out) {
  const auto size = static_cast<std::ptrdiff_t>(base.size());
  if (size < kParallelThreshold) return euler_stage_serial(base, rate, dt, out);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < size; ++i) out[i] = base[i] + dt * rate[i];
}

void heun_combine_serial(std::span<const double> base, std::span<const double> stage,
                         std::span<const double> rate, double dt, std::span<double> out) {
  for (std::size_t i = 0; i < base.size(); ++i) {
    out[i] = 0.5 * (base[i] + (stage[i] + dt * rate[i]));
  }
}

void heun_combine_parallel(std::span<const double> base, std::span<const double> stage,
                           std::span<const double> rate, double dt, std::span<double> out) {
  const auto size = static_cast<std::ptrdiff_t>(base.size());
  if (size < kParallelThreshold) return heun_combine_serial(base, stage, rate, dt, out);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < size; ++i) {
    out[i] = 0.5 * (base[i] + (stage[i] + dt * rate[i]));
  }
}

}  // namespace mjflow::kernels
