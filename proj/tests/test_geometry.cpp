#include <catch_amalgamated.hpp>

#include "mjflow/geometry.hpp"

using namespace mjflow;
using Catch::Matchers::WithinAbs;

namespace {

const ProblemParams kStable(3, 4, 2, 1);

// M = 48 stable run to convergence; shared by the cases below.
const FlowState& converged_stable() {
  static const FlowState state = [] {
    const FlowProblem fp(kStable);
    FlowConfig cfg;
    cfg.tol = 1e-10;
    cfg.snapshot_interval = 100;
    return run(fp, cfg, initial_profile(fp, make_grid(fp, 48), InitKind::SupercriticalPerturbed))
        .final_state();
  }();
  return state;
}

double interpolate_psi(const FlowState& s, double tau) {
  const auto& g = s.grid().tau();
  if (tau <= g.front()) return s.psi(0);
  if (tau >= g.back()) return s.psi(s.size() - 1);
  const auto j = static_cast<std::size_t>((tau - g.front()) / s.grid().spacing());
  const std::size_t i = std::min(j, s.size() - 2);
  const double w = (tau - g[i]) / (g[i + 1] - g[i]);
  return (1 - w) * s.psi(i) + w * s.psi(i + 1);
}

}  // namespace

TEST_CASE("background profile") {
  const BackgroundProfile bg(12);
  CHECK_THAT(bg.g_prime(-40), WithinAbs(1.0, 1e-12));
  CHECK_THAT(bg.g_prime(40), WithinAbs(12.0, 1e-12));
  CHECK_THAT(bg.g_prime(0), WithinAbs(6.5, 1e-14));
  for (int i = -400; i < 400; ++i) {
    const double lo = bg.g_prime(i / 10.0), hi = bg.g_prime((i + 1) / 10.0);
    CHECK(hi >= lo);
    if (std::abs(i) < 300) CHECK(hi > lo);
  }
  CHECK(bg.g_prime_excess(-40) > 0.0);
  CHECK(bg.g_prime_excess(-40) < 11 * 4.3e-18);

  // g''((g')^-1(x)) is the canonical mobility
  for (int i = 1; i < 1000; ++i) {
    const double x = 1 + 11.0 * i / 1000;
    CHECK_THAT(bg.mobility(x), WithinAbs(q_canonical(12, x), 1e-12));
    CHECK_THAT(bg.g_prime(bg.inverse_g_prime(x)), WithinAbs(x, 1e-12));
  }
  const double h = 1e-5;
  CHECK_THAT((bg.g_prime(0.3 + h) - bg.g_prime(0.3 - h)) / (2 * h), WithinAbs(bg.g_second(0.3), 1e-8));
  CHECK_THROWS_AS(bg.inverse_g_prime(1.0), OutOfDomain);
  CHECK_THROWS_AS(BackgroundProfile(0.5), InvalidParameters);
}

TEST_CASE("inverse profile") {
  const FlowState& s = converged_stable();
  CHECK(invert_profile(s, 1.0) == 1.0);
  CHECK(invert_profile(s, 4.0) == 2.0);
  const double h = s.grid().spacing();
  CHECK_THAT(invert_profile(s, psi_stable(kStable)(1.5)), WithinAbs(1.5, 2 * h));
  CHECK_THROWS_AS(invert_profile(s, 4.5), OutOfDomain);

  const FlowProblem fp(kStable);
  const Grid g = make_grid(fp, 16);
  std::vector<double> u(17);
  for (int i = 0; i <= 16; ++i) u[i] = 3.0 * i / 16;
  u[8] = u[7] - 0.1;
  CHECK_THROWS_AS(ProfileInverse(FlowState(fp, g, u)), InvalidParameters);
}

TEST_CASE("reconstructed potential") {
  const FlowState& s = converged_stable();
  const BackgroundProfile bg(4);
  CHECK_THAT(reconstruct_fprime(bg, s, -40), WithinAbs(1.0, 1e-10));
  CHECK_THAT(reconstruct_fprime(bg, s, 40), WithinAbs(2.0, 1e-6));
  CHECK(reconstruct_fprime(bg, s, 0) == invert_profile(s, 2.5));

  const std::vector<double> grid = symmetric_s_grid(500);
  const PotentialSlice slice = normalized_potential(bg, s, grid);
  CHECK(slice.fhat[500] == 0.0);
  CHECK(slice.t == s.t());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(slice.fprime[i] >= 1.0);
    CHECK(slice.fprime[i] <= 2.0);
    if (i > 0) CHECK(slice.fprime[i] >= slice.fprime[i - 1]);
  }
  // round trip psi(f'(s)) = g'(s)
  double max_slope = 0.0;
  for (double d : slope_profile(s)) max_slope = std::max(max_slope, d);
  const double h = s.grid().spacing();
  for (int i = 0; i < 1000; ++i) {
    const double x = -20 + 40.0 * i / 999;
    const double fp = reconstruct_fprime(bg, s, x);
    CHECK_THAT(interpolate_psi(s, fp), WithinAbs(bg.g_prime(x), 2 * h * max_slope));
  }

  CHECK_THROWS_AS(normalized_potential(bg, s, {-1, 0.5, 1}), InvalidParameters);
  CHECK_THROWS_AS(normalized_potential(bg, s, {-1, 1}), InvalidParameters);
}

TEST_CASE("limit potential") {
  const std::vector<double> grid = symmetric_s_grid(400);
  const ProblemParams unstable(2, 12, 6, 1);
  const PotentialSlice lim = limit_potential(unstable, grid);
  CHECK_THAT(lim.fprime.front(), WithinAbs(solve_lambda(unstable), 1e-6));
  CHECK_THAT(lim.fprime.back(), WithinAbs(6.0, 1e-6));
  CHECK(lim.fhat[400] == 0.0);

  const PotentialSlice st = limit_potential(kStable, grid);
  CHECK_THAT(st.fprime.front(), WithinAbs(1.0, 1e-10));
  CHECK_THROWS_AS(limit_potential(ProblemParams(2, 12, 6, 2), grid), RegimeMismatch);
}
