#include <catch_amalgamated.hpp>

#include <random>

#include "mjflow/closed_form.hpp"
#include "oracles.hpp"

using namespace mjflow;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Frozen from a 30-digit evaluation of the bisection oracle for (n, a, b, k) = (2, 12, 6, 1).
constexpr double kLambdaRef = 1.01923971899385442926;
constexpr double kAuxSlopeAtLambdaRef = -0.0381162586687868;
constexpr double kLimitSlopeRef = 4.06055060995362;

}  // namespace

TEST_CASE("stable profile") {
  const ProblemParams p(3, 4, 2, 1);
  const ClosedFormProfile psi = psi_stable(p);
  CHECK_THAT(psi(1.0), WithinAbs(1.0, 1e-13));
  CHECK_THAT(psi(2.0), WithinAbs(4.0, 1e-13));
  CHECK_THAT(psi(1.5), WithinAbs(871.0 / 336, 1e-12));
  CHECK_THAT(psi.inv_coef(), WithinAbs(3.0 / 4 - 135.0 / 84, 1e-13));

  // shoot the ODE from tau = 1 with the closed-form slope
  const auto [value, slope] = oracle::integrate_ode(3, 1.0, 1.0, 1.0, psi.slope(1.0), 1.5, 2000);
  CHECK_THAT(value, WithinAbs(2.5922619047619047, 1e-9));
  CHECK_THAT(slope, WithinAbs(psi.slope(1.5), 1e-9));
}

TEST_CASE("stable profile boundary values hold for every k") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> slope(1.1, 9.0);
  std::uniform_real_distribution<double> weight(0.0, 4.0);
  for (int trial = 0; trial < 300; ++trial) {
    const ProblemParams p(2 + trial % 5, slope(rng), slope(rng), weight(rng));
    const ClosedFormProfile psi = psi_stable(p);
    CHECK_THAT(psi(1.0), WithinRel(1.0, 1e-10));
    CHECK_THAT(psi(p.b()), WithinRel(p.a(), 1e-10));
  }
}

TEST_CASE("auxiliary family") {
  const ProblemParams p(2, 12, 6, 1);
  const ClosedFormProfile psi = psi_s(p, 1.5);
  CHECK_THAT(psi(1.5), WithinAbs(1.0, 1e-13));
  CHECK_THAT(psi(6.0), WithinAbs(12.0, 1e-12));
  CHECK_THAT(psi(3.0), WithinAbs(3.1, 1e-13));
  CHECK_THAT(psi(3.0), WithinAbs(oracle::psi_s(2, 12, 6, 1, 1.5, 3.0), 1e-13));
  CHECK_THAT(psi.lin_coef() * 2, WithinAbs(-1.0 / 45, 1e-13));
  CHECK_THAT(psi.inv_coef(), WithinAbs(0.4, 1e-13));

  // finite-difference residual of the ODE
  const double h = 1e-3;
  const double t = 3.0;
  const double d1 = (psi(t + h) - psi(t - h)) / (2 * h);
  const double d2 = (psi(t + h) - 2 * psi(t) + psi(t - h)) / (h * h);
  CHECK(std::abs(d2 + d1 / t - psi(t) / (t * t) - 1.0) < 1e-5);

  const ClosedFormProfile at_one = psi_s(p, 1.0);
  const ClosedFormProfile tilde = psi_stable(p);
  CHECK(at_one.lin_coef() == tilde.lin_coef());
  CHECK(at_one.inv_coef() == tilde.inv_coef());
  CHECK_THROWS_AS(psi_s(p, 6.0), OutOfDomain);
}

TEST_CASE("ODE residual over random draws") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> slope(1.1, 9.0);
  std::uniform_real_distribution<double> weight(0.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const ProblemParams p(2 + trial % 4, slope(rng), slope(rng), weight(rng));
    const double s = 1.0 + 0.9 * unit(rng) * (p.b() - 1.0);
    const double tau = s + unit(rng) * (p.b() - s);
    const ClosedFormProfile psi = psi_s(p, s);
    CHECK(std::abs(psi.ode_residual(tau)) < 1e-9 * (1 + std::abs(psi(tau))));
    CHECK_THAT(psi(s), WithinRel(1.0, 1e-10));
    CHECK_THAT(psi(p.b()), WithinRel(p.a(), 1e-10));
  }
}

TEST_CASE("analytic derivatives against finite differences") {
  const ClosedFormProfile psi = psi_s(ProblemParams(3, 7, 3, 0.8), 1.3);
  const double t = 2.1;
  double previous = 0.0;
  for (double h : {1e-2, 5e-3, 2.5e-3}) {
    const double fd = (psi(t + h) - psi(t - h)) / (2 * h);
    const double err = std::abs(fd - psi.slope(t));
    if (previous > 0.0) CHECK_THAT(previous / err, WithinAbs(4.0, 0.05));
    previous = err;
  }
  const double h = 1e-4;
  CHECK_THAT((psi.slope(t + h) - psi.slope(t - h)) / (2 * h), WithinAbs(psi.curvature(t), 1e-6));
}

TEST_CASE("minimum slope") {
  CHECK(min_slope(psi_stable(ProblemParams(3, 4, 2, 1))).slope > 0.0);
  CHECK(min_slope(psi_stable(ProblemParams(2, 12, 6, 1))).slope < 0.0);

  const ClosedFormProfile psi = psi_s(ProblemParams(2, 12, 6, 1), 1.5);
  const SlopeMinimum m = min_slope(psi);
  CHECK(m.slope > 0.0);
  double dense = 1e300;
  for (int i = 0; i <= 100000; ++i) dense = std::min(dense, psi.slope(1.5 + 4.5 * i / 100000.0));
  CHECK_THAT(m.slope, WithinAbs(dense, 1e-9));
  CHECK(m.slope <= dense);
}

TEST_CASE("lambda") {
  const ProblemParams p(2, 12, 6, 1);
  const double lambda = solve_lambda(p);
  CHECK_THAT(lambda, WithinAbs(kLambdaRef, 1e-12));
  CHECK_THAT(lambda, WithinAbs(oracle::bisect_lambda(2, 12, 6, 1), 1e-10));
  CHECK(std::abs(lambda_equation(p, lambda)) < 1e-10);
  CHECK_THAT(aux_constants(p, lambda).slope, WithinAbs(kAuxSlopeAtLambdaRef, 1e-12));
  CHECK_THAT(limit_slope_constant(p, lambda), WithinAbs(kLimitSlopeRef, 1e-12));

  // h(s) is psi_s'(s)
  for (double s : {1.2, 2.0, 4.0}) {
    CHECK_THAT(lambda_equation(p, s), WithinAbs(psi_s(p, s).slope(s), 1e-12));
  }

  CHECK(solve_lambda(ProblemParams(2, 29.0 / 9, 3, 1)) == 1.0);
  CHECK_THROWS_AS(solve_lambda(ProblemParams(3, 4, 2, 1)), RegimeMismatch);
  CHECK_THROWS_AS(solve_lambda(ProblemParams(2, 12, 6, 2)), RegimeMismatch);
}

TEST_CASE("lambda for k = 0, n = 2 solves a quadratic") {
  const double expected = 5 * (1.2 - std::sqrt(1.2 * 1.2 - 1));
  CHECK_THAT(solve_lambda(ProblemParams(2, 1.2, 5, 0)), WithinAbs(expected, 1e-8));
  CHECK_THAT(limit_slope_constant(ProblemParams(2, 1.2, 5, 0), expected),
             WithinAbs(2 * (6 - expected) / (25 - expected * expected), 1e-12));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> slope(1.01, 6.0);
  int checked = 0;
  while (checked < 100) {
    const double a = slope(rng), b = slope(rng);
    const ProblemParams p(2, a, b, 0);
    if (classify(p).regime != Regime::Unstable) continue;
    CHECK_THAT(solve_lambda(p), WithinAbs(b * (a - std::sqrt(a * a - 1)), 1e-8));
    ++checked;
  }
}

TEST_CASE("lambda is the only sign change of h") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> slope(1.1, 9.0);
  std::uniform_real_distribution<double> weight(0.0, 2.0);
  int checked = 0;
  while (checked < 200) {
    const ProblemParams p(2 + checked % 3, slope(rng), slope(rng), weight(rng));
    if (classify(p).regime != Regime::Unstable) continue;
    int changes = 0;
    double prev = lambda_equation(p, 1.0);
    for (int i = 1; i < 10000; ++i) {
      const double cur = lambda_equation(p, 1.0 + (p.b() - 1.0) * i / 10000.0);
      if ((cur > 0.0) != (prev > 0.0)) ++changes;
      prev = cur;
    }
    CHECK(changes == 1);
    const double lambda = solve_lambda(p);
    const ClosedFormProfile psi = psi_s(p, lambda);
    CHECK(std::abs(psi.slope(lambda)) < 1e-8);
    CHECK(min_slope(psi).slope >= -1e-9);
    ++checked;
  }
}

TEST_CASE("limit profile") {
  const ProblemParams p(2, 12, 6, 1);
  const LimitProfile sig = sigma(p);
  CHECK(sig(1.01) == 1.0);
  CHECK(sig.excess(1.01) == 0.0);
  CHECK_THAT(sig(6.0), WithinAbs(12.0, 1e-12));
  CHECK_THAT(sig(sig.lambda()), WithinAbs(1.0, 1e-14));
  double prev = 0.0;
  for (int i = 0; i <= 5000; ++i) {
    const double v = sig(1.0 + 5.0 * i / 5000);
    CHECK(v >= prev - 1e-14);
    prev = v;
  }
  CHECK_THAT(sig.inverse_excess(sig.excess(3.0)), WithinAbs(3.0, 1e-10));
  CHECK(sig.inverse_excess(0.0) == sig.lambda());

  const LimitProfile crit = sigma(ProblemParams(2, 29.0 / 9, 3, 1));
  CHECK(crit.lambda() == 1.0);
  CHECK_THAT(crit.slope(1.0 + 1e-12), WithinAbs(0.0, 1e-10));
  CHECK_THAT(crit(2.0), WithinAbs(psi_stable(ProblemParams(2, 29.0 / 9, 3, 1))(2.0), 1e-15));

  CHECK_THROWS_AS(sigma(ProblemParams(3, 4, 2, 1)), RegimeMismatch);
  CHECK_THROWS_AS(sigma(ProblemParams(2, 12, 6, 2)), RegimeMismatch);
  CHECK_THAT(limit_slope_constant(p, 1.0), WithinAbs(slope_constant(p), 1e-14));
}
