#pragma once

// Stationary solutions of
//   psi'' + (n-1) psi'/tau - (n-1) psi/tau^2 - k = 0
// in closed form, the blow-up slope lambda and the limit profile sigma.

#include <stdexcept>

#include "mjflow/params.hpp"

namespace mjflow {

class RootNotBracketed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RegimeMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// psi(tau) = quad tau^2 + lin tau + inv tau^(1-n), valid on [s, b].
class ClosedFormProfile {
 public:
  ClosedFormProfile(const ProblemParams& p, double s, double quad_coef, double lin_coef,
                    double inv_coef);

  const ProblemParams& params() const { return params_; }
  double s() const { return s_; }
  double quad_coef() const { return quad_; }
  double lin_coef() const { return lin_; }
  double inv_coef() const { return inv_; }

  double operator()(double tau) const { return value(tau); }
  double value(double tau) const;
  double slope(double tau) const;
  double curvature(double tau) const;
  /// Analytic residual of the stationary ODE; zero up to rounding.
  double ode_residual(double tau) const;

  /// Solves psi(tau) = 1 + excess on [s, b]. The profile must be increasing there.
  double inverse_excess(double excess) const;

 private:
  ProblemParams params_;
  double s_;
  double quad_;
  double lin_;
  double inv_;
};

ClosedFormProfile psi_stable(const ProblemParams& p);
ClosedFormProfile psi_s(const ProblemParams& p, double s);

struct SlopeMinimum {
  double tau;
  double slope;
};

/// Global minimum of psi' on [s, b]. psi''' has one sign for n >= 2, so psi' has at most
/// one interior critical point, located by solving psi'' = 0.
SlopeMinimum min_slope(const ClosedFormProfile& profile);

/// h(s) = C_k(s) + k s - (n-1)/s, which equals psi_s'(s).
double lambda_equation(const ProblemParams& p, double s);

/// Root of h on [1, b). Returns exactly 1 on the critical wall.
/// Throws RegimeMismatch outside 0 < c_k + k <= n-1 and RootNotBracketed when h has no
/// sign change or the refined root misses |h| < tol.
double solve_lambda(const ProblemParams& p, double tol = 1e-10);

/// sigma = 1 on [1, lambda], psi_lambda on [lambda, b].
class LimitProfile {
 public:
  LimitProfile(double lambda, ClosedFormProfile profile);

  double lambda() const { return lambda_; }
  const ClosedFormProfile& profile() const { return profile_; }

  double operator()(double tau) const { return value(tau); }
  double value(double tau) const;
  /// sigma(tau) - 1, evaluated without cancellation on the flat part.
  double excess(double tau) const;
  double slope(double tau) const;
  /// Inverse on [lambda, b]; values at height 1 map to lambda.
  double inverse_excess(double excess) const;

 private:
  double lambda_;
  ClosedFormProfile profile_;
};

/// Throws RegimeMismatch unless the regime is Critical or Unstable.
LimitProfile sigma(const ProblemParams& p);

/// C_lambda = n (a b^(n-1) - lambda^(n-1)) / (b^n - lambda^n).
double limit_slope_constant(const ProblemParams& p, double lambda);

}  // namespace mjflow
