#include "mjflow/closed_form.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <utility>

namespace mjflow {

namespace {

using boost::math::tools::eps_tolerance;
using boost::math::tools::toms748_solve;

constexpr std::uintmax_t kMaxRootIterations = 200;

// Brackets [lo, hi] with f(lo) <= 0 <= f(hi) and refines to full double precision.
template <class F>
double refine_root(F&& f, double lo, double hi, double f_lo, double f_hi) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  std::uintmax_t iters = kMaxRootIterations;
  const auto [x0, x1] = toms748_solve(f, lo, hi, f_lo, f_hi, eps_tolerance<double>(), iters);
  return std::abs(f(x0)) <= std::abs(f(x1)) ? x0 : x1;
}

}  // namespace

ClosedFormProfile::ClosedFormProfile(const ProblemParams& p, double s, double quad_coef,
                                     double lin_coef, double inv_coef)
    : params_(p), s_(s), quad_(quad_coef), lin_(lin_coef), inv_(inv_coef) {}

double ClosedFormProfile::value(double tau) const {
  return quad_ * tau * tau + lin_ * tau + inv_ * std::pow(tau, 1 - params_.n());
}

double ClosedFormProfile::slope(double tau) const {
  const int n = params_.n();
  return 2.0 * quad_ * tau + lin_ - (n - 1) * inv_ * std::pow(tau, -n);
}

double ClosedFormProfile::curvature(double tau) const {
  const int n = params_.n();
  return 2.0 * quad_ + n * (n - 1) * inv_ * std::pow(tau, -n - 1);
}

double ClosedFormProfile::ode_residual(double tau) const {
  const int n = params_.n();
  return curvature(tau) + (n - 1) * slope(tau) / tau - (n - 1) * value(tau) / (tau * tau) -
         params_.k();
}

double ClosedFormProfile::inverse_excess(double excess) const {
  const double b = params_.b();
  auto f = [&](double tau) { return value(tau) - 1.0 - excess; };
  const double f_lo = f(s_);
  const double f_hi = f(b);
  if (f_lo >= 0.0) return s_;
  if (f_hi <= 0.0) return b;
  return refine_root(f, s_, b, f_lo, f_hi);
}

ClosedFormProfile psi_stable(const ProblemParams& p) {
  const int n = p.n();
  const double c_k = modified_constant(p);
  return ClosedFormProfile(p, 1.0, p.k() / (n + 1), c_k / n,
                           (n + 1 - p.k()) / (n + 1) - c_k / n);
}

ClosedFormProfile psi_s(const ProblemParams& p, double s) {
  const AuxConstants aux = aux_constants(p, s);
  if (s == 1.0) return psi_stable(p);
  const int n = p.n();
  return ClosedFormProfile(p, s, p.k() / (n + 1), aux.slope / n, aux.inverse_coef);
}

SlopeMinimum min_slope(const ClosedFormProfile& profile) {
  const double s = profile.s();
  const double b = profile.params().b();
  const int n = profile.params().n();

  SlopeMinimum best{s, profile.slope(s)};
  const double right = profile.slope(b);
  if (right < best.slope) best = {b, right};

  // psi'' is increasing when inv_coef < 0, so a sign change of psi'' marks the minimum.
  const double c_lo = profile.curvature(s);
  const double c_hi = profile.curvature(b);
  if (c_lo < 0.0 && c_hi > 0.0) {
    double tau = std::numeric_limits<double>::quiet_NaN();
    if (profile.quad_coef() > 0.0) {
      tau = std::pow(-n * (n - 1) * profile.inv_coef() / (2.0 * profile.quad_coef()),
                     1.0 / (n + 1));
    }
    if (!(tau > s && tau < b)) {
      auto curv = [&](double x) { return profile.curvature(x); };
      tau = refine_root(curv, s, b, c_lo, c_hi);
    }
    const double interior = profile.slope(tau);
    if (interior < best.slope) best = {tau, interior};
  }
  return best;
}

double lambda_equation(const ProblemParams& p, double s) {
  const AuxConstants aux = aux_constants(p, s);
  return aux.slope + p.k() * s - (p.n() - 1) / s;
}

double solve_lambda(const ProblemParams& p, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("lambda tolerance must be positive");
  const double wall = p.n() - 1.0;
  const double ck_plus_k = modified_constant(p) + p.k();
  if (std::abs(ck_plus_k - wall) <= kCriticalRelTol * wall) return 1.0;
  if (!(ck_plus_k > 0.0 && ck_plus_k < wall)) {
    std::ostringstream os;
    os << "lambda is defined only for 0 < c_k + k <= n-1; got c_k + k = " << ck_plus_k;
    throw RegimeMismatch(os.str());
  }

  const double b = p.b();
  const double delta = 1e-12 * (b - 1.0);
  const double lo = 1.0 + delta;
  const double hi = b - delta;
  auto h = [&](double s) { return lambda_equation(p, s); };
  const double h_lo = h(lo);
  const double h_hi = h(hi);
  if (!(h_lo <= 0.0 && h_hi >= 0.0)) {
    std::ostringstream os;
    os << "no sign change of C_k(s) + k s - (n-1)/s on [" << lo << ", " << hi
       << "]: h(lo)=" << h_lo << ", h(hi)=" << h_hi;
    throw RootNotBracketed(os.str());
  }
  const double lambda = refine_root(h, lo, hi, h_lo, h_hi);
  const double residual = std::abs(h(lambda));
  if (!(residual < tol)) {
    std::ostringstream os;
    os << "lambda refinement stalled at s=" << lambda << " with residual " << residual;
    throw RootNotBracketed(os.str());
  }
  return lambda;
}

LimitProfile::LimitProfile(double lambda, ClosedFormProfile profile)
    : lambda_(lambda), profile_(std::move(profile)) {}

double LimitProfile::excess(double tau) const {
  if (tau <= lambda_) return 0.0;
  return profile_.value(tau) - 1.0;
}

double LimitProfile::value(double tau) const {
  if (tau <= lambda_) return 1.0;
  return profile_.value(tau);
}

double LimitProfile::slope(double tau) const {
  if (tau <= lambda_) return 0.0;
  return profile_.slope(tau);
}

double LimitProfile::inverse_excess(double excess) const {
  if (excess <= 0.0) return lambda_;
  return profile_.inverse_excess(excess);
}

LimitProfile sigma(const ProblemParams& p) {
  const DerivedConstants d = classify(p);
  switch (d.regime) {
    case Regime::Critical:
      return LimitProfile(1.0, psi_stable(p));
    case Regime::Unstable:
      return LimitProfile(*d.lambda, psi_s(p, *d.lambda));
    case Regime::Stable:
      throw RegimeMismatch("stable regime has no blow-up: use psi_stable for the limit");
    case Regime::OutOfTheorem:
      break;
  }
  throw RegimeMismatch("limit profile undefined for c_k + k <= 0");
}

double limit_slope_constant(const ProblemParams& p, double lambda) {
  if (!(lambda >= 1.0 && lambda < p.b())) {
    throw OutOfDomain("lambda must lie in [1, b)");
  }
  const int n = p.n();
  return n * (p.a() * std::pow(p.b(), n - 1) - std::pow(lambda, n - 1)) /
         (std::pow(p.b(), n) - std::pow(lambda, n));
}

}  // namespace mjflow
