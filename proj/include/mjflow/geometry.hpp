#pragma once

// Potential-side picture. The reference metric has profile g with
//   g'(s) = (lo + hi e^s) / (1 + e^s),
// and the evolving potential f(s, t) satisfies f'(s, t) = Phi(g'(s), t) where Phi is the
// inverse of the momentum profile psi(., t).

#include <vector>

#include "mjflow/closed_form.hpp"
#include "mjflow/flow.hpp"

namespace mjflow {

class BackgroundProfile {
 public:
  explicit BackgroundProfile(double a) : BackgroundProfile(1.0, a) {}
  BackgroundProfile(double lo, double hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double g_prime(double s) const { return lo_ + g_prime_excess(s); }
  /// g'(s) - lo, accurate for very negative s.
  double g_prime_excess(double s) const;
  double g_second(double s) const;
  /// Throws OutOfDomain unless lo < x < hi.
  double inverse_g_prime(double x) const;
  /// g''((g')^(-1)(x)), which is (x - lo)(hi - x)/(hi - lo).
  double mobility(double x) const;

 private:
  double lo_;
  double hi_;
};

/// Monotone piecewise-linear inverse of a momentum profile.
class ProfileInverse {
 public:
  /// Throws InvalidParameters when psi decreases by more than slope_slack * spacing anywhere.
  explicit ProfileInverse(const FlowState& state, double slope_slack = 1e-8);

  /// tau with psi(tau) - psi_lo = excess; clamps to the end nodes outside [0, span].
  double at_excess(double excess) const;

 private:
  std::vector<double> tau_;
  std::vector<double> envelope_;
};

/// Phi(x, t); requires psi_lo <= x <= psi_hi.
double invert_profile(const FlowState& state, double x);
double invert_profile_excess(const FlowState& state, double excess);

double reconstruct_fprime(const BackgroundProfile& bg, const FlowState& state, double s);

struct PotentialSlice {
  std::vector<double> s_grid;
  std::vector<double> g_prime;
  std::vector<double> fprime;
  std::vector<double> fhat;  // integral of f' from 0 to s
  double t = 0.0;
};

inline constexpr double kPotentialCutoff = 40.0;

/// 2 * half_count + 1 points evenly spaced on [-cutoff, cutoff], with 0 in the middle.
std::vector<double> symmetric_s_grid(int half_count, double cutoff = kPotentialCutoff);

/// Trapezoid integration of f' outward from s = 0. The grid must be sorted and symmetric.
PotentialSlice normalized_potential(const BackgroundProfile& bg, const FlowState& state,
                                    const std::vector<double>& s_grid);

/// Limit of the momentum profile: psi_tilde in the stable regime, sigma otherwise.
/// Throws RegimeMismatch when c_k + k <= 0.
LimitProfile limit_profile(const ProblemParams& p);

/// f_inf(s) = integral from 0 to s of Phi_inf(g'(r)); the slice time is +infinity.
PotentialSlice limit_potential(const ProblemParams& p, const std::vector<double>& s_grid);

}  // namespace mjflow
