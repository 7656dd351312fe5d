#pragma once

// Problem parameters for the modified J-flow on Bl_p(P^n) under Calabi symmetry.
//
// Kähler classes are normalized to  [omega] = a[E_inf] - [E_0],  [chi] = b[E_inf] - [E_0]
// and the S^1 action is generated by  xi = k w d/dw.  Everything downstream works in the
// momentum coordinate tau in [1, b], where the flow is a 1-D degenerate parabolic problem
// for psi : [1, b] -> [1, a].

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mjflow {

class InvalidParameters : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// k < 0 needs the E_inf divisor instead of E_0 and is not supported.
class NegativeVectorFieldWeight : public InvalidParameters {
 public:
  using InvalidParameters::InvalidParameters;
};

class OutOfDomain : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ProblemParams {
 public:
  ProblemParams(int n, double a, double b, double k);

  int n() const { return n_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double k() const { return k_; }

  friend bool operator==(const ProblemParams&, const ProblemParams&) = default;

 private:
  int n_;
  double a_;
  double b_;
  double k_;
};

enum class Regime { Stable, Critical, Unstable, OutOfTheorem };

std::string_view to_string(Regime r);
std::optional<Regime> regime_from_string(std::string_view s);

struct DerivedConstants {
  double c = 0.0;
  double c_k = 0.0;
  double beta_n = 0.0;
  double ck_plus_k = 0.0;
  Regime regime = Regime::Stable;
  std::optional<double> lambda;
};

/// Coefficients of the auxiliary boundary-value family psi_s on [s, b]:
///   psi_s(tau) = k tau^2/(n+1) + slope/n * tau + inverse_coef / tau^(n-1).
struct AuxConstants {
  double slope = 0.0;         // C_k(s)
  double inverse_coef = 0.0;  // A_k(s)
};

/// Result of normalizing the classes b[E_inf] - b0[E_0], a[E_inf] - a0[E_0].
struct ScaledProblem {
  ProblemParams params;
  double time_factor;       // a0 / b0^2
  double potential_factor;  // b0
};

/// Relative width of the critical wall |c_k + k - (n-1)| <= tol * (n-1).
inline constexpr double kCriticalRelTol = 1e-9;

double slope_constant(const ProblemParams& p);
/// beta_n = n/(n+1) (b^(n+1) - 1)/(b^n - 1), the centre of the normalized Hamiltonian.
double hamiltonian_normalization(const ProblemParams& p);
double modified_constant(const ProblemParams& p);

/// theta(tau) = k (tau - beta_n); throws OutOfDomain outside [1, b].
double hamiltonian_theta(const ProblemParams& p, double tau);

/// Throws OutOfDomain unless 1 <= s < b.
AuxConstants aux_constants(const ProblemParams& p, double s);

DerivedConstants classify(const ProblemParams& p, double tol = kCriticalRelTol);

/// Largest admissible k for the pair (a, b); non-positive when c <= n-1.
double k_upper_bound(int n, double a, double b);

ScaledProblem scale_parameters(int n, double a, double a0, double b, double b0, double k);

/// Nakai-type quantity on E_0 for the unnormalized classes,
///   min(c + theta) - (n-1) a0/b0,
/// positive exactly when the modified J-equation is solvable.
double divisor_margin(int n, double a, double a0, double b, double b0, double k);

}  // namespace mjflow
