#include "mjflow/params.hpp"

#include <cmath>
#include <sstream>

#include "mjflow/closed_form.hpp"

namespace mjflow {

namespace {

std::string describe(int n, double a, double b, double k) {
  std::ostringstream os;
  os << "(n=" << n << ", a=" << a << ", b=" << b << ", k=" << k << ")";
  return os.str();
}

void check_classes(int n, double a, double b) {
  if (n < 2) throw InvalidParameters("dimension n must be >= 2, got " + std::to_string(n));
  if (!(a > 1.0) || !std::isfinite(a)) throw InvalidParameters("slope a must be finite and > 1");
  if (!(b > 1.0) || !std::isfinite(b)) throw InvalidParameters("slope b must be finite and > 1");
}

// n (a b^(n-1) - s^(n-1)) / (b^n - s^n)
double slope_ratio(int n, double a, double b, double s) {
  return n * (a * std::pow(b, n - 1) - std::pow(s, n - 1)) / (std::pow(b, n) - std::pow(s, n));
}

// n/(n+1) (b^(n+1) - s^(n+1)) / (b^n - s^n)
double hamiltonian_centre(int n, double b, double s) {
  return n / (n + 1.0) * (std::pow(b, n + 1) - std::pow(s, n + 1)) /
         (std::pow(b, n) - std::pow(s, n));
}

}  // namespace

ProblemParams::ProblemParams(int n, double a, double b, double k) : n_(n), a_(a), b_(b), k_(k) {
  check_classes(n, a, b);
  if (!std::isfinite(k)) throw InvalidParameters("k must be finite " + describe(n, a, b, k));
  if (k < 0.0) {
    throw NegativeVectorFieldWeight("negative vector-field weight k is not supported " +
                                    describe(n, a, b, k));
  }
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Stable: return "stable";
    case Regime::Critical: return "critical";
    case Regime::Unstable: return "unstable";
    case Regime::OutOfTheorem: return "out_of_theorem";
  }
  return "unknown";
}

std::optional<Regime> regime_from_string(std::string_view s) {
  for (Regime r : {Regime::Stable, Regime::Critical, Regime::Unstable, Regime::OutOfTheorem}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

double slope_constant(const ProblemParams& p) { return slope_ratio(p.n(), p.a(), p.b(), 1.0); }

double hamiltonian_normalization(const ProblemParams& p) {
  return hamiltonian_centre(p.n(), p.b(), 1.0);
}

double modified_constant(const ProblemParams& p) {
  return slope_constant(p) - p.k() * hamiltonian_normalization(p);
}

double hamiltonian_theta(const ProblemParams& p, double tau) {
  if (!(tau >= 1.0 && tau <= p.b())) {
    throw OutOfDomain("momentum coordinate tau=" + std::to_string(tau) + " outside [1, b]");
  }
  return p.k() * (tau - hamiltonian_normalization(p));
}

AuxConstants aux_constants(const ProblemParams& p, double s) {
  if (!(s >= 1.0 && s < p.b())) {
    throw OutOfDomain("auxiliary family needs 1 <= s < b, got s=" + std::to_string(s));
  }
  const int n = p.n();
  const double k = p.k();
  AuxConstants out;
  out.slope = slope_ratio(n, p.a(), p.b(), s) - k * hamiltonian_centre(n, p.b(), s);
  out.inverse_coef =
      std::pow(s, n - 1) * (n + 1 - k * s * s) / (n + 1) - std::pow(s, n) * out.slope / n;
  return out;
}

DerivedConstants classify(const ProblemParams& p, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("classification tolerance must be positive");
  DerivedConstants d;
  d.c = slope_constant(p);
  d.beta_n = hamiltonian_normalization(p);
  d.c_k = d.c - p.k() * d.beta_n;
  d.ck_plus_k = d.c_k + p.k();

  const double wall = p.n() - 1.0;
  if (d.ck_plus_k <= 0.0) {
    d.regime = Regime::OutOfTheorem;
  } else if (std::abs(d.ck_plus_k - wall) <= tol * wall) {
    d.regime = Regime::Critical;
    d.lambda = 1.0;
  } else if (d.ck_plus_k > wall) {
    d.regime = Regime::Stable;
  } else {
    d.regime = Regime::Unstable;
    d.lambda = solve_lambda(p);
  }
  return d;
}

double k_upper_bound(int n, double a, double b) {
  check_classes(n, a, b);
  const double c = slope_ratio(n, a, b, 1.0);
  return (1.0 + c - n) / (hamiltonian_centre(n, b, 1.0) - 1.0);
}

ScaledProblem scale_parameters(int n, double a, double a0, double b, double b0, double k) {
  if (!(a0 > 0.0) || !(b0 > 0.0)) throw InvalidParameters("a0 and b0 must be positive");
  if (!(a > a0)) throw InvalidParameters("degenerate class: need a > a0");
  if (!(b > b0)) throw InvalidParameters("degenerate class: need b > b0");
  ProblemParams scaled(n, a / a0, b / b0, k * b0 * b0 / a0);
  return ScaledProblem{scaled, a0 / (b0 * b0), b0};
}

double divisor_margin(int n, double a, double a0, double b, double b0, double k) {
  if (!(a > a0 && a0 > 0.0 && b > b0 && b0 > 0.0)) {
    throw InvalidParameters("classes must satisfy a > a0 > 0 and b > b0 > 0");
  }
  if (n < 2) throw InvalidParameters("dimension n must be >= 2");
  // Intersection numbers of the unnormalized classes; theta is minimal on E_0 (tau = b0).
  const double c = n * (a * std::pow(b, n - 1) - a0 * std::pow(b0, n - 1)) /
                   (std::pow(b, n) - std::pow(b0, n));
  const double beta = n / (n + 1.0) * (std::pow(b, n + 1) - std::pow(b0, n + 1)) /
                      (std::pow(b, n) - std::pow(b0, n));
  return c + k * (b0 - beta) - (n - 1) * a0 / b0;
}

}  // namespace mjflow
