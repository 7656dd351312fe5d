#include "mjflow/exact.hpp"

#include "mjflow/closed_form.hpp"

namespace mjflow {

namespace {

Rational ipow(const Rational& x, int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

ExactConstants exact_constants(int n, const Rational& a, const Rational& b, const Rational& k) {
  if (n < 2) throw InvalidParameters("dimension n must be >= 2");
  if (a <= 1 || b <= 1) throw InvalidParameters("slopes a and b must be > 1");
  if (k < 0) throw NegativeVectorFieldWeight("negative vector-field weight k is not supported");
  ExactConstants e;
  const Rational bn = ipow(b, n);
  e.c = Rational(n) * (a * ipow(b, n - 1) - 1) / (bn - 1);
  e.beta_n = Rational(n, n + 1) * (ipow(b, n + 1) - 1) / (bn - 1);
  e.c_k = e.c - k * e.beta_n;
  e.ck_plus_k = e.c_k + k;
  return e;
}

DerivedConstants classify_exact(int n, const Rational& a, const Rational& b, const Rational& k) {
  const ExactConstants e = exact_constants(n, a, b, k);
  const ProblemParams p(n, a.convert_to<double>(), b.convert_to<double>(), k.convert_to<double>());

  DerivedConstants d;
  d.c = e.c.convert_to<double>();
  d.beta_n = e.beta_n.convert_to<double>();
  d.c_k = e.c_k.convert_to<double>();
  d.ck_plus_k = e.ck_plus_k.convert_to<double>();

  const Rational wall = n - 1;
  if (e.ck_plus_k <= 0) {
    d.regime = Regime::OutOfTheorem;
  } else if (e.ck_plus_k == wall) {
    d.regime = Regime::Critical;
    d.lambda = 1.0;
  } else if (e.ck_plus_k > wall) {
    d.regime = Regime::Stable;
  } else {
    d.regime = Regime::Unstable;
    d.lambda = solve_lambda(p);
  }
  return d;
}

}  // namespace mjflow
