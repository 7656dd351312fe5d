#pragma once

// Exact-rational evaluation of the regime constants, for inputs such as a = 29/9 that
// sit on the critical wall and cannot be represented in binary floating point.

#include <boost/multiprecision/cpp_int.hpp>

#include "mjflow/params.hpp"

namespace mjflow {

using Rational = boost::multiprecision::cpp_rational;

struct ExactConstants {
  Rational c;
  Rational beta_n;
  Rational c_k;
  Rational ck_plus_k;
};

ExactConstants exact_constants(int n, const Rational& a, const Rational& b, const Rational& k);

/// Same contract as classify(), with the regime decided by exact comparison.
/// lambda is still computed in double precision.
DerivedConstants classify_exact(int n, const Rational& a, const Rational& b, const Rational& k);

}  // namespace mjflow
