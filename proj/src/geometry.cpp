#include "mjflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mjflow {

namespace {

// e^s / (1 + e^s) without overflow
double logistic(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

std::size_t zero_index(const std::vector<double>& s_grid) {
  if (s_grid.size() < 3 || s_grid.size() % 2 == 0) {
    throw InvalidParameters("s-grid must have an odd number (>= 3) of points");
  }
  const std::size_t mid = s_grid.size() / 2;
  const double scale = std::max(std::abs(s_grid.front()), std::abs(s_grid.back()));
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (i > 0 && !(s_grid[i] > s_grid[i - 1])) {
      throw InvalidParameters("s-grid must be strictly increasing");
    }
    if (std::abs(s_grid[i] + s_grid[s_grid.size() - 1 - i]) > 1e-12 * scale) {
      throw InvalidParameters("s-grid must be symmetric about 0");
    }
  }
  if (s_grid[mid] != 0.0) throw InvalidParameters("s-grid must contain 0");
  return mid;
}

std::vector<double> integrate_from_zero(const std::vector<double>& s,
                                        const std::vector<double>& f, std::size_t mid) {
  std::vector<double> out(s.size(), 0.0);
  for (std::size_t i = mid + 1; i < s.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * (s[i] - s[i - 1]) * (f[i] + f[i - 1]);
  }
  for (std::size_t i = mid; i-- > 0;) {
    out[i] = out[i + 1] - 0.5 * (s[i + 1] - s[i]) * (f[i] + f[i + 1]);
  }
  return out;
}

}  // namespace

BackgroundProfile::BackgroundProfile(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidParameters("background profile needs finite lo < hi");
  }
}

double BackgroundProfile::g_prime_excess(double s) const { return (hi_ - lo_) * logistic(s); }

double BackgroundProfile::g_second(double s) const {
  return (hi_ - lo_) * logistic(s) * logistic(-s);
}

double BackgroundProfile::inverse_g_prime(double x) const {
  if (!(x > lo_ && x < hi_)) {
    std::ostringstream os;
    os << "g' takes values in (" << lo_ << ", " << hi_ << "), got " << x;
    throw OutOfDomain(os.str());
  }
  return std::log((x - lo_) / (hi_ - x));
}

double BackgroundProfile::mobility(double x) const { return g_second(inverse_g_prime(x)); }

ProfileInverse::ProfileInverse(const FlowState& state, double slope_slack)
    : tau_(state.grid().tau()), envelope_(state.excess()) {
  const double tol = slope_slack * state.grid().spacing();
  for (std::size_t i = 1; i < envelope_.size(); ++i) {
    if (envelope_[i] < envelope_[i - 1] - tol) {
      std::ostringstream os;
      os << "profile is not monotone at node " << i << " (drop "
         << envelope_[i - 1] - envelope_[i] << ")";
      throw InvalidParameters(os.str());
    }
    envelope_[i] = std::max(envelope_[i], envelope_[i - 1]);
  }
}

double ProfileInverse::at_excess(double excess) const {
  if (excess <= envelope_.front()) return tau_.front();
  if (excess >= envelope_.back()) return tau_.back();
  const auto it = std::lower_bound(envelope_.begin(), envelope_.end(), excess);
  const auto j = static_cast<std::size_t>(it - envelope_.begin());
  const double lo = envelope_[j - 1];
  const double hi = envelope_[j];
  const double w = hi > lo ? (excess - lo) / (hi - lo) : 1.0;
  return tau_[j - 1] + w * (tau_[j] - tau_[j - 1]);
}

double invert_profile(const FlowState& state, double x) {
  const double span = state.excess().back();
  if (!(x >= state.psi_lo() && x <= state.psi_lo() + span)) {
    throw OutOfDomain("inverse profile is defined on [psi_lo, psi_hi]");
  }
  return invert_profile_excess(state, x - state.psi_lo());
}

double invert_profile_excess(const FlowState& state, double excess) {
  return ProfileInverse(state).at_excess(excess);
}

double reconstruct_fprime(const BackgroundProfile& bg, const FlowState& state, double s) {
  if (!std::isfinite(s)) throw OutOfDomain("s must be finite");
  return invert_profile_excess(state, bg.g_prime_excess(s));
}

std::vector<double> symmetric_s_grid(int half_count, double cutoff) {
  if (half_count < 1 || !(cutoff > 0.0)) {
    throw InvalidParameters("symmetric s-grid needs half_count >= 1 and cutoff > 0");
  }
  std::vector<double> s(2 * static_cast<std::size_t>(half_count) + 1);
  for (int i = -half_count; i <= half_count; ++i) {
    s[i + half_count] = cutoff * i / half_count;
  }
  return s;
}

PotentialSlice normalized_potential(const BackgroundProfile& bg, const FlowState& state,
                                    const std::vector<double>& s_grid) {
  const std::size_t mid = zero_index(s_grid);
  const ProfileInverse inverse(state);
  PotentialSlice slice;
  slice.s_grid = s_grid;
  slice.t = state.t();
  slice.g_prime.resize(s_grid.size());
  slice.fprime.resize(s_grid.size());
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    slice.g_prime[i] = bg.g_prime(s_grid[i]);
    slice.fprime[i] = inverse.at_excess(bg.g_prime_excess(s_grid[i]));
  }
  slice.fhat = integrate_from_zero(s_grid, slice.fprime, mid);
  return slice;
}

LimitProfile limit_profile(const ProblemParams& p) {
  if (classify(p).regime == Regime::Stable) return LimitProfile(1.0, psi_stable(p));
  return sigma(p);
}

PotentialSlice limit_potential(const ProblemParams& p, const std::vector<double>& s_grid) {
  const std::size_t mid = zero_index(s_grid);
  const LimitProfile limit = limit_profile(p);
  const BackgroundProfile bg(p.a());
  PotentialSlice slice;
  slice.s_grid = s_grid;
  slice.t = std::numeric_limits<double>::infinity();
  slice.g_prime.resize(s_grid.size());
  slice.fprime.resize(s_grid.size());
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    slice.g_prime[i] = bg.g_prime(s_grid[i]);
    slice.fprime[i] = limit.inverse_excess(bg.g_prime_excess(s_grid[i]));
  }
  slice.fhat = integrate_from_zero(s_grid, slice.fprime, mid);
  return slice;
}

}  // namespace mjflow
