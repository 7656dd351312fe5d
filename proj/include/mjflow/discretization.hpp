#pragma once

#include <span>
#include <vector>

#include "mjflow/params.hpp"

namespace mjflow {

/// Boundary data of the momentum-coordinate problem
///   d psi/dt = Q(psi) P[psi],  psi(tau_lo) = psi_lo,  psi(tau_hi) = psi_hi.
/// The normalized classes give tau in [1, b], psi in [1, a]; the unnormalized classes
/// b[E_inf] - b0[E_0], a[E_inf] - a0[E_0] give tau in [b0, b], psi in [a0, a].
struct FlowProblem {
  int n;
  double k;
  double tau_lo;
  double tau_hi;
  double psi_lo;
  double psi_hi;
  double beta;  // centre of the normalized Hamiltonian

  FlowProblem(const ProblemParams& p);  // NOLINT: implicit by intent
  static FlowProblem from_classes(int n, double a, double a0, double b, double b0, double k);

  double psi_span() const { return psi_hi - psi_lo; }
  /// The equivalent problem on [1, tau_hi/tau_lo] with range [1, psi_hi/psi_lo].
  ProblemParams normalized() const;

 private:
  FlowProblem() = default;
};

class Grid {
 public:
  static constexpr int kMinCells = 16;

  /// M + 1 uniform nodes with endpoints exactly lo and hi.
  static Grid uniform(double lo, double hi, int cells);

  const std::vector<double>& tau() const { return tau_; }
  double spacing() const { return spacing_; }
  int cells() const { return static_cast<int>(tau_.size()) - 1; }
  std::size_t size() const { return tau_.size(); }
  double lo() const { return tau_.front(); }
  double hi() const { return tau_.back(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::vector<double> tau_;
  double spacing_ = 0.0;
};

Grid make_grid(const FlowProblem& problem, int cells);

/// Q(x) = (x-1)(a-x)/(a-1); throws OutOfDomain outside [1, a].
double q_canonical(double a, double x);

/// Mobility coefficient of the flow, evaluated on the excess u = psi - psi_lo.
class QProfile {
 public:
  enum class Kind { Canonical, UserTable };

  /// (x - lo)(hi - x)/(hi - lo), the mobility of g' = (lo + hi e^s)/(1 + e^s).
  static QProfile canonical(double psi_lo, double psi_hi);
  /// Samples on a uniform x-grid over [psi_lo, psi_hi]; linear in between.
  /// Requires zero end samples and strictly positive interior samples.
  static QProfile user_table(double psi_lo, double psi_hi, std::vector<double> samples);

  Kind kind() const { return kind_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double at_excess(double u) const {
    if (kind_ == Kind::Canonical) {
      const double q = u * (span_ - u) * inv_span_;
      return q > 0.0 ? q : 0.0;
    }
    return table_at(u);
  }
  double operator()(double x) const { return at_excess(x - lo_); }

 private:
  double table_at(double u) const;

  Kind kind_ = Kind::Canonical;
  double lo_ = 1.0;
  double hi_ = 2.0;
  double span_ = 1.0;
  double inv_span_ = 1.0;
  std::vector<double> table_;
};

/// Flux-form discretization of P.  With V = psi' + (n-1)psi/tau - k(tau - beta) at cell
/// midpoints and w = tau^(n-1),
///   P_i = [ (w V)_{i+1/2} - (w V)_{i-1/2} ] / (h w_i) - (n-1)/2 [ (wV/tau)_{i+1/2} + (wV/tau)_{i-1/2} ] / w_i,
/// which is -1/(2 h w_i) times the gradient of  e_h = sum_cells h w V^2.  The explicit
/// flow therefore dissipates e_h exactly in the semi-discrete sense.
/// Stored as an affine three-point stencil on the excess u = psi - psi_lo.
struct Stencil {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;
  std::vector<double> forcing;
  std::vector<double> drift;  // (n-1)/tau_i, for the time-step bound
  double spacing = 0.0;

  std::size_t size() const { return diag.size(); }
};

Stencil build_stencil(const FlowProblem& problem, const Grid& grid);

/// e_h for excess values on the grid (cell-midpoint quadrature of (Lambda - theta)^2 tau^(n-1)).
double discrete_energy(const FlowProblem& problem, const Grid& grid, std::span<const double> excess);

}  // namespace mjflow
