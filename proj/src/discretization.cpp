#include "mjflow/discretization.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace mjflow {

FlowProblem::FlowProblem(const ProblemParams& p)
    : n(p.n()),
      k(p.k()),
      tau_lo(1.0),
      tau_hi(p.b()),
      psi_lo(1.0),
      psi_hi(p.a()),
      beta(hamiltonian_normalization(p)) {}

FlowProblem FlowProblem::from_classes(int n, double a, double a0, double b, double b0, double k) {
  const ScaledProblem scaled = scale_parameters(n, a, a0, b, b0, k);
  FlowProblem fp;
  fp.n = n;
  fp.k = k;
  fp.tau_lo = b0;
  fp.tau_hi = b;
  fp.psi_lo = a0;
  fp.psi_hi = a;
  fp.beta = b0 * hamiltonian_normalization(scaled.params);
  return fp;
}

ProblemParams FlowProblem::normalized() const {
  return ProblemParams(n, psi_hi / psi_lo, tau_hi / tau_lo, k * tau_lo * tau_lo / psi_lo);
}

Grid Grid::uniform(double lo, double hi, int cells) {
  if (cells < kMinCells) {
    throw InvalidParameters("grid needs at least " + std::to_string(kMinCells) + " cells, got " +
                            std::to_string(cells));
  }
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidParameters("grid interval must be finite with hi > lo");
  }
  Grid g;
  g.spacing_ = (hi - lo) / cells;
  g.tau_.resize(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i) g.tau_[i] = lo + i * g.spacing_;
  g.tau_.front() = lo;
  g.tau_.back() = hi;
  return g;
}

Grid make_grid(const FlowProblem& problem, int cells) {
  return Grid::uniform(problem.tau_lo, problem.tau_hi, cells);
}

double q_canonical(double a, double x) {
  if (!(x >= 1.0 && x <= a)) {
    std::ostringstream os;
    os << "Q is defined on [1, a] = [1, " << a << "], got x=" << x;
    throw OutOfDomain(os.str());
  }
  return (x - 1.0) * (a - x) / (a - 1.0);
}

QProfile QProfile::canonical(double psi_lo, double psi_hi) {
  if (!(psi_hi > psi_lo)) throw InvalidParameters("mobility range must satisfy hi > lo");
  QProfile q;
  q.kind_ = Kind::Canonical;
  q.lo_ = psi_lo;
  q.hi_ = psi_hi;
  q.span_ = psi_hi - psi_lo;
  q.inv_span_ = 1.0 / q.span_;
  return q;
}

QProfile QProfile::user_table(double psi_lo, double psi_hi, std::vector<double> samples) {
  QProfile q = canonical(psi_lo, psi_hi);
  if (samples.size() < 3) throw InvalidParameters("mobility table needs at least 3 samples");
  if (samples.front() != 0.0 || samples.back() != 0.0) {
    throw InvalidParameters("mobility table must vanish at both ends of the range");
  }
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    if (!(samples[i] > 0.0) || !std::isfinite(samples[i])) {
      throw InvalidParameters("mobility table must be positive inside the range (sample " +
                              std::to_string(i) + ")");
    }
  }
  q.kind_ = Kind::UserTable;
  q.table_ = std::move(samples);
  return q;
}

double QProfile::table_at(double u) const {
  if (!(u > 0.0 && u < span_)) return 0.0;
  const double cells = static_cast<double>(table_.size() - 1);
  const double x = u * inv_span_ * cells;
  auto j = static_cast<std::size_t>(x);
  if (j >= table_.size() - 1) j = table_.size() - 2;
  const double w = x - static_cast<double>(j);
  return (1.0 - w) * table_[j] + w * table_[j + 1];
}

Stencil build_stencil(const FlowProblem& problem, const Grid& grid) {
  const std::size_t size = grid.size();
  const double h = grid.spacing();
  const double m = problem.n - 1.0;
  const auto& tau = grid.tau();

  Stencil st;
  st.lower.assign(size, 0.0);
  st.diag.assign(size, 0.0);
  st.upper.assign(size, 0.0);
  st.forcing.assign(size, 0.0);
  st.drift.assign(size, 0.0);
  st.spacing = h;

  for (std::size_t i = 1; i + 1 < size; ++i) {
    const double tm = 0.5 * (tau[i - 1] + tau[i]);
    const double tp = 0.5 * (tau[i] + tau[i + 1]);
    const double wi = std::pow(tau[i], problem.n - 1);
    const double wm = std::pow(tm, problem.n - 1) / wi;
    const double wp = std::pow(tp, problem.n - 1) / wi;

    const double a_plus = wp * (1.0 / h - m / (2.0 * tp));
    const double a_minus = wm * (1.0 / h + m / (2.0 * tm));
    const double alpha_plus = 1.0 / h + m / (2.0 * tp);
    const double gamma_plus = -1.0 / h + m / (2.0 * tp);
    const double alpha_minus = 1.0 / h + m / (2.0 * tm);
    const double gamma_minus = -1.0 / h + m / (2.0 * tm);
    const double c_plus = m * problem.psi_lo / tp - problem.k * (tp - problem.beta);
    const double c_minus = m * problem.psi_lo / tm - problem.k * (tm - problem.beta);

    st.upper[i] = a_plus * alpha_plus;
    st.diag[i] = a_plus * gamma_plus - a_minus * alpha_minus;
    st.lower[i] = -a_minus * gamma_minus;
    st.forcing[i] = a_plus * c_plus - a_minus * c_minus;
    st.drift[i] = m / tau[i];
  }
  return st;
}

double discrete_energy(const FlowProblem& problem, const Grid& grid,
                       std::span<const double> excess) {
  const auto& tau = grid.tau();
  if (excess.size() != tau.size()) throw InvalidParameters("excess does not match the grid");
  const double h = grid.spacing();
  const double m = problem.n - 1.0;
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < tau.size(); ++i) {
    const double tm = 0.5 * (tau[i] + tau[i + 1]);
    const double psi_mid = problem.psi_lo + 0.5 * (excess[i] + excess[i + 1]);
    const double v = (excess[i + 1] - excess[i]) / h + m * psi_mid / tm - problem.k * (tm - problem.beta);
    e += h * std::pow(tm, problem.n - 1) * v * v;
  }
  return e;
}

}  // namespace mjflow
