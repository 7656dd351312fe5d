#include "mjflow/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mjflow::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_snapshot_csv(std::ostream& os, const FlowProblem& problem, const FlowState& state) {
  const auto& tau = state.grid().tau();
  const auto slope = slope_profile(state);
  const auto eta = eta_profile(problem, state);
  const auto trace = trace_profile(problem, state);
  os << "tau,psi,psi_prime,eta,trace\n";
  for (std::size_t i = 0; i < tau.size(); ++i) {
    os << format_double(tau[i]) << ',' << format_double(state.psi(i)) << ','
       << format_double(slope[i]) << ',' << format_double(eta[i]) << ','
       << format_double(trace[i]) << '\n';
  }
}

void write_potential_csv(std::ostream& os, const PotentialSlice& slice) {
  os << "s,g_prime,f_prime,f_hat\n";
  for (std::size_t i = 0; i < slice.s_grid.size(); ++i) {
    os << format_double(slice.s_grid[i]) << ',' << format_double(slice.g_prime[i]) << ','
       << format_double(slice.fprime[i]) << ',' << format_double(slice.fhat[i]) << '\n';
  }
}

void write_closed_form_csv(std::ostream& os, const ClosedFormProfile& profile, int cells) {
  if (cells < 1) throw InvalidParameters("closed-form output needs at least one cell");
  const double lo = profile.s();
  const double hi = profile.params().b();
  os << "tau,psi,psi_prime\n";
  for (int i = 0; i <= cells; ++i) {
    const double tau = i == cells ? hi : lo + (hi - lo) * i / cells;
    os << format_double(tau) << ',' << format_double(profile.value(tau)) << ','
       << format_double(profile.slope(tau)) << '\n';
  }
}

std::string snapshot_file_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snap_%.6f.csv", t);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace mjflow::io
