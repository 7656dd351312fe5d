#pragma once

// CSV output with 17 significant digits, so files round-trip and repeat byte for byte.

#include <filesystem>
#include <ostream>
#include <string>

#include "mjflow/closed_form.hpp"
#include "mjflow/flow.hpp"
#include "mjflow/geometry.hpp"

namespace mjflow::io {

std::string format_double(double v);

/// tau,psi,psi_prime,eta,trace
void write_snapshot_csv(std::ostream& os, const FlowProblem& problem, const FlowState& state);
/// s,g_prime,f_prime,f_hat
void write_potential_csv(std::ostream& os, const PotentialSlice& slice);
/// tau,psi,psi_prime on cells + 1 uniform nodes of [s, b]
void write_closed_form_csv(std::ostream& os, const ClosedFormProfile& profile, int cells);

/// snap_<t with six decimals>.csv
std::string snapshot_file_name(double t);

/// Writes text to path, throwing std::runtime_error on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace mjflow::io
