#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mjflow::cli {

enum class Command { Classify, Lambda, ClosedForm, Flow, Sweep };
enum class InitChoice { Auto, Subcritical, Supercritical, Line };
enum class Format { Csv, Json };

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

struct CliConfig {
  Command command = Command::Classify;
  int n = 0;
  double a = 0.0;
  double b = 0.0;
  double k = 0.0;
  int grid_size = 400;
  double t_max = 200.0;
  double tol = 1e-8;
  double snapshot_interval = 1.0;
  double cfl = 0.4;
  InitChoice init = InitChoice::Auto;
  std::string out_dir = "mjflow_out";
  std::optional<Format> format;  // per-command default when empty
  std::optional<double> s;       // closed-form: left end of psi_s
  bool potentials = false;       // flow: also write pot_<t>.csv slices
  char vary = 'a';               // sweep
  double from = 0.0;
  double to = 0.0;
  int count = 1;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Resolves flags, an optional --config key=value file and MJFLOW_OUT_DIR.
/// Precedence: flags, then the config file, then the environment, then defaults.
/// Throws UsageError (with the offending flag in the message) or HelpRequested.
CliConfig parse(int argc, const char* const* argv);

/// Exit code per kExit*.
int execute(const CliConfig& config, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mjflow::cli
