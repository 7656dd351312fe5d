#include "mjflow/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <sstream>
#include <vector>

#include "mjflow/closed_form.hpp"
#include "mjflow/diagnostics.hpp"
#include "mjflow/flow.hpp"
#include "mjflow/geometry.hpp"
#include "mjflow/io.hpp"
#include "mjflow/params.hpp"

namespace mjflow::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kPotentialHalfCount = 400;

Format resolved_format(const CliConfig& c, Format fallback) { return c.format.value_or(fallback); }

ProblemParams params_of(const CliConfig& c) { return ProblemParams(c.n, c.a, c.b, c.k); }

int do_classify(const CliConfig& c, std::ostream& out) {
  const ProblemParams p = params_of(c);
  const DerivedConstants d = classify(p);
  const double kub = k_upper_bound(c.n, c.a, c.b);
  if (resolved_format(c, Format::Json) == Format::Csv) {
    out << "n,a,b,k,c,c_k,beta_n,ck_plus_k,regime,lambda,k_upper_bound\n"
        << c.n << ',' << io::format_double(c.a) << ',' << io::format_double(c.b) << ','
        << io::format_double(c.k) << ',' << io::format_double(d.c) << ','
        << io::format_double(d.c_k) << ',' << io::format_double(d.beta_n) << ','
        << io::format_double(d.ck_plus_k) << ',' << to_string(d.regime) << ','
        << (d.lambda ? io::format_double(*d.lambda) : "") << ',' << io::format_double(kub)
        << '\n';
    return kExitOk;
  }
  ordered_json j;
  j["n"] = c.n;
  j["a"] = c.a;
  j["b"] = c.b;
  j["k"] = c.k;
  j["c"] = d.c;
  j["c_k"] = d.c_k;
  j["beta_n"] = d.beta_n;
  j["ck_plus_k"] = d.ck_plus_k;
  j["regime"] = std::string(to_string(d.regime));
  if (d.lambda) j["lambda"] = *d.lambda;
  j["k_upper_bound"] = kub;
  out << j.dump(2) << '\n';
  return kExitOk;
}

int do_lambda(const CliConfig& c, std::ostream& out) {
  const ProblemParams p = params_of(c);
  double lambda = 0.0;
  try {
    lambda = solve_lambda(p);
  } catch (const RegimeMismatch& e) {
    throw UsageError(std::string("lambda: ") + e.what());
  }
  const double residual = std::abs(lambda_equation(p, lambda));
  if (resolved_format(c, Format::Json) == Format::Csv) {
    out << "lambda,residual\n" << io::format_double(lambda) << ',' << io::format_double(residual)
        << '\n';
    return kExitOk;
  }
  ordered_json j;
  j["lambda"] = lambda;
  j["residual"] = residual;
  out << j.dump(2) << '\n';
  return kExitOk;
}

int do_closed_form(const CliConfig& c, std::ostream& out) {
  const ProblemParams p = params_of(c);
  const ClosedFormProfile profile = c.s ? psi_s(p, *c.s) : psi_stable(p);
  if (resolved_format(c, Format::Csv) == Format::Json) {
    ordered_json j;
    j["s"] = profile.s();
    j["tau"] = ordered_json::array();
    j["psi"] = ordered_json::array();
    j["psi_prime"] = ordered_json::array();
    for (int i = 0; i <= c.grid_size; ++i) {
      const double tau =
          i == c.grid_size ? p.b() : profile.s() + (p.b() - profile.s()) * i / c.grid_size;
      j["tau"].push_back(tau);
      j["psi"].push_back(profile.value(tau));
      j["psi_prime"].push_back(profile.slope(tau));
    }
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  io::write_closed_form_csv(out, profile, c.grid_size);
  return kExitOk;
}

InitKind init_kind(const CliConfig& c, Regime regime) {
  switch (c.init) {
    case InitChoice::Subcritical: return InitKind::SubcriticalConcave;
    case InitChoice::Supercritical: return InitKind::SupercriticalPerturbed;
    case InitChoice::Line: return InitKind::StraightLine;
    case InitChoice::Auto: break;
  }
  return regime == Regime::Stable ? InitKind::SupercriticalPerturbed : InitKind::SubcriticalConcave;
}

int do_flow(const CliConfig& c, std::ostream& out, std::ostream& err) {
  const ProblemParams p = params_of(c);
  const FlowProblem problem(p);
  const Grid grid = make_grid(problem, c.grid_size);
  FlowConfig cfg;
  cfg.cfl = c.cfl;
  cfg.t_max = c.t_max;
  cfg.tol = c.tol;
  cfg.snapshot_interval = c.snapshot_interval;
  cfg.validate();
  const DerivedConstants d = classify(p);
  FlowState init = [&] {
    try {
      return initial_profile(problem, grid, init_kind(c, d.regime));
    } catch (const RegimeMismatch& e) {
      throw UsageError(std::string("--init: ") + e.what());
    }
  }();

  const std::filesystem::path dir(c.out_dir);
  std::filesystem::create_directories(dir);
  const BackgroundProfile bg(p.a());
  const std::vector<double> s_grid = symmetric_s_grid(kPotentialHalfCount);
  auto write_snapshot = [&](const FlowState& s) {
    std::ostringstream os;
    io::write_snapshot_csv(os, problem, s);
    io::write_file(dir / io::snapshot_file_name(s.t()), os.str());
    if (c.potentials) {
      std::ostringstream ps;
      io::write_potential_csv(ps, normalized_potential(bg, s, s_grid));
      std::string name = io::snapshot_file_name(s.t());
      name.replace(0, 4, "pot");
      io::write_file(dir / name, ps.str());
    }
  };

  Trajectory traj;
  try {
    traj = run(problem, cfg, init, write_snapshot);
  } catch (const FlowFailure& e) {
    write_snapshot(e.last_good());
    err << "flow failed: " << e.what() << " (last good state written at t="
        << io::format_double(e.last_good().t()) << ")\n";
    return kExitNumerical;
  }

  const std::string report = to_json(convergence_report(p, traj)) + "\n";
  io::write_file(dir / "report.json", report);
  out << report;
  return kExitOk;
}

struct SweepRow {
  ProblemParams params;
  std::optional<DerivedConstants> derived;
  std::string error;
};

int do_sweep(const CliConfig& c, std::ostream& out, std::ostream& err) {
  if (c.count < 1) throw UsageError("--count must be >= 1");
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(c.count));
  for (int i = 0; i < c.count; ++i) {
    const double v = c.count == 1 ? c.from : c.from + (c.to - c.from) * i / (c.count - 1);
    double a = c.a, b = c.b, k = c.k;
    (c.vary == 'a' ? a : c.vary == 'b' ? b : k) = v;
    try {
      rows.push_back({ProblemParams(c.n, a, b, k), std::nullopt, {}});
    } catch (const InvalidParameters& e) {
      throw UsageError("sweep point " + std::to_string(i) + ": " + e.what());
    }
  }

  const auto count = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      rows[i].derived = classify(rows[i].params);
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  }

  bool failed = false;
  if (resolved_format(c, Format::Csv) == Format::Json) {
    ordered_json arr = ordered_json::array();
    for (const SweepRow& r : rows) {
      ordered_json j;
      j["n"] = r.params.n();
      j["a"] = r.params.a();
      j["b"] = r.params.b();
      j["k"] = r.params.k();
      if (r.derived) {
        j["c_k"] = r.derived->c_k;
        j["ck_plus_k"] = r.derived->ck_plus_k;
        j["regime"] = std::string(to_string(r.derived->regime));
        j["lambda"] = r.derived->lambda ? ordered_json(*r.derived->lambda) : ordered_json(nullptr);
      } else {
        failed = true;
        j["error"] = r.error;
      }
      arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
  } else {
    out << "n,a,b,k,c_k,ck_plus_k,regime,lambda\n";
    for (const SweepRow& r : rows) {
      out << r.params.n() << ',' << io::format_double(r.params.a()) << ','
          << io::format_double(r.params.b()) << ',' << io::format_double(r.params.k()) << ',';
      if (r.derived) {
        out << io::format_double(r.derived->c_k) << ','
            << io::format_double(r.derived->ck_plus_k) << ',' << to_string(r.derived->regime)
            << ',' << (r.derived->lambda ? io::format_double(*r.derived->lambda) : "") << '\n';
      } else {
        failed = true;
        out << ",,error,\n";
      }
    }
  }
  for (const SweepRow& r : rows) {
    if (!r.derived) err << "sweep point failed: " << r.error << '\n';
  }
  return failed ? kExitNumerical : kExitOk;
}

}  // namespace

CliConfig parse(int argc, const char* const* argv) {
  CliConfig c;
  CLI::App app("Modified J-flow under Calabi symmetry: regimes, closed forms and flow runs",
               "mjflow");
  app.set_config("--config", "", "key=value file; flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);

  app.add_option("--n", c.n, "complex dimension")->required();
  app.add_option("--a", c.a, "class of the reference metric, a[E_inf] - [E_0]")->required();
  app.add_option("--b", c.b, "class of the evolving metric, b[E_inf] - [E_0]")->required();
  app.add_option("--k", c.k, "weight of the vector field")->required();
  app.add_option("--grid-size", c.grid_size, "cells of the tau grid")->capture_default_str();
  app.add_option("--t-max", c.t_max, "final flow time")->capture_default_str();
  app.add_option("--tol", c.tol, "steady-state threshold on max|Q P|")->capture_default_str();
  app.add_option("--snapshot-interval", c.snapshot_interval, "flow time between snapshots")->capture_default_str();
  app.add_option("--cfl", c.cfl, "time-step safety factor")->capture_default_str();
  std::string init = "auto";
  app.add_option("--init", init, "initial data")
      ->check(CLI::IsMember({"auto", "subcritical", "supercritical", "line"}))
      ->capture_default_str();
  app.add_option("--out-dir", c.out_dir, "directory for flow output")
      ->envname("MJFLOW_OUT_DIR")
      ->capture_default_str();
  std::string format;
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
  double s = 0.0;
  CLI::Option* s_opt = app.add_option("--s", s, "closed-form: left end of psi_s");
  app.add_flag("--potentials", c.potentials, "flow: also write potential slices");
  std::string vary = "a";
  app.add_option("--vary", vary, "sweep: parameter to vary")
      ->check(CLI::IsMember({"a", "b", "k"}))
      ->capture_default_str();
  CLI::Option* from_opt = app.add_option("--from", c.from, "sweep: first value");
  CLI::Option* to_opt = app.add_option("--to", c.to, "sweep: last value");
  app.add_option("--count", c.count, "sweep: number of points")->capture_default_str();

  const std::map<std::string, Command> names = {{"classify", Command::Classify},
                                                {"lambda", Command::Lambda},
                                                {"closed-form", Command::ClosedForm},
                                                {"flow", Command::Flow},
                                                {"sweep", Command::Sweep}};
  const std::map<std::string, std::string> help = {
      {"classify", "print the regime constants as JSON"},
      {"lambda", "solve for the blow-up slope lambda"},
      {"closed-form", "tabulate psi_tilde, or psi_s with --s"},
      {"flow", "run the flow and write snapshots and report.json"},
      {"sweep", "classify a range of parameters"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, cmd] : names) subs[name] = app.add_subcommand(name, help.at(name))->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) c.command = names.at(name);
  }
  c.init = init == "subcritical"     ? InitChoice::Subcritical
           : init == "supercritical" ? InitChoice::Supercritical
           : init == "line"          ? InitChoice::Line
                                     : InitChoice::Auto;
  if (!format.empty()) c.format = format == "csv" ? Format::Csv : Format::Json;
  if (s_opt->count() > 0) c.s = s;
  c.vary = vary.front();
  if (c.command == Command::Sweep && (from_opt->count() == 0 || to_opt->count() == 0)) {
    throw UsageError("sweep needs --from and --to");
  }
  return c;
}

int execute(const CliConfig& c, std::ostream& out, std::ostream& err) {
  switch (c.command) {
    case Command::Classify: return do_classify(c, out);
    case Command::Lambda: return do_lambda(c, out);
    case Command::ClosedForm: return do_closed_form(c, out);
    case Command::Flow: return do_flow(c, out, err);
    case Command::Sweep: return do_sweep(c, out, err);
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return execute(parse(argc, argv), out, err);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kExitOk;
  } catch (const std::invalid_argument& e) {  // UsageError, InvalidParameters
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const OutOfDomain& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace mjflow::cli
