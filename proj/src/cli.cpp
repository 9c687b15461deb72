#include "frc/cli.hpp"

#include "frc/aggregation.hpp"
#include "frc/dynamics.hpp"
#include "frc/error.hpp"
#include "frc/frc_engine.hpp"
#include "frc/service.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

namespace frc::cli {
namespace {

struct UsageError {
  std::string message;
};

struct Scenario {
  std::optional<double> loss_mw;
  double event_time_s = 1.0;
  double horizon_s = 60.0;
  double step_s = 0.005;
};

Fleet read_fleet(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw UsageError{fmt::format("fleet file '{}' does not exist", path)};
  }
  return load_fleet_file(path);
}

Scenario read_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError{fmt::format("scenario file '{}' does not exist", path)};
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what(), path);
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "scenario must be an object", "$");
  Scenario s;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_number()) throw Error(ErrorCode::ParseError, "expected a number", key);
    const double v = value.get<double>();
    if (key == "loss_mw") {
      s.loss_mw = v;
    } else if (key == "event_time_s") {
      s.event_time_s = v;
    } else if (key == "horizon_s") {
      s.horizon_s = v;
    } else if (key == "step_s") {
      s.step_s = v;
    } else {
      throw Error(ErrorCode::ParseError, "unknown field", key);
    }
  }
  return s;
}

// Writes through `fn` to the --out file when given, else to stdout.
void emit(const std::string& path, std::ostream& out,
          const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidParams, fmt::format("cannot write '{}'", path), path);
  fn(file);
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string s;
  for (const auto& item : items) {
    if (!s.empty()) s += sep;
    s += item;
  }
  return s;
}

std::vector<double> parse_losses(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError{fmt::format("'{}' is not a number", item)};
    }
  }
  if (out.empty()) throw UsageError{"--losses needs at least one value"};
  return out;
}

void print_report(std::ostream& out, const std::string& prefix, const NadirReport& r) {
  fmt::print(out, "{}nadir_hz={}\n", prefix, r.nadir_hz);
  fmt::print(out, "{}nadir_time_s={}\n", prefix, r.nadir_time_s);
  fmt::print(out, "{}rocof_initial_hz_per_s={}\n", prefix, r.rocof_initial_hz_per_s);
  fmt::print(out, "{}settling_hz={}\n", prefix, r.settling_hz);
  fmt::print(out, "{}ufls_margin_hz={}\n", prefix, r.ufls_margin_hz);
  fmt::print(out, "{}breached={}\n", prefix, r.breached);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frequency response characteristic and nadir assessment", "frcctl"};
  app.require_subcommand(1);

  std::function<int()> action;

  // frc-build
  std::string fleet_path;
  std::string out_path;
  std::optional<double> dense_step;
  auto* build = app.add_subcommand("frc-build", "Assemble the system FRC curve as CSV");
  build->add_option("--fleet", fleet_path, "Fleet JSON file")->required();
  build->add_option("--out", out_path, "Output CSV (default stdout)");
  build->add_option("--dense-step", dense_step, "Also emit rows resampled every N Hz")
      ->check(CLI::PositiveNumber);
  build->callback([&] {
    action = [&] {
      const Fleet fleet = read_fleet(fleet_path);
      const FrcCurve frc = assemble_system_frc(fleet);
      emit(out_path, out, [&](std::ostream& o) { write_curve_csv(o, frc.curve, frc.f0, dense_step); });
      const auto beta = beta_metrics(frc, -0.1);
      fmt::print(err, "breakpoints={}\n", frc.curve.size());
      fmt::print(err, "beta_at_-0.1hz_mw_per_0.1hz={}\n", beta.beta_secant);
      return kOk;
    };
  });

  // frc-update
  std::vector<std::string> toggle_args;
  bool check = false;
  auto* update = app.add_subcommand("frc-update", "Apply commitment toggles to the FRC curve");
  update->add_option("--fleet", fleet_path, "Baseline fleet JSON file")->required();
  update->add_option("--toggle", toggle_args, "id=on|off (repeatable)");
  update->add_option("--out", out_path, "Output CSV (default stdout)");
  update->add_flag("--check", check, "Rebuild from scratch and report the deviation");
  update->callback([&] {
    action = [&] {
      const Fleet fleet = read_fleet(fleet_path);
      std::vector<Toggle> toggles;
      for (const auto& t : toggle_args) toggles.push_back(parse_toggle(t));
      const FrcCurve base = assemble_system_frc(fleet);
      const FrcCurve updated = update_system_frc(base, fleet, toggles);
      emit(out_path, out, [&](std::ostream& o) { write_curve_csv(o, updated.curve, updated.f0); });
      fmt::print(err, "breakpoints={}\n", updated.curve.size());
      if (check) {
        const FrcCurve rebuilt = assemble_system_frc(apply_toggles(fleet, toggles));
        const double dev = max_abs_difference(updated.curve, rebuilt.curve, -2.0, 2.0);
        fmt::print(err, "max_deviation_mw={}\n", dev);
        if (dev > kPointwiseTolMw) {
          fmt::print(err, "error: incremental update disagrees with rebuild\n");
          return kDomainError;
        }
      }
      return kOk;
    };
  });

  // steady
  std::optional<double> loss;
  auto* steady = app.add_subcommand("steady", "Solve the steady-state frequency for a loss");
  steady->add_option("--fleet", fleet_path, "Fleet JSON file")->required();
  steady->add_option("--loss", loss, "Generation loss, MW")->required();
  steady->callback([&] {
    action = [&] {
      const Fleet fleet = read_fleet(fleet_path);
      const FrcCurve frc = assemble_system_frc(fleet);
      SteadyStateResult ss;
      try {
        ss = solve_steady_state(frc, *loss);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TargetUnreachable) throw;
        fmt::print(err, "collapse: available response cannot cover a {} MW loss\n", *loss);
        return kDomainError;
      }
      fmt::print(out, "f_ss_hz={}\n", ss.f_ss);
      fmt::print(out, "df_ss_hz={}\n", ss.df_ss);
      fmt::print(out, "governor_mw={}\n", ss.governor_mw);
      fmt::print(out, "load_relief_mw={}\n", ss.load_relief_mw);
      fmt::print(out, "saturated_units={}\n", join(ss.saturated_unit_ids, ';'));
      return kOk;
    };
  });

  // nadir
  std::string model_kind = "clustered";
  std::string scenario_path;
  std::optional<double> horizon;
  std::optional<double> step;
  auto* nadir = app.add_subcommand("nadir", "Predict the frequency nadir of a loss");
  nadir->add_option("--fleet", fleet_path, "Fleet JSON file")->required();
  nadir->add_option("--loss", loss, "Generation loss, MW");
  nadir->add_option("--scenario", scenario_path, "Scenario JSON file");
  nadir->add_option("--model", model_kind, "clustered|per-unit|both")
      ->check(CLI::IsMember({"clustered", "per-unit", "both"}));
  nadir->add_option("--out", out_path, "Trajectory CSV path");
  nadir->add_option("--horizon", horizon, "Simulated seconds")->check(CLI::PositiveNumber);
  nadir->add_option("--step", step, "Integration step, s")->check(CLI::PositiveNumber);
  nadir->callback([&] {
    action = [&] {
      Scenario sc;
      if (!scenario_path.empty()) sc = read_scenario(scenario_path);
      if (loss) sc.loss_mw = loss;
      if (horizon) sc.horizon_s = *horizon;
      if (step) sc.step_s = *step;
      if (!sc.loss_mw) throw UsageError{"give --loss or a scenario with loss_mw"};
      const Fleet fleet = read_fleet(fleet_path);
      SimConfig config;
      config.step_s = sc.step_s;
      config.horizon_s = sc.horizon_s;
      config.event_time_s = sc.event_time_s;
      const Contingency contingency{*sc.loss_mw, sc.event_time_s};
      const double ufls = fleet.system.ufls_first_stage_hz;

      auto run_model = [&](const ReducedModel& model) { return simulate(model, contingency, config); };
      if (model_kind == "both") {
        const auto clustered = run_model(build_reduced_model(fleet));
        const auto per_unit = run_model(build_per_unit_model(fleet));
        const auto a = extract_metrics(clustered, ufls);
        const auto b = extract_metrics(per_unit, ufls);
        print_report(out, "clustered.", a);
        print_report(out, "per_unit.", b);
        fmt::print(out, "nadir_difference_hz={}\n", a.nadir_hz - b.nadir_hz);
        if (!out_path.empty()) emit(out_path, out, [&](std::ostream& o) { write_trajectory_csv(o, clustered); });
      } else {
        const auto model = model_kind == "per-unit" ? build_per_unit_model(fleet)
                                                    : build_reduced_model(fleet);
        const auto traj = run_model(model);
        print_report(out, "", extract_metrics(traj, ufls));
        if (!out_path.empty()) emit(out_path, out, [&](std::ostream& o) { write_trajectory_csv(o, traj); });
      }
      return kOk;
    };
  });

  // validate
  std::optional<std::string> losses_text;
  auto* validate = app.add_subcommand(
      "validate", "Cross-check simulated settling frequency against the FRC curve");
  validate->add_option("--fleet", fleet_path, "Fleet JSON file")->required();
  validate->add_option("--losses", losses_text, "Comma-separated losses, MW");
  validate->callback([&] {
    action = [&] {
      std::vector<double> losses;
      if (losses_text) losses = parse_losses(*losses_text);
      const Fleet fleet = read_fleet(fleet_path);
      if (!losses_text) {
        const double cap = online_capacity_mw(fleet);
        losses = {0.005 * cap, 0.01 * cap, 0.02 * cap};
      }
      const FrcCurve frc = assemble_system_frc(fleet);
      const ReducedModel model = build_per_unit_model(fleet);
      SimConfig config;
      config.horizon_s = 120.0;
      constexpr double kTolHz = 2e-3;

      bool all_ok = true;
      out << "loss_mw,curve_f_ss_hz,settling_hz,abs_error_hz,status\n";
      for (double l : losses) {
        SteadyStateResult ss;
        try {
          ss = solve_steady_state(frc, l);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::TargetUnreachable) throw;
          fmt::print(err, "warning: {} MW exceeds available response, skipped\n", l);
          fmt::print(out, "{},,,,skipped\n", l);
          continue;
        }
        const auto rep = extract_metrics(simulate(model, {l, config.event_time_s}, config),
                                         fleet.system.ufls_first_stage_hz);
        const double error = std::abs(rep.settling_hz - ss.f_ss);
        const bool ok = error <= kTolHz;
        all_ok = all_ok && ok;
        fmt::print(out, "{},{},{},{},{}\n", l, ss.f_ss, rep.settling_hz, error, ok ? "ok" : "breach");
      }
      return all_ok ? kOk : kDomainError;
    };
  });

  // gen-fleet
  GenSpec spec;
  auto* gen = app.add_subcommand("gen-fleet", "Write a deterministic synthetic fleet");
  gen->add_option("--seed", spec.seed, "RNG seed")->required();
  gen->add_option("--units", spec.n_units, "Synchronous pool size")->check(CLI::PositiveNumber);
  gen->add_option("--renewable", spec.renewable_fraction, "Renewable capacity share")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--capacity", spec.total_capacity_mw, "Total capacity, MW")
      ->check(CLI::PositiveNumber);
  gen->add_option("--dispatch", spec.dispatch_level, "Dispatch as a fraction of pmax")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--synthetic-share", spec.synthetic_share,
                  "Share of renewable units with a synthetic governor")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--damping", spec.load_damping_pu, "Load damping D")->check(CLI::NonNegativeNumber);
  gen->add_option("--deadband-min", spec.deadband_hz.lo, "Lower governor deadband, Hz");
  gen->add_option("--deadband-max", spec.deadband_hz.hi, "Upper governor deadband, Hz");
  gen->add_option("--out", out_path, "Output fleet JSON (default stdout)");
  gen->callback([&] {
    action = [&] {
      Fleet fleet;
      try {
        fleet = generate_fleet(spec);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidSpec) throw UsageError{e.what()};
        throw;
      }
      emit(out_path, out, [&](std::ostream& o) { o << serialize_fleet(fleet); });
      fmt::print(err, "units={}\n", fleet.units.size());
      return kOk;
    };
  });

  // serve
  int port = 8080;
  std::string host = "127.0.0.1";
  auto* srv = app.add_subcommand("serve", "Serve the what-if HTTP API");
  srv->add_option("--fleet", fleet_path, "Fleet JSON file")->required();
  srv->add_option("--port", port, "TCP port");
  srv->add_option("--host", host, "Bind address");
  srv->callback([&] {
    action = [&] {
      const Fleet fleet = read_fleet(fleet_path);
      if (port < 1 || port > 65535) {
        fmt::print(err, "error: port {} is out of range\n", port);
        return kDomainError;
      }
      FleetService service(fleet);
      fmt::print(err, "listening on {}:{}\n", host, port);
      err.flush();
      if (!serve(service, host, port)) {
        fmt::print(err, "error: cannot bind {}:{}\n", host, port);
        return kDomainError;
      }
      return kOk;
    };
  });

  std::vector<std::string> argv_storage{"frcctl"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "usage error: {}\n", e.what());
    return kUsageError;
  }

  try {
    return action ? action() : kUsageError;
  } catch (const UsageError& e) {
    fmt::print(err, "usage error: {}\n", e.message);
    return kUsageError;
  } catch (const Error& e) {
    if (e.subject().empty()) {
      fmt::print(err, "error: {}\n", e.what());
    } else {
      fmt::print(err, "error [{}]: {}\n", e.subject(), e.what());
    }
    return kDomainError;
  }
}

}  // namespace frc::cli
