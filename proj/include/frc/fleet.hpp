#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace frc {

enum class Technology { Steam, Gas, Hydro, Nuclear, Wind, Solar, Storage };
enum class ModelType { SteamReheat, GasCt, Hydro, Synthetic, None };
enum class Status { On, Off };

std::string_view to_string(Technology t);
std::string_view to_string(ModelType m);
std::string_view to_string(Status s);
std::optional<Technology> parse_technology(std::string_view s);
std::optional<ModelType> parse_model_type(std::string_view s);
std::optional<Status> parse_status(std::string_view s);

/// Inverter-based technologies carry no rotating mass of their own.
bool is_inverter_based(Technology t);

/// Governor/turbine time constants. Only the fields belonging to the unit's
/// model type are meaningful; the rest keep their defaults.
struct TurbineParams {
  double t_g_s = 0.2;    ///< governor servo (STEAM_REHEAT, GAS_CT, HYDRO)
  double t_r_s = 8.0;    ///< reheat lag (STEAM_REHEAT)
  double f_h = 0.3;      ///< high-pressure fraction (STEAM_REHEAT)
  double t_c_s = 0.4;    ///< combustor/turbine lag (GAS_CT)
  double t_w_s = 1.0;    ///< water starting time (HYDRO)
  double t_inv_s = 0.05; ///< inverter response lag (SYNTHETIC)
  /// Delay between the contingency and the block starting to respond.
  double activation_delay_s = 0.0;

  static TurbineParams defaults(ModelType m);

  friend bool operator==(const TurbineParams&, const TurbineParams&) = default;
};

struct SystemParams {
  double f0 = 60.0;
  double load_mw = 0.0;
  double load_damping_pu = 1.0;
  /// Explicit power base. When absent, the base is the total rated MVA of the
  /// fleet's synchronous units (see `system_base_mva`).
  std::optional<double> s_base_mva;
  double ufls_first_stage_hz = 59.3;

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

struct Unit {
  std::string id;
  Technology technology = Technology::Steam;
  ModelType model_type = ModelType::SteamReheat;
  double rated_mva = 0.0;
  double pgen_mw = 0.0;
  double pmax_mw = 0.0;
  double pmin_mw = 0.0;
  double inertia_h_s = 0.0;
  double droop_pu = 0.05;
  double deadband_hz = 0.0;
  TurbineParams turbine_params;
  Status status = Status::On;
  bool always_on = false;

  double headroom_up_mw() const { return pmax_mw - pgen_mw; }
  double headroom_down_mw() const { return pgen_mw - pmin_mw; }
  bool is_on() const { return status == Status::On; }
  bool has_governor() const { return model_type != ModelType::None; }

  friend bool operator==(const Unit&, const Unit&) = default;
};

struct Fleet {
  SystemParams system;
  std::vector<Unit> units;

  const Unit* find(std::string_view id) const;

  friend bool operator==(const Fleet&, const Fleet&) = default;
};

/// Power base used for per-unit quantities: the explicit override, else total
/// rated MVA of synchronous units (online or not, so commitment changes never
/// rescale clustered blocks), else total rated MVA, else the load.
/// Throws ZeroBase when all of these are zero.
double system_base_mva(const Fleet& fleet);

struct Diagnostic {
  std::string unit_id;  ///< empty for system-level findings
  std::string invariant;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Every invariant breach in the fleet; empty iff the fleet is valid.
std::vector<Diagnostic> validate_fleet(const Fleet& fleet);

/// Parses and validates the JSON fleet document. Throws ParseError (subject is
/// the JSON path) or ValidationError (subject is the unit id).
Fleet parse_fleet(std::string_view text);
Fleet load_fleet_file(const std::string& path);

/// Canonical JSON form; `parse_fleet(serialize_fleet(f)) == f` for valid fleets.
std::string serialize_fleet(const Fleet& fleet);

struct Toggle {
  std::string id;
  Status status = Status::On;

  friend bool operator==(const Toggle&, const Toggle&) = default;
};

/// Parses "id=on" / "id=off".
Toggle parse_toggle(std::string_view text);

/// New fleet with the statuses changed, last write wins. Throws UnknownUnit.
Fleet apply_toggles(const Fleet& fleet, const std::vector<Toggle>& toggles);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Recipe for a synthetic fleet. The synchronous pool depends only on the
/// seed, unit count, capacity and parameter ranges; `renewable_fraction`
/// removes pool units from the end (the last one derated) and adds
/// inverter-based capacity, so sweeps over penetration are nested.
struct GenSpec {
  int n_units = 100;
  double renewable_fraction = 0.0;
  double total_capacity_mw = 10000.0;
  double dispatch_level = 0.8;
  double synthetic_share = 0.0;  ///< fraction of renewable units given a synthetic governor
  double always_on_fraction = 0.7;
  double load_damping_pu = 1.0;
  double f0 = 60.0;
  double ufls_first_stage_hz = 59.3;
  Range unit_size{0.5, 1.5};  ///< relative size weights
  Range droop_pu{0.04, 0.06};
  Range deadband_hz{0.017, 0.036};  ///< draws are rounded to 1 mHz
  Range inertia_h_s{2.0, 6.0};
  Range t_g_s{0.1, 0.5};
  Range t_r_s{5.0, 10.0};
  Range f_h{0.25, 0.35};
  Range t_c_s{0.3, 0.6};
  Range t_w_s{0.8, 1.5};
  Range t_inv_s{0.03, 0.1};
  std::uint64_t seed = 1;
};

/// Deterministic in `spec`. Throws InvalidSpec.
Fleet generate_fleet(const GenSpec& spec);

/// Sum of pmax over online units.
double online_capacity_mw(const Fleet& fleet);

}  // namespace frc
