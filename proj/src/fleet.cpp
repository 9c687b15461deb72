#include "frc/fleet.hpp"

#include "frc/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <unordered_set>

namespace frc {
namespace {

constexpr std::array<std::pair<Technology, std::string_view>, 7> kTechnologies{{
    {Technology::Steam, "steam"},
    {Technology::Gas, "gas"},
    {Technology::Hydro, "hydro"},
    {Technology::Nuclear, "nuclear"},
    {Technology::Wind, "wind"},
    {Technology::Solar, "solar"},
    {Technology::Storage, "storage"},
}};

constexpr std::array<std::pair<ModelType, std::string_view>, 5> kModelTypes{{
    {ModelType::SteamReheat, "STEAM_REHEAT"},
    {ModelType::GasCt, "GAS_CT"},
    {ModelType::Hydro, "HYDRO"},
    {ModelType::Synthetic, "SYNTHETIC"},
    {ModelType::None, "NONE"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E e) {
  for (const auto& [value, name] : table) {
    if (value == e) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table,
                        std::string_view s) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

void check_turbine(const Unit& u, std::vector<Diagnostic>& out) {
  const auto& tp = u.turbine_params;
  auto positive = [&](double v, std::string_view name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      out.push_back({u.id, fmt::format("turbine_params.{} > 0", name)});
    }
  };
  switch (u.model_type) {
    case ModelType::SteamReheat:
      positive(tp.t_g_s, "t_g_s");
      positive(tp.t_r_s, "t_r_s");
      if (!(tp.f_h >= 0.0 && tp.f_h <= 1.0)) {
        out.push_back({u.id, "turbine_params.f_h in [0,1]"});
      }
      break;
    case ModelType::GasCt:
      positive(tp.t_g_s, "t_g_s");
      positive(tp.t_c_s, "t_c_s");
      break;
    case ModelType::Hydro:
      positive(tp.t_g_s, "t_g_s");
      positive(tp.t_w_s, "t_w_s");
      break;
    case ModelType::Synthetic:
      positive(tp.t_inv_s, "t_inv_s");
      break;
    case ModelType::None:
      break;
  }
  if (!(tp.activation_delay_s >= 0.0) || !std::isfinite(tp.activation_delay_s)) {
    out.push_back({u.id, "turbine_params.activation_delay_s >= 0"});
  }
}

}  // namespace

std::string_view to_string(Technology t) { return name_of(kTechnologies, t); }
std::string_view to_string(ModelType m) { return name_of(kModelTypes, m); }
std::string_view to_string(Status s) { return s == Status::On ? "on" : "off"; }

std::optional<Technology> parse_technology(std::string_view s) { return lookup(kTechnologies, s); }
std::optional<ModelType> parse_model_type(std::string_view s) { return lookup(kModelTypes, s); }
std::optional<Status> parse_status(std::string_view s) {
  if (s == "on") return Status::On;
  if (s == "off") return Status::Off;
  return std::nullopt;
}

bool is_inverter_based(Technology t) {
  return t == Technology::Wind || t == Technology::Solar || t == Technology::Storage;
}

TurbineParams TurbineParams::defaults(ModelType m) {
  TurbineParams tp;
  switch (m) {
    case ModelType::SteamReheat:
      tp.t_g_s = 0.2;
      break;
    case ModelType::GasCt:
    case ModelType::Hydro:
      tp.t_g_s = 0.5;
      break;
    case ModelType::Synthetic:
    case ModelType::None:
      break;
  }
  return tp;
}

const Unit* Fleet::find(std::string_view id) const {
  auto it = std::find_if(units.begin(), units.end(), [&](const Unit& u) { return u.id == id; });
  return it == units.end() ? nullptr : &*it;
}

double system_base_mva(const Fleet& fleet) {
  if (fleet.system.s_base_mva) {
    if (!(*fleet.system.s_base_mva > 0.0)) {
      throw Error(ErrorCode::ZeroBase, "s_base_mva must be positive");
    }
    return *fleet.system.s_base_mva;
  }
  double synchronous = 0.0;
  double total = 0.0;
  for (const auto& u : fleet.units) {
    total += u.rated_mva;
    if (!is_inverter_based(u.technology)) synchronous += u.rated_mva;
  }
  if (synchronous > 0.0) return synchronous;
  if (total > 0.0) return total;
  if (fleet.system.load_mw > 0.0) return fleet.system.load_mw;
  throw Error(ErrorCode::ZeroBase, "no rated capacity or load to derive a power base from");
}

std::vector<Diagnostic> validate_fleet(const Fleet& fleet) {
  std::vector<Diagnostic> out;
  const auto& sys = fleet.system;
  if (!(sys.f0 > 0.0) || !std::isfinite(sys.f0)) out.push_back({"", "system.f0 > 0"});
  if (!(sys.load_mw >= 0.0) || !std::isfinite(sys.load_mw)) {
    out.push_back({"", "system.load_mw >= 0"});
  }
  if (!(sys.load_damping_pu >= 0.0) || !std::isfinite(sys.load_damping_pu)) {
    out.push_back({"", "system.load_damping_pu >= 0"});
  }
  if (sys.s_base_mva && (!(*sys.s_base_mva > 0.0) || !std::isfinite(*sys.s_base_mva))) {
    out.push_back({"", "system.s_base_mva > 0"});
  }
  if (!(sys.ufls_first_stage_hz < sys.f0) || !std::isfinite(sys.ufls_first_stage_hz)) {
    out.push_back({"", "system.ufls_first_stage_hz < f0"});
  }

  std::unordered_set<std::string> seen;
  for (const auto& u : fleet.units) {
    if (u.id.empty()) out.push_back({u.id, "id non-empty"});
    if (!seen.insert(u.id).second) out.push_back({u.id, "duplicate id"});
    for (double v : {u.rated_mva, u.pgen_mw, u.pmax_mw, u.pmin_mw, u.inertia_h_s, u.droop_pu,
                     u.deadband_hz}) {
      if (!std::isfinite(v)) {
        out.push_back({u.id, "numeric fields finite"});
        break;
      }
    }
    if (!(u.rated_mva > 0.0)) out.push_back({u.id, "rated_mva > 0"});
    if (!(u.pmin_mw <= u.pgen_mw)) out.push_back({u.id, "pmin_mw <= pgen_mw"});
    if (!(u.pgen_mw <= u.pmax_mw)) out.push_back({u.id, "pgen_mw <= pmax_mw"});
    if (!(u.pmax_mw <= u.rated_mva)) out.push_back({u.id, "pmax_mw <= rated_mva"});
    if (u.has_governor() && !(u.droop_pu > 0.0)) out.push_back({u.id, "droop_pu > 0"});
    if (!(u.deadband_hz >= 0.0)) out.push_back({u.id, "deadband_hz >= 0"});
    if (!(u.inertia_h_s >= 0.0)) out.push_back({u.id, "inertia_h_s >= 0"});
    check_turbine(u, out);
  }
  return out;
}

Toggle parse_toggle(std::string_view text) {
  const auto eq = text.rfind('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error(ErrorCode::ParseError, fmt::format("toggle '{}' is not id=on|off", text),
                std::string(text));
  }
  const auto status = parse_status(text.substr(eq + 1));
  if (!status) {
    throw Error(ErrorCode::ParseError, fmt::format("toggle '{}' is not id=on|off", text),
                std::string(text));
  }
  return Toggle{std::string(text.substr(0, eq)), *status};
}

Fleet apply_toggles(const Fleet& fleet, const std::vector<Toggle>& toggles) {
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < fleet.units.size(); ++i) index.emplace(fleet.units[i].id, i);
  Fleet out = fleet;
  for (const auto& t : toggles) {
    auto it = index.find(t.id);
    if (it == index.end()) {
      throw Error(ErrorCode::UnknownUnit, fmt::format("unknown unit '{}'", t.id), t.id);
    }
    out.units[it->second].status = t.status;
  }
  return out;
}

double online_capacity_mw(const Fleet& fleet) {
  double total = 0.0;
  for (const auto& u : fleet.units) {
    if (u.is_on()) total += u.pmax_mw;
  }
  return total;
}

}  // namespace frc
