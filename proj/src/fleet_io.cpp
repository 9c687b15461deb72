#include "frc/error.hpp"
#include "frc/fleet.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace frc {
namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& path, const std::string& reason) {
  throw Error(ErrorCode::ParseError, fmt::format("{}: {}", path, reason), path);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) parse_error(path.empty() ? key : path + "." + key, "unknown field");
  }
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) parse_error(path, "expected an object");
  return j;
}

double get_number(const json& obj, const std::string& path, std::string_view key) {
  const std::string p = path + "." + std::string(key);
  auto it = obj.find(key);
  if (it == obj.end()) parse_error(p, "missing required field");
  if (!it->is_number()) parse_error(p, "expected a number");
  return it->get<double>();
}

double get_number_or(const json& obj, const std::string& path, std::string_view key,
                     double fallback) {
  return obj.contains(key) ? get_number(obj, path, key) : fallback;
}

std::string get_string(const json& obj, const std::string& path, std::string_view key) {
  const std::string p = path + "." + std::string(key);
  auto it = obj.find(key);
  if (it == obj.end()) parse_error(p, "missing required field");
  if (!it->is_string()) parse_error(p, "expected a string");
  return it->get<std::string>();
}

TurbineParams parse_turbine(const json& j, const std::string& path, ModelType type) {
  require_object(j, path);
  TurbineParams tp = TurbineParams::defaults(type);
  switch (type) {
    case ModelType::SteamReheat:
      reject_unknown(j, path, {"t_g_s", "t_r_s", "f_h", "activation_delay_s"});
      tp.t_g_s = get_number_or(j, path, "t_g_s", tp.t_g_s);
      tp.t_r_s = get_number_or(j, path, "t_r_s", tp.t_r_s);
      tp.f_h = get_number_or(j, path, "f_h", tp.f_h);
      break;
    case ModelType::GasCt:
      reject_unknown(j, path, {"t_g_s", "t_c_s", "activation_delay_s"});
      tp.t_g_s = get_number_or(j, path, "t_g_s", tp.t_g_s);
      tp.t_c_s = get_number_or(j, path, "t_c_s", tp.t_c_s);
      break;
    case ModelType::Hydro:
      reject_unknown(j, path, {"t_g_s", "t_w_s", "activation_delay_s"});
      tp.t_g_s = get_number_or(j, path, "t_g_s", tp.t_g_s);
      tp.t_w_s = get_number_or(j, path, "t_w_s", tp.t_w_s);
      break;
    case ModelType::Synthetic:
      reject_unknown(j, path, {"t_inv_s", "activation_delay_s"});
      tp.t_inv_s = get_number_or(j, path, "t_inv_s", tp.t_inv_s);
      break;
    case ModelType::None:
      reject_unknown(j, path, {});
      break;
  }
  tp.activation_delay_s = get_number_or(j, path, "activation_delay_s", tp.activation_delay_s);
  return tp;
}

json turbine_to_json(const TurbineParams& tp, ModelType type) {
  json j = json::object();
  switch (type) {
    case ModelType::SteamReheat:
      j["t_g_s"] = tp.t_g_s;
      j["t_r_s"] = tp.t_r_s;
      j["f_h"] = tp.f_h;
      break;
    case ModelType::GasCt:
      j["t_g_s"] = tp.t_g_s;
      j["t_c_s"] = tp.t_c_s;
      break;
    case ModelType::Hydro:
      j["t_g_s"] = tp.t_g_s;
      j["t_w_s"] = tp.t_w_s;
      break;
    case ModelType::Synthetic:
      j["t_inv_s"] = tp.t_inv_s;
      break;
    case ModelType::None:
      return j;
  }
  if (tp.activation_delay_s != 0.0) j["activation_delay_s"] = tp.activation_delay_s;
  return j;
}

Unit parse_unit(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path,
                 {"id", "technology", "model_type", "rated_mva", "pgen_mw", "pmax_mw", "pmin_mw",
                  "inertia_h_s", "droop_pu", "deadband_hz", "turbine_params", "status",
                  "always_on"});
  Unit u;
  u.id = get_string(j, path, "id");

  const auto tech = get_string(j, path, "technology");
  auto t = parse_technology(tech);
  if (!t) parse_error(path + ".technology", fmt::format("unknown technology '{}'", tech));
  u.technology = *t;

  const auto model = get_string(j, path, "model_type");
  auto m = parse_model_type(model);
  if (!m) parse_error(path + ".model_type", fmt::format("unknown model_type '{}'", model));
  u.model_type = *m;

  u.rated_mva = get_number(j, path, "rated_mva");
  u.pgen_mw = get_number(j, path, "pgen_mw");
  u.pmax_mw = get_number(j, path, "pmax_mw");
  u.pmin_mw = get_number(j, path, "pmin_mw");
  u.inertia_h_s = get_number_or(j, path, "inertia_h_s", 0.0);
  u.droop_pu = get_number_or(j, path, "droop_pu", u.droop_pu);
  u.deadband_hz = get_number_or(j, path, "deadband_hz", 0.0);
  u.turbine_params = j.contains("turbine_params")
                         ? parse_turbine(j["turbine_params"], path + ".turbine_params", u.model_type)
                         : TurbineParams::defaults(u.model_type);

  const auto status = get_string(j, path, "status");
  auto s = parse_status(status);
  if (!s) parse_error(path + ".status", fmt::format("status must be on|off, got '{}'", status));
  u.status = *s;

  if (j.contains("always_on")) {
    if (!j["always_on"].is_boolean()) parse_error(path + ".always_on", "expected a boolean");
    u.always_on = j["always_on"].get<bool>();
  }
  return u;
}

SystemParams parse_system(const json& j) {
  const std::string path = "system";
  require_object(j, path);
  reject_unknown(j, path,
                 {"f0", "load_mw", "load_damping_pu", "s_base_mva", "ufls_first_stage_hz"});
  SystemParams sys;
  sys.f0 = get_number_or(j, path, "f0", sys.f0);
  sys.load_mw = get_number(j, path, "load_mw");
  sys.load_damping_pu = get_number(j, path, "load_damping_pu");
  if (j.contains("s_base_mva")) sys.s_base_mva = get_number(j, path, "s_base_mva");
  sys.ufls_first_stage_hz = get_number_or(j, path, "ufls_first_stage_hz", sys.ufls_first_stage_hz);
  return sys;
}

}  // namespace

Fleet parse_fleet(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_error("$", e.what());
  }
  if (!doc.is_object()) parse_error("$", "expected a JSON object");
  reject_unknown(doc, "", {"system", "units"});
  if (!doc.contains("system")) parse_error("system", "missing required field");
  if (!doc.contains("units")) parse_error("units", "missing required field");
  if (!doc["units"].is_array()) parse_error("units", "expected an array");

  Fleet fleet;
  fleet.system = parse_system(doc["system"]);
  const auto& units = doc["units"];
  fleet.units.reserve(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    fleet.units.push_back(parse_unit(units[i], fmt::format("units[{}]", i)));
  }

  const auto diagnostics = validate_fleet(fleet);
  if (!diagnostics.empty()) {
    std::string message;
    for (const auto& d : diagnostics) {
      if (!message.empty()) message += "; ";
      message += d.unit_id.empty() ? d.invariant : fmt::format("{}: {}", d.unit_id, d.invariant);
    }
    throw Error(ErrorCode::ValidationError, message, diagnostics.front().unit_id);
  }
  return fleet;
}

Fleet load_fleet_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::ParseError, fmt::format("cannot open fleet file '{}'", path), path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_fleet(buffer.str());
}

std::string serialize_fleet(const Fleet& fleet) {
  json sys = {
      {"f0", fleet.system.f0},
      {"load_mw", fleet.system.load_mw},
      {"load_damping_pu", fleet.system.load_damping_pu},
      {"ufls_first_stage_hz", fleet.system.ufls_first_stage_hz},
  };
  if (fleet.system.s_base_mva) sys["s_base_mva"] = *fleet.system.s_base_mva;

  json units = json::array();
  for (const auto& u : fleet.units) {
    units.push_back({
        {"id", u.id},
        {"technology", to_string(u.technology)},
        {"model_type", to_string(u.model_type)},
        {"rated_mva", u.rated_mva},
        {"pgen_mw", u.pgen_mw},
        {"pmax_mw", u.pmax_mw},
        {"pmin_mw", u.pmin_mw},
        {"inertia_h_s", u.inertia_h_s},
        {"droop_pu", u.droop_pu},
        {"deadband_hz", u.deadband_hz},
        {"turbine_params", turbine_to_json(u.turbine_params, u.model_type)},
        {"status", to_string(u.status)},
        {"always_on", u.always_on},
    });
  }
  return json{{"system", sys}, {"units", units}}.dump(2) + "\n";
}

}  // namespace frc
