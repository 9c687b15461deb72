#include "frc/aggregation.hpp"

#include "frc/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <map>

namespace frc {
namespace {

void require_valid(const Fleet& fleet) {
  const auto diagnostics = validate_fleet(fleet);
  if (!diagnostics.empty()) {
    const auto& d = diagnostics.front();
    throw Error(ErrorCode::ValidationError,
                d.unit_id.empty() ? d.invariant : fmt::format("{}: {}", d.unit_id, d.invariant),
                d.unit_id);
  }
}

long deadband_key(double deadband_hz) { return std::lround(deadband_hz * 1000.0); }

}  // namespace

InertiaEstimate estimate_system_inertia(const Fleet& fleet) {
  InertiaEstimate est;
  est.s_base_mva = system_base_mva(fleet);
  for (const auto& u : fleet.units) {
    if (!u.is_on() || u.inertia_h_s == 0.0) continue;
    est.kinetic_energy_mws += u.inertia_h_s * u.rated_mva;
    est.contributing_unit_ids.push_back(u.id);
  }
  est.h_sys_s = est.kinetic_energy_mws / est.s_base_mva;
  return est;
}

FleetPartition partition_fleet(const Fleet& fleet) {
  FleetPartition p;
  for (const auto& u : fleet.units) {
    if (!u.is_on() || !u.has_governor()) continue;
    (u.always_on ? p.always_on : p.transient).push_back(u);
  }
  return p;
}

ResponderBlock unit_block(const Unit& unit, double s_base_mva) {
  ResponderBlock b;
  b.label = unit.id;
  b.model_type = unit.model_type;
  b.gain_pu = unit.rated_mva / (unit.droop_pu * s_base_mva);
  b.deadband_hz = unit.deadband_hz;
  b.headroom_up_pu = unit.headroom_up_mw() / s_base_mva;
  b.headroom_down_pu = unit.headroom_down_mw() / s_base_mva;
  b.turbine_params = unit.turbine_params;
  b.member_unit_ids = {unit.id};
  return b;
}

std::vector<ResponderBlock> cluster_always_on(const std::vector<Unit>& units, double s_base_mva) {
  if (!(s_base_mva > 0.0)) throw Error(ErrorCode::ZeroBase, "s_base_mva must be positive");

  struct Accumulator {
    double gain_pu = 0.0;
    double up_mw = 0.0;
    double down_mw = 0.0;
    double capacity = 0.0;
    TurbineParams weighted{0, 0, 0, 0, 0, 0, 0};
    std::vector<std::string> members;
  };
  std::map<std::pair<ModelType, long>, Accumulator> groups;

  for (const auto& u : units) {
    auto& acc = groups[{u.model_type, deadband_key(u.deadband_hz)}];
    acc.gain_pu += u.rated_mva / (u.droop_pu * s_base_mva);
    acc.up_mw += u.headroom_up_mw();
    acc.down_mw += u.headroom_down_mw();
    const double w = u.rated_mva;
    acc.capacity += w;
    const auto& tp = u.turbine_params;
    auto& m = acc.weighted;
    m.t_g_s += w * tp.t_g_s;
    m.t_r_s += w * tp.t_r_s;
    m.f_h += w * tp.f_h;
    m.t_c_s += w * tp.t_c_s;
    m.t_w_s += w * tp.t_w_s;
    m.t_inv_s += w * tp.t_inv_s;
    m.activation_delay_s += w * tp.activation_delay_s;
    acc.members.push_back(u.id);
  }

  std::vector<ResponderBlock> out;
  out.reserve(groups.size());
  for (auto& [key, acc] : groups) {
    ResponderBlock b;
    b.model_type = key.first;
    b.deadband_hz = static_cast<double>(key.second) / 1000.0;
    b.label = fmt::format("{}@{}mHz", to_string(key.first), key.second);
    b.gain_pu = acc.gain_pu;
    b.headroom_up_pu = acc.up_mw / s_base_mva;
    b.headroom_down_pu = acc.down_mw / s_base_mva;
    const double c = acc.capacity;
    const auto& m = acc.weighted;
    b.turbine_params = TurbineParams{m.t_g_s / c,   m.t_r_s / c,   m.f_h / c,
                                     m.t_c_s / c,   m.t_w_s / c,   m.t_inv_s / c,
                                     m.activation_delay_s / c};
    b.member_unit_ids = std::move(acc.members);
    out.push_back(std::move(b));
  }
  return out;
}

ReducedModel build_reduced_model(const Fleet& fleet) {
  require_valid(fleet);
  ReducedModel model;
  model.inertia = estimate_system_inertia(fleet);
  const double base = model.inertia.s_base_mva;
  model.f0 = fleet.system.f0;
  model.ufls_hz = fleet.system.ufls_first_stage_hz;
  model.damping_pu = fleet.system.load_damping_pu * fleet.system.load_mw / base;

  const auto parts = partition_fleet(fleet);
  model.blocks = cluster_always_on(parts.always_on, base);
  model.cluster_count = model.blocks.size();
  for (const auto& u : parts.transient) model.blocks.push_back(unit_block(u, base));
  return model;
}

}  // namespace frc
