#pragma once

#include "frc/fleet.hpp"

#include <string>
#include <utility>
#include <vector>

namespace frc {

struct InertiaEstimate {
  double h_sys_s = 0.0;  ///< seconds on s_base_mva
  double s_base_mva = 0.0;
  double kinetic_energy_mws = 0.0;
  std::vector<std::string> contributing_unit_ids;
};

/// One governor/turbine block of the reduced model, all quantities per unit on
/// the system base.
struct ResponderBlock {
  std::string label;
  ModelType model_type = ModelType::SteamReheat;
  double gain_pu = 0.0;  ///< sum of S_i / (R_i * s_base)
  double deadband_hz = 0.0;
  double headroom_up_pu = 0.0;
  double headroom_down_pu = 0.0;
  TurbineParams turbine_params;
  std::vector<std::string> member_unit_ids;
};

struct ReducedModel {
  InertiaEstimate inertia;
  std::vector<ResponderBlock> blocks;  ///< clusters first, then singletons
  double damping_pu = 0.0;             ///< load_damping_pu * load_mw / s_base
  double f0 = 60.0;
  double ufls_hz = 59.3;
  std::size_t cluster_count = 0;       ///< leading entries of `blocks` that are clusters
};

/// Sum of H_i * S_i over online units divided by the system base.
InertiaEstimate estimate_system_inertia(const Fleet& fleet);

struct FleetPartition {
  std::vector<Unit> always_on;
  std::vector<Unit> transient;
};

/// Online governor-bearing units split by the always_on flag.
FleetPartition partition_fleet(const Fleet& fleet);

/// Group-by (model type, deadband rounded to 1 mHz). Gains and headrooms add;
/// turbine parameters are capacity-weighted means. Ordered by key.
std::vector<ResponderBlock> cluster_always_on(const std::vector<Unit>& units, double s_base_mva);

/// Singleton block carrying the unit's own parameters.
ResponderBlock unit_block(const Unit& unit, double s_base_mva);

ReducedModel build_reduced_model(const Fleet& fleet);

}  // namespace frc
