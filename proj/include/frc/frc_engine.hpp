#pragma once

#include "frc/curve.hpp"
#include "frc/fleet.hpp"

#include <optional>
#include <string>
#include <vector>

namespace frc {

struct UnitFrc {
  std::string unit_id;
  PwlCurve curve = PwlCurve::zero();
};

/// System frequency response characteristic: the sum of every online
/// governor's curve plus the load damping line.
struct FrcCurve {
  PwlCurve curve = PwlCurve::zero();
  double f0 = 60.0;
  std::vector<std::string> contributing_unit_ids;
  bool includes_load_damping = true;
  /// Terms of the sum, kept so results can be decomposed per source.
  PwlCurve load_damping = PwlCurve::zero();
  std::vector<UnitFrc> unit_curves;
};

struct BetaMetric {
  double df = 0.0;
  double beta_secant = 0.0;  ///< MW per 0.1 Hz
  double beta_local = 0.0;   ///< MW per 0.1 Hz
};

struct SteadyStateResult {
  double df_ss = 0.0;
  double f_ss = 0.0;
  double governor_mw = 0.0;
  double load_relief_mw = 0.0;
  std::vector<std::string> saturated_unit_ids;
};

struct AdequacyReport {
  double loss_mw = 0.0;
  std::optional<double> df_ss;  ///< empty on collapse
  std::optional<double> f_ss;
  double remaining_headroom_mw = 0.0;
  std::optional<double> ufls_margin_hz;
  bool adequate = false;
  bool collapse = false;
};

/// Offset-deadband droop response, clipped at headroom in both directions.
/// Throws NoGovernor for model type NONE, InvalidParams for bad parameters.
UnitFrc build_unit_frc(const Unit& unit, double f0);

PwlCurve build_load_damping_curve(const SystemParams& system);

/// Throws ValidationError for an invalid fleet.
FrcCurve assemble_system_frc(const Fleet& fleet);

/// Adds curves of units switching on and subtracts those switching off.
/// Throws UnknownUnit, or InconsistentBaseline when `frc` was not assembled
/// from `fleet_before`.
FrcCurve update_system_frc(const FrcCurve& frc, const Fleet& fleet_before,
                           const std::vector<Toggle>& toggles);

/// Operating point for a generation loss (positive) or load loss (negative).
/// Throws TargetUnreachable when the curve cannot deliver `loss_mw`.
SteadyStateResult solve_steady_state(const FrcCurve& frc, double loss_mw);

/// Throws DivisionByZero at df = 0.
BetaMetric beta_metrics(const FrcCurve& frc, double df);

AdequacyReport headroom_adequacy(const FrcCurve& frc, const Fleet& fleet, double loss_mw);

}  // namespace frc
