#include "frc/frc_engine.hpp"

#include "frc/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

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

bool contributes(const Unit& u) { return u.is_on() && u.has_governor(); }

}  // namespace

UnitFrc build_unit_frc(const Unit& unit, double f0) {
  if (!unit.has_governor()) {
    throw Error(ErrorCode::NoGovernor, fmt::format("unit '{}' has no governor", unit.id), unit.id);
  }
  const double up = unit.headroom_up_mw();
  const double down = unit.headroom_down_mw();
  if (!(f0 > 0.0) || !(unit.droop_pu > 0.0) || !(unit.rated_mva > 0.0) ||
      !(unit.deadband_hz >= 0.0) || !(up >= 0.0) || !(down >= 0.0)) {
    throw Error(ErrorCode::InvalidParams,
                fmt::format("unit '{}' has invalid governor parameters", unit.id), unit.id);
  }
  const double db = unit.deadband_hz;
  const double gain = unit.rated_mva / (unit.droop_pu * f0);  // MW/Hz

  std::vector<Breakpoint> pts;
  const double up_span = up / gain;
  const double down_span = down / gain;
  if (up_span >= kBreakpointGapHz) pts.push_back({-db - up_span, up});
  pts.push_back({-db, 0.0});
  if (db >= kBreakpointGapHz) pts.push_back({db, 0.0});
  if (down_span >= kBreakpointGapHz) pts.push_back({db + down_span, -down});
  return UnitFrc{unit.id, PwlCurve::make(std::move(pts), 0.0, 0.0)};
}

PwlCurve build_load_damping_curve(const SystemParams& system) {
  return PwlCurve::linear(-(system.load_damping_pu * system.load_mw) / system.f0);
}

FrcCurve assemble_system_frc(const Fleet& fleet) {
  require_valid(fleet);
  FrcCurve out{PwlCurve::zero(), fleet.system.f0, {}, true,
               build_load_damping_curve(fleet.system), {}};
  PwlCurve sum = out.load_damping;
  for (const auto& u : fleet.units) {
    if (!contributes(u)) continue;
    auto frc = build_unit_frc(u, fleet.system.f0);
    sum = add(sum, frc.curve);
    out.contributing_unit_ids.push_back(u.id);
    out.unit_curves.push_back(std::move(frc));
  }
  out.curve = simplify(sum, 0.0);
  return out;
}

FrcCurve update_system_frc(const FrcCurve& frc, const Fleet& fleet_before,
                           const std::vector<Toggle>& toggles) {
  std::set<std::string> baseline(frc.contributing_unit_ids.begin(),
                                 frc.contributing_unit_ids.end());
  std::set<std::string> expected;
  for (const auto& u : fleet_before.units) {
    if (contributes(u)) expected.insert(u.id);
  }
  if (baseline != expected || baseline.size() != frc.contributing_unit_ids.size()) {
    throw Error(ErrorCode::InconsistentBaseline,
                "curve's contributing units disagree with the baseline fleet statuses");
  }

  const Fleet after = apply_toggles(fleet_before, toggles);

  std::map<std::string, const UnitFrc*> existing;
  for (const auto& uc : frc.unit_curves) existing.emplace(uc.unit_id, &uc);

  FrcCurve out{frc.curve, frc.f0, {}, frc.includes_load_damping, frc.load_damping, {}};
  PwlCurve sum = frc.curve;
  for (std::size_t i = 0; i < after.units.size(); ++i) {
    const Unit& was = fleet_before.units[i];
    const Unit& now = after.units[i];
    if (!now.has_governor()) continue;
    if (!was.is_on() && now.is_on()) {
      auto uc = build_unit_frc(now, frc.f0);
      sum = add(sum, uc.curve);
      out.contributing_unit_ids.push_back(now.id);
      out.unit_curves.push_back(std::move(uc));
    } else if (was.is_on() && !now.is_on()) {
      auto it = existing.find(now.id);
      sum = subtract(sum, it != existing.end() ? it->second->curve
                                                : build_unit_frc(was, frc.f0).curve);
    } else if (now.is_on()) {
      out.contributing_unit_ids.push_back(now.id);
      auto it = existing.find(now.id);
      out.unit_curves.push_back(it != existing.end() ? *it->second
                                                     : build_unit_frc(now, frc.f0));
    }
  }
  out.curve = simplify(sum, 0.0);
  return out;
}

SteadyStateResult solve_steady_state(const FrcCurve& frc, double loss_mw) {
  if (!std::isfinite(loss_mw)) {
    throw Error(ErrorCode::NonFiniteValue, "loss must be finite");
  }
  SteadyStateResult r;
  r.df_ss = invert_monotone(frc.curve, loss_mw, loss_mw >= 0.0 ? Direction::Under : Direction::Over);
  r.f_ss = frc.f0 + r.df_ss;
  r.load_relief_mw = frc.includes_load_damping ? frc.load_damping.eval(r.df_ss) : 0.0;
  for (const auto& uc : frc.unit_curves) {
    r.governor_mw += uc.curve.eval(r.df_ss);
    const auto pts = uc.curve.breakpoints();
    const bool at_up = r.df_ss < 0.0 && r.df_ss <= pts.front().df + kBreakpointGapHz;
    const bool at_down = r.df_ss > 0.0 && r.df_ss >= pts.back().df - kBreakpointGapHz;
    if (at_up || at_down) r.saturated_unit_ids.push_back(uc.unit_id);
  }
  return r;
}

BetaMetric beta_metrics(const FrcCurve& frc, double df) {
  if (df == 0.0) {
    throw Error(ErrorCode::DivisionByZero, "secant beta is undefined at df = 0");
  }
  BetaMetric b;
  b.df = df;
  b.beta_secant = frc.curve.eval(df) * 0.1 / (-df);
  b.beta_local = -frc.curve.slope_at(df) * 0.1;
  return b;
}

AdequacyReport headroom_adequacy(const FrcCurve& frc, const Fleet& fleet, double loss_mw) {
  AdequacyReport rep;
  rep.loss_mw = loss_mw;
  SteadyStateResult ss;
  try {
    ss = solve_steady_state(frc, loss_mw);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TargetUnreachable) throw;
    rep.collapse = true;
    rep.adequate = false;
    return rep;
  }
  rep.df_ss = ss.df_ss;
  rep.f_ss = ss.f_ss;
  for (const auto& uc : frc.unit_curves) {
    const Unit* u = fleet.find(uc.unit_id);
    if (u == nullptr) continue;
    rep.remaining_headroom_mw += std::max(0.0, u->headroom_up_mw() - uc.curve.eval(ss.df_ss));
  }
  rep.ufls_margin_hz = ss.f_ss - fleet.system.ufls_first_stage_hz;
  rep.adequate = *rep.ufls_margin_hz > 0.0;
  return rep;
}

}  // namespace frc
