#include "frc/dynamics.hpp"

#include "frc/error.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

namespace frc {
namespace {

// Output map y = c . x of each realization.
struct Realization {
  std::size_t n = 0;
  std::array<double, 2> c{0.0, 0.0};
};

Realization realization(const ResponderBlock& b) {
  switch (b.model_type) {
    case ModelType::SteamReheat:
      return {2, {b.turbine_params.f_h, 1.0 - b.turbine_params.f_h}};
    case ModelType::GasCt:
      return {2, {0.0, 1.0}};
    case ModelType::Hydro:
      // (1 - Tw s)/(1 + Tw/2 s) = 3/(1 + Tw/2 s) - 2
      return {2, {-2.0, 3.0}};
    case ModelType::Synthetic:
      return {1, {1.0, 0.0}};
    case ModelType::None:
      return {0, {0.0, 0.0}};
  }
  return {};
}

void check_block(const ResponderBlock& b) {
  const auto& tp = b.turbine_params;
  bool ok = b.gain_pu >= 0.0 && b.deadband_hz >= 0.0 && b.headroom_up_pu >= 0.0 &&
            b.headroom_down_pu >= 0.0 && tp.activation_delay_s >= 0.0;
  switch (b.model_type) {
    case ModelType::SteamReheat:
      ok = ok && tp.t_g_s > 0.0 && tp.t_r_s > 0.0 && tp.f_h >= 0.0 && tp.f_h <= 1.0;
      break;
    case ModelType::GasCt:
      ok = ok && tp.t_g_s > 0.0 && tp.t_c_s > 0.0;
      break;
    case ModelType::Hydro:
      ok = ok && tp.t_g_s > 0.0 && tp.t_w_s > 0.0;
      break;
    case ModelType::Synthetic:
      ok = ok && tp.t_inv_s > 0.0;
      break;
    case ModelType::None:
      break;
  }
  if (!ok) {
    throw Error(ErrorCode::InvalidParams, fmt::format("block '{}' has invalid parameters", b.label),
                b.label);
  }
}

}  // namespace

double deadband_apply(double x, double db) {
  const double mag = std::max(0.0, std::abs(x) - db);
  return x < 0.0 ? -mag : mag;
}

std::size_t state_size(ModelType type) {
  ResponderBlock b;
  b.model_type = type;
  return realization(b).n;
}

double block_derivative_into(const ResponderBlock& block, std::span<const double> x,
                             double u, std::span<double> dx) {
  const auto r = realization(block);
  if (x.size() != r.n || dx.size() != r.n) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("block '{}' expects {} states, got {}", block.label, r.n, x.size()),
                block.label);
  }
  const auto& tp = block.turbine_params;
  switch (block.model_type) {
    case ModelType::SteamReheat:
      dx[0] = (u - x[0]) / tp.t_g_s;
      dx[1] = (x[0] - x[1]) / tp.t_r_s;
      break;
    case ModelType::GasCt:
      dx[0] = (u - x[0]) / tp.t_g_s;
      dx[1] = (x[0] - x[1]) / tp.t_c_s;
      break;
    case ModelType::Hydro:
      dx[0] = (u - x[0]) / tp.t_g_s;
      dx[1] = (x[0] - x[1]) / (0.5 * tp.t_w_s);
      break;
    case ModelType::Synthetic:
      dx[0] = (u - x[0]) / tp.t_inv_s;
      break;
    case ModelType::None:
      return 0.0;
  }
  double raw = 0.0;
  for (std::size_t i = 0; i < r.n; ++i) raw += r.c[i] * x[i];

  const double up = block.headroom_up_pu;
  const double down = -block.headroom_down_pu;
  if (raw >= up) {
    for (std::size_t i = 0; i < r.n; ++i) {
      if (r.c[i] * dx[i] > 0.0) dx[i] = 0.0;
    }
  }
  if (raw <= down) {
    for (std::size_t i = 0; i < r.n; ++i) {
      if (r.c[i] * dx[i] < 0.0) dx[i] = 0.0;
    }
  }
  return std::clamp(raw, down, up);
}

BlockEval block_derivative(const ResponderBlock& block, std::span<const double> state,
                           double dw_pu, double f0) {
  BlockEval out;
  out.derivative.assign(state.size(), 0.0);
  const double u = block.gain_pu * deadband_apply(-dw_pu, block.deadband_hz / f0);
  out.output_pu = block_derivative_into(block, state, u, out.derivative);
  return out;
}

Trajectory simulate(const ReducedModel& model, const Contingency& contingency,
                    const SimConfig& config) {
  if (!(config.step_s > 0.0) || !(config.output_interval_s > 0.0) ||
      !(config.horizon_s > contingency.event_time_s) || !std::isfinite(config.horizon_s) ||
      !(contingency.event_time_s >= 0.0) || !std::isfinite(contingency.loss_mw)) {
    throw Error(ErrorCode::InvalidParams, "invalid simulation configuration or contingency");
  }
  const double h = model.inertia.h_sys_s;
  const double base = model.inertia.s_base_mva;
  if (!(h > 0.0)) {
    throw Error(ErrorCode::ZeroInertia, "system inertia is zero; swing equation is undefined");
  }
  if (!(base > 0.0)) throw Error(ErrorCode::ZeroBase, "s_base_mva must be positive");
  for (const auto& b : model.blocks) check_block(b);

  const double f0 = model.f0;
  const double loss_pu = contingency.loss_mw / base;
  const double t_event = contingency.event_time_s;
  const std::size_t nb = model.blocks.size();

  std::vector<std::size_t> offset(nb + 1, 1);
  for (std::size_t i = 0; i < nb; ++i) {
    offset[i + 1] = offset[i] + realization(model.blocks[i]).n;
  }
  const std::size_t n = offset[nb];

  std::vector<double> x(n, 0.0);
  std::vector<double> tmp(n), k1(n), k2(n), k3(n), k4(n);
  std::vector<double> outputs(nb, 0.0);
  std::vector<char> active(nb, 0);
  double load_pu = 0.0;

  auto deriv = [&](const std::vector<double>& s, std::vector<double>& ds) {
    const double dw = s[0];
    double pm = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      const auto& b = model.blocks[i];
      const double u = active[i] ? b.gain_pu * deadband_apply(-dw, b.deadband_hz / f0) : 0.0;
      const std::size_t len = offset[i + 1] - offset[i];
      outputs[i] = block_derivative_into(b, std::span<const double>(s.data() + offset[i], len), u,
                                         std::span<double>(ds.data() + offset[i], len));
      pm += outputs[i];
    }
    ds[0] = (pm - load_pu - model.damping_pu * dw) / (2.0 * h);
    return pm;
  };

  const auto steps = static_cast<long long>(std::llround(config.horizon_s / config.step_s));
  const auto every =
      std::max<long long>(1, std::llround(config.output_interval_s / config.step_s));
  const double eps = 1e-9 * config.step_s;

  Trajectory traj;
  traj.f0 = f0;
  traj.config = config;
  traj.config.event_time_s = t_event;
  traj.event_time_s = t_event;
  for (const auto& b : model.blocks) traj.block_labels.push_back(b.label);
  traj.samples.reserve(static_cast<std::size_t>(steps / every + 2));

  // Step-function inputs (the loss and activation gates) are held over each
  // step at their value at the step start.
  auto update_inputs = [&](double t) {
    load_pu = t + eps >= t_event ? loss_pu : 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      active[i] = t + eps >= t_event + model.blocks[i].turbine_params.activation_delay_s;
    }
  };
  auto record = [&](double t) {
    update_inputs(t);
    const double pm = deriv(x, k1);
    TrajectorySample s;
    s.t_s = t;
    s.delta_f_hz = x[0] * f0;
    s.freq_hz = f0 + s.delta_f_hz;
    s.pm_total_mw = pm * base;
    s.block_mw.resize(nb);
    for (std::size_t i = 0; i < nb; ++i) s.block_mw[i] = outputs[i] * base;
    traj.samples.push_back(std::move(s));
  };

  record(0.0);
  const double dt = config.step_s;
  for (long long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    update_inputs(t);
    deriv(x, k1);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * dt * k1[j];
    deriv(tmp, k2);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * dt * k2[j];
    deriv(tmp, k3);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + dt * k3[j];
    deriv(tmp, k4);
    bool finite = true;
    for (std::size_t j = 0; j < n; ++j) {
      x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      finite = finite && std::isfinite(x[j]);
    }
    const double t_next = static_cast<double>(k + 1) * dt;
    if (!finite) {
      throw Error(ErrorCode::NumericalDivergence,
                  fmt::format("non-finite state at t = {} s", t_next));
    }
    if ((k + 1) % every == 0 || k + 1 == steps) record(t_next);
  }
  return traj;
}

ReducedModel build_per_unit_model(const Fleet& fleet) {
  const auto diagnostics = validate_fleet(fleet);
  if (!diagnostics.empty()) {
    throw Error(ErrorCode::ValidationError, diagnostics.front().invariant,
                diagnostics.front().unit_id);
  }
  ReducedModel model;
  model.inertia = estimate_system_inertia(fleet);
  const double base = model.inertia.s_base_mva;
  model.f0 = fleet.system.f0;
  model.ufls_hz = fleet.system.ufls_first_stage_hz;
  model.damping_pu = fleet.system.load_damping_pu * fleet.system.load_mw / base;
  for (const auto& u : fleet.units) {
    if (u.is_on() && u.has_governor()) model.blocks.push_back(unit_block(u, base));
  }
  return model;
}

NadirReport extract_metrics(const Trajectory& traj, double ufls_hz) {
  const double te = traj.event_time_s;
  const double eps = 1e-9;
  if (traj.samples.empty() || traj.samples.back().t_s + eps < te + 5.0) {
    throw Error(ErrorCode::TrajectoryTooShort, "trajectory must cover at least 5 s after the event");
  }
  NadirReport rep;
  rep.nadir_hz = std::numeric_limits<double>::infinity();
  const TrajectorySample* at_event = nullptr;
  const TrajectorySample* after = nullptr;
  for (const auto& s : traj.samples) {
    if (s.t_s + eps < te) continue;
    if (s.freq_hz < rep.nadir_hz) {
      rep.nadir_hz = s.freq_hz;
      rep.nadir_time_s = s.t_s;
    }
  }
  auto nearest = [&](double t) {
    const TrajectorySample* best = &traj.samples.front();
    for (const auto& s : traj.samples) {
      if (std::abs(s.t_s - t) < std::abs(best->t_s - t)) best = &s;
    }
    return best;
  };
  at_event = nearest(te);
  after = nearest(te + 0.1);
  const double span = after->t_s - at_event->t_s;
  rep.rocof_initial_hz_per_s = span > 0.0 ? (after->freq_hz - at_event->freq_hz) / span : 0.0;

  const double t_end = traj.samples.back().t_s;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : traj.samples) {
    if (s.t_s + eps >= t_end - 5.0) {
      sum += s.freq_hz;
      ++count;
    }
  }
  rep.settling_hz = sum / static_cast<double>(count);
  rep.ufls_margin_hz = rep.nadir_hz - ufls_hz;
  rep.breached = rep.nadir_hz < ufls_hz;
  return rep;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "time_s,freq_hz,delta_f_hz,pm_total_mw";
  for (const auto& label : traj.block_labels) out << ',' << label;
  out << '\n';
  for (const auto& s : traj.samples) {
    fmt::print(out, "{},{},{},{}", s.t_s, s.freq_hz, s.delta_f_hz, s.pm_total_mw);
    for (double v : s.block_mw) fmt::print(out, ",{}", v);
    out << '\n';
  }
}

}  // namespace frc
