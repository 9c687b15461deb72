#pragma once

#include "frc/aggregation.hpp"
#include "frc/fleet.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace frc {

struct SimConfig {
  double step_s = 0.005;
  double horizon_s = 60.0;
  double output_interval_s = 0.1;
  double event_time_s = 1.0;
};

struct Contingency {
  double loss_mw = 0.0;  ///< positive = generation trip
  double event_time_s = 1.0;
};

struct TrajectorySample {
  double t_s = 0.0;
  double freq_hz = 0.0;
  double delta_f_hz = 0.0;
  double pm_total_mw = 0.0;
  std::vector<double> block_mw;
};

struct Trajectory {
  double f0 = 60.0;
  SimConfig config;
  double event_time_s = 1.0;
  std::vector<std::string> block_labels;
  std::vector<TrajectorySample> samples;
};

struct NadirReport {
  double nadir_hz = 0.0;
  double nadir_time_s = 0.0;
  double rocof_initial_hz_per_s = 0.0;
  double settling_hz = 0.0;
  double ufls_margin_hz = 0.0;
  bool breached = false;
};

/// sign(x) * max(0, |x| - db)
double deadband_apply(double x, double db);

/// Number of integrator states a block of this model type carries.
std::size_t state_size(ModelType type);

struct BlockEval {
  std::vector<double> derivative;
  double output_pu = 0.0;
};

/// Governor/turbine block response to a per-unit frequency deviation.
///
/// The input is gain * deadband_apply(-dw, deadband/f0); the unity-DC-gain
/// turbine realization is clamped to the block's headroom, and while clamped
/// any state derivative that pushes the raw output further out is zeroed.
/// Throws DimensionMismatch when `state` has the wrong size.
BlockEval block_derivative(const ResponderBlock& block, std::span<const double> state,
                           double dw_pu, double f0);

/// Same computation writing into caller-owned storage; returns the output.
double block_derivative_into(const ResponderBlock& block, std::span<const double> state,
                             double input_pu, std::span<double> derivative);

/// Classical RK4 integration of the common-frequency swing equation with the
/// model's blocks. Throws ZeroInertia, InvalidParams or NumericalDivergence.
Trajectory simulate(const ReducedModel& model, const Contingency& contingency,
                    const SimConfig& config);

/// Reference model: every online governor-bearing unit is its own block.
ReducedModel build_per_unit_model(const Fleet& fleet);

/// Throws TrajectoryTooShort when fewer than 5 s follow the event.
NadirReport extract_metrics(const Trajectory& traj, double ufls_hz);

/// `time_s,freq_hz,delta_f_hz,pm_total_mw` plus one MW column per block.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace frc
