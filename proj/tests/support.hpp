#pragma once

// Shared fixtures and oracles for the test binaries. Oracles here evaluate
// curves by linear scan over raw breakpoint lists so they never share a code
// path with PwlCurve::eval.

#include "frc/curve.hpp"
#include "frc/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace frc::testing {

struct RawCurve {
  std::vector<Breakpoint> pts;
  double left = 0.0;
  double right = 0.0;
};

inline RawCurve raw(const PwlCurve& c) {
  return {{c.breakpoints().begin(), c.breakpoints().end()}, c.left_slope(), c.right_slope()};
}

inline double naive_eval(const RawCurve& c, double x) {
  const auto& p = c.pts;
  if (x <= p.front().df) return p.front().mw - c.left * (p.front().df - x);
  if (x >= p.back().df) return p.back().mw + c.right * (x - p.back().df);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (x >= p[i].df && x <= p[i + 1].df) {
      const double w = (x - p[i].df) / (p[i + 1].df - p[i].df);
      return (1.0 - w) * p[i].mw + w * p[i + 1].mw;
    }
  }
  return NAN;
}

inline double pointwise_tol(double value) { return std::max(1e-9, 1e-9 * std::abs(value)); }

/// Random curve with `n` breakpoints in [-1, 1]. Monotone curves have every
/// piece and both extensions non-increasing.
inline PwlCurve random_curve(std::mt19937_64& rng, int n, bool monotone) {
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  std::uniform_real_distribution<double> mag(0.0, 500.0);
  std::vector<double> xs;
  while (static_cast<int>(xs.size()) < n) {
    const double x = pos(rng);
    if (std::none_of(xs.begin(), xs.end(), [&](double y) { return std::abs(x - y) < 1e-6; })) {
      xs.push_back(x);
    }
  }
  std::sort(xs.begin(), xs.end());
  std::vector<Breakpoint> pts;
  double v = monotone ? mag(rng) : mag(rng) - 250.0;
  for (double x : xs) {
    pts.push_back({x, v});
    v = monotone ? v - mag(rng) : mag(rng) - 250.0;
  }
  const double sl = monotone ? -mag(rng) * 5.0 : mag(rng) * 10.0 - 2500.0;
  const double sr = monotone ? -mag(rng) * 5.0 : mag(rng) * 10.0 - 2500.0;
  return PwlCurve::make(std::move(pts), sl, sr);
}

inline std::vector<double> dense_grid(int n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return out;
}

inline Unit governor_unit(std::string id, double rated_mva, double pgen, double pmax,
                          double droop = 0.05, double deadband = 0.036,
                          ModelType type = ModelType::SteamReheat) {
  Unit u;
  u.id = std::move(id);
  u.technology = type == ModelType::GasCt   ? Technology::Gas
                 : type == ModelType::Hydro ? Technology::Hydro
                 : type == ModelType::Synthetic ? Technology::Storage
                                                : Technology::Steam;
  u.model_type = type;
  u.rated_mva = rated_mva;
  u.pgen_mw = pgen;
  u.pmax_mw = pmax;
  u.pmin_mw = 0.0;
  u.inertia_h_s = 4.0;
  u.droop_pu = droop;
  u.deadband_hz = deadband;
  u.turbine_params = TurbineParams::defaults(type);
  u.status = Status::On;
  u.always_on = true;
  return u;
}

/// Governor-free unit that only contributes inertia.
inline Unit inertia_unit(std::string id, double rated_mva, double h) {
  Unit u;
  u.id = std::move(id);
  u.technology = Technology::Nuclear;
  u.model_type = ModelType::None;
  u.rated_mva = rated_mva;
  u.pgen_mw = rated_mva * 0.9;
  u.pmax_mw = rated_mva * 0.9;
  u.pmin_mw = rated_mva * 0.9;
  u.inertia_h_s = h;
  u.turbine_params = TurbineParams::defaults(ModelType::None);
  return u;
}

inline Fleet make_fleet(std::vector<Unit> units, double load_mw, double damping,
                        double f0 = 60.0) {
  Fleet f;
  f.system.f0 = f0;
  f.system.load_mw = load_mw;
  f.system.load_damping_pu = damping;
  f.units = std::move(units);
  return f;
}

/// The "standard test fleet" referred to by the convergence checks.
inline GenSpec standard_spec() {
  GenSpec g;
  g.seed = 42;
  g.n_units = 100;
  g.renewable_fraction = 0.3;
  g.total_capacity_mw = 20000.0;
  return g;
}

}  // namespace frc::testing
