#include "frc/error.hpp"
#include "frc/fleet.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>

namespace frc {
namespace {

bool valid_range(const Range& r) {
  return std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi;
}

class Sampler {
public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(const Range& r) {
    if (r.lo == r.hi) return r.lo;
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng_);
  }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

private:
  std::mt19937_64 rng_;
};

void check_spec(const GenSpec& spec) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); };
  if (spec.n_units < 1) fail("n_units must be at least 1");
  if (!(spec.renewable_fraction >= 0.0 && spec.renewable_fraction <= 1.0)) {
    fail("renewable_fraction must lie in [0,1]");
  }
  if (!(spec.total_capacity_mw > 0.0) || !std::isfinite(spec.total_capacity_mw)) {
    fail("total_capacity_mw must be positive");
  }
  if (!(spec.dispatch_level >= 0.0 && spec.dispatch_level <= 1.0)) {
    fail("dispatch_level must lie in [0,1]");
  }
  if (!(spec.synthetic_share >= 0.0 && spec.synthetic_share <= 1.0)) {
    fail("synthetic_share must lie in [0,1]");
  }
  if (!(spec.always_on_fraction >= 0.0 && spec.always_on_fraction <= 1.0)) {
    fail("always_on_fraction must lie in [0,1]");
  }
  if (!(spec.load_damping_pu >= 0.0)) fail("load_damping_pu must be non-negative");
  if (!(spec.f0 > 0.0) || !(spec.ufls_first_stage_hz < spec.f0)) {
    fail("need f0 > 0 and ufls_first_stage_hz < f0");
  }
  for (const auto* r : {&spec.unit_size, &spec.droop_pu, &spec.deadband_hz, &spec.inertia_h_s,
                        &spec.t_g_s, &spec.t_r_s, &spec.f_h, &spec.t_c_s, &spec.t_w_s,
                        &spec.t_inv_s}) {
    if (!valid_range(*r)) fail("parameter range must be finite with lo <= hi");
  }
  if (!(spec.unit_size.lo > 0.0)) fail("unit_size weights must be positive");
  if (!(spec.droop_pu.lo > 0.0)) fail("droop range must be positive");
  if (spec.deadband_hz.lo < 0.0 || spec.inertia_h_s.lo < 0.0) {
    fail("deadband and inertia ranges must be non-negative");
  }
  if (!(spec.t_g_s.lo > 0.0 && spec.t_r_s.lo > 0.0 && spec.t_c_s.lo > 0.0 && spec.t_w_s.lo > 0.0 &&
        spec.t_inv_s.lo > 0.0)) {
    fail("time-constant ranges must be positive");
  }
  if (spec.f_h.lo < 0.0 || spec.f_h.hi > 1.0) fail("f_h range must lie in [0,1]");
}

constexpr double kPowerFactor = 0.95;
constexpr double kPminFraction = 0.3;

void set_dispatch(Unit& u, double pmax, double dispatch) {
  u.pmax_mw = pmax;
  u.rated_mva = pmax / kPowerFactor;
  u.pgen_mw = dispatch * pmax;
  u.pmin_mw = std::min(kPminFraction, dispatch) * pmax;
}

}  // namespace

Fleet generate_fleet(const GenSpec& spec) {
  check_spec(spec);
  const auto n = static_cast<std::size_t>(spec.n_units);

  // The synchronous pool is drawn first from its own stream so it is the same
  // for every renewable fraction.
  Sampler pool_rng(spec.seed);
  std::vector<double> weights(n);
  double weight_sum = 0.0;
  for (auto& w : weights) {
    w = pool_rng.uniform(spec.unit_size);
    weight_sum += w;
  }

  std::vector<Unit> pool(n);
  for (std::size_t i = 0; i < n; ++i) {
    Unit& u = pool[i];
    u.id = fmt::format("G{:03d}", i + 1);
    const double pick = pool_rng.unit();
    if (pick < 0.45) {
      u.technology = Technology::Steam;
      u.model_type = ModelType::SteamReheat;
    } else if (pick < 0.85) {
      u.technology = Technology::Gas;
      u.model_type = ModelType::GasCt;
    } else {
      u.technology = Technology::Hydro;
      u.model_type = ModelType::Hydro;
    }
    set_dispatch(u, spec.total_capacity_mw * weights[i] / weight_sum, spec.dispatch_level);
    u.inertia_h_s = pool_rng.uniform(spec.inertia_h_s);
    u.droop_pu = pool_rng.uniform(spec.droop_pu);
    u.deadband_hz = std::round(pool_rng.uniform(spec.deadband_hz) * 1000.0) / 1000.0;
    u.turbine_params = TurbineParams::defaults(u.model_type);
    auto& tp = u.turbine_params;
    const double t_g = pool_rng.uniform(spec.t_g_s);
    const double t_r = pool_rng.uniform(spec.t_r_s);
    const double f_h = pool_rng.uniform(spec.f_h);
    const double t_c = pool_rng.uniform(spec.t_c_s);
    const double t_w = pool_rng.uniform(spec.t_w_s);
    switch (u.model_type) {
      case ModelType::SteamReheat:
        tp.t_g_s = t_g;
        tp.t_r_s = t_r;
        tp.f_h = f_h;
        break;
      case ModelType::GasCt:
        tp.t_g_s = t_g;
        tp.t_c_s = t_c;
        break;
      default:
        tp.t_g_s = t_g;
        tp.t_w_s = t_w;
        break;
    }
    u.status = Status::On;
    u.always_on = pool_rng.unit() < spec.always_on_fraction;
  }

  // Remove pool capacity from the end; the boundary unit is derated.
  const double synchronous_target = (1.0 - spec.renewable_fraction) * spec.total_capacity_mw;
  std::vector<Unit> units;
  double remaining = synchronous_target;
  for (auto& u : pool) {
    if (remaining <= 1e-9 * spec.total_capacity_mw) break;
    if (u.pmax_mw > remaining) {
      const double k = remaining / u.pmax_mw;
      set_dispatch(u, u.pmax_mw * k, spec.dispatch_level);
    }
    remaining -= u.pmax_mw;
    units.push_back(std::move(u));
  }

  if (spec.renewable_fraction > 0.0) {
    Sampler ren_rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
    const auto n_ren = static_cast<std::size_t>(
        std::max(1.0, std::round(spec.renewable_fraction * static_cast<double>(n))));
    const auto n_synthetic = static_cast<std::size_t>(
        std::round(spec.synthetic_share * static_cast<double>(n_ren)));
    const double each = spec.renewable_fraction * spec.total_capacity_mw / static_cast<double>(n_ren);
    for (std::size_t i = 0; i < n_ren; ++i) {
      Unit u;
      u.id = fmt::format("R{:03d}", i + 1);
      u.technology = i % 2 == 0 ? Technology::Wind : Technology::Solar;
      set_dispatch(u, each, spec.dispatch_level);
      u.inertia_h_s = 0.0;
      const double droop = ren_rng.uniform(spec.droop_pu);
      const double db = std::round(ren_rng.uniform(spec.deadband_hz) * 1000.0) / 1000.0;
      const double t_inv = ren_rng.uniform(spec.t_inv_s);
      if (i < n_synthetic) {
        u.model_type = ModelType::Synthetic;
        u.droop_pu = droop;
        u.deadband_hz = db;
        u.turbine_params = TurbineParams::defaults(ModelType::Synthetic);
        u.turbine_params.t_inv_s = t_inv;
      } else {
        u.model_type = ModelType::None;
        u.droop_pu = 0.05;
        u.deadband_hz = 0.0;
        u.turbine_params = TurbineParams::defaults(ModelType::None);
      }
      u.status = Status::On;
      u.always_on = false;
      units.push_back(std::move(u));
    }
  }

  Fleet fleet;
  fleet.system.f0 = spec.f0;
  fleet.system.load_damping_pu = spec.load_damping_pu;
  fleet.system.ufls_first_stage_hz = spec.ufls_first_stage_hz;
  // Load matches total dispatch and is independent of the renewable fraction.
  fleet.system.load_mw = spec.dispatch_level * spec.total_capacity_mw;
  fleet.units = std::move(units);
  return fleet;
}

}  // namespace frc
