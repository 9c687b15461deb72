#include "frc/service.hpp"

#include "frc/aggregation.hpp"
#include "frc/dynamics.hpp"
#include "frc/error.hpp"

#include <httplib.h>

#include <cmath>

namespace frc {
namespace {

using nlohmann::json;

HttpReply error_reply(int status, const std::string& code, const std::string& message,
                      std::uint64_t version) {
  return {status, json{{"error", code}, {"message", message}, {"snapshot_version", version}}};
}

// Thrown for malformed requests; mapped to 400.
struct BadRequest {
  std::string message;
};

std::vector<Toggle> parse_toggles(const json& req) {
  std::vector<Toggle> out;
  if (!req.contains("toggles")) return out;
  const auto& arr = req["toggles"];
  if (!arr.is_array()) throw BadRequest{"toggles must be an array"};
  for (const auto& t : arr) {
    if (!t.is_object() || !t.contains("id") || !t["id"].is_string() || !t.contains("status") ||
        !t["status"].is_string()) {
      throw BadRequest{"each toggle needs string fields id and status"};
    }
    auto status = parse_status(t["status"].get<std::string>());
    if (!status) throw BadRequest{"toggle status must be on|off"};
    out.push_back({t["id"].get<std::string>(), *status});
  }
  return out;
}

double number_or(const json& req, const char* key, double fallback) {
  if (!req.contains(key)) return fallback;
  if (!req[key].is_number()) throw BadRequest{std::string(key) + " must be a number"};
  const double v = req[key].get<double>();
  if (!std::isfinite(v)) throw BadRequest{std::string(key) + " must be finite"};
  return v;
}

json curve_points(std::span<const Breakpoint> pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back({{"df", p.df}, {"mw", p.mw}});
  return arr;
}

json fleet_summary(const Fleet& fleet, std::uint64_t version) {
  json units = json::array();
  for (const auto& u : fleet.units) {
    units.push_back({
        {"id", u.id},
        {"technology", to_string(u.technology)},
        {"model_type", to_string(u.model_type)},
        {"status", to_string(u.status)},
        {"pgen_mw", u.pgen_mw},
        {"pmax_mw", u.pmax_mw},
        {"headroom_up_mw", u.headroom_up_mw()},
        {"headroom_down_mw", u.headroom_down_mw()},
        {"inertia_h_s", u.inertia_h_s},
        {"droop_pu", u.droop_pu},
        {"deadband_hz", u.deadband_hz},
        {"always_on", u.always_on},
    });
  }
  return json{
      {"snapshot_version", version},
      {"system",
       {{"f0", fleet.system.f0},
        {"load_mw", fleet.system.load_mw},
        {"load_damping_pu", fleet.system.load_damping_pu},
        {"ufls_first_stage_hz", fleet.system.ufls_first_stage_hz}}},
      {"units", units},
  };
}

json model_summary(const ReducedModel& m) {
  json blocks = json::array();
  for (const auto& b : m.blocks) {
    blocks.push_back({
        {"label", b.label},
        {"model_type", to_string(b.model_type)},
        {"gain_pu", b.gain_pu},
        {"deadband_hz", b.deadband_hz},
        {"headroom_up_pu", b.headroom_up_pu},
        {"headroom_down_pu", b.headroom_down_pu},
        {"member_count", b.member_unit_ids.size()},
    });
  }
  return json{
      {"h_sys_s", m.inertia.h_sys_s},
      {"s_base_mva", m.inertia.s_base_mva},
      {"damping_pu", m.damping_pu},
      {"block_count", m.blocks.size()},
      {"blocks", blocks},
  };
}

json nadir_json(const NadirReport& r) {
  return json{
      {"nadir_hz", r.nadir_hz},
      {"nadir_time_s", r.nadir_time_s},
      {"rocof_initial_hz_per_s", r.rocof_initial_hz_per_s},
      {"settling_hz", r.settling_hz},
      {"ufls_margin_hz", r.ufls_margin_hz},
      {"breached", r.breached},
  };
}

}  // namespace

FleetService::FleetService(Fleet fleet) {
  auto snap = std::make_shared<Snapshot>();
  snap->frc = assemble_system_frc(fleet);
  snap->fleet = std::move(fleet);
  snap->version = 1;
  snapshot_ = std::move(snap);
}

std::shared_ptr<const FleetService::Snapshot> FleetService::current() const {
  std::lock_guard lock(slot_mutex_);
  return snapshot_;
}

std::uint64_t FleetService::snapshot_version() const { return current()->version; }

Fleet FleetService::committed_fleet() const { return current()->fleet; }

HttpReply FleetService::get_health() const {
  return {200, json{{"status", "ok"}, {"version", kServiceVersion},
                    {"snapshot_version", snapshot_version()}}};
}

HttpReply FleetService::get_fleet() const {
  const auto snap = current();
  return {200, fleet_summary(snap->fleet, snap->version)};
}

HttpReply FleetService::post_whatif(const json& req) const {
  const auto snap = current();
  const auto version = snap->version;
  try {
    if (!req.is_object()) throw BadRequest{"request body must be a JSON object"};
    const auto toggles = parse_toggles(req);
    if (!req.contains("loss_mw")) throw BadRequest{"loss_mw is required"};
    const double loss = number_or(req, "loss_mw", 0.0);
    const double horizon = number_or(req, "horizon_s", 60.0);
    bool include_trajectory = false;
    if (req.contains("include_trajectory")) {
      if (!req["include_trajectory"].is_boolean()) {
        throw BadRequest{"include_trajectory must be a boolean"};
      }
      include_trajectory = req["include_trajectory"].get<bool>();
    }
    SimConfig config;
    config.horizon_s = horizon;
    if (!(horizon >= config.event_time_s + 5.0) || horizon > 3600.0) {
      throw BadRequest{"horizon_s must lie in [6, 3600]"};
    }

    const Fleet fleet = apply_toggles(snap->fleet, toggles);
    const FrcCurve frc = update_system_frc(snap->frc, snap->fleet, toggles);

    json body;
    body["snapshot_version"] = version;
    body["loss_mw"] = loss;
    body["f0"] = frc.f0;
    body["frc_curve"] = curve_points(frc.curve.breakpoints());
    if (req.contains("dense_step_hz")) {
      const double step = number_or(req, "dense_step_hz", 0.01);
      if (!(step >= 1e-4)) throw BadRequest{"dense_step_hz must be at least 1e-4"};
      body["frc_curve_dense"] = curve_points(resample(frc.curve, step));
    }
    const auto beta = beta_metrics(frc, -0.1);
    body["beta_at_100mhz"] = {{"df", beta.df},
                              {"beta_secant", beta.beta_secant},
                              {"beta_local", beta.beta_local}};
    const auto adequacy = headroom_adequacy(frc, fleet, loss);
    body["adequacy"] = {{"remaining_headroom_mw", adequacy.remaining_headroom_mw},
                        {"ufls_margin_hz", adequacy.ufls_margin_hz
                                               ? json(*adequacy.ufls_margin_hz)
                                               : json(nullptr)},
                        {"adequate", adequacy.adequate}};

    int status = 200;
    try {
      const auto ss = solve_steady_state(frc, loss);
      if (std::abs(frc.curve.eval(ss.df_ss) - loss) > 1e-6) {
        return error_reply(500, "InvariantBreach",
                           "steady state does not reproduce the loss on the curve", version);
      }
      body["collapse"] = false;
      body["steady_state"] = {{"df_ss", ss.df_ss},
                              {"f_ss", ss.f_ss},
                              {"governor_mw", ss.governor_mw},
                              {"load_relief_mw", ss.load_relief_mw},
                              {"saturated_unit_ids", ss.saturated_unit_ids}};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TargetUnreachable) throw;
      status = 422;
      body["collapse"] = true;
      body["steady_state"] = nullptr;
      body["message"] = e.what();
    }

    const auto model = build_reduced_model(fleet);
    body["reduced_model_summary"] = model_summary(model);
    try {
      const auto traj = simulate(model, {loss, config.event_time_s}, config);
      body["nadir"] = nadir_json(extract_metrics(traj, fleet.system.ufls_first_stage_hz));
      if (include_trajectory) {
        json samples = json::array();
        for (const auto& s : traj.samples) {
          samples.push_back({{"t_s", s.t_s},
                             {"freq_hz", s.freq_hz},
                             {"delta_f_hz", s.delta_f_hz},
                             {"pm_total_mw", s.pm_total_mw}});
        }
        body["trajectory"] = std::move(samples);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroInertia && e.code() != ErrorCode::NumericalDivergence) throw;
      body["nadir"] = nullptr;
      body["nadir_error"] = e.what();
    }
    return {status, std::move(body)};
  } catch (const BadRequest& e) {
    return error_reply(400, "BadRequest", e.message, version);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnknownUnit) {
      return error_reply(400, "UnknownUnit", e.what(), version);
    }
    return error_reply(500, std::string(to_string(e.code())), e.what(), version);
  }
}

HttpReply FleetService::post_commit(const json& req) {
  std::lock_guard writer(commit_mutex_);
  const auto snap = current();
  try {
    if (!req.is_object()) throw BadRequest{"request body must be a JSON object"};
    const auto toggles = parse_toggles(req);
    if (req.contains("expected_version")) {
      const auto& ev = req["expected_version"];
      if (!ev.is_number_integer() || ev.get<std::int64_t>() < 0) {
        throw BadRequest{"expected_version must be a non-negative integer"};
      }
      if (req["expected_version"].get<std::uint64_t>() != snap->version) {
        return error_reply(409, "VersionConflict", "snapshot has moved on", snap->version);
      }
    }
    auto next = std::make_shared<Snapshot>();
    next->fleet = apply_toggles(snap->fleet, toggles);
    next->frc = update_system_frc(snap->frc, snap->fleet, toggles);
    next->version = snap->version + 1;
    {
      std::lock_guard lock(slot_mutex_);
      snapshot_ = next;
    }
    return {200, fleet_summary(next->fleet, next->version)};
  } catch (const BadRequest& e) {
    return error_reply(400, "BadRequest", e.message, snap->version);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnknownUnit) {
      return error_reply(400, "UnknownUnit", e.what(), snap->version);
    }
    return error_reply(500, std::string(to_string(e.code())), e.what(), snap->version);
  }
}

void FleetService::mount(httplib::Server& server) {
  auto send = [](httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  };
  auto with_body = [this, send](auto handler) {
    return [this, send, handler](const httplib::Request& req, httplib::Response& res) {
      json body;
      try {
        body = req.body.empty() ? json::object() : json::parse(req.body);
      } catch (const json::parse_error& e) {
        send(res, error_reply(400, "BadRequest", e.what(), snapshot_version()));
        return;
      }
      send(res, handler(body));
    };
  };

  server.set_default_headers({
      {"Access-Control-Allow-Origin", "*"},
      {"Access-Control-Allow-Headers", "Content-Type"},
      {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
  });
  server.Get("/api/health",
             [this, send](const httplib::Request&, httplib::Response& res) {
               send(res, get_health());
             });
  server.Get("/api/fleet", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, get_fleet());
  });
  server.Post("/api/whatif",
              with_body([this](const json& body) { return post_whatif(body); }));
  server.Post("/api/commit",
              with_body([this](const json& body) { return post_commit(body); }));
  server.Options(R"(/api/.*)",
                 [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.set_error_handler([this](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    res.set_content(json{{"error", res.status == 404 ? "NotFound" : "Error"},
                         {"snapshot_version", snapshot_version()}}
                        .dump(),
                    "application/json");
  });
}

bool serve(FleetService& service, const std::string& host, int port) {
  httplib::Server server;
  service.mount(server);
  if (!server.bind_to_port(host, port)) return false;
  return server.listen_after_bind();
}

}  // namespace frc
