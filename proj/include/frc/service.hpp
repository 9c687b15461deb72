#pragma once

#include "frc/fleet.hpp"
#include "frc/frc_engine.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>

namespace httplib {
class Server;
}

namespace frc {

inline constexpr const char* kServiceVersion = "0.1.0";

struct HttpReply {
  int status = 200;
  nlohmann::json body;
};

/// What-if API over one committed fleet snapshot.
///
/// Snapshots are immutable and shared; a commit swaps in a new one under the
/// writer lock. Handlers are plain functions of JSON so they can be driven
/// without a socket; `mount` wires them onto an httplib server.
class FleetService {
public:
  explicit FleetService(Fleet fleet);

  HttpReply get_health() const;
  HttpReply get_fleet() const;
  HttpReply post_whatif(const nlohmann::json& request) const;
  HttpReply post_commit(const nlohmann::json& request);

  std::uint64_t snapshot_version() const;
  Fleet committed_fleet() const;

  void mount(httplib::Server& server);

private:
  struct Snapshot {
    Fleet fleet;
    FrcCurve frc;
    std::uint64_t version = 0;
  };

  std::shared_ptr<const Snapshot> current() const;

  mutable std::mutex slot_mutex_;
  std::mutex commit_mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
};

/// Blocks serving on `host:port` until the server stops. Returns false when
/// the socket cannot be bound.
bool serve(FleetService& service, const std::string& host, int port);

}  // namespace frc
