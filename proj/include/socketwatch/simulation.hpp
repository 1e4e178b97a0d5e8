#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

#include "socketwatch/gateway.hpp"
#include "socketwatch/scenario.hpp"
#include "socketwatch/socket_sim.hpp"

namespace socketwatch::sim {

struct FleetStats {
    std::uint64_t events = 0;         // switch-ons detected or injected
    std::uint64_t notifications = 0;  // SMS sent by configured sockets
    std::uint64_t direct = 0;         // ... of which went straight to a person
    std::uint64_t dropped = 0;        // events on unconfigured sockets
};

/// The device side of a scenario: one SocketState per socket id, created on
/// first mention.
class SocketFleet {
public:
    SocketFleet(Address server_address, DetectorParams detector);

    /// Applies one scenario line. DIRECT-mode SMS go out on `direct_channel`
    /// (the GSM network); MIDDLEWARE-mode SMS are returned for the gateway.
    /// Throws ScenarioError for SMS bodies a socket cannot accept.
    std::vector<codec::Envelope> step(const ScenarioLine& line, routing::Transport* direct_channel);

    const FleetStats& stats() const noexcept { return stats_; }
    const SocketState* socket(const SocketId& id) const;

private:
    SocketState& state(const SocketId& id);
    void emit(SocketState& state, const SwitchOnEvent& event, Timestamp now,
              routing::Transport* direct_channel, std::vector<codec::Envelope>& to_server);

    Address server_address_;
    DetectorParams detector_;
    std::map<SocketId, SocketState> sockets_;
    FleetStats stats_;
};

/// Tick-before-ingest: advances the deployment's clock to the line's time,
/// then lets the fleet act and feeds resulting envelopes to the gateway.
void run_line(const ScenarioLine& line, SocketFleet& fleet, Deployment& deployment);

struct SimulationSummary {
    FleetStats fleet;
    std::uint64_t dead_letters = 0;
    std::uint64_t alarms = 0;

    /// `key=value` lines.
    void write(std::ostream& out) const;
};

SimulationSummary simulate(const std::vector<ScenarioLine>& lines, const ServiceConfig& config);

}  // namespace socketwatch::sim
