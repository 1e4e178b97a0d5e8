#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "socketwatch/alert_router.hpp"
#include "socketwatch/clock.hpp"
#include "socketwatch/codec.hpp"
#include "socketwatch/event_store.hpp"
#include "socketwatch/pattern_engine.hpp"
#include "socketwatch/service_config.hpp"

namespace socketwatch {

/// Drives PatternEngine::close_bin for every known socket as bin
/// deadlines (bin end + grace) pass. The first tick only sets the origin;
/// deadlines at or before it are never closed.
class BinScheduler {
public:
    explicit BinScheduler(const EngineParams& params);

    std::optional<Timestamp> last_tick() const noexcept { return last_tick_; }
    /// Earliest deadline after the last tick; nullopt before the first tick.
    std::optional<Timestamp> next_due() const;

    /// Closes every slot whose deadline is in (last tick, now], oldest first,
    /// stamping alarms with `now`. A `now` earlier than the last tick is a
    /// no-op.
    std::vector<Alarm> tick(PatternEngine& engine, Timestamp now);

    /// Logical-clock stepping: ticks at each deadline up to `t` in turn, then
    /// at `t`, so alarms carry their exact deadline as raise time.
    std::vector<Alarm> advance_to(PatternEngine& engine, Timestamp t);

private:
    BinSpec bins_;
    std::int64_t grace_seconds_;
    std::optional<Timestamp> last_tick_;
};

/// Wire frame `<iso8601>\t<sender>\t<body>`.
struct FrameError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

codec::Envelope parse_frame(std::string_view line);
std::string format_frame(const codec::Envelope& env);

/// Socket recorded for a server-side CONFIG: the id from a `sim:<id>`
/// sender, else `_unbound`.
SocketId config_socket_for(const Address& sender);

struct GatewayStats {
    std::uint64_t envelopes = 0;
    std::uint64_t events = 0;
    std::uint64_t configs = 0;
    std::uint64_t dead_letters = 0;
    std::uint64_t alarms = 0;
    std::uint64_t deliveries_sent = 0;
    std::uint64_t deliveries_failed = 0;
    std::uint64_t unrouted_alarms = 0;
};

/// Result of rebuilding engine state from a log.
struct LogReplay {
    std::vector<Alarm> alarms;            // every alarm the engine re-derived
    std::set<std::string> logged_alarms;  // dedupe keys with an ALARM record
    std::size_t records = 0;
    std::vector<std::string> warnings;
};

/// Feeds a log through `engine`, stepping `scheduler` on the logical clock
/// given by the records. Deterministic in (log, params).
LogReplay replay_log(const std::filesystem::path& log_path, PatternEngine& engine,
                     BinScheduler& scheduler);

/// The middleware: decodes envelopes, writes the log ahead of every engine
/// mutation, closes bins on the clock and hands alarms to the router.
/// Single-threaded; callers serialize ingest and tick.
class Gateway {
public:
    /// Opens (and recovers) the log, then replays it. Alarms already logged
    /// are not routed again; alarms re-derived but missing from the log are
    /// logged and routed.
    Gateway(ServiceConfig config, std::shared_ptr<routing::AlertRouter> router,
            std::shared_ptr<LogicalClock> clock);

    void ingest(const codec::Envelope& env);
    /// Closes due bins with `now` as the raise time (wall-clock mode).
    std::vector<Alarm> tick(Timestamp now);
    /// Scenario-clock mode: closes due bins at their exact deadlines.
    std::vector<Alarm> advance_to(Timestamp t);
    /// Tick-before-ingest on the logical clock.
    void process_frame(const codec::Envelope& env);

    /// Records an undecodable frame in the dead-letter file.
    void dead_letter(std::string_view stamp, std::string_view sender, std::string_view body,
                     std::string_view error);

    const PatternEngine& engine() const noexcept { return engine_; }
    const GatewayStats& stats() const noexcept { return stats_; }
    const ServiceConfig& config() const noexcept { return config_; }
    const LogReplay& startup_replay() const noexcept { return startup_; }
    routing::AlertRouter& router() noexcept { return *router_; }

private:
    void handle_alarms(const std::vector<Alarm>& alarms, bool replaying_logged);
    void route_to_recipients(std::vector<routing::Delivery> deliveries);

    ServiceConfig config_;
    std::shared_ptr<routing::AlertRouter> router_;
    std::shared_ptr<LogicalClock> clock_;
    PatternEngine engine_;
    BinScheduler scheduler_;
    store::EventLog log_;
    LogReplay startup_;
    GatewayStats stats_;
};

/// A gateway wired to stub outbox transports built from the config.
struct Deployment {
    std::shared_ptr<LogicalClock> clock;
    std::map<std::string, std::shared_ptr<routing::OutboxTransport>> transports;
    std::shared_ptr<routing::AlertRouter> router;
    std::unique_ptr<Gateway> gateway;
};

/// Builds transports and router, then opens the gateway (replaying its log).
/// `wait` is forwarded to the router for retry backoff.
Deployment make_deployment(const ServiceConfig& config,
                           std::function<void(std::chrono::seconds)> wait = {});

}  // namespace socketwatch
