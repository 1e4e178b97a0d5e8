#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "socketwatch/alert_router.hpp"
#include "socketwatch/model.hpp"
#include "socketwatch/pattern_engine.hpp"
#include "socketwatch/socket_sim.hpp"

namespace socketwatch {

struct ListenEndpoint {
    std::string host;
    int port = 0;
};

/// Everything a deployment needs. Loaded from flat `key=value` text:
///
///   server_address=+37100000000        # MIDDLEWARE-mode destination (required)
///   bin_size_minutes=60
///   pattern_days=3
///   grace_minutes=15
///   reorder_tolerance_seconds=0
///   utc_offset_minutes=0               # fixed civil timezone for wall-clock mode
///   log_path=events.log
///   dead_letter_path=dead_letters.txt
///   listen=127.0.0.1:7070              # or: input=frames.txt
///   outbox.sms=outbox_sms.txt          # one stub transport per outbox.<name>
///   route.push=push                    # URI scheme -> transport name
///   recipient.S001=+37126123456,push:daughter
///   recipient.default=+37126000000
///   forward_notifications=true
///   max_attempts=3
///   backoff_seconds=1
///   i_on_amps=0.10                     # simulated sockets only
///   debounce_seconds=5
///
/// Unknown keys are rejected.
struct ServiceConfig {
    Address server_address{"+10000000000"};
    EngineParams engine;
    int utc_offset_minutes = 0;
    std::filesystem::path log_path = "events.log";
    std::filesystem::path dead_letter_path = "dead_letters.txt";
    std::optional<ListenEndpoint> listen;
    std::optional<std::filesystem::path> input;
    std::map<std::string, std::filesystem::path> outboxes{{"sms", "outbox_sms.txt"},
                                                          {"push", "outbox_push.txt"},
                                                          {"webhook", "outbox_webhook.txt"}};
    std::map<std::string, std::string> scheme_routes;
    std::map<std::string, std::vector<Address>> recipients;  // by socket id
    std::vector<Address> default_recipients;
    bool forward_notifications = true;
    routing::RouterParams router;
    sim::DetectorParams detector;

    void validate() const;
    /// Explicit recipients for a socket, else the defaults.
    const std::vector<Address>& recipients_for(const SocketId& socket) const;
};

ServiceConfig parse_service_config(std::istream& in);
/// Throws ConfigError (including when the file cannot be read).
ServiceConfig load_service_config(const std::filesystem::path& path);

}  // namespace socketwatch
