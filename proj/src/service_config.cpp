#include "socketwatch/service_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace socketwatch {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

int to_int(std::string_view key, std::string_view value) {
    int out = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (value.empty() || ec != std::errc{} || ptr != end)
        throw ConfigError("'" + std::string(key) + "' expects an integer, got '" + std::string(value) + "'");
    return out;
}

double to_double(std::string_view key, std::string_view value) {
    double out = 0.0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (value.empty() || ec != std::errc{} || ptr != end || !std::isfinite(out))
        throw ConfigError("'" + std::string(key) + "' expects a number, got '" + std::string(value) + "'");
    return out;
}

bool to_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("'" + std::string(key) + "' expects true/false, got '" + std::string(value) + "'");
}

Address to_address(std::string_view key, std::string_view value) {
    if (!Address::is_valid(value))
        throw ConfigError("'" + std::string(key) + "' is not a valid address: '" + std::string(value) + "'");
    return Address(std::string(value));
}

std::vector<Address> to_address_list(std::string_view key, std::string_view value) {
    std::vector<Address> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        auto comma = value.find(',', start);
        if (comma == std::string_view::npos) comma = value.size();
        out.push_back(to_address(key, trim(value.substr(start, comma - start))));
        start = comma + 1;
    }
    return out;
}

ListenEndpoint to_endpoint(std::string_view value) {
    const auto colon = value.rfind(':');
    if (colon == std::string_view::npos || colon == 0)
        throw ConfigError("listen expects host:port, got '" + std::string(value) + "'");
    ListenEndpoint ep{std::string(value.substr(0, colon)), to_int("listen", value.substr(colon + 1))};
    if (ep.port < 0 || ep.port > 65535) throw ConfigError("listen port out of range");
    return ep;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

void ServiceConfig::validate() const {
    engine.validate();
    if (router.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
    if (router.backoff.count() < 0) throw ConfigError("backoff_seconds must be >= 0");
    detector.validate();
    if (listen && input) throw ConfigError("set either listen or input, not both");
    if (utc_offset_minutes < -14 * 60 || utc_offset_minutes > 14 * 60)
        throw ConfigError("utc_offset_minutes out of range");
}

const std::vector<Address>& ServiceConfig::recipients_for(const SocketId& socket) const {
    const auto it = recipients.find(socket.str());
    return it != recipients.end() ? it->second : default_recipients;
}

ServiceConfig parse_service_config(std::istream& in) {
    ServiceConfig cfg;
    bool have_server = false;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));

        if (key == "server_address") {
            cfg.server_address = to_address(key, value);
            have_server = true;
        } else if (key == "bin_size_minutes") {
            cfg.engine.bin_size_minutes = to_int(key, value);
        } else if (key == "pattern_days") {
            cfg.engine.pattern_days = to_int(key, value);
        } else if (key == "grace_minutes") {
            cfg.engine.grace_minutes = to_int(key, value);
        } else if (key == "reorder_tolerance_seconds") {
            cfg.engine.reorder_tolerance_seconds = to_int(key, value);
        } else if (key == "utc_offset_minutes") {
            cfg.utc_offset_minutes = to_int(key, value);
        } else if (key == "log_path") {
            cfg.log_path = std::string(value);
        } else if (key == "dead_letter_path") {
            cfg.dead_letter_path = std::string(value);
        } else if (key == "listen") {
            cfg.listen = to_endpoint(value);
        } else if (key == "input") {
            cfg.input = std::string(value);
        } else if (key == "forward_notifications") {
            cfg.forward_notifications = to_bool(key, value);
        } else if (key == "max_attempts") {
            cfg.router.max_attempts = to_int(key, value);
        } else if (key == "backoff_seconds") {
            cfg.router.backoff = std::chrono::seconds(to_int(key, value));
        } else if (key == "i_on_amps") {
            cfg.detector.i_on_amps = to_double(key, value);
        } else if (key == "debounce_seconds") {
            cfg.detector.debounce_seconds = to_int(key, value);
        } else if (starts_with(key, "outbox.") && key.size() > 7) {
            cfg.outboxes[std::string(key.substr(7))] = std::string(value);
        } else if (starts_with(key, "route.") && key.size() > 6) {
            cfg.scheme_routes[std::string(key.substr(6))] = std::string(value);
        } else if (key == "recipient.default") {
            cfg.default_recipients = to_address_list(key, value);
        } else if (starts_with(key, "recipient.")) {
            const auto socket = key.substr(10);
            if (!SocketId::is_valid(socket))
                throw ConfigError("bad socket id in '" + std::string(key) + "'");
            cfg.recipients[std::string(socket)] = to_address_list(key, value);
        } else {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                              std::string(key) + "'");
        }
    }
    if (!have_server) throw ConfigError("server_address is required");
    cfg.validate();
    return cfg;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    return parse_service_config(in);
}

}  // namespace socketwatch
