#pragma once

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "socketwatch/model.hpp"

namespace socketwatch::sim {

/// `<iso8601> SAMPLE <socket_id> <amps>`
struct SampleLine {
    SocketId socket;
    double amps;
};

/// `<iso8601> SMS_TO_SOCKET <socket_id> <body>`
struct SmsToSocketLine {
    SocketId socket;
    std::string body;
};

/// `<iso8601> EVENT <socket_id>`: switch-on injected past the detector.
struct EventLine {
    SocketId socket;
};

struct ScenarioLine {
    std::size_t line_number;
    Timestamp at;
    std::variant<SampleLine, SmsToSocketLine, EventLine> action;
};

class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::size_t line_number, const std::string& what);
    std::size_t line_number() const noexcept { return line_number_; }

private:
    std::size_t line_number_;
};

/// Parses a scenario. Blank lines and `#` comments are skipped; lines must
/// be sorted by timestamp.
std::vector<ScenarioLine> parse_scenario(std::istream& in);
std::vector<ScenarioLine> load_scenario(const std::filesystem::path& path);

}  // namespace socketwatch::sim
