#include "socketwatch/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace socketwatch::sim {

namespace {

std::string_view next_field(std::string_view& rest) {
    const auto pos = rest.find(' ');
    const auto field = rest.substr(0, pos);
    rest = pos == std::string_view::npos ? std::string_view{} : rest.substr(pos + 1);
    return field;
}

SocketId socket_field(std::size_t n, std::string_view token) {
    if (!SocketId::is_valid(token))
        throw ScenarioError(n, "malformed socket id '" + std::string(token) + "'");
    return SocketId(std::string(token));
}

double amps_field(std::size_t n, std::string_view token) {
    double value = 0.0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (token.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value) || value < 0.0)
        throw ScenarioError(n, "malformed current value '" + std::string(token) + "'");
    return value;
}

ScenarioLine parse_line(std::size_t n, std::string_view line) {
    std::string_view rest = line;
    const auto stamp = next_field(rest);
    const auto at = Timestamp::parse(stamp);
    if (!at) throw ScenarioError(n, "malformed timestamp '" + std::string(stamp) + "'");

    const auto verb = next_field(rest);
    if (verb == "SAMPLE") {
        const auto socket = socket_field(n, next_field(rest));
        const auto amps_token = next_field(rest);
        if (!rest.empty()) throw ScenarioError(n, "trailing fields after SAMPLE");
        return {n, *at, SampleLine{socket, amps_field(n, amps_token)}};
    }
    if (verb == "SMS_TO_SOCKET") {
        const auto socket = socket_field(n, next_field(rest));
        if (rest.empty()) throw ScenarioError(n, "SMS_TO_SOCKET requires a body");
        return {n, *at, SmsToSocketLine{socket, std::string(rest)}};
    }
    if (verb == "EVENT") {
        const auto socket = socket_field(n, next_field(rest));
        if (!rest.empty()) throw ScenarioError(n, "trailing fields after EVENT");
        return {n, *at, EventLine{socket}};
    }
    throw ScenarioError(n, "unknown scenario verb '" + std::string(verb) + "'");
}

}  // namespace

ScenarioError::ScenarioError(std::size_t line_number, const std::string& what)
    : std::runtime_error("line " + std::to_string(line_number) + ": " + what),
      line_number_(line_number) {}

std::vector<ScenarioLine> parse_scenario(std::istream& in) {
    std::vector<ScenarioLine> lines;
    std::string raw;
    std::size_t n = 0;
    while (std::getline(in, raw)) {
        ++n;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty() || raw.front() == '#') continue;
        auto parsed = parse_line(n, raw);
        if (!lines.empty() && parsed.at < lines.back().at)
            throw ScenarioError(n, "timestamp goes backwards");
        lines.push_back(std::move(parsed));
    }
    return lines;
}

std::vector<ScenarioLine> load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
    return parse_scenario(in);
}

}  // namespace socketwatch::sim
