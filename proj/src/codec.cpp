#include "socketwatch/codec.hpp"

#include <algorithm>
#include <vector>

namespace socketwatch::codec {

namespace {

std::string describe(ParseErrorKind kind, const std::string& token) {
    return std::string(to_string(kind)) + ": '" + token + "'";
}

// Splits on single spaces. Empty fields (leading, trailing or doubled
// spaces) are kept so the caller can reject them.
std::vector<std::string_view> split_tokens(std::string_view body) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = body.find(' ', start);
        if (pos == std::string_view::npos) {
            out.push_back(body.substr(start));
            return out;
        }
        out.push_back(body.substr(start, pos - start));
        start = pos + 1;
    }
}

[[noreturn]] void fail(ParseErrorKind kind, std::string_view token) {
    throw ParseError(kind, std::string(token));
}

}  // namespace

std::string_view to_string(ParseErrorKind kind) noexcept {
    switch (kind) {
        case ParseErrorKind::kUnknownKeyword: return "UnknownKeyword";
        case ParseErrorKind::kMalformedAddress: return "MalformedAddress";
        case ParseErrorKind::kMalformedSocketId: return "MalformedSocketId";
        case ParseErrorKind::kMalformedTimestamp: return "MalformedTimestamp";
        case ParseErrorKind::kMalformedBody: return "MalformedBody";
    }
    return "?";
}

ParseError::ParseError(ParseErrorKind kind, std::string token)
    : std::runtime_error(describe(kind, token)), kind_(kind), token_(std::move(token)) {}

bool is_valid_body(std::string_view body) noexcept {
    return body.size() <= kMaxBodyLength &&
           std::all_of(body.begin(), body.end(), [](char c) { return c >= 0x20 && c < 0x7f; });
}

Message parse(std::string_view body) {
    if (!is_valid_body(body)) fail(ParseErrorKind::kMalformedBody, body);

    const auto tokens = split_tokens(body);
    // Tokens are separated by exactly one space.
    for (const auto token : tokens)
        if (token.empty()) fail(ParseErrorKind::kMalformedBody, body);
    const auto keyword = tokens.front();

    if (keyword == "CFG") {
        if (tokens.size() != 2) fail(ParseErrorKind::kMalformedBody, body);
        if (!Address::is_valid(tokens[1])) fail(ParseErrorKind::kMalformedAddress, tokens[1]);
        return ConfigMessage{Address(std::string(tokens[1]))};
    }

    if (keyword == "ON") {
        if (tokens.size() != 2 && tokens.size() != 3) fail(ParseErrorKind::kMalformedBody, body);
        if (!SocketId::is_valid(tokens[1])) fail(ParseErrorKind::kMalformedSocketId, tokens[1]);
        Notification n{SocketId(std::string(tokens[1])), std::nullopt};
        if (tokens.size() == 3) {
            const auto stamp = tokens[2];
            if (stamp.empty() || stamp.front() != '@')
                fail(ParseErrorKind::kMalformedTimestamp, stamp);
            n.at_override = Timestamp::parse(stamp.substr(1));
            if (!n.at_override) fail(ParseErrorKind::kMalformedTimestamp, stamp);
        }
        return n;
    }

    fail(ParseErrorKind::kUnknownKeyword, keyword);
}

std::string serialize(const Message& msg) {
    if (const auto* cfg = std::get_if<ConfigMessage>(&msg)) {
        return "CFG " + cfg->destination.str();
    }
    const auto& n = std::get<Notification>(msg);
    std::string out = "ON " + n.socket.str();
    if (n.at_override) out += " @" + n.at_override->to_string();
    return out;
}

}  // namespace socketwatch::codec
