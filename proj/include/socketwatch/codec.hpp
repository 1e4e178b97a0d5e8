#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "socketwatch/model.hpp"

namespace socketwatch::codec {

/// SMS-sized body limit.
inline constexpr std::size_t kMaxBodyLength = 160;

/// `CFG <address>`: tells a socket where to send its notifications.
struct ConfigMessage {
    Address destination;
    friend bool operator==(const ConfigMessage&, const ConfigMessage&) = default;
};

/// `ON <socket_id>` or `ON <socket_id> @<iso8601>`.
struct Notification {
    SocketId socket;
    std::optional<Timestamp> at_override;
    friend bool operator==(const Notification&, const Notification&) = default;
};

using Message = std::variant<ConfigMessage, Notification>;

struct Envelope {
    Address sender;
    Timestamp received_at;
    std::string body;
};

enum class ParseErrorKind {
    kUnknownKeyword,
    kMalformedAddress,
    kMalformedSocketId,
    kMalformedTimestamp,
    kMalformedBody,  // framing: spacing, arity, length, non-printable bytes
};

std::string_view to_string(ParseErrorKind kind) noexcept;

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, std::string token);

    ParseErrorKind kind() const noexcept { return kind_; }
    /// The offending token (or the whole body for framing errors).
    const std::string& token() const noexcept { return token_; }

private:
    ParseErrorKind kind_;
    std::string token_;
};

Message parse(std::string_view body);
std::string serialize(const Message& msg);

/// Checks the single-line printable-ASCII and length constraints on a body.
bool is_valid_body(std::string_view body) noexcept;

}  // namespace socketwatch::codec
