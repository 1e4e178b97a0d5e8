#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace socketwatch {

/// Raised for invalid deployment parameters (bin size, pattern length, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a value violates its domain type's invariants.
class InvalidValue : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Short ASCII socket identifier: 1-16 chars of [A-Za-z0-9_-].
class SocketId {
public:
    static constexpr std::size_t kMaxLength = 16;

    explicit SocketId(std::string value);

    static bool is_valid(std::string_view value) noexcept;

    const std::string& str() const noexcept { return value_; }

    friend bool operator==(const SocketId&, const SocketId&) = default;
    friend auto operator<=>(const SocketId&, const SocketId&) = default;

private:
    std::string value_;
};

/// Destination identity: `+` and 7-15 digits, or `<scheme>:<opaque>` for
/// non-SMS transports.
class Address {
public:
    static constexpr std::size_t kMaxLength = 64;

    explicit Address(std::string value);

    static bool is_valid(std::string_view value) noexcept;
    static bool is_phone(std::string_view value) noexcept;

    bool is_phone() const noexcept { return is_phone(value_); }
    /// Scheme of a URI-form address; empty for phone numbers.
    std::string_view scheme() const noexcept;
    const std::string& str() const noexcept { return value_; }

    friend bool operator==(const Address&, const Address&) = default;
    friend auto operator<=>(const Address&, const Address&) = default;

private:
    std::string value_;
};

/// Calendar date as a day count from 1970-01-01.
struct Date {
    std::int64_t days = 0;

    static Date from_ymd(int year, unsigned month, unsigned day);
    /// Parses `YYYY-MM-DD`; nullopt on any deviation.
    static std::optional<Date> parse(std::string_view text);
    std::string to_string() const;

    Date next() const noexcept { return Date{days + 1}; }
    Date prev() const noexcept { return Date{days - 1}; }

    friend bool operator==(Date, Date) = default;
    friend auto operator<=>(Date, Date) = default;
};

/// Naive civil time at one-second resolution in the deployment's timezone.
struct Timestamp {
    static constexpr std::int64_t kSecondsPerDay = 86400;

    std::int64_t seconds = 0;  // since 1970-01-01T00:00:00 civil

    static Timestamp from_civil(Date date, int hour, int minute, int second);
    /// Parses `YYYY-MM-DDTHH:MM:SS` exactly (19 chars); nullopt otherwise.
    static std::optional<Timestamp> parse(std::string_view text);
    std::string to_string() const;

    Date date() const noexcept;
    std::int64_t seconds_since_midnight() const noexcept;
    std::int64_t minutes_since_midnight() const noexcept { return seconds_since_midnight() / 60; }

    Timestamp plus_seconds(std::int64_t s) const noexcept { return Timestamp{seconds + s}; }
    std::int64_t operator-(Timestamp other) const noexcept { return seconds - other.seconds; }

    friend bool operator==(Timestamp, Timestamp) = default;
    friend auto operator<=>(Timestamp, Timestamp) = default;
};

/// Time-of-day discretization. bin_size_minutes must divide 1440.
class BinSpec {
public:
    static constexpr int kMinutesPerDay = 1440;

    explicit BinSpec(int bin_size_minutes = 60);

    int size_minutes() const noexcept { return size_minutes_; }
    int bins_per_day() const noexcept { return kMinutesPerDay / size_minutes_; }

    int bin_of(Timestamp at) const noexcept;
    Timestamp bin_start(Date date, int bin) const noexcept;
    Timestamp bin_end(Date date, int bin) const noexcept;
    /// `HH:MM-HH:MM`; the last bin ends at `24:00`.
    std::string window(int bin) const;

private:
    int size_minutes_;
};

struct DayBin {
    int index = 0;
    friend bool operator==(DayBin, DayBin) = default;
    friend auto operator<=>(DayBin, DayBin) = default;
};

/// floor(minutes-since-midnight / bin_size_minutes). Throws ConfigError when
/// the size does not divide a day.
DayBin bin_of(Timestamp at, int bin_size_minutes);

enum class EventSource { kDeviceReported, kReplayed };

std::string_view to_string(EventSource source) noexcept;
std::optional<EventSource> parse_event_source(std::string_view text) noexcept;

struct SwitchOnEvent {
    SocketId socket;
    Timestamp at;
    EventSource source = EventSource::kDeviceReported;

    friend bool operator==(const SwitchOnEvent&, const SwitchOnEvent&) = default;
};

enum class DeliveryMode { kDirect, kMiddleware };

std::string_view to_string(DeliveryMode mode) noexcept;

struct SocketConfig {
    SocketId socket;
    Address destination;
    DeliveryMode mode = DeliveryMode::kDirect;

    friend bool operator==(const SocketConfig&, const SocketConfig&) = default;
};

struct Alarm {
    SocketId socket;
    DayBin bin;
    Date date;
    Timestamp raised_at;

    /// `<socket>/<date>/<bin>`
    std::string dedupe_key() const;
    /// `ALARM <socket_id> <date> bin=<index> no activity in usual time`
    std::string body() const;

    friend bool operator==(const Alarm&, const Alarm&) = default;
};

std::string alarm_dedupe_key(const SocketId& socket, Date date, DayBin bin);

}  // namespace socketwatch
