#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "socketwatch/model.hpp"

namespace socketwatch::store {

enum class LogKind { kEvent, kConfig, kAlarm };

std::string_view to_string(LogKind kind) noexcept;
std::optional<LogKind> parse_log_kind(std::string_view text) noexcept;

/// One log line: `<iso8601>\t<kind>\t<socket_id>\t<payload>`.
///
/// Payloads by kind:
///   EVENT  `<source>`                              at = event time
///   CONFIG `<sender> <body>`                       at = receipt time
///   ALARM  `date=<date> bin=<i> raised_at=<iso>`   at = end of the bin
struct LogRecord {
    Timestamp at;
    LogKind kind;
    SocketId socket;
    std::string payload;

    std::string to_line() const;  // without the trailing newline
    friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

LogRecord event_record(const SwitchOnEvent& event);
LogRecord alarm_record(const Alarm& alarm, const BinSpec& bins);
SwitchOnEvent event_from_record(const LogRecord& record);
Alarm alarm_from_record(const LogRecord& record);

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StorageFull : public StoreError {
public:
    using StoreError::StoreError;
};

class Corrupt : public StoreError {
public:
    using StoreError::StoreError;
};

/// Parses one complete line; throws Corrupt naming `line_number`.
LogRecord parse_record(std::string_view line, std::size_t line_number);

/// Single-writer append-only log. Opening recovers from a crash mid-write
/// by truncating a partial final line.
class EventLog {
public:
    enum class Durability { kFsync, kFlush };

    explicit EventLog(std::filesystem::path path, Durability durability = Durability::kFsync);
    ~EventLog();

    EventLog(const EventLog&) = delete;
    EventLog& operator=(const EventLog&) = delete;

    /// Writes one line and flushes it before returning.
    void append(const LogRecord& record);

    const std::filesystem::path& path() const noexcept { return path_; }
    /// True when opening had to drop a partial trailing line.
    bool recovered_partial_line() const noexcept { return recovered_; }

private:
    std::filesystem::path path_;
    Durability durability_;
    int fd_ = -1;
    bool recovered_ = false;
};

struct TimeRange {
    std::optional<Timestamp> from;
    std::optional<Timestamp> to;  // inclusive

    bool contains(Timestamp t) const noexcept {
        return (!from || t >= *from) && (!to || t <= *to);
    }
};

struct ReplayResult {
    std::size_t records = 0;
    std::vector<std::string> warnings;
};

/// Streams records in file order. A partial trailing line is dropped with a
/// warning; any other malformed line throws Corrupt. A missing file reads
/// as empty.
ReplayResult replay(const std::filesystem::path& path, const TimeRange& range,
                    const std::function<void(const LogRecord&)>& visit);

std::vector<LogRecord> read_all(const std::filesystem::path& path);

}  // namespace socketwatch::store
