#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "socketwatch/model.hpp"

namespace socketwatch {

struct EngineParams {
    int pattern_days = 3;    // K: consecutive hit-days that form a pattern
    int grace_minutes = 15;  // G: delay after bin end before declaring absence
    int bin_size_minutes = 60;
    std::int64_t reorder_tolerance_seconds = 0;

    /// Throws ConfigError on K < 2, G < 0, a bin size that does not divide
    /// a day, or a negative tolerance.
    void validate() const;
    BinSpec bins() const { return BinSpec(bin_size_minutes); }
    std::int64_t grace_seconds() const noexcept { return std::int64_t{grace_minutes} * 60; }
};

struct PatternState {
    SocketId socket;
    DayBin bin;
    int consecutive_hits = 0;
    std::optional<Date> last_hit_date;
    bool active = false;

    friend bool operator==(const PatternState&, const PatternState&) = default;
};

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutOfOrderEvent : public EngineError {
public:
    using EngineError::EngineError;
};

class DuplicateClose : public EngineError {
public:
    using EngineError::EngineError;
};

class PrematureClose : public EngineError {
public:
    using EngineError::EngineError;
};

class UnknownSocket : public EngineError {
public:
    using EngineError::EngineError;
};

/// Learns per-(socket, bin) consecutive-day usage streaks and raises an
/// absence alarm when an active streak's bin closes without an event.
///
/// Bins are closed by an external scheduler in chronological order per
/// socket. Closing a slot marks it final: later events that fall into a
/// closed slot are rejected as out of order. Not internally synchronized;
/// callers serialize access per engine.
class PatternEngine {
public:
    explicit PatternEngine(EngineParams params = {});

    const EngineParams& params() const noexcept { return params_; }

    /// Registers a socket seen through a config record (no events yet).
    void note_socket(const SocketId& socket);
    bool knows(const SocketId& socket) const;
    /// Sockets seen through events or config, in id order.
    std::vector<SocketId> sockets() const;

    /// Throws OutOfOrderEvent exactly when ingest_event would; no mutation.
    void check_event(const SwitchOnEvent& event) const;

    /// Counts the first event of each (socket, bin, date); duplicates are
    /// no-ops. Returns the bin's state after the update.
    PatternState ingest_event(const SwitchOnEvent& event);

    /// Final verdict for one (socket, bin, date). Returns an alarm iff the
    /// bin's pattern is active and no event landed in it that day; the
    /// streak then restarts from zero.
    std::optional<Alarm> close_bin(const SocketId& socket, DayBin bin, Date date, Timestamp now);

    /// Bins with a live streak or an active pattern, sorted by bin.
    std::vector<PatternState> snapshot(const SocketId& socket) const;

private:
    struct BinCounter {
        int hits = 0;
        std::optional<Date> last_hit_date;
    };

    struct SocketPatterns {
        explicit SocketPatterns(int bins_per_day) : bins(static_cast<std::size_t>(bins_per_day)) {}

        std::vector<BinCounter> bins;
        bool seen = false;
        std::optional<Timestamp> high_water;
        std::optional<std::int64_t> closed_through;  // slot index
    };

    std::int64_t slot_of(Date date, int bin) const noexcept;
    SocketPatterns& entry(const SocketId& socket);
    PatternState state_of(const SocketId& socket, int bin, const BinCounter& counter) const;

    EngineParams params_;
    BinSpec bins_;
    std::map<SocketId, SocketPatterns> sockets_;
};

}  // namespace socketwatch
