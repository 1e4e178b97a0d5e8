#pragma once

#include <atomic>

#include "socketwatch/model.hpp"

namespace socketwatch {

class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() const = 0;
};

/// Scenario-driven time. Only moves when told to.
class LogicalClock final : public Clock {
public:
    explicit LogicalClock(Timestamp start = {}) : seconds_(start.seconds) {}

    Timestamp now() const override { return Timestamp{seconds_.load()}; }
    void set(Timestamp t) { seconds_.store(t.seconds); }

private:
    std::atomic<std::int64_t> seconds_;
};

/// System time shifted into the deployment's fixed civil offset.
class WallClock final : public Clock {
public:
    explicit WallClock(int utc_offset_minutes = 0) : offset_minutes_(utc_offset_minutes) {}
    Timestamp now() const override;

private:
    int offset_minutes_;
};

}  // namespace socketwatch
