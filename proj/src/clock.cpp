#include "socketwatch/clock.hpp"

#include <chrono>

namespace socketwatch {

Timestamp WallClock::now() const {
    const auto since_epoch = std::chrono::system_clock::now().time_since_epoch();
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(since_epoch).count();
    return Timestamp{secs + std::int64_t{offset_minutes_} * 60};
}

}  // namespace socketwatch
