#include "socketwatch/pattern_engine.hpp"

namespace socketwatch {

void EngineParams::validate() const {
    if (pattern_days < 2) throw ConfigError("pattern_days must be >= 2");
    if (grace_minutes < 0) throw ConfigError("grace_minutes must be >= 0");
    if (reorder_tolerance_seconds < 0) throw ConfigError("reorder tolerance must be >= 0");
    (void)BinSpec(bin_size_minutes);
}

PatternEngine::PatternEngine(EngineParams params)
    : params_(params), bins_(params.bin_size_minutes) {
    params_.validate();
}

std::int64_t PatternEngine::slot_of(Date date, int bin) const noexcept {
    return date.days * bins_.bins_per_day() + bin;
}

PatternEngine::SocketPatterns& PatternEngine::entry(const SocketId& socket) {
    auto it = sockets_.find(socket);
    if (it == sockets_.end()) it = sockets_.emplace(socket, SocketPatterns(bins_.bins_per_day())).first;
    return it->second;
}

PatternState PatternEngine::state_of(const SocketId& socket, int bin,
                                     const BinCounter& counter) const {
    return PatternState{socket, DayBin{bin}, counter.hits, counter.last_hit_date,
                        counter.hits >= params_.pattern_days};
}

void PatternEngine::note_socket(const SocketId& socket) { entry(socket).seen = true; }

bool PatternEngine::knows(const SocketId& socket) const {
    const auto it = sockets_.find(socket);
    return it != sockets_.end() && it->second.seen;
}

std::vector<SocketId> PatternEngine::sockets() const {
    std::vector<SocketId> out;
    for (const auto& [id, patterns] : sockets_)
        if (patterns.seen) out.push_back(id);
    return out;
}

void PatternEngine::check_event(const SwitchOnEvent& event) const {
    const auto it = sockets_.find(event.socket);
    if (it == sockets_.end()) return;
    const auto& patterns = it->second;
    if (patterns.high_water &&
        *patterns.high_water - event.at > params_.reorder_tolerance_seconds) {
        throw OutOfOrderEvent("event at " + event.at.to_string() + " precedes high-water mark " +
                              patterns.high_water->to_string() + " for socket " +
                              event.socket.str());
    }
    if (patterns.closed_through &&
        slot_of(event.at.date(), bins_.bin_of(event.at)) <= *patterns.closed_through) {
        throw OutOfOrderEvent("event at " + event.at.to_string() +
                              " falls in an already closed bin for socket " + event.socket.str());
    }
}

PatternState PatternEngine::ingest_event(const SwitchOnEvent& event) {
    check_event(event);
    auto& patterns = entry(event.socket);
    const Date date = event.at.date();
    const int bin = bins_.bin_of(event.at);

    patterns.seen = true;
    if (!patterns.high_water || event.at > *patterns.high_water) patterns.high_water = event.at;

    auto& counter = patterns.bins[static_cast<std::size_t>(bin)];
    if (!counter.last_hit_date || *counter.last_hit_date < date.prev()) {
        counter.hits = 1;
        counter.last_hit_date = date;
    } else if (*counter.last_hit_date == date.prev()) {
        ++counter.hits;
        counter.last_hit_date = date;
    }
    // last_hit_date >= date: already counted for this day.
    return state_of(event.socket, bin, counter);
}

std::optional<Alarm> PatternEngine::close_bin(const SocketId& socket, DayBin bin, Date date,
                                              Timestamp now) {
    if (bin.index < 0 || bin.index >= bins_.bins_per_day())
        throw InvalidValue("bin index out of range: " + std::to_string(bin.index));
    const Timestamp due = bins_.bin_end(date, bin.index).plus_seconds(params_.grace_seconds());
    if (now < due) {
        throw PrematureClose("close of " + alarm_dedupe_key(socket, date, bin) + " at " +
                             now.to_string() + " before " + due.to_string());
    }

    auto& patterns = entry(socket);
    const auto slot = slot_of(date, bin.index);
    if (patterns.closed_through && slot <= *patterns.closed_through)
        throw DuplicateClose("bin " + alarm_dedupe_key(socket, date, bin) + " already closed");
    patterns.closed_through = slot;

    auto& counter = patterns.bins[static_cast<std::size_t>(bin.index)];
    // Only a streak that ran through yesterday is "usual" for today. A stale
    // streak can only exist when earlier closes were skipped.
    const bool active = counter.hits >= params_.pattern_days;
    const bool current = counter.last_hit_date && *counter.last_hit_date == date.prev();
    if (!active || !current) return std::nullopt;

    // The streak has to re-form over K fresh days.
    counter.hits = 0;
    counter.last_hit_date.reset();
    return Alarm{socket, bin, date, now};
}

std::vector<PatternState> PatternEngine::snapshot(const SocketId& socket) const {
    const auto it = sockets_.find(socket);
    if (it == sockets_.end() || !it->second.seen)
        throw UnknownSocket("unknown socket " + socket.str());
    std::vector<PatternState> out;
    const auto& bins = it->second.bins;
    for (std::size_t b = 0; b < bins.size(); ++b) {
        if (bins[b].hits > 0) out.push_back(state_of(socket, static_cast<int>(b), bins[b]));
    }
    return out;
}

}  // namespace socketwatch
