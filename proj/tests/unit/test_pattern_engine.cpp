#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "socketwatch/pattern_engine.hpp"

using namespace socketwatch;

namespace {

const SocketId kS("S001");
const Date kDay1 = Date::from_ymd(2015, 2, 10);

Date day(int n) { return Date{kDay1.days + n - 1}; }

SwitchOnEvent event_at(int n, int hour, int minute) {
    return {kS, Timestamp::from_civil(day(n), hour, minute, 0), EventSource::kDeviceReported};
}

Timestamp deadline(int n, int bin) { return Timestamp::from_civil(day(n), bin + 1, 15, 0); }

}  // namespace

TEST_CASE("three consecutive days form a pattern") {
    PatternEngine engine;
    PatternState s = engine.ingest_event(event_at(1, 10, 30));
    s = engine.ingest_event(event_at(2, 10, 30));
    s = engine.ingest_event(event_at(3, 10, 30));
    CHECK(s.consecutive_hits == 3);
    CHECK(s.active);
    CHECK(s.bin.index == 10);
    CHECK(s.last_hit_date == day(3));

    const auto snap = engine.snapshot(kS);
    REQUIRE(snap.size() == 1);
    CHECK(snap[0] == s);
}

TEST_CASE("a gap restarts the streak") {
    PatternEngine engine;
    engine.ingest_event(event_at(1, 10, 30));
    engine.ingest_event(event_at(2, 10, 30));
    const auto s = engine.ingest_event(event_at(4, 10, 30));
    CHECK(s.consecutive_hits == 1);
    CHECK_FALSE(s.active);
}

TEST_CASE("two events in one bin on one day count once") {
    PatternEngine engine;
    engine.ingest_event(event_at(1, 10, 5));
    const auto s = engine.ingest_event(event_at(1, 10, 50));
    CHECK(s.consecutive_hits == 1);
}

TEST_CASE("absence on day four raises one alarm and resets the streak") {
    PatternEngine engine;
    for (int n = 1; n <= 3; ++n) engine.ingest_event(event_at(n, 10, 30));
    const auto alarm = engine.close_bin(kS, DayBin{10}, day(4), deadline(4, 10));
    REQUIRE(alarm);
    CHECK(alarm->bin.index == 10);
    CHECK(alarm->date == day(4));
    CHECK(alarm->raised_at == Timestamp::from_civil(day(4), 11, 15, 0));
    CHECK(engine.snapshot(kS).empty());
}

TEST_CASE("presence on day four suppresses the alarm") {
    PatternEngine engine;
    for (int n = 1; n <= 3; ++n) engine.ingest_event(event_at(n, 10, 30));
    const auto s = engine.ingest_event(event_at(4, 10, 20));
    CHECK(s.consecutive_hits == 4);
    CHECK_FALSE(engine.close_bin(kS, DayBin{10}, day(4), deadline(4, 10)));
    CHECK(engine.snapshot(kS).at(0).consecutive_hits == 4);
}

TEST_CASE("an unformed streak never alarms") {
    PatternEngine engine;
    engine.ingest_event(event_at(1, 10, 30));
    engine.ingest_event(event_at(2, 10, 30));
    CHECK_FALSE(engine.close_bin(kS, DayBin{10}, day(3), deadline(3, 10)));
    CHECK(engine.snapshot(kS).at(0).consecutive_hits == 2);
}

TEST_CASE("closing twice, too early or out of range is rejected") {
    PatternEngine engine;
    engine.ingest_event(event_at(1, 10, 30));
    CHECK_THROWS_AS(engine.close_bin(kS, DayBin{10}, day(1), deadline(1, 10).plus_seconds(-1)),
                    PrematureClose);
    CHECK_FALSE(engine.close_bin(kS, DayBin{10}, day(1), deadline(1, 10)));
    CHECK_THROWS_AS(engine.close_bin(kS, DayBin{10}, day(1), deadline(1, 10)), DuplicateClose);
    CHECK_THROWS_AS(engine.close_bin(kS, DayBin{9}, day(1), deadline(1, 10)), DuplicateClose);
    CHECK_THROWS_AS(engine.close_bin(kS, DayBin{24}, day(2), deadline(2, 10)), InvalidValue);
}

TEST_CASE("late or backwards events are out of order") {
    PatternEngine engine;
    engine.ingest_event(event_at(1, 10, 30));
    CHECK_THROWS_AS(engine.ingest_event(event_at(1, 10, 29)), OutOfOrderEvent);
    engine.close_bin(kS, DayBin{11}, day(1), deadline(1, 11));
    const SwitchOnEvent late{kS, Timestamp::from_civil(day(1), 11, 40, 0), EventSource::kDeviceReported};
    CHECK_THROWS_AS(engine.check_event(late), OutOfOrderEvent);
    CHECK_THROWS_AS(engine.ingest_event(late), OutOfOrderEvent);
    CHECK(engine.ingest_event(event_at(1, 12, 0)).consecutive_hits == 1);

    PatternEngine tolerant(EngineParams{3, 15, 60, 120});
    tolerant.ingest_event(event_at(1, 10, 30));
    CHECK_NOTHROW(tolerant.ingest_event(event_at(1, 10, 29)));
}

TEST_CASE("unknown sockets and config-only sockets") {
    PatternEngine engine;
    CHECK_THROWS_AS(engine.snapshot(kS), UnknownSocket);
    CHECK_FALSE(engine.knows(kS));
    engine.note_socket(kS);
    CHECK(engine.knows(kS));
    CHECK(engine.snapshot(kS).empty());
    CHECK(engine.sockets() == std::vector<SocketId>{kS});
}

TEST_CASE("parameters are validated") {
    CHECK_THROWS_AS(PatternEngine(EngineParams{1, 15, 60, 0}), ConfigError);
    CHECK_THROWS_AS(PatternEngine(EngineParams{3, -1, 60, 0}), ConfigError);
    CHECK_THROWS_AS(PatternEngine(EngineParams{3, 15, 7, 0}), ConfigError);
    CHECK_THROWS_AS(PatternEngine(EngineParams{3, 15, 60, -1}), ConfigError);
}

TEST_CASE("random schedules match the day-by-day oracle, duplicates change nothing") {
    std::mt19937_64 rng(3);
    const int sizes[] = {60, 72, 80, 90, 96, 120, 180, 240, 360, 720, 1440};
    for (int trial = 0; trial < 200; ++trial) {
        const int size = sizes[rng() % std::size(sizes)];
        const int bins = 1440 / size;
        const int days = 1 + static_cast<int>(rng() % 14);
        const int k = 2 + static_cast<int>(rng() % 4);
        const int density = 50 + static_cast<int>(rng() % 50);
        std::vector<std::vector<bool>> hits(days, std::vector<bool>(bins));
        for (auto& row : hits)
            for (std::size_t b = 0; b < row.size(); ++b) row[b] = static_cast<int>(rng() % 100) < density;

        PatternEngine engine(EngineParams{k, 15, size, 0});
        const BinSpec spec(size);
        std::set<std::pair<int, int>> got;
        for (int d = 0; d < days; ++d) {
            const Date date{kDay1.days + d};
            for (int b = 0; b < bins; ++b) {
                if (!hits[d][b]) continue;
                const auto start = spec.bin_start(date, b);
                const auto first = engine.ingest_event({kS, start.plus_seconds(60), EventSource::kDeviceReported});
                const auto again = engine.ingest_event({kS, start.plus_seconds(90), EventSource::kDeviceReported});
                CHECK(first == again);
                CHECK(first.active == (first.consecutive_hits >= k));
            }
            for (int b = 0; b < bins; ++b) {
                const auto now = spec.bin_end(date, b).plus_seconds(15 * 60);
                if (const auto alarm = engine.close_bin(kS, DayBin{b}, date, now)) {
                    CHECK(alarm->raised_at >= now);
                    got.insert({d, b});
                }
            }
        }
        CHECK(got == oracle::absence_alarms(hits, k));
    }
}
