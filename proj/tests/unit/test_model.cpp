#include "doctest.h"
#include "socketwatch/model.hpp"

using namespace socketwatch;

namespace {

Timestamp at(const char* iso) { return *Timestamp::parse(iso); }

}  // namespace

TEST_CASE("bin_of on the documented instants") {
    CHECK(bin_of(at("2015-02-10T10:30:00"), 60).index == 10);
    CHECK(bin_of(at("2015-02-10T00:00:00"), 60).index == 0);
    CHECK(bin_of(at("2015-02-10T23:59:59"), 30).index == 47);
}

TEST_CASE("bin_of rejects sizes that do not divide a day") {
    CHECK_THROWS_AS(bin_of(at("2015-02-10T10:30:00"), 7), ConfigError);
    CHECK_THROWS_AS(bin_of(at("2015-02-10T10:30:00"), 0), ConfigError);
    CHECK_THROWS_AS(BinSpec(-60), ConfigError);
}

TEST_CASE("every minute of the day lands in the bin that contains it") {
    const Date day = Date::from_ymd(2016, 2, 29);
    for (int size : {1, 5, 15, 30, 60, 90, 120, 240, 720, 1440}) {
        const BinSpec spec(size);
        int previous = 0;
        for (int minute = 0; minute < 1440; ++minute) {
            const auto t = Timestamp::from_civil(day, minute / 60, minute % 60, 59);
            const int b = spec.bin_of(t);
            CHECK(b >= 0);
            CHECK(b < spec.bins_per_day());
            CHECK(b >= previous);
            CHECK(spec.bin_start(day, b) <= t);
            CHECK(t < spec.bin_end(day, b));
            previous = b;
        }
    }
}

TEST_CASE("bin windows render as HH:MM-HH:MM") {
    CHECK(BinSpec(60).window(10) == "10:00-11:00");
    CHECK(BinSpec(60).window(23) == "23:00-24:00");
    CHECK(BinSpec(30).window(1) == "00:30-01:00");
}

TEST_CASE("timestamps parse only the exact civil form") {
    const auto t = at("2015-02-10T10:30:00");
    CHECK(t.to_string() == "2015-02-10T10:30:00");
    CHECK(t.date() == Date::from_ymd(2015, 2, 10));
    CHECK(t.minutes_since_midnight() == 630);
    CHECK_FALSE(Timestamp::parse("2015-02-10 10:30:00"));
    CHECK_FALSE(Timestamp::parse("2015-02-30T10:30:00"));
    CHECK_FALSE(Timestamp::parse("2015-02-10T24:00:00"));
    CHECK_FALSE(Timestamp::parse("2015-02-10T10:30:00Z"));
    CHECK_FALSE(Timestamp::parse("2015-2-10T10:30:00"));
}

TEST_CASE("timestamp text round-trips across years") {
    for (std::int64_t s = -86400 * 366; s < std::int64_t{86400} * 365 * 80; s += 86400 * 37 + 3671) {
        const Timestamp t{s};
        REQUIRE(Timestamp::parse(t.to_string()));
        CHECK(*Timestamp::parse(t.to_string()) == t);
    }
}

TEST_CASE("socket ids and addresses validate their shapes") {
    CHECK(SocketId::is_valid("S001"));
    CHECK(SocketId::is_valid("kitchen_cooker-1"));
    CHECK_FALSE(SocketId::is_valid(""));
    CHECK_FALSE(SocketId::is_valid("kitchen_cooker-12"));
    CHECK_FALSE(SocketId::is_valid("S 1"));
    CHECK_THROWS_AS(SocketId("bad/id"), InvalidValue);

    CHECK(Address::is_valid("+37126123456"));
    CHECK(Address::is_valid("push:user42"));
    CHECK(Address("push:user42").scheme() == "push");
    CHECK(Address("+37126123456").is_phone());
    CHECK_FALSE(Address::is_valid("+123456"));
    CHECK_FALSE(Address::is_valid("+1234567890123456"));
    CHECK_FALSE(Address::is_valid("37126123456"));
    CHECK_FALSE(Address::is_valid("push:"));
    CHECK_FALSE(Address::is_valid("1push:x"));
    CHECK_FALSE(Address::is_valid("push:a b"));
}

TEST_CASE("alarm text and dedupe key") {
    const Alarm a{SocketId("S001"), DayBin{10}, Date::from_ymd(2015, 2, 13), at("2015-02-13T11:15:00")};
    CHECK(a.dedupe_key() == "S001/2015-02-13/10");
    CHECK(a.body() == "ALARM S001 2015-02-13 bin=10 no activity in usual time");
}
