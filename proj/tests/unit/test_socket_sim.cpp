#include <random>
#include <tuple>

#include "doctest.h"
#include "oracles.hpp"
#include "socketwatch/socket_sim.hpp"

using namespace socketwatch;
using namespace socketwatch::sim;

namespace {

const Address kServer("+10000000000");
const Timestamp t0 = *Timestamp::parse("2015-02-10T10:30:00");

SocketState configured(const char* destination) {
    return apply_config(SocketState(SocketId("S001")), codec::ConfigMessage{Address(destination)},
                        Address("+37126123456"), kServer);
}

}  // namespace

TEST_CASE("delivery mode follows the configured destination") {
    CHECK(configured("+10000000000").config->mode == DeliveryMode::kMiddleware);
    CHECK(configured("+20000000000").config->mode == DeliveryMode::kDirect);

    auto s = configured("+20000000000");
    s = apply_config(s, codec::ConfigMessage{Address("+10000000000")}, Address("push:other"), kServer);
    CHECK(s.config->mode == DeliveryMode::kMiddleware);
    CHECK(s.config->destination == kServer);
}

TEST_CASE("sustained load confirms one event at the first crossing") {
    SocketState s(SocketId("S001"));
    std::optional<SwitchOnEvent> e;
    std::tie(s, e) = feed_sample(s, {t0, 0.5});
    CHECK_FALSE(e);
    CHECK(s.load == LoadState::kCandidate);
    std::tie(s, e) = feed_sample(s, {t0.plus_seconds(5), 0.5});
    REQUIRE(e);
    CHECK(e->at == t0);
    CHECK(s.load == LoadState::kOn);
}

TEST_CASE("flicker is rejected") {
    SocketState s(SocketId("S001"));
    std::optional<SwitchOnEvent> e;
    std::tie(s, e) = feed_sample(s, {t0, 0.5});
    std::tie(s, e) = feed_sample(s, {t0.plus_seconds(2), 0.0});
    CHECK_FALSE(e);
    CHECK(s.load == LoadState::kOff);
    CHECK_FALSE(s.candidate_since);
}

TEST_CASE("no retrigger while on") {
    SocketState s(SocketId("S001"), DetectorParams{0.1, 0});
    std::optional<SwitchOnEvent> e;
    std::tie(s, e) = feed_sample(s, {t0, 1.0});
    REQUIRE(e);
    std::tie(s, e) = feed_sample(s, {t0.plus_seconds(60), 5.0});
    CHECK_FALSE(e);
    CHECK(s.load == LoadState::kOn);
}

TEST_CASE("samples must not go back in time") {
    SocketState s(SocketId("S001"));
    s = feed_sample(s, {t0, 0.0}).first;
    CHECK_THROWS_AS(feed_sample(s, {t0.plus_seconds(-1), 0.0}), OutOfOrderSample);
    CHECK_THROWS_AS(feed_sample(s, {t0, -1.0}), InvalidValue);
}

TEST_CASE("notifications: middleware, direct and unconfigured") {
    const SwitchOnEvent event{SocketId("S001"), t0, EventSource::kDeviceReported};

    auto mw = configured("+10000000000");
    const auto sms = emit_notification(mw, event, t0.plus_seconds(6));
    REQUIRE(sms);
    CHECK(sms->to == kServer);
    CHECK(sms->envelope.body == "ON S001 @2015-02-10T10:30:00");
    CHECK(sms->envelope.sender == Address("sim:S001"));
    CHECK(sms->envelope.received_at == t0.plus_seconds(6));

    auto direct = configured("+37126123456");
    const auto relative = emit_notification(direct, event, t0);
    REQUIRE(relative);
    CHECK(relative->to == Address("+37126123456"));

    SocketState bare(SocketId("S001"));
    CHECK_FALSE(emit_notification(bare, event, t0));
    CHECK(bare.dropped_events == 1);
}

TEST_CASE("detector agrees with the sustained-run scanner on random traces") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const double i_on = 0.05 + (rng() % 100) / 100.0;
        const std::int64_t debounce = static_cast<std::int64_t>(rng() % 12);
        const int n = 1 + static_cast<int>(rng() % 400);
        std::vector<oracle::RawSample> trace;
        std::int64_t t = 0;
        for (int i = 0; i < n; ++i) {
            t += static_cast<std::int64_t>(rng() % 4);
            const double amps = (rng() % 3 == 0) ? 0.0 : (rng() % 300) / 100.0;
            trace.push_back({t, amps});
        }

        SocketState s(SocketId("S"), DetectorParams{i_on, debounce});
        int events = 0;
        for (const auto& sample : trace) {
            auto [next, e] = feed_sample(s, {t0.plus_seconds(sample.t), sample.amps});
            s = std::move(next);
            if (e) {
                ++events;
                CHECK(s.load == LoadState::kOn);
            }
            CHECK(s.candidate_since.has_value() == (s.load == LoadState::kCandidate));
        }
        CHECK(events == oracle::sustained_runs(trace, i_on, debounce));
    }
}
