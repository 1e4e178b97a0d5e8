#include <thread>

#include "doctest.h"
#include "socketwatch/alert_router.hpp"
#include "test_support.hpp"

using namespace socketwatch;
using namespace socketwatch::routing;
using socketwatch::testing::TempDir;
using socketwatch::testing::read_lines;

namespace {

const Alarm kAlarm{SocketId("S001"), DayBin{10}, Date::from_ymd(2015, 2, 13),
                   *Timestamp::parse("2015-02-13T11:15:00")};

struct Fixture {
    TempDir dir;
    std::shared_ptr<LogicalClock> clock =
        std::make_shared<LogicalClock>(*Timestamp::parse("2015-02-13T11:15:00"));
    std::shared_ptr<OutboxTransport> sms =
        std::make_shared<OutboxTransport>("sms", dir / "outbox_sms.txt", clock);
    AlertRouter router;

    Fixture() { router.register_transport(sms); }
};

class Throwing final : public Transport {
public:
    const std::string& name() const override { return name_; }
    SendResult send(const Address&, std::string_view) override {
        ++calls;
        throw std::runtime_error("modem unplugged");
    }
    int calls = 0;

private:
    std::string name_ = "sms";
};

}  // namespace

TEST_CASE("healthy sms stub delivers on the first attempt") {
    Fixture f;
    const auto d = f.router.route(alarm_delivery(kAlarm, Address("+20000000000")));
    CHECK(d.status == DeliveryStatus::kSent);
    CHECK(d.attempts == 1);
    const auto lines = read_lines(f.dir / "outbox_sms.txt");
    REQUIRE(lines.size() == 1);
    CHECK(lines[0] ==
          "2015-02-13T11:15:00\t+20000000000\tALARM S001 2015-02-13 bin=10 no activity in usual time");
}

TEST_CASE("the same key routed twice writes once") {
    Fixture f;
    f.router.route(alarm_delivery(kAlarm, Address("+20000000000")));
    const auto again = f.router.route(alarm_delivery(kAlarm, Address("+20000000000")));
    CHECK(again.status == DeliveryStatus::kSent);
    CHECK(again.attempts == 1);
    CHECK(f.sms->lines_written() == 1);
    CHECK(f.router.is_sent(kAlarm.dedupe_key(), Address("+20000000000")));

    f.router.route(alarm_delivery(kAlarm, Address("+30000000000")));
    CHECK(f.sms->lines_written() == 2);
}

TEST_CASE("two transient failures then success takes three attempts") {
    Fixture f;
    f.sms->script({SendResult::kTransientFailure, SendResult::kTransientFailure});
    const auto d = f.router.route(alarm_delivery(kAlarm, Address("+20000000000")));
    CHECK(d.status == DeliveryStatus::kSent);
    CHECK(d.attempts == 3);
    CHECK(f.router.logical_backoff() == std::chrono::seconds(2));
    CHECK(f.sms->lines_written() == 1);
}

TEST_CASE("retries stop at max_attempts and on permanent failure") {
    Fixture f;
    f.sms->script({SendResult::kTransientFailure, SendResult::kTransientFailure,
                   SendResult::kTransientFailure});
    auto d = f.router.route(alarm_delivery(kAlarm, Address("+20000000000")));
    CHECK(d.status == DeliveryStatus::kFailed);
    CHECK(d.attempts == 3);

    f.sms->script({SendResult::kPermanentFailure});
    d = f.router.route(alarm_delivery(kAlarm, Address("+30000000000")));
    CHECK(d.status == DeliveryStatus::kFailed);
    CHECK(d.attempts == 1);

    // A failed delivery may be retried later.
    d = f.router.route(alarm_delivery(kAlarm, Address("+30000000000")));
    CHECK(d.status == DeliveryStatus::kSent);
}

TEST_CASE("a throwing transport counts as transient") {
    AlertRouter router(RouterParams{2, std::chrono::seconds(1)});
    auto t = std::make_shared<Throwing>();
    router.register_transport(t);
    const auto d = router.route(alarm_delivery(kAlarm, Address("+20000000000")));
    CHECK(d.status == DeliveryStatus::kFailed);
    CHECK(t->calls == 2);
}

TEST_CASE("registration and resolution") {
    Fixture f;
    CHECK_THROWS_AS(f.router.register_transport(
                        std::make_shared<OutboxTransport>("sms", f.dir / "other.txt", f.clock)),
                    DuplicateTransport);
    CHECK_THROWS_AS(f.router.resolve(Address("push:user42")), NoTransport);

    auto push = std::make_shared<OutboxTransport>("push", f.dir / "outbox_push.txt", f.clock);
    f.router.register_transport(push);
    CHECK(f.router.resolve(Address("push:user42")) == "push");
    const auto d = f.router.route(alarm_delivery(kAlarm, Address("push:user42")));
    CHECK(d.status == DeliveryStatus::kSent);
    CHECK(push->lines_written() == 1);
    CHECK(f.sms->lines_written() == 0);

    f.router.route_scheme("tweet", "push");
    CHECK(f.router.resolve(Address("tweet:@gran")) == "push");
    f.router.route_address(Address("+20000000000"), "push");
    CHECK(f.router.resolve(Address("+20000000000")) == "push");
    f.router.route_scheme("mail", "nowhere");
    CHECK_THROWS_AS(f.router.resolve(Address("mail:x@y")), NoTransport);
}

TEST_CASE("seeded keys are treated as sent everywhere") {
    Fixture f;
    f.router.seed_sent(kAlarm.dedupe_key());
    const auto d = f.router.route(alarm_delivery(kAlarm, Address("+20000000000")));
    CHECK(d.status == DeliveryStatus::kSent);
    CHECK(f.sms->lines_written() == 0);
}

TEST_CASE("queued deliveries flush in order") {
    Fixture f;
    const SwitchOnEvent e{SocketId("S001"), *Timestamp::parse("2015-02-10T10:30:00"),
                          EventSource::kDeviceReported};
    f.router.enqueue(notification_delivery(e, Address("+20000000000"), "ON S001 @2015-02-10T10:30:00"));
    f.router.enqueue(alarm_delivery(kAlarm, Address("+20000000000")));
    CHECK(f.router.queued() == 2);
    const auto done = f.router.flush();
    CHECK(f.router.queued() == 0);
    REQUIRE(done.size() == 2);
    CHECK(done[0].kind == DeliveryKind::kNotification);
    CHECK(done[0].dedupe_key == "S001/2015-02-10T10:30:00");
    CHECK(done[1].kind == DeliveryKind::kAlarm);
    const auto lines = read_lines(f.dir / "outbox_sms.txt");
    REQUIRE(lines.size() == 2);
    CHECK(lines[0].find("ON S001") != std::string::npos);
}

TEST_CASE("concurrent routes of one alarm write one line") {
    Fixture f;
    std::vector<std::thread> threads;
    for (int i = 0; i < 32; ++i)
        threads.emplace_back([&] { f.router.route(alarm_delivery(kAlarm, Address("+20000000000"))); });
    for (auto& t : threads) t.join();
    CHECK(read_lines(f.dir / "outbox_sms.txt").size() == 1);
}
