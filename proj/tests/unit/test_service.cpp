#include <sys/socket.h>
#include <netinet/in.h>
#include <arpa/inet.h>
#include <unistd.h>

#include <future>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "socketwatch/event_store.hpp"
#include "socketwatch/service.hpp"
#include "test_support.hpp"

using namespace socketwatch;
using socketwatch::testing::TempDir;
using socketwatch::testing::read_lines;
using socketwatch::testing::write_file;

namespace {

ServiceConfig config_in(const TempDir& dir, const std::string& extra) {
    std::istringstream in("server_address=+37100000000\n"
                          "log_path=" + (dir / "events.log").string() + "\n" +
                          "dead_letter_path=" + (dir / "dead_letters.txt").string() + "\n" +
                          "outbox.sms=" + (dir / "outbox_sms.txt").string() + "\n" +
                          "recipient.S001=+37126123456\n" + extra);
    return parse_service_config(in);
}

}  // namespace

TEST_CASE("input-file mode runs frames on the scenario clock") {
    TempDir dir;
    write_file(dir / "frames.txt",
               "2015-02-10T10:30:06\tsim:S001\tON S001 @2015-02-10T10:30:00\n"
               "2015-02-11T10:30:06\tsim:S001\tON S001 @2015-02-11T10:30:00\n"
               "not a frame\n"
               "2015-02-12T10:30:06\tsim:S001\tON S001 @2015-02-12T10:30:00\n"
               "2015-02-13T23:00:00\tsim:S001\tPING\n");
    std::ostringstream diag;
    CHECK(run_service(config_in(dir, "input=" + (dir / "frames.txt").string() + "\n"), diag) == kExitOk);
    const auto dead = read_lines(dir / "dead_letters.txt");
    REQUIRE(dead.size() == 2);
    CHECK(dead[0].rfind("-\t-\tnot a frame\t", 0) == 0);
    const auto outbox = read_lines(dir / "outbox_sms.txt");
    CHECK(outbox.back() ==
          "2015-02-13T11:15:00\t+37126123456\tALARM S001 2015-02-13 bin=10 no activity in usual time");
}

TEST_CASE("missing source, bad input file") {
    TempDir dir;
    std::ostringstream diag;
    CHECK(run_service(config_in(dir, ""), diag) == kExitConfig);
    CHECK(run_service(config_in(dir, "input=" + (dir / "nope.txt").string() + "\n"), diag) == kExitIo);
}

TEST_CASE("a port that is already bound fails with exit 2") {
    const int blocker = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(blocker >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    REQUIRE(::bind(blocker, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    REQUIRE(::listen(blocker, 1) == 0);
    socklen_t len = sizeof addr;
    ::getsockname(blocker, reinterpret_cast<sockaddr*>(&addr), &len);
    const int port = ntohs(addr.sin_port);

    TempDir dir;
    std::ostringstream diag;
    CHECK(run_service(config_in(dir, "listen=127.0.0.1:" + std::to_string(port) + "\n"), diag) ==
          kExitIo);
    ::close(blocker);
}

TEST_CASE("tcp mode ingests frames until stopped") {
    TempDir dir;
    std::atomic<bool> stop{false};
    std::promise<int> bound;
    ServeHooks hooks;
    hooks.stop = &stop;
    hooks.on_listening = [&](int port) { bound.set_value(port); };
    std::ostringstream diag;
    auto cfg = config_in(dir, "listen=127.0.0.1:0\nforward_notifications=false\n");
    auto server = std::async(std::launch::async, [&] { return run_service(cfg, diag, hooks); });

    auto port_future = bound.get_future();
    REQUIRE(port_future.wait_for(std::chrono::seconds(5)) == std::future_status::ready);
    const int port = port_future.get();

    const int client = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    REQUIRE(::connect(client, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    const std::string frames =
        "2015-02-10T10:30:06\tsim:S001\tON S001 @2015-02-10T10:30:00\n"
        "2015-02-10T10:31:00\tsim:S001\tGARBAGE\n";
    REQUIRE(::write(client, frames.data(), frames.size()) == static_cast<ssize_t>(frames.size()));
    ::close(client);

    for (int i = 0; i < 50 && read_lines(dir / "dead_letters.txt").empty(); ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    stop = true;
    CHECK(server.get() == kExitOk);
    CHECK(store::read_all(dir / "events.log").size() == 1);
    CHECK(read_lines(dir / "dead_letters.txt").size() == 1);
}
