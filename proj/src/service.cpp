#include "socketwatch/service.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <string>

#include "socketwatch/gateway.hpp"

namespace socketwatch {

namespace {

class FileDescriptor {
public:
    explicit FileDescriptor(int fd = -1) : fd_(fd) {}
    ~FileDescriptor() {
        if (fd_ >= 0) ::close(fd_);
    }
    FileDescriptor(FileDescriptor&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    FileDescriptor& operator=(FileDescriptor&& other) noexcept {
        if (this != &other) {
            if (fd_ >= 0) ::close(fd_);
            fd_ = std::exchange(other.fd_, -1);
        }
        return *this;
    }
    int get() const noexcept { return fd_; }

private:
    int fd_;
};

void feed_line(Gateway& gateway, std::string_view line, bool logical, const Clock& wall,
               std::ostream& diagnostics) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) return;
    std::optional<codec::Envelope> env;
    try {
        env = parse_frame(line);
    } catch (const FrameError& e) {
        // No trustworthy receipt time on a broken frame.
        gateway.dead_letter(logical ? "-" : wall.now().to_string(), "-", line, e.what());
        diagnostics << "dead letter: " << e.what() << '\n';
        return;
    }
    if (logical) {
        gateway.process_frame(*env);
    } else {
        gateway.tick(wall.now());
        gateway.ingest(*env);
    }
}

int serve_file(Gateway& gateway, const std::filesystem::path& input, std::ostream& diagnostics,
               const ServeHooks& hooks) {
    std::ifstream in(input, std::ios::binary);
    if (!in) {
        diagnostics << "cannot open input " << input << '\n';
        return kExitIo;
    }
    const WallClock wall;  // not consulted on the scenario clock
    std::string line;
    while (std::getline(in, line)) {
        if (hooks.stop && hooks.stop->load()) break;
        feed_line(gateway, line, /*logical=*/true, wall, diagnostics);
    }
    return kExitOk;
}

int serve_tcp(Gateway& gateway, const ListenEndpoint& endpoint, int utc_offset_minutes,
              std::ostream& diagnostics, const ServeHooks& hooks) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* found = nullptr;
    const auto port = std::to_string(endpoint.port);
    if (const int rc = ::getaddrinfo(endpoint.host.c_str(), port.c_str(), &hints, &found); rc != 0) {
        diagnostics << "cannot resolve " << endpoint.host << ": " << ::gai_strerror(rc) << '\n';
        return kExitIo;
    }
    FileDescriptor listener(::socket(found->ai_family, found->ai_socktype | SOCK_CLOEXEC, 0));
    int one = 1;
    const bool ok = listener.get() >= 0 &&
                    ::setsockopt(listener.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one) == 0 &&
                    ::bind(listener.get(), found->ai_addr, found->ai_addrlen) == 0 &&
                    ::listen(listener.get(), 16) == 0;
    const int bind_errno = errno;
    ::freeaddrinfo(found);
    if (!ok) {
        diagnostics << "cannot listen on " << endpoint.host << ':' << endpoint.port << ": "
                    << std::strerror(bind_errno) << '\n';
        return kExitIo;
    }

    sockaddr_storage bound{};
    socklen_t bound_len = sizeof bound;
    ::getsockname(listener.get(), reinterpret_cast<sockaddr*>(&bound), &bound_len);
    const int bound_port = ntohs(bound.ss_family == AF_INET6
                                     ? reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port
                                     : reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
    diagnostics << "listening on " << endpoint.host << ':' << bound_port << '\n';
    if (hooks.on_listening) hooks.on_listening(bound_port);

    const WallClock wall(utc_offset_minutes);
    std::map<int, std::pair<FileDescriptor, std::string>> clients;

    while (!(hooks.stop && hooks.stop->load())) {
        std::vector<pollfd> fds{{listener.get(), POLLIN, 0}};
        for (const auto& [fd, client] : clients) fds.push_back({fd, POLLIN, 0});
        const int ready = ::poll(fds.data(), fds.size(), 1000);
        if (ready < 0 && errno != EINTR) {
            diagnostics << "poll failed: " << std::strerror(errno) << '\n';
            return kExitIo;
        }
        gateway.tick(wall.now());
        if (ready <= 0) continue;

        if (fds[0].revents & POLLIN) {
            FileDescriptor conn(::accept4(listener.get(), nullptr, nullptr, SOCK_CLOEXEC));
            if (conn.get() >= 0) {
                const int fd = conn.get();
                clients.emplace(fd, std::make_pair(std::move(conn), std::string{}));
            }
        }
        for (std::size_t i = 1; i < fds.size(); ++i) {
            if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            auto& [conn, buffer] = clients.at(fds[i].fd);
            char chunk[4096];
            const auto n = ::read(conn.get(), chunk, sizeof chunk);
            if (n > 0) buffer.append(chunk, static_cast<std::size_t>(n));
            for (auto nl = buffer.find('\n'); nl != std::string::npos; nl = buffer.find('\n')) {
                feed_line(gateway, std::string_view(buffer).substr(0, nl), /*logical=*/false, wall,
                          diagnostics);
                buffer.erase(0, nl + 1);
            }
            if (n <= 0) clients.erase(fds[i].fd);
        }
    }
    return kExitOk;
}

}  // namespace

int run_service(const ServiceConfig& config, std::ostream& diagnostics, const ServeHooks& hooks) {
    if (!config.listen && !config.input) {
        diagnostics << "config error: set listen=<host:port> or input=<path>\n";
        return kExitConfig;
    }
    try {
        auto deployment = make_deployment(config);
        for (const auto& w : deployment.gateway->startup_replay().warnings)
            diagnostics << "warning: " << w << '\n';
        if (config.input) return serve_file(*deployment.gateway, *config.input, diagnostics, hooks);
        return serve_tcp(*deployment.gateway, *config.listen, config.utc_offset_minutes, diagnostics,
                         hooks);
    } catch (const ConfigError& e) {
        diagnostics << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        diagnostics << "io error: " << e.what() << '\n';
        return kExitIo;
    }
}

}  // namespace socketwatch
