#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "socketwatch/clock.hpp"
#include "socketwatch/model.hpp"

namespace socketwatch::routing {

enum class DeliveryKind { kNotification, kAlarm };
enum class DeliveryStatus { kPending, kSent, kFailed };
enum class SendResult { kSuccess, kTransientFailure, kPermanentFailure };

std::string_view to_string(DeliveryKind kind) noexcept;
std::string_view to_string(DeliveryStatus status) noexcept;
std::string_view to_string(SendResult result) noexcept;

struct Delivery {
    DeliveryKind kind = DeliveryKind::kAlarm;
    std::string dedupe_key;
    Address destination;
    std::string body;
    int attempts = 0;
    DeliveryStatus status = DeliveryStatus::kPending;
};

/// NOTIFICATION keyed `<socket>/<iso8601 event time>`.
Delivery notification_delivery(const SwitchOnEvent& event, const Address& to, std::string body);
/// ALARM keyed `<socket>/<date>/<bin>` with the fixed alarm text.
Delivery alarm_delivery(const Alarm& alarm, const Address& to);

/// A delivery channel. Retrying `send` must be harmless; deduplication is
/// the router's job.
class Transport {
public:
    virtual ~Transport() = default;
    virtual const std::string& name() const = 0;
    virtual SendResult send(const Address& destination, std::string_view body) = 0;
};

/// Stub transport appending `<iso8601>\t<destination>\t<body>` lines to a
/// file. Failures can be scripted ahead of time for tests.
class OutboxTransport final : public Transport {
public:
    OutboxTransport(std::string name, std::filesystem::path outbox,
                    std::shared_ptr<const Clock> clock);

    const std::string& name() const override { return name_; }
    SendResult send(const Address& destination, std::string_view body) override;

    /// Results returned (in order) by the next sends instead of writing.
    void script(std::vector<SendResult> results);
    std::size_t lines_written() const;
    const std::filesystem::path& outbox() const noexcept { return outbox_; }

private:
    std::string name_;
    std::filesystem::path outbox_;
    std::shared_ptr<const Clock> clock_;
    mutable std::mutex mutex_;
    std::deque<SendResult> scripted_;
    std::size_t lines_ = 0;
};

class RoutingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoTransport : public RoutingError {
public:
    using RoutingError::RoutingError;
};

class DuplicateTransport : public RoutingError {
public:
    using RoutingError::RoutingError;
};

struct RouterParams {
    int max_attempts = 3;
    std::chrono::seconds backoff{1};
};

/// Delivers notifications and alarms through registered transports with
/// bounded retries and at-most-once observable effect per
/// (dedupe key, destination).
///
/// Phone addresses resolve to the `sms` transport unless overridden; URI
/// addresses resolve by scheme, falling back to a transport named after the
/// scheme. Safe for concurrent callers.
class AlertRouter {
public:
    /// `wait` is called between retries; the default only accounts the
    /// delay on a logical counter.
    explicit AlertRouter(RouterParams params = {},
                         std::function<void(std::chrono::seconds)> wait = {});

    void register_transport(std::shared_ptr<Transport> transport);
    void route_scheme(std::string scheme, std::string transport_name);
    void route_address(const Address& address, std::string transport_name);

    /// Transport name for `destination`; throws NoTransport.
    std::string resolve(const Address& destination) const;

    Delivery route(Delivery delivery);

    /// Marks a key as already delivered to every destination (log replay).
    void seed_sent(const std::string& dedupe_key);
    bool is_sent(const std::string& dedupe_key, const Address& destination) const;

    /// Queue for later delivery; `flush` routes in FIFO order.
    void enqueue(Delivery delivery);
    std::vector<Delivery> flush();
    std::size_t queued() const;

    std::chrono::seconds logical_backoff() const;

private:
    using RecordKey = std::pair<std::string, std::string>;  // dedupe key, destination

    RouterParams params_;
    std::function<void(std::chrono::seconds)> wait_;

    mutable std::mutex mutex_;
    std::condition_variable settled_;
    std::map<std::string, std::shared_ptr<Transport>> transports_;
    std::map<std::string, std::string> scheme_routes_;
    std::map<std::string, std::string> address_routes_;
    std::map<RecordKey, Delivery> records_;
    std::set<RecordKey> in_flight_;
    std::set<std::string> seeded_;
    std::deque<Delivery> queue_;
    std::chrono::seconds logical_backoff_{0};
};

}  // namespace socketwatch::routing
