#include "socketwatch/alert_router.hpp"

#include <fstream>

namespace socketwatch::routing {

std::string_view to_string(DeliveryKind kind) noexcept {
    return kind == DeliveryKind::kAlarm ? "ALARM" : "NOTIFICATION";
}

std::string_view to_string(DeliveryStatus status) noexcept {
    switch (status) {
        case DeliveryStatus::kPending: return "PENDING";
        case DeliveryStatus::kSent: return "SENT";
        case DeliveryStatus::kFailed: return "FAILED";
    }
    return "?";
}

std::string_view to_string(SendResult result) noexcept {
    switch (result) {
        case SendResult::kSuccess: return "success";
        case SendResult::kTransientFailure: return "transient-failure";
        case SendResult::kPermanentFailure: return "permanent-failure";
    }
    return "?";
}

Delivery notification_delivery(const SwitchOnEvent& event, const Address& to, std::string body) {
    return Delivery{DeliveryKind::kNotification, event.socket.str() + "/" + event.at.to_string(), to,
                    std::move(body)};
}

Delivery alarm_delivery(const Alarm& alarm, const Address& to) {
    return Delivery{DeliveryKind::kAlarm, alarm.dedupe_key(), to, alarm.body()};
}

OutboxTransport::OutboxTransport(std::string name, std::filesystem::path outbox,
                                 std::shared_ptr<const Clock> clock)
    : name_(std::move(name)), outbox_(std::move(outbox)), clock_(std::move(clock)) {}

SendResult OutboxTransport::send(const Address& destination, std::string_view body) {
    std::lock_guard lock(mutex_);
    if (!scripted_.empty()) {
        const auto result = scripted_.front();
        scripted_.pop_front();
        if (result != SendResult::kSuccess) return result;
    }
    std::ofstream out(outbox_, std::ios::app | std::ios::binary);
    out << clock_->now().to_string() << '\t' << destination.str() << '\t' << body << '\n';
    out.flush();
    if (!out) return SendResult::kTransientFailure;
    ++lines_;
    return SendResult::kSuccess;
}

void OutboxTransport::script(std::vector<SendResult> results) {
    std::lock_guard lock(mutex_);
    scripted_.insert(scripted_.end(), results.begin(), results.end());
}

std::size_t OutboxTransport::lines_written() const {
    std::lock_guard lock(mutex_);
    return lines_;
}

AlertRouter::AlertRouter(RouterParams params, std::function<void(std::chrono::seconds)> wait)
    : params_(params), wait_(std::move(wait)) {
    if (params_.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
    if (params_.backoff.count() < 0) throw ConfigError("backoff must be >= 0");
}

void AlertRouter::register_transport(std::shared_ptr<Transport> transport) {
    std::lock_guard lock(mutex_);
    const auto& name = transport->name();
    if (transports_.contains(name)) throw DuplicateTransport("transport '" + name + "' already registered");
    transports_.emplace(name, std::move(transport));
}

void AlertRouter::route_scheme(std::string scheme, std::string transport_name) {
    std::lock_guard lock(mutex_);
    scheme_routes_[std::move(scheme)] = std::move(transport_name);
}

void AlertRouter::route_address(const Address& address, std::string transport_name) {
    std::lock_guard lock(mutex_);
    address_routes_[address.str()] = std::move(transport_name);
}

std::string AlertRouter::resolve(const Address& destination) const {
    std::lock_guard lock(mutex_);
    std::string name;
    if (const auto it = address_routes_.find(destination.str()); it != address_routes_.end()) {
        name = it->second;
    } else if (destination.is_phone()) {
        name = "sms";
    } else {
        const std::string scheme(destination.scheme());
        const auto it2 = scheme_routes_.find(scheme);
        name = it2 != scheme_routes_.end() ? it2->second : scheme;
    }
    if (!transports_.contains(name))
        throw NoTransport("no transport for " + destination.str() + " (wanted '" + name + "')");
    return name;
}

Delivery AlertRouter::route(Delivery delivery) {
    const auto transport_name = resolve(delivery.destination);
    const RecordKey key{delivery.dedupe_key, delivery.destination.str()};

    std::shared_ptr<Transport> transport;
    {
        std::unique_lock lock(mutex_);
        settled_.wait(lock, [&] { return !in_flight_.contains(key); });
        if (seeded_.contains(delivery.dedupe_key)) {
            delivery.status = DeliveryStatus::kSent;
            return delivery;
        }
        if (const auto it = records_.find(key);
            it != records_.end() && it->second.status == DeliveryStatus::kSent)
            return it->second;
        in_flight_.insert(key);
        transport = transports_.at(transport_name);
    }

    delivery.attempts = 0;
    delivery.status = DeliveryStatus::kPending;
    std::chrono::seconds waited{0};
    while (delivery.status == DeliveryStatus::kPending) {
        if (delivery.attempts > 0) {
            waited += params_.backoff;
            if (wait_) wait_(params_.backoff);
        }
        ++delivery.attempts;
        SendResult result = SendResult::kTransientFailure;
        try {
            result = transport->send(delivery.destination, delivery.body);
        } catch (const std::exception&) {
            result = SendResult::kTransientFailure;
        }
        if (result == SendResult::kSuccess) {
            delivery.status = DeliveryStatus::kSent;
        } else if (result == SendResult::kPermanentFailure ||
                   delivery.attempts >= params_.max_attempts) {
            delivery.status = DeliveryStatus::kFailed;
        }
    }

    {
        std::lock_guard lock(mutex_);
        records_.insert_or_assign(key, delivery);
        in_flight_.erase(key);
        logical_backoff_ += waited;
    }
    settled_.notify_all();
    return delivery;
}

void AlertRouter::seed_sent(const std::string& dedupe_key) {
    std::lock_guard lock(mutex_);
    seeded_.insert(dedupe_key);
}

bool AlertRouter::is_sent(const std::string& dedupe_key, const Address& destination) const {
    std::lock_guard lock(mutex_);
    if (seeded_.contains(dedupe_key)) return true;
    const auto it = records_.find({dedupe_key, destination.str()});
    return it != records_.end() && it->second.status == DeliveryStatus::kSent;
}

void AlertRouter::enqueue(Delivery delivery) {
    std::lock_guard lock(mutex_);
    queue_.push_back(std::move(delivery));
}

std::vector<Delivery> AlertRouter::flush() {
    std::vector<Delivery> done;
    while (true) {
        std::optional<Delivery> next;
        {
            std::lock_guard lock(mutex_);
            if (queue_.empty()) break;
            next.emplace(std::move(queue_.front()));
            queue_.pop_front();
        }
        try {
            done.push_back(route(*next));
        } catch (const NoTransport&) {
            next->status = DeliveryStatus::kFailed;
            done.push_back(std::move(*next));
        }
    }
    return done;
}

std::size_t AlertRouter::queued() const {
    std::lock_guard lock(mutex_);
    return queue_.size();
}

std::chrono::seconds AlertRouter::logical_backoff() const {
    std::lock_guard lock(mutex_);
    return logical_backoff_;
}

}  // namespace socketwatch::routing
