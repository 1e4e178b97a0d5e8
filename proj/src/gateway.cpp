#include "socketwatch/gateway.hpp"

#include <fstream>

namespace socketwatch {

namespace {

const SocketId& unbound_socket() {
    static const SocketId id("_unbound");
    return id;
}

std::string sanitize(std::string_view field) {
    std::string out(field);
    for (auto& c : out)
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    return out;
}

}  // namespace

BinScheduler::BinScheduler(const EngineParams& params)
    : bins_(params.bin_size_minutes), grace_seconds_(params.grace_seconds()) {}

std::optional<Timestamp> BinScheduler::next_due() const {
    if (!last_tick_) return std::nullopt;
    // The first bin end strictly after (last tick - grace).
    const Timestamp x = last_tick_->plus_seconds(-grace_seconds_);
    return bins_.bin_end(x.date(), bins_.bin_of(x)).plus_seconds(grace_seconds_);
}

std::vector<Alarm> BinScheduler::tick(PatternEngine& engine, Timestamp now) {
    std::vector<Alarm> alarms;
    if (!last_tick_) {
        last_tick_ = now;
        return alarms;
    }
    if (now <= *last_tick_) return alarms;

    const std::int64_t step = std::int64_t{bins_.size_minutes()} * 60;
    const auto sockets = engine.sockets();
    for (Timestamp due = *next_due(); due <= now; due = due.plus_seconds(step)) {
        const Timestamp last_second = due.plus_seconds(-grace_seconds_ - 1);
        const Date date = last_second.date();
        const DayBin bin{bins_.bin_of(last_second)};
        for (const auto& socket : sockets) {
            if (auto alarm = engine.close_bin(socket, bin, date, now)) alarms.push_back(*alarm);
        }
    }
    last_tick_ = now;
    return alarms;
}

std::vector<Alarm> BinScheduler::advance_to(PatternEngine& engine, Timestamp t) {
    std::vector<Alarm> alarms;
    for (auto due = next_due(); due && *due <= t; due = next_due()) {
        auto step = tick(engine, *due);
        alarms.insert(alarms.end(), step.begin(), step.end());
    }
    auto last = tick(engine, t);
    alarms.insert(alarms.end(), last.begin(), last.end());
    return alarms;
}

codec::Envelope parse_frame(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos) throw FrameError("frame needs <iso8601>\\t<sender>\\t<body>");
    const auto stamp = line.substr(0, tab1);
    const auto sender = line.substr(tab1 + 1, tab2 - tab1 - 1);
    const auto at = Timestamp::parse(stamp);
    if (!at) throw FrameError("bad frame timestamp '" + std::string(stamp) + "'");
    if (!Address::is_valid(sender)) throw FrameError("bad frame sender '" + std::string(sender) + "'");
    return codec::Envelope{Address(std::string(sender)), *at, std::string(line.substr(tab2 + 1))};
}

std::string format_frame(const codec::Envelope& env) {
    return env.received_at.to_string() + "\t" + env.sender.str() + "\t" + env.body;
}

SocketId config_socket_for(const Address& sender) {
    const auto& s = sender.str();
    if (sender.scheme() == "sim") {
        const auto id = std::string_view(s).substr(4);
        if (SocketId::is_valid(id)) return SocketId(std::string(id));
    }
    return unbound_socket();
}

LogReplay replay_log(const std::filesystem::path& log_path, PatternEngine& engine,
                     BinScheduler& scheduler) {
    LogReplay out;
    std::vector<store::LogRecord> records;
    auto result = store::replay(log_path, {}, [&](const store::LogRecord& r) { records.push_back(r); });
    out.records = result.records;
    out.warnings = std::move(result.warnings);

    auto collect = [&](std::vector<Alarm> alarms) {
        out.alarms.insert(out.alarms.end(), alarms.begin(), alarms.end());
    };
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& record = records[i];
        switch (record.kind) {
            case store::LogKind::kEvent: {
                const auto event = store::event_from_record(record);
                collect(scheduler.advance_to(engine, event.at));
                try {
                    engine.ingest_event(event);
                } catch (const OutOfOrderEvent& e) {
                    throw store::Corrupt("log record " + std::to_string(i + 1) +
                                         " rejected on replay: " + e.what());
                }
                break;
            }
            case store::LogKind::kConfig:
                collect(scheduler.advance_to(engine, record.at));
                if (!(record.socket == unbound_socket())) engine.note_socket(record.socket);
                break;
            case store::LogKind::kAlarm: {
                const auto alarm = store::alarm_from_record(record);
                out.logged_alarms.insert(alarm.dedupe_key());
                collect(scheduler.advance_to(engine, alarm.raised_at));
                break;
            }
        }
    }
    return out;
}

Gateway::Gateway(ServiceConfig config, std::shared_ptr<routing::AlertRouter> router,
                 std::shared_ptr<LogicalClock> clock)
    : config_(std::move(config)),
      router_(std::move(router)),
      clock_(std::move(clock)),
      engine_(config_.engine),
      scheduler_(config_.engine),
      log_(config_.log_path) {
    config_.validate();
    startup_ = replay_log(config_.log_path, engine_, scheduler_);
    for (const auto& key : startup_.logged_alarms) router_->seed_sent(key);
    if (scheduler_.last_tick() && clock_->now() < *scheduler_.last_tick())
        clock_->set(*scheduler_.last_tick());
    // Alarms the previous process derived but never logged.
    handle_alarms(startup_.alarms, /*skip_logged=*/true);
}

void Gateway::ingest(const codec::Envelope& env) {
    ++stats_.envelopes;
    if (clock_->now() < env.received_at) clock_->set(env.received_at);

    std::optional<codec::Message> msg;
    try {
        msg = codec::parse(env.body);
    } catch (const codec::ParseError& e) {
        dead_letter(env.received_at.to_string(), env.sender.str(), env.body, e.what());
        return;
    }

    if (const auto* cfg = std::get_if<codec::ConfigMessage>(&*msg)) {
        // Audit only: in middleware topology the configuration lives on the socket.
        const auto socket = config_socket_for(env.sender);
        log_.append({env.received_at, store::LogKind::kConfig, socket,
                     env.sender.str() + " " + codec::serialize(*cfg)});
        ++stats_.configs;
        if (!(socket == unbound_socket())) engine_.note_socket(socket);
        return;
    }

    const auto& note = std::get<codec::Notification>(*msg);
    const SwitchOnEvent event{note.socket, note.at_override.value_or(env.received_at),
                              EventSource::kDeviceReported};
    try {
        engine_.check_event(event);
    } catch (const OutOfOrderEvent& e) {
        dead_letter(env.received_at.to_string(), env.sender.str(), env.body,
                    std::string("OutOfOrderEvent: ") + e.what());
        return;
    }
    log_.append(store::event_record(event));
    engine_.ingest_event(event);
    ++stats_.events;

    if (!config_.forward_notifications) return;
    std::vector<routing::Delivery> deliveries;
    const auto body = codec::serialize(codec::Notification{event.socket, event.at});
    for (const auto& to : config_.recipients_for(event.socket))
        deliveries.push_back(routing::notification_delivery(event, to, body));
    route_to_recipients(std::move(deliveries));
}

std::vector<Alarm> Gateway::tick(Timestamp now) {
    if (clock_->now() < now) clock_->set(now);
    auto alarms = scheduler_.tick(engine_, now);
    handle_alarms(alarms, /*skip_logged=*/false);
    return alarms;
}

std::vector<Alarm> Gateway::advance_to(Timestamp t) {
    std::vector<Alarm> alarms;
    for (auto due = scheduler_.next_due(); due && *due <= t; due = scheduler_.next_due()) {
        auto step = tick(*due);
        alarms.insert(alarms.end(), step.begin(), step.end());
    }
    auto last = tick(t);
    alarms.insert(alarms.end(), last.begin(), last.end());
    return alarms;
}

void Gateway::process_frame(const codec::Envelope& env) {
    advance_to(env.received_at);
    ingest(env);
}

void Gateway::dead_letter(std::string_view stamp, std::string_view sender, std::string_view body,
                          std::string_view error) {
    ++stats_.dead_letters;
    std::ofstream out(config_.dead_letter_path, std::ios::app | std::ios::binary);
    out << sanitize(stamp) << '\t' << sanitize(sender) << '\t' << sanitize(body) << '\t'
        << sanitize(error) << '\n';
}

void Gateway::handle_alarms(const std::vector<Alarm>& alarms, bool skip_logged) {
    for (const auto& alarm : alarms) {
        if (skip_logged && startup_.logged_alarms.contains(alarm.dedupe_key())) continue;
        log_.append(store::alarm_record(alarm, engine_.params().bins()));
        ++stats_.alarms;

        const auto& recipients = config_.recipients_for(alarm.socket);
        if (recipients.empty()) {
            ++stats_.unrouted_alarms;
            continue;
        }
        std::vector<routing::Delivery> deliveries;
        for (const auto& to : recipients) deliveries.push_back(routing::alarm_delivery(alarm, to));
        if (clock_->now() < alarm.raised_at) clock_->set(alarm.raised_at);
        route_to_recipients(std::move(deliveries));
    }
}

void Gateway::route_to_recipients(std::vector<routing::Delivery> deliveries) {
    for (auto& d : deliveries) router_->enqueue(std::move(d));
    for (const auto& done : router_->flush()) {
        if (done.status == routing::DeliveryStatus::kSent)
            ++stats_.deliveries_sent;
        else
            ++stats_.deliveries_failed;
    }
}

Deployment make_deployment(const ServiceConfig& config,
                           std::function<void(std::chrono::seconds)> wait) {
    Deployment d;
    d.clock = std::make_shared<LogicalClock>();
    d.router = std::make_shared<routing::AlertRouter>(config.router, std::move(wait));
    for (const auto& [name, path] : config.outboxes) {
        auto transport = std::make_shared<routing::OutboxTransport>(name, path, d.clock);
        d.transports.emplace(name, transport);
        d.router->register_transport(transport);
    }
    for (const auto& [scheme, name] : config.scheme_routes) d.router->route_scheme(scheme, name);
    d.gateway = std::make_unique<Gateway>(config, d.router, d.clock);
    return d;
}

}  // namespace socketwatch
