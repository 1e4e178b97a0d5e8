#include "socketwatch/simulation.hpp"

namespace socketwatch::sim {

SocketFleet::SocketFleet(Address server_address, DetectorParams detector)
    : server_address_(std::move(server_address)), detector_(detector) {
    detector_.validate();
}

SocketState& SocketFleet::state(const SocketId& id) {
    auto it = sockets_.find(id);
    if (it == sockets_.end()) it = sockets_.emplace(id, SocketState(id, detector_)).first;
    return it->second;
}

const SocketState* SocketFleet::socket(const SocketId& id) const {
    const auto it = sockets_.find(id);
    return it == sockets_.end() ? nullptr : &it->second;
}

void SocketFleet::emit(SocketState& state, const SwitchOnEvent& event, Timestamp now,
                       routing::Transport* direct_channel, std::vector<codec::Envelope>& to_server) {
    ++stats_.events;
    const auto dropped_before = state.dropped_events;
    auto sms = emit_notification(state, event, now);
    stats_.dropped += state.dropped_events - dropped_before;
    if (!sms) return;

    ++stats_.notifications;
    if (sms->to == server_address_) {
        to_server.push_back(std::move(sms->envelope));
        return;
    }
    ++stats_.direct;
    if (direct_channel) (void)direct_channel->send(sms->to, sms->envelope.body);
}

std::vector<codec::Envelope> SocketFleet::step(const ScenarioLine& line,
                                               routing::Transport* direct_channel) {
    std::vector<codec::Envelope> to_server;
    std::visit(
        [&](const auto& action) {
            using T = std::decay_t<decltype(action)>;
            auto& s = state(action.socket);
            if constexpr (std::is_same_v<T, SampleLine>) {
                std::optional<SwitchOnEvent> event;
                try {
                    std::tie(s, event) = feed_sample(std::move(s), CurrentSample{line.at, action.amps});
                } catch (const OutOfOrderSample& e) {
                    throw ScenarioError(line.line_number, e.what());
                }
                if (event) emit(s, *event, line.at, direct_channel, to_server);
            } else if constexpr (std::is_same_v<T, SmsToSocketLine>) {
                codec::Message msg = [&] {
                    try {
                        return codec::parse(action.body);
                    } catch (const codec::ParseError& e) {
                        throw ScenarioError(line.line_number, e.what());
                    }
                }();
                const auto* cfg = std::get_if<codec::ConfigMessage>(&msg);
                if (!cfg) throw ScenarioError(line.line_number, "sockets only accept CFG messages");
                s = apply_config(std::move(s), *cfg, Address("sim:operator"), server_address_);
            } else {
                emit(s, SwitchOnEvent{action.socket, line.at, EventSource::kDeviceReported}, line.at,
                     direct_channel, to_server);
            }
        },
        line.action);
    return to_server;
}

void run_line(const ScenarioLine& line, SocketFleet& fleet, Deployment& deployment) {
    auto& gateway = *deployment.gateway;
    gateway.advance_to(line.at);
    const auto sms = deployment.transports.find("sms");
    routing::Transport* direct = sms == deployment.transports.end() ? nullptr : sms->second.get();
    for (const auto& env : fleet.step(line, direct)) gateway.ingest(env);
}

void SimulationSummary::write(std::ostream& out) const {
    out << "events=" << fleet.events << '\n'
        << "alarms=" << alarms << '\n'
        << "notifications=" << fleet.notifications << '\n'
        << "direct=" << fleet.direct << '\n'
        << "dropped=" << fleet.dropped << '\n'
        << "dead_letters=" << dead_letters << '\n';
}

SimulationSummary simulate(const std::vector<ScenarioLine>& lines, const ServiceConfig& config) {
    auto deployment = make_deployment(config);
    SocketFleet fleet(config.server_address, config.detector);
    for (const auto& line : lines) run_line(line, fleet, deployment);

    SimulationSummary summary;
    summary.fleet = fleet.stats();
    summary.dead_letters = deployment.gateway->stats().dead_letters;
    summary.alarms = deployment.gateway->stats().alarms;
    return summary;
}

}  // namespace socketwatch::sim
