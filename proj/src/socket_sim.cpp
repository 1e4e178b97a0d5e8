#include "socketwatch/socket_sim.hpp"

#include <cmath>

namespace socketwatch::sim {

void DetectorParams::validate() const {
    if (!(i_on_amps > 0.0) || !std::isfinite(i_on_amps))
        throw ConfigError("i_on_amps must be a positive number");
    if (debounce_seconds < 0) throw ConfigError("debounce_seconds must be >= 0");
}

std::string_view to_string(LoadState state) noexcept {
    switch (state) {
        case LoadState::kOff: return "OFF";
        case LoadState::kCandidate: return "CANDIDATE";
        case LoadState::kOn: return "ON";
    }
    return "?";
}

SocketState::SocketState(SocketId socket_id, DetectorParams detector)
    : id(std::move(socket_id)), params(detector) {
    params.validate();
}

SocketState apply_config(SocketState state, const codec::ConfigMessage& msg,
                         const Address& /*sender*/, const Address& server_address) {
    // Any sender may reconfigure; there is no access control on CFG.
    const auto mode = msg.destination == server_address ? DeliveryMode::kMiddleware
                                                        : DeliveryMode::kDirect;
    state.config = SocketConfig{state.id, msg.destination, mode};
    return state;
}

std::pair<SocketState, std::optional<SwitchOnEvent>> feed_sample(SocketState state,
                                                                 const CurrentSample& sample) {
    if (state.last_sample_at && sample.at < *state.last_sample_at) {
        throw OutOfOrderSample("sample at " + sample.at.to_string() + " precedes " +
                               state.last_sample_at->to_string() + " on socket " + state.id.str());
    }
    if (!(sample.amps >= 0.0)) throw InvalidValue("current sample must be non-negative");
    state.last_sample_at = sample.at;

    const bool above = sample.amps >= state.params.i_on_amps;
    std::optional<SwitchOnEvent> event;

    switch (state.load) {
        case LoadState::kOff:
            if (above) {
                state.load = LoadState::kCandidate;
                state.candidate_since = sample.at;
            }
            break;
        case LoadState::kCandidate:
            if (!above) {
                state.load = LoadState::kOff;
                state.candidate_since.reset();
            }
            break;
        case LoadState::kOn:
            if (!above) state.load = LoadState::kOff;
            break;
    }

    // Confirmation is checked after the transition so a zero debounce
    // confirms on the crossing sample itself.
    if (state.load == LoadState::kCandidate &&
        sample.at - *state.candidate_since >= state.params.debounce_seconds) {
        event = SwitchOnEvent{state.id, *state.candidate_since, EventSource::kDeviceReported};
        state.load = LoadState::kOn;
        state.candidate_since.reset();
    }
    return {std::move(state), std::move(event)};
}

Address sim_sender(const SocketId& id) { return Address("sim:" + id.str()); }

std::optional<OutgoingSms> emit_notification(SocketState& state, const SwitchOnEvent& event,
                                             Timestamp now) {
    if (!(event.socket == state.id)) {
        throw InvalidValue("event for socket " + event.socket.str() + " emitted by " +
                           state.id.str());
    }
    if (!state.config) {
        ++state.dropped_events;
        return std::nullopt;
    }
    codec::Envelope env{sim_sender(state.id), now,
                        codec::serialize(codec::Notification{state.id, event.at})};
    return OutgoingSms{state.config->destination, std::move(env)};
}

}  // namespace socketwatch::sim
