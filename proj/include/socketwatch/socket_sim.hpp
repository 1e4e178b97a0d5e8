#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "socketwatch/codec.hpp"
#include "socketwatch/model.hpp"

namespace socketwatch::sim {

struct CurrentSample {
    Timestamp at;
    double amps = 0.0;  // RMS, non-negative
};

struct DetectorParams {
    double i_on_amps = 0.10;
    std::int64_t debounce_seconds = 5;

    void validate() const;
};

enum class LoadState { kOff, kCandidate, kOn };

std::string_view to_string(LoadState state) noexcept;

class OutOfOrderSample : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Value state of one virtual socket.
///
/// Invariants: `candidate_since` is set exactly when `load == kCandidate`;
/// an unconfigured socket never emits an envelope.
struct SocketState {
    explicit SocketState(SocketId socket_id, DetectorParams detector = {});

    SocketId id;
    std::optional<SocketConfig> config;
    LoadState load = LoadState::kOff;
    std::optional<Timestamp> candidate_since;
    std::optional<Timestamp> last_sample_at;
    DetectorParams params;
    std::uint64_t dropped_events = 0;
};

/// Latest config wins. Mode is MIDDLEWARE iff the destination is the
/// deployment's server address.
SocketState apply_config(SocketState state, const codec::ConfigMessage& msg, const Address& sender,
                         const Address& server_address);

/// Advances the OFF/CANDIDATE/ON detector. A switch-on event is reported
/// once per episode, stamped at the first above-threshold sample.
std::pair<SocketState, std::optional<SwitchOnEvent>> feed_sample(SocketState state,
                                                                 const CurrentSample& sample);

/// Outgoing SMS from a socket, with its recipient.
struct OutgoingSms {
    Address to;
    codec::Envelope envelope;
};

/// The sender token a simulated socket uses: `sim:<socket_id>`.
Address sim_sender(const SocketId& id);

/// Builds the notification SMS for a switch-on event, or counts the event as
/// dropped when the socket has no configuration yet.
std::optional<OutgoingSms> emit_notification(SocketState& state, const SwitchOnEvent& event,
                                             Timestamp now);

}  // namespace socketwatch::sim
