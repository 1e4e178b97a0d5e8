#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "socketwatch/codec.hpp"
#include "socketwatch/event_store.hpp"
#include "socketwatch/gateway.hpp"
#include "socketwatch/pattern_engine.hpp"
#include "socketwatch/scenario.hpp"
#include "socketwatch/simulation.hpp"
#include "socketwatch/socket_sim.hpp"

namespace py = pybind11;
namespace sw = socketwatch;

namespace {

sw::Timestamp to_timestamp(const std::string& iso) {
    const auto t = sw::Timestamp::parse(iso);
    if (!t) throw sw::InvalidValue("expected YYYY-MM-DDTHH:MM:SS, got '" + iso + "'");
    return *t;
}

sw::Date to_date(const std::string& iso) {
    const auto d = sw::Date::parse(iso);
    if (!d) throw sw::InvalidValue("expected YYYY-MM-DD, got '" + iso + "'");
    return *d;
}

py::dict pattern_dict(const sw::PatternState& s) {
    py::dict d;
    d["socket"] = s.socket.str();
    d["bin"] = s.bin.index;
    d["hits"] = s.consecutive_hits;
    d["last_hit_date"] = s.last_hit_date ? py::cast(s.last_hit_date->to_string()) : py::none();
    d["active"] = s.active;
    return d;
}

py::dict alarm_dict(const sw::Alarm& a) {
    py::dict d;
    d["socket"] = a.socket.str();
    d["bin"] = a.bin.index;
    d["date"] = a.date.to_string();
    d["raised_at"] = a.raised_at.to_string();
    d["dedupe_key"] = a.dedupe_key();
    d["body"] = a.body();
    return d;
}

/// Python-facing wrapper that keeps a socket's state by value.
class PySmartSocket {
public:
    PySmartSocket(const std::string& id, double i_on_amps, std::int64_t debounce_seconds)
        : state_(sw::SocketId(id), sw::sim::DetectorParams{i_on_amps, debounce_seconds}) {}

    std::optional<std::string> feed(const std::string& at, double amps) {
        auto [next, event] = sw::sim::feed_sample(state_, {to_timestamp(at), amps});
        state_ = std::move(next);
        if (!event) return std::nullopt;
        return event->at.to_string();
    }

    void configure(const std::string& body, const std::string& server_address) {
        const auto msg = sw::codec::parse(body);
        const auto* cfg = std::get_if<sw::codec::ConfigMessage>(&msg);
        if (!cfg) throw sw::InvalidValue("sockets only accept CFG messages");
        state_ = sw::sim::apply_config(state_, *cfg, sw::Address("sim:operator"),
                                       sw::Address(server_address));
    }

    /// (destination, body) of the SMS the socket would send, if configured.
    std::optional<std::pair<std::string, std::string>> notify(const std::string& event_at,
                                                              const std::string& now) {
        const sw::SwitchOnEvent event{state_.id, to_timestamp(event_at),
                                      sw::EventSource::kDeviceReported};
        auto sms = sw::sim::emit_notification(state_, event, to_timestamp(now));
        if (!sms) return std::nullopt;
        return std::make_pair(sms->to.str(), sms->envelope.body);
    }

    std::string load() const { return std::string(sw::sim::to_string(state_.load)); }
    std::optional<std::string> mode() const {
        if (!state_.config) return std::nullopt;
        return std::string(sw::to_string(state_.config->mode));
    }
    std::uint64_t dropped() const { return state_.dropped_events; }

private:
    sw::sim::SocketState state_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Smart socket activity monitoring: codec, detector, pattern engine, log replay";

    py::exception<sw::codec::ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const sw::codec::ParseError& e) {
            py::object type = py::module_::import("socketwatch._core").attr("ParseError");
            py::object err = type(e.what());
            err.attr("kind") = std::string(sw::codec::to_string(e.kind()));
            err.attr("token") = e.token();
            PyErr_SetObject(type.ptr(), err.ptr());
        }
    });
    py::register_exception<sw::EngineError>(m, "EngineError", PyExc_RuntimeError);
    py::register_exception<sw::store::StoreError>(m, "StoreError", PyExc_IOError);
    py::register_exception<sw::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<sw::sim::ScenarioError>(m, "ScenarioError", PyExc_ValueError);

    m.def(
        "bin_of",
        [](const std::string& at, int bin_size_minutes) {
            return sw::bin_of(to_timestamp(at), bin_size_minutes).index;
        },
        py::arg("at"), py::arg("bin_size_minutes") = 60,
        "Time-of-day bin index of an ISO-8601 civil timestamp.");

    m.def(
        "parse_message",
        [](const std::string& body) -> py::dict {
            const auto msg = sw::codec::parse(body);
            py::dict d;
            if (const auto* cfg = std::get_if<sw::codec::ConfigMessage>(&msg)) {
                d["kind"] = "config";
                d["destination"] = cfg->destination.str();
            } else {
                const auto& n = std::get<sw::codec::Notification>(msg);
                d["kind"] = "notification";
                d["socket"] = n.socket.str();
                d["at"] = n.at_override ? py::cast(n.at_override->to_string()) : py::none();
            }
            return d;
        },
        py::arg("body"));

    m.def(
        "serialize_config",
        [](const std::string& destination) {
            return sw::codec::serialize(sw::codec::ConfigMessage{sw::Address(destination)});
        },
        py::arg("destination"));

    m.def(
        "serialize_notification",
        [](const std::string& socket, std::optional<std::string> at) {
            std::optional<sw::Timestamp> stamp;
            if (at) stamp = to_timestamp(*at);
            return sw::codec::serialize(sw::codec::Notification{sw::SocketId(socket), stamp});
        },
        py::arg("socket"), py::arg("at") = py::none());

    py::class_<PySmartSocket>(m, "SmartSocket")
        .def(py::init<const std::string&, double, std::int64_t>(), py::arg("socket_id"),
             py::arg("i_on_amps") = 0.10, py::arg("debounce_seconds") = 5)
        .def("feed", &PySmartSocket::feed, py::arg("at"), py::arg("amps"),
             "Feed one current sample; returns the switch-on time when one is confirmed.")
        .def("configure", &PySmartSocket::configure, py::arg("body"), py::arg("server_address"))
        .def("notify", &PySmartSocket::notify, py::arg("event_at"), py::arg("now"))
        .def_property_readonly("load", &PySmartSocket::load)
        .def_property_readonly("mode", &PySmartSocket::mode)
        .def_property_readonly("dropped", &PySmartSocket::dropped);

    py::class_<sw::PatternEngine>(m, "PatternEngine")
        .def(py::init([](int pattern_days, int grace_minutes, int bin_size_minutes) {
                 return sw::PatternEngine(
                     sw::EngineParams{pattern_days, grace_minutes, bin_size_minutes, 0});
             }),
             py::arg("pattern_days") = 3, py::arg("grace_minutes") = 15,
             py::arg("bin_size_minutes") = 60)
        .def(
            "ingest",
            [](sw::PatternEngine& e, const std::string& socket, const std::string& at) {
                return pattern_dict(e.ingest_event(
                    {sw::SocketId(socket), to_timestamp(at), sw::EventSource::kDeviceReported}));
            },
            py::arg("socket"), py::arg("at"))
        .def(
            "close_bin",
            [](sw::PatternEngine& e, const std::string& socket, int bin, const std::string& date,
               const std::string& now) -> std::optional<py::dict> {
                auto alarm = e.close_bin(sw::SocketId(socket), sw::DayBin{bin}, to_date(date),
                                         to_timestamp(now));
                if (!alarm) return std::nullopt;
                return alarm_dict(*alarm);
            },
            py::arg("socket"), py::arg("bin"), py::arg("date"), py::arg("now"))
        .def(
            "snapshot",
            [](const sw::PatternEngine& e, const std::string& socket) {
                py::list out;
                for (const auto& s : e.snapshot(sw::SocketId(socket))) out.append(pattern_dict(s));
                return out;
            },
            py::arg("socket"));

    m.def(
        "replay_alarms",
        [](const std::filesystem::path& log, int pattern_days, int grace_minutes,
           int bin_size_minutes) {
            const sw::EngineParams params{pattern_days, grace_minutes, bin_size_minutes, 0};
            sw::PatternEngine engine(params);
            sw::BinScheduler scheduler(params);
            const auto replay = sw::replay_log(log, engine, scheduler);
            py::list out;
            for (const auto& a : replay.alarms) out.append(alarm_dict(a));
            return out;
        },
        py::arg("log"), py::arg("pattern_days") = 3, py::arg("grace_minutes") = 15,
        py::arg("bin_size_minutes") = 60, "Re-derive the alarm set from an event log.");

    m.def(
        "read_log",
        [](const std::filesystem::path& log) {
            py::list out;
            for (const auto& r : sw::store::read_all(log)) {
                out.append(py::make_tuple(r.at.to_string(), std::string(sw::store::to_string(r.kind)),
                                          r.socket.str(), r.payload));
            }
            return out;
        },
        py::arg("log"));

    m.def(
        "simulate",
        [](const std::filesystem::path& scenario, const std::filesystem::path& config) {
            const auto cfg = sw::load_service_config(config);
            const auto summary = sw::sim::simulate(sw::sim::load_scenario(scenario), cfg);
            py::dict d;
            d["events"] = summary.fleet.events;
            d["alarms"] = summary.alarms;
            d["notifications"] = summary.fleet.notifications;
            d["direct"] = summary.fleet.direct;
            d["dropped"] = summary.fleet.dropped;
            d["dead_letters"] = summary.dead_letters;
            return d;
        },
        py::arg("scenario"), py::arg("config"),
        "Run a scenario on the logical clock; paths in the config resolve against the cwd.");

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
