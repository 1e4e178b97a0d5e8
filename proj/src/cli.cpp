#include "socketwatch/cli.hpp"

#include "socketwatch/gateway.hpp"
#include "socketwatch/scenario.hpp"
#include "socketwatch/service.hpp"
#include "socketwatch/simulation.hpp"

namespace socketwatch::cli {

namespace {

struct Rebuilt {
    PatternEngine engine;
    LogReplay replay;
};

Rebuilt rebuild(const std::filesystem::path& log, const EngineParams& params) {
    Rebuilt r{PatternEngine(params), {}};
    BinScheduler scheduler(params);
    r.replay = replay_log(log, r.engine, scheduler);
    return r;
}

}  // namespace

EngineParams EngineFlags::resolve() const {
    EngineParams params = config ? load_service_config(*config).engine : EngineParams{};
    if (bin_size_minutes) params.bin_size_minutes = *bin_size_minutes;
    if (pattern_days) params.pattern_days = *pattern_days;
    if (grace_minutes) params.grace_minutes = *grace_minutes;
    params.validate();
    return params;
}

int cmd_serve(const std::filesystem::path& config, std::ostream& out, std::ostream& err,
              const std::atomic<bool>* stop) {
    ServiceConfig cfg;
    try {
        cfg = load_service_config(config);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    ServeHooks hooks;
    hooks.stop = stop;
    hooks.on_listening = [&out](int port) { out << "port=" << port << std::endl; };
    return run_service(cfg, err, hooks);
}

int cmd_simulate(const std::filesystem::path& scenario, const std::filesystem::path& config,
                 std::ostream& out, std::ostream& err) {
    try {
        const auto cfg = load_service_config(config);
        const auto lines = sim::load_scenario(scenario);
        sim::simulate(lines, cfg).write(out);
        return kExitOk;
    } catch (const sim::ScenarioError& e) {
        err << "scenario error: " << scenario.string() << ": " << e.what() << '\n';
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

int cmd_replay(const std::filesystem::path& log, const EngineFlags& flags, std::ostream& out,
               std::ostream& err) {
    try {
        const auto r = rebuild(log, flags.resolve());
        for (const auto& w : r.replay.warnings) err << "warning: " << w << '\n';
        for (const auto& alarm : r.replay.alarms)
            out << "alarm=" << alarm.dedupe_key() << " raised_at=" << alarm.raised_at.to_string()
                << '\n';
        out << "alarms=" << r.replay.alarms.size() << '\n';
        return kExitOk;
    } catch (const store::Corrupt& e) {
        err << "Corrupt: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

int cmd_report(const std::filesystem::path& log, const std::string& socket, const EngineFlags& flags,
               std::ostream& out, std::ostream& err) {
    try {
        if (!SocketId::is_valid(socket)) throw UnknownSocket("invalid socket id '" + socket + "'");
        const auto params = flags.resolve();
        const auto r = rebuild(log, params);
        for (const auto& w : r.replay.warnings) err << "warning: " << w << '\n';
        const auto bins = params.bins();
        for (const auto& state : r.engine.snapshot(SocketId(socket))) {
            out << "bin=" << state.bin.index << " window=" << bins.window(state.bin.index)
                << " hits=" << state.consecutive_hits << " active=" << (state.active ? "true" : "false")
                << '\n';
        }
        return kExitOk;
    } catch (const UnknownSocket& e) {
        err << "UnknownSocket: " << e.what() << '\n';
        return kExitConfig;
    } catch (const store::Corrupt& e) {
        err << "Corrupt: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace socketwatch::cli
