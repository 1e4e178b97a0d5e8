#include <csignal>
#include <iostream>

#include "CLI11.hpp"
#include "socketwatch/cli.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

void add_engine_flags(CLI::App* cmd, socketwatch::cli::EngineFlags& flags) {
    cmd->add_option("--config", flags.config, "Service config to take engine parameters from");
    cmd->add_option("--bin-size", flags.bin_size_minutes, "Bin width in minutes (divides 1440)");
    cmd->add_option("--pattern-days", flags.pattern_days, "Consecutive days forming a pattern");
    cmd->add_option("--grace", flags.grace_minutes, "Minutes after bin end before absence counts");
}

}  // namespace

int main(int argc, char** argv) {
    namespace cli = socketwatch::cli;

    CLI::App app{"Smart socket activity monitoring middleware"};
    app.require_subcommand(1);

    std::string serve_config;
    auto* serve = app.add_subcommand("serve", "Run the gateway service");
    serve->add_option("--config", serve_config, "Service config file")->required();

    std::string scenario, sim_config;
    auto* simulate = app.add_subcommand("simulate", "Run a socket scenario against the gateway");
    simulate->add_option("--scenario", scenario, "Scenario file")->required();
    simulate->add_option("--config", sim_config, "Service config file")->required();

    std::string replay_log;
    cli::EngineFlags replay_flags;
    auto* replay = app.add_subcommand("replay", "Re-derive alarms from an event log");
    replay->add_option("--log", replay_log, "Event log")->required();
    add_engine_flags(replay, replay_flags);

    std::string report_log, report_socket;
    cli::EngineFlags report_flags;
    auto* report = app.add_subcommand("report", "Show learned patterns for a socket");
    report->add_option("--log", report_log, "Event log")->required();
    report->add_option("--socket", report_socket, "Socket id")->required();
    add_engine_flags(report, report_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (*serve) {
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        return cli::cmd_serve(serve_config, std::cout, std::cerr, &g_stop);
    }
    if (*simulate) return cli::cmd_simulate(scenario, sim_config, std::cout, std::cerr);
    if (*replay) return cli::cmd_replay(replay_log, replay_flags, std::cout, std::cerr);
    return cli::cmd_report(report_log, report_socket, report_flags, std::cout, std::cerr);
}
