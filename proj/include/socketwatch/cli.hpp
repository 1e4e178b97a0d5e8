#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <ostream>

#include "socketwatch/pattern_engine.hpp"

namespace socketwatch::cli {

/// Engine parameter overrides from flags; unset fields keep the config file
/// (or built-in) value.
struct EngineFlags {
    std::optional<std::filesystem::path> config;
    std::optional<int> bin_size_minutes;
    std::optional<int> pattern_days;
    std::optional<int> grace_minutes;

    EngineParams resolve() const;
};

int cmd_serve(const std::filesystem::path& config, std::ostream& out, std::ostream& err,
              const std::atomic<bool>* stop = nullptr);

/// Runs a scenario on the logical clock and prints `key=value` summary lines.
int cmd_simulate(const std::filesystem::path& scenario, const std::filesystem::path& config,
                 std::ostream& out, std::ostream& err);

/// Re-derives alarms from a log with a fresh engine; routes nothing.
int cmd_replay(const std::filesystem::path& log, const EngineFlags& flags, std::ostream& out,
               std::ostream& err);

/// Prints `bin=<i> window=<HH:MM-HH:MM> hits=<n> active=<bool>` per live bin.
int cmd_report(const std::filesystem::path& log, const std::string& socket, const EngineFlags& flags,
               std::ostream& out, std::ostream& err);

}  // namespace socketwatch::cli
