#pragma once

#include <atomic>
#include <functional>
#include <ostream>

#include "socketwatch/service_config.hpp"

namespace socketwatch {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitIo = 2 };

struct ServeHooks {
    /// Set to stop serving; checked at least once per second.
    const std::atomic<bool>* stop = nullptr;
    /// Called with the bound port once listening (useful with port 0).
    std::function<void(int)> on_listening;
};

/// Replays the log, then serves frames from `config.input` (scenario clock,
/// returns at end of file) or from TCP `config.listen` (wall clock, returns
/// when stopped). Returns an ExitCode; never throws.
int run_service(const ServiceConfig& config, std::ostream& diagnostics, const ServeHooks& hooks = {});

}  // namespace socketwatch
