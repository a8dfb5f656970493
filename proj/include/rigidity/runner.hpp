#pragma once

#include <map>
#include <string>

#include "rigidity/config.hpp"

namespace rigidity {

struct RunResult {
    int status = 0;  // 0 ok, 1 invariant violation, 2 config error
    std::string summary;
    std::map<std::string, std::string> artifacts;  // filename -> CSV body
};

/// Executes one experiment config (command = cf | ostrowski | dk-audit |
/// flow-orbit | trichotomy | match | lift | coboundary | joining).
RunResult run_experiment(const KvConfig& cfg);

}  // namespace rigidity
