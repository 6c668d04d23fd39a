#pragma once

#include <cstdint>
#include <vector>

#include "votesim/core.hpp"

namespace votesim {

/// Per-round snapshot emitted by the protocol runners. Bit fields are only
/// meaningful for the memory protocol.
struct RoundReport {
    std::int64_t round = 0;
    Configuration config;
    std::int64_t bits_set = 0;
    std::vector<std::int64_t> bits_per_color;
    bool converged = false;
    bool phase_end = false;  // last propagation round of a memory phase
};

struct RunResult {
    Configuration final_config;
    std::vector<RoundReport> reports;
    std::int64_t rounds = 0;
    bool converged = false;
};

}  // namespace votesim
