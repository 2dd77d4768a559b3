#pragma once

#include <cstdint>
#include <string>

namespace toolchain {

/// One task instance. The seed fully determines scripted-proposer behavior,
/// so a (task, config) pair replays identically.
struct TaskSpec {
    std::string task_id;
    std::string description;
    std::string env_binding;  // environment identifier, e.g. "toy" or "arithmetic"
    std::uint64_t seed = 0;
};

}  // namespace toolchain
