#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "madrl/agent.hpp"

namespace madrl {

/// Free-form key/value metadata stored alongside the weights.
using Provenance = std::map<std::string, std::string>;

struct Checkpoint {
  AgentParams params;
  Provenance provenance;
};

/// Binary layout: magic "MADRLCK", format version, provenance entries, then for the
/// actor and critic a layer count and per layer (rows, cols, row-major weights, bias).
/// Integers are uint64 and values IEEE-754 doubles, little-endian.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace madrl
