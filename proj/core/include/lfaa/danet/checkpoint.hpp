#pragma once

#include <string>

#include "lfaa/danet/graph.hpp"

namespace lfaa::danet {

// Binary checkpoint: magic "DA2N", u32 version, u32 entry count, then a layer
// table (u32 name length, name bytes, u32 kind, u64 element count) followed by
// the raw float32 little-endian tensors in declaration order.
// Entry kinds: 0 weights, 1 biases, 2 running mean, 3 running variance.
void save_checkpoint(const std::string& path, const Graph& g, const NetworkParams& p);

// Validates names and shapes against the graph's slot table.
NetworkParams load_checkpoint(const std::string& path, const Graph& g);

} // namespace lfaa::danet
