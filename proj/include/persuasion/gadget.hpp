#pragma once

#include <utility>
#include <vector>

#include "persuasion/model.hpp"

namespace persuasion {

struct GraphInput {
  int num_vertices = 0;
  std::vector<std::pair<int, int>> edges;  // 0-based, u < v, no self-loops
  int cover_size = 0;                      // k
};

// Vertex-Cover reduction instance: |V|+1 uniform worlds, 4 actions, one type
// of n = max(|E|+2, 2|V|+2) agents, d = n-1, utilities from the reduction
// tables with default -k-1.
Instance build_gadget(const GraphInput& g);

GraphInput parse_graph_text(const std::string& text);

}  // namespace persuasion
