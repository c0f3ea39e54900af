#pragma once

#include <cstdint>
#include <vector>

namespace ltlshape::graph {

using Vertex = std::uint32_t;
using Adjacency = std::vector<std::vector<Vertex>>;

struct Components {
  /// component[v] is the SCC index of v. Indices are assigned in Tarjan
  /// completion order, so every edge u->v satisfies component[u] >= component[v].
  std::vector<std::uint32_t> component;
  std::uint32_t count = 0;
};

/// Tarjan's algorithm, iterative so deep graphs cannot overflow the stack.
Components strongly_connected_components(const Adjacency &graph);

/// Vertices reachable from `source` (including it), as a membership vector.
std::vector<char> reachable_from(const Adjacency &graph, Vertex source);

} // namespace ltlshape::graph
