#include "ltlshape/graph.hpp"

#include <algorithm>
#include <limits>

namespace ltlshape::graph {

Components strongly_connected_components(const Adjacency &graph) {
  constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
  const std::size_t n = graph.size();

  Components result;
  result.component.assign(n, kUnvisited);
  std::vector<std::uint32_t> index(n, kUnvisited);
  std::vector<std::uint32_t> lowlink(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<Vertex> stack;
  std::uint32_t next_index = 0;

  struct Frame {
    Vertex v;
    std::size_t next_child;
  };
  std::vector<Frame> call;

  for (Vertex root = 0; root < n; ++root) {
    if (index[root] != kUnvisited)
      continue;
    call.push_back({root, 0});
    index[root] = lowlink[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;

    while (!call.empty()) {
      Frame &frame = call.back();
      const Vertex v = frame.v;
      if (frame.next_child < graph[v].size()) {
        const Vertex w = graph[v][frame.next_child++];
        if (index[w] == kUnvisited) {
          index[w] = lowlink[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
        continue;
      }
      if (lowlink[v] == index[v]) {
        Vertex w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          result.component[w] = result.count;
        } while (w != v);
        ++result.count;
      }
      call.pop_back();
      if (!call.empty()) {
        const Vertex parent = call.back().v;
        lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
      }
    }
  }
  return result;
}

std::vector<char> reachable_from(const Adjacency &graph, Vertex source) {
  std::vector<char> seen(graph.size(), 0);
  std::vector<Vertex> todo{source};
  seen[source] = 1;
  while (!todo.empty()) {
    const Vertex v = todo.back();
    todo.pop_back();
    for (Vertex w : graph[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        todo.push_back(w);
      }
    }
  }
  return seen;
}

} // namespace ltlshape::graph
