#include "ltlshape/progress.hpp"

#include "ltlshape/graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ltlshape::progress {

SccDecomposition tarjan_scc(const BuchiAutomaton &a) {
  const auto adj = a.adjacency();
  const auto comps = graph::strongly_connected_components(adj);

  SccDecomposition out;
  out.count = comps.count;
  out.scc_id.resize(a.num_states());
  // Tarjan finishes sinks first; flip so edges point to larger indices.
  for (StateId q = 0; q < a.num_states(); ++q)
    out.scc_id[q] = comps.count - 1 - comps.component[q];
  for (StateId q = 0; q < a.num_states(); ++q)
    for (StateId r : adj[q])
      if (out.scc_id[q] != out.scc_id[r])
        out.condensation.emplace_back(out.scc_id[q], out.scc_id[r]);
  std::sort(out.condensation.begin(), out.condensation.end());
  out.condensation.erase(std::unique(out.condensation.begin(), out.condensation.end()), out.condensation.end());
  return out;
}

ProgressAnnotation annotate_progress(const BuchiAutomaton &a) {
  const SccDecomposition scc = tarjan_scc(a);
  std::vector<std::vector<StateId>> members(scc.count);
  for (StateId q = 0; q < a.num_states(); ++q)
    members[scc.scc_id[q]].push_back(q);
  const auto adj = a.adjacency();

  ProgressAnnotation ann;
  ann.scc_id = scc.scc_id;
  ann.condensation = scc.condensation;
  ann.level.assign(a.num_states(), kUnreachable);

  std::vector<StateId> open{a.initial()};
  int current = 0;
  while (!open.empty()) {
    std::vector<std::uint32_t> layer;
    for (StateId q : open) {
      const auto c = scc.scc_id[q];
      if (ann.level[q] != kUnreachable || std::find(layer.begin(), layer.end(), c) != layer.end())
        continue;
      layer.push_back(c);
      for (StateId m : members[c])
        ann.level[m] = current;
    }
    // Boundary: states adjacent to a freshly annotated SCC but outside it.
    std::vector<StateId> boundary;
    for (auto c : layer)
      for (StateId m : members[c])
        for (StateId r : adj[m])
          if (scc.scc_id[r] != c && ann.level[r] == kUnreachable)
            boundary.push_back(r);
    std::sort(boundary.begin(), boundary.end());
    boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
    open = std::move(boundary);
    if (!layer.empty())
      ann.num_levels = current + 1;
    ++current;
  }
  for (StateId q = 0; q < a.num_states(); ++q)
    if (ann.level[q] == kUnreachable)
      ann.unreachable.push_back(q);
  return ann;
}

void ShapingConfig::validate() const {
  if (!(multiplier > 0.0))
    throw std::invalid_argument("shaping multiplier must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("shaping gamma must lie in (0, 1]");
}

std::string_view to_string(ShapingMode mode) {
  switch (mode) {
  case ShapingMode::Proportional: return "proportional";
  case ShapingMode::Potential: return "potential";
  case ShapingMode::None: return "none";
  }
  return "?";
}

ShapingMode parse_shaping_mode(std::string_view text) {
  if (text == "proportional")
    return ShapingMode::Proportional;
  if (text == "potential")
    return ShapingMode::Potential;
  if (text == "none")
    return ShapingMode::None;
  throw std::invalid_argument("unknown shaping mode '" + std::string(text) + "'");
}

double shaped_reward(StateId q_next, const ProgressAnnotation &ann, const ShapingConfig &cfg, StateId q_prev) {
  const int next_level = ann.level_of(q_next);
  const int prev_level = ann.level_of(q_prev);
  if (next_level == kUnreachable || prev_level == kUnreachable)
    throw std::invalid_argument("shaped_reward on an unannotated state");
  switch (cfg.mode) {
  case ShapingMode::Proportional:
    return cfg.multiplier * next_level;
  case ShapingMode::Potential:
    return cfg.gamma * cfg.multiplier * next_level - cfg.multiplier * prev_level;
  case ShapingMode::None:
    return 0.0;
  }
  return 0.0;
}

std::string dump(const ProgressAnnotation &ann) {
  std::ostringstream os;
  os << "state,scc,level\n";
  for (std::size_t q = 0; q < ann.level.size(); ++q) {
    os << q << ',' << ann.scc_id[q] << ',';
    if (ann.level[q] == kUnreachable)
      os << "inf";
    else
      os << ann.level[q];
    os << '\n';
  }
  os << "condensation\n";
  for (const auto &[from, to] : ann.condensation)
    os << from << ',' << to << '\n';
  return os.str();
}

ProgressAnnotation parse_dump(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "state,scc,level")
    throw std::invalid_argument("progress dump: missing header");
  ProgressAnnotation ann;
  bool edges = false;
  int max_level = -1;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    if (line == "condensation") {
      edges = true;
      continue;
    }
    std::istringstream row(line);
    std::string a, b, c;
    if (!edges) {
      if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
        throw std::invalid_argument("progress dump: bad row '" + line + "'");
      if (std::stoul(a) != ann.level.size())
        throw std::invalid_argument("progress dump: states out of order");
      ann.scc_id.push_back(static_cast<std::uint32_t>(std::stoul(b)));
      const int lvl = c == "inf" ? kUnreachable : std::stoi(c);
      ann.level.push_back(lvl);
      if (lvl == kUnreachable)
        ann.unreachable.push_back(static_cast<StateId>(ann.level.size() - 1));
      else
        max_level = std::max(max_level, lvl);
    } else {
      if (!std::getline(row, a, ',') || !std::getline(row, b))
        throw std::invalid_argument("progress dump: bad edge '" + line + "'");
      ann.condensation.emplace_back(static_cast<std::uint32_t>(std::stoul(a)),
                                    static_cast<std::uint32_t>(std::stoul(b)));
    }
  }
  ann.num_levels = max_level + 1;
  return ann;
}

} // namespace ltlshape::progress
