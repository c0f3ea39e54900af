#pragma once

#include "ltlshape/world.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace ltlshape::scenario {

/// A gridworld together with the task formula it is meant to be trained on.
struct Scenario {
  std::string name;
  world::GridSpec grid;
  std::string task;
};

/// JSON layout:
///
///   {
///     "name": "canonical-5x5",
///     "width": 5, "height": 5,
///     "obstacles": [[2, 2]],
///     "agents": [{"start": [0, 0], "goal": [4, 4]}, ...],
///     "labels": [{"prop": "g1", "agent": 0, "cells": [[4, 4]]}, ...],
///     "options": "primitives" | "full" | [["up", "stay", ...], ...],
///     "task": "F g1 & F g2 & G ! o & G ! col"
///   }
///
/// Throws std::invalid_argument on malformed input.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path &path);
std::string to_json(const Scenario &s);

/// Two agents on an n x n grid: agent 0 from (0,0) to (n-1,n-1), agent 1 from
/// (n-1,0) to (0,n-1), obstacles on the centre cell (odd n) or the centre 2x2
/// block (even n), goals labelled g1/g2 and the task
/// `F g1 & F g2 & G ! o & G ! col`. n = 5 is the canonical scenario.
Scenario grid_scenario(int n, bool options);
inline Scenario canonical_scenario(bool options = false) { return grid_scenario(5, options); }

} // namespace ltlshape::scenario
