#include "ltlshape/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace ltlshape::scenario {

using nlohmann::json;
using world::Cell;
using world::OptionDef;
using world::OptionKind;

namespace {

Cell cell_from(const json &j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw std::invalid_argument("cells are [x, y] integer pairs");
  return {j[0].get<int>(), j[1].get<int>()};
}

json cell_to(Cell c) { return json::array({c.x, c.y}); }

std::vector<Cell> cells_from(const json &j) {
  if (!j.is_array())
    throw std::invalid_argument("expected a list of cells");
  std::vector<Cell> out;
  for (const auto &c : j)
    out.push_back(cell_from(c));
  return out;
}

std::vector<OptionDef> menu_from(const json &j, const std::optional<Cell> &goal) {
  std::vector<OptionDef> menu;
  for (const auto &name : j) {
    const OptionKind k = world::parse_option_kind(name.get<std::string>());
    if (k == OptionKind::GoToGoal && !goal)
      throw std::invalid_argument("go_to_goal requires the agent to have a goal");
    menu.push_back({k, k == OptionKind::GoToGoal ? *goal : Cell{}});
  }
  return menu;
}

} // namespace

Scenario parse_scenario(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw std::invalid_argument(std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    const int width = j.at("width").get<int>();
    const int height = j.at("height").get<int>();
    std::vector<Cell> obstacles = j.contains("obstacles") ? cells_from(j["obstacles"]) : std::vector<Cell>{};

    std::vector<Cell> starts;
    std::vector<std::optional<Cell>> goals;
    for (const auto &agent : j.at("agents")) {
      starts.push_back(cell_from(agent.at("start")));
      goals.push_back(agent.contains("goal") ? std::optional<Cell>(cell_from(agent["goal"])) : std::nullopt);
    }

    std::vector<world::LabelBinding> labels;
    if (j.contains("labels")) {
      for (const auto &b : j["labels"]) {
        world::LabelBinding binding;
        binding.prop = b.at("prop").get<std::string>();
        if (b.contains("agent") && !b["agent"].is_null())
          binding.agent = b["agent"].get<std::size_t>();
        binding.cells = cells_from(b.at("cells"));
        labels.push_back(std::move(binding));
      }
    }

    std::vector<std::vector<OptionDef>> menus;
    const json options = j.value("options", json("primitives"));
    if (options.is_string()) {
      const auto mode = options.get<std::string>();
      if (mode != "primitives" && mode != "full")
        throw std::invalid_argument("options must be 'primitives', 'full' or per-agent lists");
      for (const auto &goal : goals)
        menus.push_back(world::standard_menu(mode == "full", goal));
    } else {
      if (!options.is_array() || options.size() != starts.size())
        throw std::invalid_argument("per-agent option lists must match the agent count");
      for (std::size_t a = 0; a < starts.size(); ++a)
        menus.push_back(menu_from(options[a], goals[a]));
    }

    return Scenario{j.value("name", std::string("scenario")),
                    world::GridSpec(width, height, std::move(obstacles), std::move(labels), std::move(starts),
                                    std::move(goals), std::move(menus)),
                    j.value("task", std::string())};
  } catch (const json::exception &e) {
    throw std::invalid_argument(std::string("malformed scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string to_json(const Scenario &s) {
  const auto &g = s.grid;
  json j;
  j["name"] = s.name;
  j["width"] = g.width();
  j["height"] = g.height();
  j["obstacles"] = json::array();
  for (Cell c : g.obstacles())
    j["obstacles"].push_back(cell_to(c));
  j["agents"] = json::array();
  for (std::size_t a = 0; a < g.num_agents(); ++a) {
    json agent;
    agent["start"] = cell_to(g.starts()[a]);
    if (g.goals()[a])
      agent["goal"] = cell_to(*g.goals()[a]);
    j["agents"].push_back(agent);
  }
  j["labels"] = json::array();
  for (const auto &b : g.labels()) {
    json binding;
    binding["prop"] = b.prop;
    binding["agent"] = b.agent ? json(*b.agent) : json(nullptr);
    binding["cells"] = json::array();
    for (Cell c : b.cells)
      binding["cells"].push_back(cell_to(c));
    j["labels"].push_back(binding);
  }
  j["options"] = json::array();
  for (const auto &menu : g.menus()) {
    json names = json::array();
    for (const auto &o : menu)
      names.push_back(std::string(world::to_string(o.kind)));
    j["options"].push_back(names);
  }
  j["task"] = s.task;
  return j.dump(2) + "\n";
}

Scenario grid_scenario(int n, bool options) {
  if (n < 3 || n > 16)
    throw std::invalid_argument("grid scenarios support sizes 3..16");
  std::vector<Cell> obstacles;
  const int mid = n / 2;
  if (n % 2 == 1)
    obstacles = {{mid, mid}};
  else
    obstacles = {{mid - 1, mid - 1}, {mid - 1, mid}, {mid, mid - 1}, {mid, mid}};
  const Cell goal0{n - 1, n - 1};
  const Cell goal1{0, n - 1};
  std::vector<world::LabelBinding> labels{{"g1", 0, {goal0}}, {"g2", 1, {goal1}}};
  std::vector<std::optional<Cell>> goals{goal0, goal1};
  std::vector<std::vector<OptionDef>> menus{world::standard_menu(options, goal0), world::standard_menu(options, goal1)};
  return Scenario{"grid-" + std::to_string(n) + "x" + std::to_string(n),
                  world::GridSpec(n, n, std::move(obstacles), std::move(labels), {{0, 0}, {n - 1, 0}},
                                  std::move(goals), std::move(menus)),
                  "F g1 & F g2 & G ! o & G ! col"};
}

} // namespace ltlshape::scenario
