#include "ltlshape/io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace ltlshape::io {

namespace {

using json = nlohmann::json;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos)
      return out;
    start = pos + 1;
  }
}

template <typename T> T parse_number(std::string_view s, const char *what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw FormatError(std::string("bad ") + what + ": '" + std::string(s) + "'");
  return v;
}

double parse_double(std::string_view s, const char *what) {
  // from_chars for double is missing from older libstdc++ builds.
  std::string tmp(s);
  char *end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size())
    throw FormatError(std::string("bad ") + what + ": '" + tmp + "'");
  return v;
}

bool parse_flag(std::string_view s, const char *what) {
  if (s == "1" || s == "true")
    return true;
  if (s == "0" || s == "false")
    return false;
  throw FormatError(std::string("bad ") + what + ": '" + std::string(s) + "'");
}

/// Data rows of a CSV whose first line must equal header.
std::vector<std::vector<std::string_view>> read_rows(std::istream &in, std::string_view header, std::size_t cols,
                                                     std::vector<std::string> &storage) {
  std::string line;
  if (!std::getline(in, line) || line != header)
    throw FormatError("expected header '" + std::string(header) + "'");
  while (std::getline(in, line))
    if (!line.empty())
      storage.push_back(line);
  std::vector<std::vector<std::string_view>> rows;
  for (const auto &l : storage) {
    auto f = split(l, ',');
    if (f.size() != cols)
      throw FormatError("expected " + std::to_string(cols) + " fields in '" + l + "'");
    rows.push_back(std::move(f));
  }
  return rows;
}

constexpr std::string_view kMetricsHeader = "episode,env_steps,cumulative_reward,reached_accepting,max_progress_level,wall_ms";
constexpr std::string_view kQHeader = "joint_state,automaton_state,joint_option,value";
constexpr std::string_view kBenchHeader = "grid,mode,seed,iters,wall_s,success";

json cells_json(const world::JointState &s) {
  json a = json::array();
  for (const auto &c : s.positions)
    a.push_back({c.x, c.y});
  return a;
}

world::JointState cells_from(const json &j) {
  world::JointState s;
  for (const auto &c : j)
    s.positions.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
  return s;
}

} // namespace

void write_metrics_csv(std::ostream &out, const std::vector<learner::EpisodeMetrics> &episodes) {
  out << kMetricsHeader << "\n";
  for (const auto &e : episodes)
    out << e.episode << "," << e.env_steps << "," << fmt_double(e.cumulative_reward) << ","
        << (e.reached_accepting ? 1 : 0) << "," << e.max_progress_level << "," << fmt_double(e.wall_ms) << "\n";
}

std::vector<learner::EpisodeMetrics> read_metrics_csv(std::istream &in) {
  std::vector<std::string> storage;
  std::vector<learner::EpisodeMetrics> out;
  for (const auto &f : read_rows(in, kMetricsHeader, 6, storage)) {
    learner::EpisodeMetrics e;
    e.episode = parse_number<std::size_t>(f[0], "episode");
    e.env_steps = parse_number<std::size_t>(f[1], "env_steps");
    e.cumulative_reward = parse_double(f[2], "cumulative_reward");
    e.reached_accepting = parse_flag(f[3], "reached_accepting");
    e.max_progress_level = parse_number<int>(f[4], "max_progress_level");
    e.wall_ms = parse_double(f[5], "wall_ms");
    out.push_back(e);
  }
  return out;
}

std::string format_joint_state(const world::JointState &s) {
  std::string out;
  for (std::size_t a = 0; a < s.positions.size(); ++a) {
    if (a)
      out += ';';
    out += std::to_string(s.positions[a].x) + ":" + std::to_string(s.positions[a].y);
  }
  return out;
}

world::JointState parse_joint_state(std::string_view text) {
  world::JointState s;
  for (auto cell : split(text, ';')) {
    const auto parts = split(cell, ':');
    if (parts.size() != 2)
      throw FormatError("bad joint state '" + std::string(text) + "'");
    s.positions.push_back({parse_number<int>(parts[0], "x"), parse_number<int>(parts[1], "y")});
  }
  return s;
}

void write_q_dump(std::ostream &out, const learner::QTable &q, const world::GridSpec &g) {
  out << kQHeader << "\n";
  for (const auto key : q.keys()) {
    const auto a = learner::unpack(g, key);
    const std::string s = format_joint_state(a.s);
    const double *row = q.row(key);
    for (std::uint32_t o = 0; o < q.num_joint_options(); ++o)
      out << s << "," << a.q << "," << o << "," << fmt_double(row[o]) << "\n";
  }
}

learner::QTable read_q_dump(std::istream &in, const world::GridSpec &g) {
  std::vector<std::string> storage;
  learner::QTable q(world::num_joint_options(g));
  for (const auto &f : read_rows(in, kQHeader, 4, storage)) {
    learner::AugmentedState a{parse_joint_state(f[0]), parse_number<automaton::StateId>(f[1], "automaton_state")};
    if (a.s.positions.size() != g.num_agents())
      throw FormatError("joint state has the wrong number of agents");
    for (const auto &c : a.s.positions)
      if (!g.in_bounds(c))
        throw FormatError("joint state lies outside the grid");
    const auto o = parse_number<std::uint32_t>(f[2], "joint_option");
    if (o >= q.num_joint_options())
      throw FormatError("joint option id out of range");
    q.set(learner::pack(g, a), o, parse_double(f[3], "value"));
  }
  return q;
}

std::string plan_to_json(const learner::Plan &plan) {
  json steps = json::array();
  for (const auto &st : plan.steps) {
    json kinds = json::array();
    for (auto k : st.kinds)
      kinds.push_back(std::string(world::to_string(k)));
    json moves = json::array();
    for (auto m : st.moves)
      moves.push_back(std::string(world::to_string(m)));
    steps.push_back({{"positions", cells_json(st.from.s)},
                     {"automaton_state", st.from.q},
                     {"joint_option", st.joint_option},
                     {"options", st.options},
                     {"kinds", kinds},
                     {"moves", moves},
                     {"next_positions", cells_json(st.to.s)},
                     {"next_automaton_state", st.to.q},
                     {"label", std::vector<std::string>(st.label.begin(), st.label.end())},
                     {"rejected", st.rejected}});
  }
  json j = {{"status", std::string(learner::to_string(plan.status))},
            {"length", plan.steps.size()},
            {"max_progress_level", plan.max_progress_level},
            {"steps", steps}};
  return j.dump(2) + "\n";
}

learner::Plan plan_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    learner::Plan plan;
    plan.status = learner::parse_plan_status(j.at("status").get<std::string>());
    plan.max_progress_level = j.at("max_progress_level").get<int>();
    for (const auto &s : j.at("steps")) {
      learner::PlanStep st;
      st.from = {cells_from(s.at("positions")), s.at("automaton_state").get<automaton::StateId>()};
      st.joint_option = s.at("joint_option").get<std::uint32_t>();
      st.options = s.at("options").get<std::vector<std::size_t>>();
      for (const auto &k : s.at("kinds"))
        st.kinds.push_back(world::parse_option_kind(k.get<std::string>()));
      for (const auto &m : s.at("moves")) {
        const auto name = m.get<std::string>();
        bool found = false;
        for (auto mv : {world::Move::Up, world::Move::Down, world::Move::Left, world::Move::Right, world::Move::Stay})
          if (world::to_string(mv) == name) {
            st.moves.push_back(mv);
            found = true;
          }
        if (!found)
          throw FormatError("unknown move '" + name + "'");
      }
      st.to = {cells_from(s.at("next_positions")), s.at("next_automaton_state").get<automaton::StateId>()};
      for (const auto &p : s.at("label"))
        st.label.insert(p.get<std::string>());
      st.rejected = s.at("rejected").get<bool>();
      plan.steps.push_back(std::move(st));
    }
    return plan;
  } catch (const json::exception &e) {
    throw FormatError(std::string("bad plan JSON: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw FormatError(std::string("bad plan JSON: ") + e.what());
  }
}

void write_bench_csv(std::ostream &out, const std::vector<BenchRow> &rows) {
  out << kBenchHeader << "\n";
  for (const auto &r : rows) {
    out << r.grid << "," << (r.options ? "options" : "primitives") << "," << r.seed << ",";
    if (r.iters)
      out << *r.iters;
    out << "," << fmt_double(r.wall_s) << "," << (r.success ? 1 : 0) << "\n";
  }
}

std::vector<BenchRow> read_bench_csv(std::istream &in) {
  std::vector<std::string> storage;
  std::vector<BenchRow> out;
  for (const auto &f : read_rows(in, kBenchHeader, 6, storage)) {
    BenchRow r;
    r.grid = parse_number<int>(f[0], "grid");
    if (f[1] != "options" && f[1] != "primitives")
      throw FormatError("bad mode '" + std::string(f[1]) + "'");
    r.options = f[1] == "options";
    r.seed = parse_number<std::uint64_t>(f[2], "seed");
    if (!f[3].empty())
      r.iters = parse_number<std::size_t>(f[3], "iters");
    r.wall_s = parse_double(f[4], "wall_s");
    r.success = parse_flag(f[5], "success");
    out.push_back(r);
  }
  return out;
}

} // namespace ltlshape::io
