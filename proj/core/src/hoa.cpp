#include "ltlshape/automaton.hpp"

#include <charconv>
#include <sstream>

namespace ltlshape::automaton {

std::string serialize_hoa(const BuchiAutomaton &a) {
  std::ostringstream os;
  os << "HOA: v1\n";
  os << "States: " << a.num_states() << "\n";
  os << "Start: " << a.initial() << "\n";
  os << "AP: " << a.ap_universe().size();
  for (const auto &p : a.ap_universe())
    os << " \"" << p << "\"";
  os << "\n";
  os << "acc-name: Buchi\n";
  os << "Acceptance: 1 Inf(0)\n";
  os << "properties: trans-labels explicit-labels state-acc\n";
  os << "--BODY--\n";
  for (StateId q = 0; q < a.num_states(); ++q) {
    os << "State: " << q;
    if (a.is_accepting(q))
      os << " {0}";
    os << "\n";
    for (std::size_t i : a.out_edges(q)) {
      const Edge &e = a.edges()[i];
      os << "[" << e.guard.to_hoa() << "] " << e.dst << "\n";
    }
  }
  os << "--END--\n";
  return os.str();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::size_t to_index(std::string_view s, const char *what) {
  s = trim(s);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw HoaError(std::string("bad ") + what + ": '" + std::string(s) + "'");
  return v;
}

std::vector<std::string> parse_ap_line(std::string_view rest) {
  rest = trim(rest);
  const auto space = rest.find(' ');
  const std::size_t count = to_index(rest.substr(0, space), "AP count");
  std::vector<std::string> names;
  std::size_t i = space == std::string_view::npos ? rest.size() : space;
  while (i < rest.size()) {
    if (rest[i] == ' ') {
      ++i;
      continue;
    }
    if (rest[i] != '"')
      throw HoaError("AP names must be quoted");
    const auto close = rest.find('"', i + 1);
    if (close == std::string_view::npos)
      throw HoaError("unterminated AP name");
    names.emplace_back(rest.substr(i + 1, close - i - 1));
    i = close + 1;
  }
  if (names.size() != count)
    throw HoaError("AP count does not match the listed names");
  return names;
}

} // namespace

BuchiAutomaton parse_hoa(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t num_states = 0;
  bool have_states = false;
  std::optional<StateId> start;
  std::vector<std::string> aps;
  bool in_body = false;
  bool ended = false;
  bool seen_version = false;

  std::vector<Edge> edges;
  std::vector<bool> accepting;
  std::optional<StateId> current;

  while (std::getline(in, line)) {
    std::string_view l = trim(line);
    if (l.empty())
      continue;
    if (!in_body) {
      if (l == "--BODY--") {
        if (!seen_version || !have_states || !start)
          throw HoaError("header is missing HOA, States or Start");
        accepting.assign(num_states, false);
        in_body = true;
        continue;
      }
      const auto colon = l.find(':');
      if (colon == std::string_view::npos)
        throw HoaError("malformed header line '" + std::string(l) + "'");
      const auto key = l.substr(0, colon);
      const auto rest = trim(l.substr(colon + 1));
      if (key == "HOA") {
        if (rest != "v1")
          throw HoaError("unsupported HOA version");
        seen_version = true;
      } else if (key == "States") {
        num_states = to_index(rest, "state count");
        have_states = true;
      } else if (key == "Start") {
        if (start)
          throw HoaError("only one initial state is supported");
        start = static_cast<StateId>(to_index(rest, "start state"));
      } else if (key == "AP") {
        aps = parse_ap_line(rest);
      } else if (key == "Acceptance") {
        if (rest != "1 Inf(0)")
          throw HoaError("only Buchi acceptance 'Inf(0)' is supported");
      }
      // name, acc-name, properties, tool and other headers carry no structure we need
      continue;
    }
    if (l == "--END--") {
      ended = true;
      break;
    }
    if (l.starts_with("State:")) {
      auto rest = trim(l.substr(6));
      const bool acc = rest.find("{0}") != std::string_view::npos;
      const auto end = rest.find_first_of(" \"{");
      const auto q = to_index(rest.substr(0, end), "state id");
      if (q >= num_states)
        throw HoaError("state id out of range");
      current = static_cast<StateId>(q);
      accepting[q] = acc;
      continue;
    }
    if (l.front() == '[') {
      if (!current)
        throw HoaError("edge before any State: line");
      const auto close = l.find(']');
      if (close == std::string_view::npos)
        throw HoaError("unterminated label");
      Guard g = parse_guard(l.substr(1, close - 1));
      auto dst_text = trim(l.substr(close + 1));
      if (dst_text.find('{') != std::string_view::npos)
        throw HoaError("transition-based acceptance is not supported");
      const auto dst = to_index(dst_text, "edge target");
      if (dst >= num_states)
        throw HoaError("edge target out of range");
      edges.push_back({*current, std::move(g), static_cast<StateId>(dst)});
      continue;
    }
    throw HoaError("unexpected body line '" + std::string(l) + "'");
  }
  if (!ended)
    throw HoaError("missing --END--");
  try {
    return BuchiAutomaton(std::move(aps), num_states, *start, std::move(edges), std::move(accepting));
  } catch (const std::invalid_argument &e) {
    throw HoaError(e.what());
  }
}

} // namespace ltlshape::automaton
