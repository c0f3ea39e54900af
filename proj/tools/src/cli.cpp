#include "ltlshape/cli.hpp"

#include "ltlshape/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace ltlshape::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

void RunConfig::validate() const {
  if (!scenario)
    throw UsageError("a scenario file is required (--scenario)");
  if (seeds.empty())
    throw UsageError("the seed list is empty");
  if (plan_length == 0)
    throw UsageError("plan length must be positive");
  try {
    hp.validate();
    shaping.validate();
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
}

RunConfig parse_config(std::string_view json_text, RunConfig base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception &e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw UsageError("config must be a JSON object");

  RunConfig c = std::move(base);
  using Setter = std::function<void(const json &)>;
  const std::map<std::string, Setter, std::less<>> setters = {
      {"scenario", [&](const json &v) { c.scenario = v.get<std::string>(); }},
      {"formula", [&](const json &v) { c.formula = v.get<std::string>(); }},
      {"seed",
       [&](const json &v) {
         c.seeds = v.is_array() ? v.get<std::vector<std::uint64_t>>() : std::vector{v.get<std::uint64_t>()};
       }},
      {"steps", [&](const json &v) { c.hp.total_steps = v.get<std::size_t>(); }},
      {"epsilon", [&](const json &v) { c.hp.epsilon = v.get<double>(); }},
      {"gamma", [&](const json &v) { c.hp.gamma = v.get<double>(); }},
      {"alpha", [&](const json &v) { c.hp.alpha = v.get<double>(); }},
      {"batch", [&](const json &v) { c.hp.batch_size = v.get<std::size_t>(); }},
      {"updates_per_step", [&](const json &v) { c.hp.updates_per_step = v.get<std::size_t>(); }},
      {"replay_cap", [&](const json &v) { c.hp.replay_capacity = v.get<std::size_t>(); }},
      {"max_traj", [&](const json &v) { c.hp.max_trajectory = v.get<std::size_t>(); }},
      {"stop_tolerance", [&](const json &v) { c.hp.stop_tolerance = v.get<double>(); }},
      {"accept_reward", [&](const json &v) { c.hp.accept_reward = v.get<double>(); }},
      {"eval_every", [&](const json &v) { c.hp.eval_every = v.get<std::size_t>(); }},
      {"eval_streak", [&](const json &v) { c.hp.eval_streak = v.get<std::size_t>(); }},
      {"options", [&](const json &v) { c.options = v.get<bool>(); }},
      {"shaping", [&](const json &v) { c.shaping.mode = progress::parse_shaping_mode(v.get<std::string>()); }},
      {"multiplier", [&](const json &v) { c.shaping.multiplier = v.get<double>(); }},
      {"out", [&](const json &v) { c.out = v.get<std::string>(); }},
      {"plan_length", [&](const json &v) { c.plan_length = v.get<std::size_t>(); }},
  };
  for (const auto &[key, value] : j.items()) {
    auto it = setters.find(key);
    if (it == setters.end())
      throw UsageError("unknown config key '" + key + "'");
    try {
      it->second(value);
    } catch (const json::exception &e) {
      throw UsageError("config key '" + key + "': " + e.what());
    } catch (const std::invalid_argument &e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  }
  return c;
}

RunConfig load_config(const fs::path &path, RunConfig base) {
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

CompileReport compile(std::string_view formula, std::vector<std::string> aps) {
  const ltl::Formula nnf = ltl::to_nnf(ltl::parse(formula));
  if (aps.empty())
    aps = ltl::atomic_props(nnf);
  auto ba = automaton::translate(nnf, std::move(aps));
  auto ann = progress::annotate_progress(ba);

  std::ostringstream os;
  std::size_t accepting = 0;
  for (automaton::StateId q = 0; q < ba.num_states(); ++q)
    accepting += ba.is_accepting(q) ? 1 : 0;
  std::uint32_t sccs = 0;
  for (auto id : ann.scc_id)
    sccs = std::max(sccs, id + 1);
  os << "states " << ba.num_states() << ", accepting " << accepting << ", sccs " << sccs << ", levels "
     << ann.num_levels << "\n";
  os << "state scc level accepting\n";
  for (automaton::StateId q = 0; q < ba.num_states(); ++q) {
    os << q << " " << ann.scc_id[q] << " ";
    if (ann.level[q] == progress::kUnreachable)
      os << "inf";
    else
      os << ann.level[q];
    os << " " << (ba.is_accepting(q) ? "yes" : "no") << "\n";
  }
  CompileReport r{std::move(ba), std::move(ann), {}, {}, os.str()};
  r.hoa = automaton::serialize_hoa(r.automaton);
  r.progress = progress::dump(r.annotation);
  return r;
}

learner::Problem load_problem(const RunConfig &cfg) {
  if (!cfg.scenario)
    throw UsageError("a scenario file is required (--scenario)");
  scenario::Scenario sc = scenario::load_scenario(*cfg.scenario);
  world::GridSpec grid = cfg.options ? sc.grid.with_standard_menus(*cfg.options) : sc.grid;
  return learner::make_problem(std::move(grid), cfg.formula ? *cfg.formula : sc.task);
}

namespace {

void write_file(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out)
    throw std::runtime_error("failed writing " + path.string());
}

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw UsageError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

} // namespace

std::string summary_line(const SeedReport &r) {
  std::ostringstream os;
  const auto &t = r.result;
  os << "seed=" << r.seed << " converged=" << (t.converged_step ? "yes" : "no");
  os << " converged_step=" << (t.converged_step ? std::to_string(*t.converged_step) : "-");
  os << " first_success_episode=" << (t.first_success_episode ? std::to_string(*t.first_success_episode) : "-");
  os << " episodes=" << t.episodes.size() << " steps=" << t.steps_run;
  os << " plan=" << learner::to_string(r.plan.status) << " plan_length=" << r.plan.steps.size();
  os << " wall_s=" << fixed(t.wall_seconds, 3);
  return os.str();
}

std::vector<SeedReport> run_train(const RunConfig &cfg, std::ostream &log) {
  cfg.validate();
  const learner::Problem problem = load_problem(cfg);
  fs::create_directories(cfg.out);
  std::vector<SeedReport> reports;
  for (auto seed : cfg.seeds) {
    learner::Hyperparams hp = cfg.hp;
    hp.seed = seed;
    SeedReport r{seed, learner::train(problem, hp, cfg.shaping), {}};
    r.plan = learner::extract_plan(r.result.q, problem, cfg.plan_length);

    const std::string suffix = "_seed" + std::to_string(seed);
    std::ostringstream metrics;
    io::write_metrics_csv(metrics, r.result.episodes);
    write_file(cfg.out / ("metrics" + suffix + ".csv"), metrics.str());
    std::ostringstream qdump;
    io::write_q_dump(qdump, r.result.q, problem.grid);
    write_file(cfg.out / ("q" + suffix + ".csv"), qdump.str());
    write_file(cfg.out / ("plan" + suffix + ".json"), io::plan_to_json(r.plan));

    log << summary_line(r) << "\n";
    reports.push_back(std::move(r));
  }
  return reports;
}

std::vector<io::BenchRow> run_bench(const BenchConfig &cfg) {
  if (cfg.sizes.empty())
    throw UsageError("the list of grid sizes is empty");
  if (cfg.seeds.empty())
    throw UsageError("the seed list is empty");
  for (int n : cfg.sizes)
    if (n < 3 || n > 16)
      throw UsageError("grid sizes must lie in 3..16");
  try {
    cfg.base.hp.validate();
    cfg.base.shaping.validate();
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }

  std::vector<io::BenchRow> rows;
  for (int n : cfg.sizes)
    for (bool options : {false, true})
      for (auto seed : cfg.seeds)
        rows.push_back({n, options, seed, std::nullopt, 0.0, false});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      io::BenchRow &row = rows[i];
      try {
        const auto sc = scenario::grid_scenario(row.grid, row.options);
        const auto problem = learner::make_problem(sc.grid, cfg.base.formula ? *cfg.base.formula : sc.task);
        learner::Hyperparams hp = cfg.base.hp;
        hp.seed = row.seed;
        hp.stop_on_convergence = true;
        const auto result = learner::train(problem, hp, cfg.base.shaping);
        row.iters = result.converged_step;
        row.success = result.converged_step.has_value();
        row.wall_s = result.wall_seconds;
      } catch (const std::exception &) {
        row.success = false;
      }
    }
  };
  const unsigned jobs = std::max(1U, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(rows.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  return rows;
}

namespace {

/// Flags shared by train, plan and inspect. Each is applied only if given,
/// so values from --config survive unless overridden.
struct RunFlags {
  std::string config;
  std::string scenario;
  std::string formula;
  std::vector<std::uint64_t> seeds;
  std::size_t steps = 0;
  double epsilon = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  std::size_t batch = 0;
  std::size_t updates = 0;
  std::size_t replay = 0;
  std::size_t max_traj = 0;
  double stop_tolerance = 0.0;
  double accept_reward = 0.0;
  std::size_t eval_every = 0;
  std::size_t eval_streak = 0;
  bool options = false;
  std::string shaping;
  double multiplier = 0.0;
  std::string out;
  std::size_t plan_length = 0;

  std::vector<std::pair<CLI::Option *, std::function<void(RunConfig &)>>> bound;

  template <typename T> void bind(CLI::App *app, const std::string &name, T &var, const std::string &help,
                                  std::function<void(RunConfig &)> apply) {
    bound.emplace_back(app->add_option(name, var, help), std::move(apply));
  }

  void attach(CLI::App *app, bool training) {
    app->add_option("--config", config, "JSON config; flags override its values");
    bind(app, "--scenario", scenario, "scenario JSON file", [this](RunConfig &c) { c.scenario = scenario; });
    bind(app, "--formula", formula, "task formula overriding the scenario's",
         [this](RunConfig &c) { c.formula = formula; });
    bound.emplace_back(app->add_flag("--options,!--no-options", options, "use the full option menu or primitives only"),
                       [this](RunConfig &c) { c.options = options; });
    bind(app, "--out", out, "output directory", [this](RunConfig &c) { c.out = out; });
    bind(app, "--plan-length", plan_length, "maximum plan length",
         [this](RunConfig &c) { c.plan_length = plan_length; });
    bind(app, "--shaping", shaping, "proportional, potential or none",
         [this](RunConfig &c) { c.shaping.mode = progress::parse_shaping_mode(shaping); });
    bind(app, "--multiplier", multiplier, "reward per progress level",
         [this](RunConfig &c) { c.shaping.multiplier = multiplier; });
    bind(app, "--gamma", gamma, "discount factor", [this](RunConfig &c) { c.hp.gamma = gamma; });
    bind(app, "--accept-reward", accept_reward, "reward for reaching a terminal accepting state",
         [this](RunConfig &c) { c.hp.accept_reward = accept_reward; });
    if (!training)
      return;
    bound.emplace_back(app->add_option("--seed", seeds, "seeds, comma separated")->delimiter(','),
                       [this](RunConfig &c) { c.seeds = seeds; });
    bind(app, "--steps", steps, "environment steps per run", [this](RunConfig &c) { c.hp.total_steps = steps; });
    bind(app, "--epsilon", epsilon, "exploration probability", [this](RunConfig &c) { c.hp.epsilon = epsilon; });
    bind(app, "--alpha", alpha, "learning rate", [this](RunConfig &c) { c.hp.alpha = alpha; });
    bind(app, "--batch", batch, "experiences per replay batch", [this](RunConfig &c) { c.hp.batch_size = batch; });
    bind(app, "--updates-per-step", updates, "replay batches per step",
         [this](RunConfig &c) { c.hp.updates_per_step = updates; });
    bind(app, "--replay-cap", replay, "replay memory capacity",
         [this](RunConfig &c) { c.hp.replay_capacity = replay; });
    bind(app, "--max-traj", max_traj, "steps before an episode is reset",
         [this](RunConfig &c) { c.hp.max_trajectory = max_traj; });
    bind(app, "--stop-tolerance", stop_tolerance, "stop when max |dQ| over a window falls below this (0: off)",
         [this](RunConfig &c) { c.hp.stop_tolerance = stop_tolerance; });
    bind(app, "--eval-every", eval_every, "steps between greedy evaluations",
         [this](RunConfig &c) { c.hp.eval_every = eval_every; });
    bind(app, "--eval-streak", eval_streak, "successful evaluations in a row that count as convergence",
         [this](RunConfig &c) { c.hp.eval_streak = eval_streak; });
  }

  RunConfig resolve(RunConfig base = {}) const {
    RunConfig c = config.empty() ? std::move(base) : load_config(config, std::move(base));
    try {
      for (const auto &[opt, apply] : bound)
        if (opt->count() > 0)
          apply(c);
    } catch (const std::invalid_argument &e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

int cmd_compile(const std::string &formula, const std::vector<std::string> &aps, const std::string &out_dir,
                std::ostream &out) {
  CompileReport r = compile(formula, aps);
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  fs::create_directories(dir);
  write_file(dir / "task.hoa", r.hoa);
  write_file(dir / "progress.txt", r.progress);
  out << r.summary;
  return kExitOk;
}

int cmd_plan(const RunConfig &cfg, const std::string &q_path, std::ostream &out) {
  if (q_path.empty())
    throw UsageError("--q is required");
  const learner::Problem problem = load_problem(cfg);
  std::istringstream in(read_file(q_path));
  learner::QTable q = [&] {
    try {
      return io::read_q_dump(in, problem.grid);
    } catch (const io::FormatError &e) {
      throw UsageError(e.what());
    }
  }();
  const learner::Plan plan = learner::extract_plan(q, problem, cfg.plan_length);
  fs::create_directories(cfg.out);
  write_file(cfg.out / "plan.json", io::plan_to_json(plan));
  out << "plan=" << learner::to_string(plan.status) << " plan_length=" << plan.steps.size()
      << " max_progress_level=" << plan.max_progress_level << "\n";
  return kExitOk;
}

int cmd_inspect(const RunConfig &cfg, std::ostream &out) {
  const learner::Problem p = load_problem(cfg);
  const auto &g = p.grid;
  out << "grid " << g.width() << "x" << g.height() << ", agents " << g.num_agents() << ", obstacles "
      << g.obstacles().size() << "\n";
  out << "propositions";
  for (const auto &prop : g.propositions())
    out << " " << prop;
  out << "\n";
  for (std::size_t a = 0; a < g.num_agents(); ++a) {
    out << "agent " << a << " start " << io::format_joint_state({{g.starts()[a]}}) << " options";
    for (const auto &o : g.options(a))
      out << " " << world::to_string(o.kind);
    out << "\n";
  }
  out << "joint options " << world::num_joint_options(g) << "\n";
  out << "automaton states " << p.automaton.num_states() << ", levels " << p.annotation.num_levels << "\n";
  out << "state scc level accepting terminal\n";
  for (automaton::StateId q = 0; q < p.automaton.num_states(); ++q) {
    out << q << " " << p.annotation.scc_id[q] << " ";
    if (p.annotation.level[q] == progress::kUnreachable)
      out << "inf";
    else
      out << p.annotation.level[q];
    out << " " << (p.automaton.is_accepting(q) ? "yes" : "no") << " " << (learner::is_terminal(p, q) ? "yes" : "no")
        << "\n";
  }
  return kExitOk;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Compile LTL tasks to Buchi automata and train multi-agent option policies"};
  app.require_subcommand(1);

  auto *compile_cmd = app.add_subcommand("compile", "translate a formula and annotate progress levels");
  std::string formula;
  std::vector<std::string> aps;
  std::string compile_out;
  compile_cmd->add_option("formula", formula, "LTL formula")->required();
  compile_cmd->add_option("--ap", aps, "proposition universe, comma separated")->delimiter(',');
  compile_cmd->add_option("--out", compile_out, "output directory");

  auto *train_cmd = app.add_subcommand("train", "train a joint policy per seed");
  RunFlags train_flags;
  train_flags.attach(train_cmd, true);

  auto *plan_cmd = app.add_subcommand("plan", "extract the greedy plan from a Q dump");
  RunFlags plan_flags;
  plan_flags.attach(plan_cmd, false);
  std::string q_path;
  plan_cmd->add_option("--q", q_path, "Q dump written by train");

  auto *inspect_cmd = app.add_subcommand("inspect", "summarise a scenario and its task automaton");
  RunFlags inspect_flags;
  inspect_flags.attach(inspect_cmd, false);

  auto *bench_cmd = app.add_subcommand("bench", "convergence sweep over grid sizes, with and without options");
  RunFlags bench_flags;
  bench_flags.attach(bench_cmd, true);
  std::vector<int> sizes;
  unsigned jobs = 1;
  bench_cmd->add_option("--sizes", sizes, "grid sizes, comma separated")->delimiter(',');
  bench_cmd->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*compile_cmd)
      return cmd_compile(formula, aps, compile_out, out);
    if (*train_cmd) {
      run_train(train_flags.resolve(), out);
      return kExitOk;
    }
    if (*plan_cmd)
      return cmd_plan(plan_flags.resolve(), q_path, out);
    if (*inspect_cmd)
      return cmd_inspect(inspect_flags.resolve(), out);
    if (*bench_cmd) {
      RunConfig base;
      base.hp.total_steps = 40000;
      BenchConfig bc{sizes, {}, bench_flags.resolve(base), jobs};
      bc.seeds = bc.base.seeds;
      const auto rows = run_bench(bc);
      std::ostringstream csv;
      io::write_bench_csv(csv, rows);
      fs::create_directories(bc.base.out);
      write_file(bc.base.out / "bench.csv", csv.str());
      out << csv.str();
      return kExitOk;
    }
  } catch (const ltl::ParseError &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

} // namespace ltlshape::cli
