#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lisac/diffusion.hpp"
#include "lisac/harness.hpp"
#include "lisac/nn.hpp"
#include "lisac/replay.hpp"
#include "lisac/uav.hpp"

namespace {

using nlohmann::json;
using namespace lisac;

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  return json::parse(f);
}

// Profile defaults first, then the config file on top. The agent kind is read
// before building defaults so kind-specific settings (replay mode, twin
// critics) start from the right base.
ExperimentSpec build_spec(const json& cfg, bool paper_scale) {
  ExperimentSpec spec;
  spec.scenario = paper_scale ? Scenario::paper() : Scenario::desk();

  AgentKind kind = AgentKind::Gdmddpg;
  if (cfg.contains("agent") && cfg.at("agent").contains("kind"))
    kind = agent_from_name(cfg.at("agent").at("kind").get<std::string>());
  spec.agent = AgentConfig::for_kind(kind);
  if (paper_scale) {
    spec.agent.episodes = 4500;
    spec.agent.g_steps = 5;
  } else {
    spec.agent.episodes = 300;
    spec.agent.replay.b_max = 20000;
    spec.agent.replay.f_min = 1000;
  }

  json merged = spec.to_json();
  merged.update(cfg, /*merge_objects=*/true);
  return ExperimentSpec::from_json(merged);
}

ExperimentSpec spec_from_flags(const std::string& config_path, bool paper_scale,
                               const std::vector<std::uint64_t>& seeds,
                               const std::string& out_dir) {
  const json cfg = config_path.empty() ? json::object() : load_json(config_path);
  ExperimentSpec spec = build_spec(cfg, paper_scale);
  if (!seeds.empty()) spec.seeds = seeds;
  if (!out_dir.empty()) spec.out_dir = out_dir;
  spec.validate();
  return spec;
}

int cmd_train(const std::string& config_path, bool paper_scale,
              const std::vector<std::uint64_t>& seeds, const std::string& out_dir) {
  ExperimentSpec spec = spec_from_flags(config_path, paper_scale, seeds, out_dir);
  if (spec.axis != SweepAxis::None)
    throw std::invalid_argument("train runs a single configuration; use sweep for axis sweeps");
  spec.save_checkpoints = true;
  for (const std::string& p : run_experiment(spec)) std::printf("wrote %s\n", p.c_str());
  return 0;
}

int cmd_sweep(const std::string& config_path, bool paper_scale,
              const std::vector<std::uint64_t>& seeds, const std::string& out_dir) {
  const ExperimentSpec spec = spec_from_flags(config_path, paper_scale, seeds, out_dir);
  const std::vector<std::string> paths = run_experiment(spec);
  std::printf("wrote %zu files under %s (%d cells x %zu seeds)\n", paths.size(),
              spec.out_dir.c_str(), spec.cell_count(), spec.seeds.size());
  return 0;
}

int cmd_eval(const std::string& config_path, bool paper_scale,
             const std::string& ckpt_path, int episodes, std::uint64_t seed) {
  const ExperimentSpec spec =
      spec_from_flags(config_path, paper_scale, {}, std::string());
  const json ckpt = load_json(ckpt_path);
  const TrainedPolicy policy = TrainedPolicy::from_checkpoint(ckpt);

  SimEnv env(spec.scenario);
  if (ckpt.at("state_dim").get<int>() != env.state_dim() ||
      ckpt.at("action_dim").get<int>() != env.action_dim())
    throw std::invalid_argument("checkpoint dimensions do not match the scenario");

  const EvalResult res = evaluate_policy(env, policy, episodes, seed);
  std::printf("%7s %12s %10s %10s %12s %10s\n", "episode", "mean_reward", "f1", "f2",
              "f3", "viol_rate");
  EpisodeStats mean;
  for (std::size_t i = 0; i < res.episodes.size(); ++i) {
    const EpisodeStats& e = res.episodes[i];
    std::printf("%7zu %12.5f %10.5f %10.6f %12.2f %10.4f\n", i, e.mean_reward, e.f1,
                e.f2, e.f3, e.violation_rate);
    mean.mean_reward += e.mean_reward / res.episodes.size();
    mean.f1 += e.f1 / res.episodes.size();
    mean.f2 += e.f2 / res.episodes.size();
    mean.f3 += e.f3 / res.episodes.size();
    mean.violation_rate += e.violation_rate / res.episodes.size();
  }
  std::printf("%7s %12.5f %10.5f %10.6f %12.2f %10.4f\n", "mean", mean.mean_reward,
              mean.f1, mean.f2, mean.f3, mean.violation_rate);
  return 0;
}

int cmd_summarize(const std::string& dir) {
  const std::vector<SummaryRow> rows = summarize_rows(dir);
  std::printf("%-32s %-16s %14s %14s %3s\n", "config", "metric", "mean", "std", "n");
  for (const SummaryRow& r : rows) {
    std::printf("%-32s %-16s %14.6g %14.6g %3d\n", r.config.c_str(), r.metric.c_str(),
                r.mean, r.stddev, r.n);
  }
  std::printf("wrote %s\n", summarize(dir).c_str());
  return 0;
}

int cmd_selftest() {
  int failures = 0;
  const auto check = [&](const char* what, bool ok) {
    std::printf("%s  %s\n", ok ? "ok  " : "FAIL", what);
    if (!ok) failures += 1;
  };
  const auto near = [](double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::abs(b);
  };

  const EnergyParams ep;
  check("hover propulsion energy = 168.48 J",
        near(propulsion_energy(0.0, ep), 168.48, 1e-9));
  check("propulsion energy at 10 m/s",
        near(propulsion_energy(10.0, ep), 126.02347844038786, 1e-9));

  const DiffusionSchedule sch = vp_schedule(5);
  check("vp schedule beta_1", near(sch.beta(0), 0.19587455833344036, 1e-9));
  check("vp schedule beta_5", near(sch.beta(4), 0.8350313791773686, 1e-9));
  check("vp schedule alpha_hat_5", near(sch.alpha_hat(4), 0.00640933344625638, 1e-9));

  {
    ParamVector target, main;
    target.value = Vec::Zero(4);
    main.value = Vec::Ones(4);
    soft_update(target, main, 0.005);
    check("soft update moves exactly 0.5%", (target.value.array() == 0.005).all());
  }

  {
    RperConfig rc;
    rc.b_max = 100000;
    rc.f_min = 1000;
    ReplayBuffer buf(rc);
    const Transition tr{Vec::Zero(1), Vec::Zero(1), 0.0, Vec::Zero(1), false};
    for (int i = 0; i < rc.b_max; ++i) buf.push(tr);
    check("recency window at u=0", buf.ere_window(0, 100) == 100000);
    check("recency window at u=60", buf.ere_window(60, 100) == 9028);
    check("recency window at u=100", buf.ere_window(100, 100) == 1816);
  }

  {
    SumTree st(64);
    std::vector<double> naive(64, 0.0);
    Rng rng(99);
    for (int op = 0; op < 2000; ++op) {
      const int i = static_cast<int>(rng.index(64));
      const double v = rng.uniform(0.0, 5.0);
      st.set(i, v);
      naive[i] = v;
    }
    double total = 0.0;
    for (double v : naive) total += v;
    check("sum tree root tracks priorities", std::abs(st.total() - total) <= 1e-9 * total);
  }

  {
    const Scenario sc = Scenario::desk();
    AgentConfig cfg = AgentConfig::for_kind(AgentKind::Gdmddpg);
    cfg.episodes = 2;
    cfg.hidden = 8;
    cfg.hidden_layers = 1;
    cfg.batch = 8;
    cfg.g_steps = 2;
    cfg.replay.b_max = 256;
    cfg.replay.f_min = 16;
    cfg.warmup_steps = 16;
    SimEnv env1(sc), env2(sc);
    const TrainReport r1 = train(env1, cfg, 7);
    const TrainReport r2 = train(env2, cfg, 7);
    bool same = r1.episodes.size() == r2.episodes.size();
    for (std::size_t i = 0; same && i < r1.episodes.size(); ++i)
      same = r1.episodes[i].mean_reward == r2.episodes[i].mean_reward;
    check("training is reproducible from the seed", same);
    check("checkpoints are reproducible", r1.checkpoint.dump() == r2.checkpoint.dump());

    const TrainedPolicy pol = TrainedPolicy::from_checkpoint(r1.checkpoint);
    SimEnv env3(sc);
    Rng rng(5);
    const Vec a = pol.act(env3.reset(11), rng);
    check("policy actions stay in the unit box",
          (a.array() >= -1.0).all() && (a.array() <= 1.0).all());
  }

  std::printf("selftest: %d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV-mounted IRS ISAC simulator and RL training harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir, ckpt_path, results_dir;
  std::vector<std::uint64_t> seeds;
  bool paper_scale = false;
  int episodes = 10;
  std::uint64_t eval_seed = 1;

  CLI::App* train_cmd =
      app.add_subcommand("train", "Train one agent and write metrics, eval, trajectory "
                                  "CSVs plus a checkpoint JSON per seed");
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Run a sweep experiment described by --config");
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Greedy rollouts of a saved checkpoint");
  CLI::App* summarize_cmd =
      app.add_subcommand("summarize", "Aggregate metrics CSVs in a results directory");
  app.add_subcommand("selftest", "Quick built-in sanity checks");

  for (CLI::App* cmd : {train_cmd, sweep_cmd, eval_cmd}) {
    cmd->add_option("--config", config_path, "JSON config overriding profile defaults");
    cmd->add_flag("--paper-scale", paper_scale,
                  "Full-scale profile (3 users, M=4, L=16, T=100, 4500 episodes)");
  }
  for (CLI::App* cmd : {train_cmd, sweep_cmd}) {
    cmd->add_option("--seed", seeds, "Seed list override, repeatable");
    cmd->add_option("--out", out_dir, "Output directory override");
  }
  eval_cmd->add_option("--checkpoint", ckpt_path, "Checkpoint JSON written by train")
      ->required();
  eval_cmd->add_option("--episodes", episodes, "Greedy episodes to run");
  eval_cmd->add_option("--seed", eval_seed, "Evaluation seed");
  summarize_cmd->add_option("dir", results_dir, "Results directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return cmd_train(config_path, paper_scale, seeds, out_dir);
    if (*sweep_cmd) return cmd_sweep(config_path, paper_scale, seeds, out_dir);
    if (*eval_cmd) return cmd_eval(config_path, paper_scale, ckpt_path, episodes, eval_seed);
    if (*summarize_cmd) return cmd_summarize(results_dir);
    return cmd_selftest();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
