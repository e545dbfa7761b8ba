#include "lisac/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace lisac {

namespace fs = std::filesystem;
using nlohmann::json;

const char* sweep_axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::None: return "none";
    case SweepAxis::PMaxDbm: return "p_max_dbm";
    case SweepAxis::Zr: return "z_r";
    case SweepAxis::Antennas: return "antennas";
    case SweepAxis::UavStart: return "uav_start";
  }
  throw std::logic_error("sweep_axis_name: bad enum");
}

SweepAxis sweep_axis_from_name(const std::string& s) {
  if (s == "none") return SweepAxis::None;
  if (s == "p_max_dbm") return SweepAxis::PMaxDbm;
  if (s == "z_r") return SweepAxis::Zr;
  if (s == "antennas") return SweepAxis::Antennas;
  if (s == "uav_start") return SweepAxis::UavStart;
  throw std::invalid_argument("unknown sweep axis: " + s);
}

int ExperimentSpec::cell_count() const {
  if (axis == SweepAxis::None) return 1;
  if (axis == SweepAxis::UavStart) return static_cast<int>(starts.size());
  return static_cast<int>(values.size());
}

void ExperimentSpec::validate() const {
  scenario.validate();
  agent.validate();
  if (seeds.empty()) throw std::invalid_argument("experiment: seeds must be nonempty");
  if (cell_count() < 1) throw std::invalid_argument("experiment: sweep values must be nonempty");
  if (axis == SweepAxis::UavStart && !values.empty())
    throw std::invalid_argument("experiment: uav_start sweep takes starts, not values");
  if (axis != SweepAxis::UavStart && axis != SweepAxis::None && !starts.empty())
    throw std::invalid_argument("experiment: starts only apply to the uav_start sweep");
  if (eval_episodes < 1) throw std::invalid_argument("experiment: eval_episodes must be positive");
  if (out_dir.empty()) throw std::invalid_argument("experiment: out_dir must be set");
  for (int i = 0; i < cell_count(); ++i) apply_axis(scenario, axis, *this, i).validate();
}

json ExperimentSpec::to_json() const {
  json j;
  j["scenario"] = scenario.to_json();
  j["agent"] = agent.to_json();
  j["sweep"]["axis"] = sweep_axis_name(axis);
  if (axis == SweepAxis::UavStart) {
    json arr = json::array();
    for (const Position& p : starts) arr.push_back({p.x, p.y, p.z});
    j["sweep"]["starts"] = arr;
  } else if (axis != SweepAxis::None) {
    j["sweep"]["values"] = values;
  }
  j["seeds"] = seeds;
  j["out_dir"] = out_dir;
  j["eval_episodes"] = eval_episodes;
  j["save_checkpoints"] = save_checkpoints;
  return j;
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
  ExperimentSpec spec;
  if (j.contains("scenario")) spec.scenario = Scenario::from_json(j.at("scenario"));
  else spec.scenario = Scenario::desk();
  if (j.contains("agent")) spec.agent = AgentConfig::from_json(j.at("agent"));
  if (j.contains("sweep")) {
    const json& sw = j.at("sweep");
    spec.axis = sweep_axis_from_name(sw.value("axis", "none"));
    if (sw.contains("values")) spec.values = sw.at("values").get<std::vector<double>>();
    if (sw.contains("starts")) {
      for (const json& p : sw.at("starts")) {
        if (!p.is_array() || p.size() != 3)
          throw std::invalid_argument("experiment: each start is [x, y, z]");
        spec.starts.push_back(Position{p[0].get<double>(), p[1].get<double>(),
                                       p[2].get<double>()});
      }
    }
  }
  if (j.contains("seeds")) spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  spec.out_dir = j.value("out_dir", spec.out_dir);
  spec.eval_episodes = j.value("eval_episodes", spec.eval_episodes);
  spec.save_checkpoints = j.value("save_checkpoints", spec.save_checkpoints);
  spec.validate();
  return spec;
}

Scenario apply_axis(const Scenario& base, SweepAxis axis, const ExperimentSpec& spec,
                    int index) {
  Scenario sc = base;
  switch (axis) {
    case SweepAxis::None:
      break;
    case SweepAxis::PMaxDbm:
      sc.p_max = std::pow(10.0, spec.values.at(index) / 10.0) / 1000.0;
      break;
    case SweepAxis::Zr:
      sc.z_r = spec.values.at(index);
      sc.uav_start.z = sc.z_r;
      break;
    case SweepAxis::Antennas:
      sc.m_antennas = static_cast<int>(spec.values.at(index));
      break;
    case SweepAxis::UavStart:
      sc.uav_start = spec.starts.at(index);
      sc.uav_start.z = sc.z_r;
      break;
  }
  return sc;
}

std::string cell_tag(SweepAxis axis, const ExperimentSpec& spec, int index) {
  char buf[64];
  switch (axis) {
    case SweepAxis::None:
      return "base";
    case SweepAxis::PMaxDbm:
      std::snprintf(buf, sizeof buf, "pmax%g", spec.values.at(index));
      return buf;
    case SweepAxis::Zr:
      std::snprintf(buf, sizeof buf, "zr%g", spec.values.at(index));
      return buf;
    case SweepAxis::Antennas:
      std::snprintf(buf, sizeof buf, "m%g", spec.values.at(index));
      return buf;
    case SweepAxis::UavStart:
      std::snprintf(buf, sizeof buf, "start%d", index);
      return buf;
  }
  throw std::logic_error("cell_tag: bad enum");
}

EvalResult evaluate_policy(RlEnv& env, const TrainedPolicy& policy, int episodes,
                           std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("evaluate_policy: episodes must be positive");
  Rng rng(Rng::derive(seed, 0x4556414c));
  const std::uint64_t env_stream = Rng::derive(seed, 0x45564e56);

  EvalResult out;
  out.episodes.reserve(episodes);
  for (int ep = 0; ep < episodes; ++ep) {
    Vec s = env.reset(Rng::derive(env_stream, static_cast<std::uint64_t>(ep)));
    EpisodeStats st;
    double reward_sum = 0.0;
    int steps = 0, violations = 0;
    for (;;) {
      const Vec a = policy.act(s, rng);
      const RlEnv::Step step = env.step(a);
      reward_sum += step.reward;
      st.f1 += step.metrics.r_u;
      st.f2 += step.metrics.r_st;
      st.f3 += step.metrics.e_u;
      violations += step.metrics.violated ? 1 : 0;
      steps += 1;
      if (ep == 0) out.trajectory.push_back(step.metrics.position);
      s = step.next_state;
      if (step.done) break;
    }
    st.mean_reward = reward_sum / steps;
    st.violation_rate = static_cast<double>(violations) / steps;
    out.episodes.push_back(st);
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_episode_csv(const std::string& path, const std::vector<EpisodeStats>& eps,
                       int slots) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "episode,slots,mean_reward,f1,f2,f3,violation_rate\n";
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const EpisodeStats& e = eps[i];
    f << i << ',' << slots << ',' << fmt(e.mean_reward) << ',' << fmt(e.f1) << ','
      << fmt(e.f2) << ',' << fmt(e.f3) << ',' << fmt(e.violation_rate) << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const Position& start,
                          const std::vector<Position>& traj) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "t,x,y,z\n";
  f << 0 << ',' << fmt(start.x) << ',' << fmt(start.y) << ',' << fmt(start.z) << '\n';
  for (std::size_t t = 0; t < traj.size(); ++t) {
    f << t + 1 << ',' << fmt(traj[t].x) << ',' << fmt(traj[t].y) << ',' << fmt(traj[t].z)
      << '\n';
  }
}

struct Cell {
  int index;
  std::uint64_t seed;
  std::string tag;
};

std::vector<std::string> run_cell(const ExperimentSpec& spec, const Cell& cell) {
  const Scenario sc = apply_axis(spec.scenario, spec.axis, spec, cell.index);
  const std::string stem = std::string(agent_name(spec.agent.kind)) + "_" +
                           ablation_name(spec.agent.ablation) + "_" + cell.tag + "_seed" +
                           std::to_string(cell.seed);

  SimEnv env(sc);
  const TrainReport report = train(env, spec.agent, cell.seed);

  const fs::path dir(spec.out_dir);
  const std::string metrics_path = (dir / ("metrics_" + stem + ".csv")).string();
  write_episode_csv(metrics_path, report.episodes, sc.t_slots);

  const TrainedPolicy policy = TrainedPolicy::from_checkpoint(report.checkpoint);
  SimEnv eval_env(sc);
  const EvalResult eval = evaluate_policy(eval_env, policy, spec.eval_episodes, cell.seed);
  const std::string eval_path = (dir / ("eval_" + stem + ".csv")).string();
  write_episode_csv(eval_path, eval.episodes, sc.t_slots);

  const std::string traj_path = (dir / ("trajectory_" + stem + ".csv")).string();
  write_trajectory_csv(traj_path, sc.uav_start, eval.trajectory);

  std::vector<std::string> paths = {metrics_path, eval_path, traj_path};
  if (spec.save_checkpoints) {
    const std::string ckpt_path = (dir / ("checkpoint_" + stem + ".json")).string();
    std::ofstream f(ckpt_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + ckpt_path);
    f << report.checkpoint.dump(2) << '\n';
    paths.push_back(ckpt_path);
  }
  return paths;
}

}  // namespace

std::vector<std::string> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  fs::create_directories(spec.out_dir);

  std::vector<Cell> cells;
  for (int i = 0; i < spec.cell_count(); ++i) {
    for (std::uint64_t seed : spec.seeds) {
      cells.push_back(Cell{i, seed, cell_tag(spec.axis, spec, i)});
    }
  }

  std::vector<std::vector<std::string>> written(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(cells.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= cells.size()) return;
        try {
          written[k] = run_cell(spec, cells[k]);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<std::string> paths;
  for (const auto& group : written) paths.insert(paths.end(), group.begin(), group.end());
  return paths;
}

namespace {

struct MetricsFile {
  std::string config;  // "<agent>_<ablation>_<tag>"
  std::vector<std::vector<double>> rows;
};

std::vector<double> parse_csv_line(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::runtime_error("bad CSV field: " + field);
    out.push_back(v);
  }
  return out;
}

MetricsFile read_metrics_csv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::string header;
  std::getline(f, header);
  if (header != "episode,slots,mean_reward,f1,f2,f3,violation_rate")
    throw std::runtime_error("unexpected metrics header in " + path.string());

  MetricsFile mf;
  const std::string name = path.filename().string();
  const std::string prefix = "metrics_";
  const std::size_t seed_at = name.rfind("_seed");
  if (name.rfind(prefix, 0) != 0 || seed_at == std::string::npos)
    throw std::runtime_error("unexpected metrics file name: " + name);
  mf.config = name.substr(prefix.size(), seed_at - prefix.size());

  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    mf.rows.push_back(parse_csv_line(line));
  }
  if (mf.rows.empty()) throw std::runtime_error("metrics file has no rows: " + path.string());
  return mf;
}

}  // namespace

std::vector<SummaryRow> summarize_rows(const std::string& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("no results: " + dir + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("metrics_", 0) == 0 &&
        entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw std::runtime_error("no results: " + dir + " has no metrics CSVs");
  std::sort(files.begin(), files.end());

  // config -> metric values, one entry per seed
  std::map<std::string, std::vector<std::array<double, 5>>> per_config;
  for (const fs::path& p : files) {
    const MetricsFile mf = read_metrics_csv(p);
    const std::size_t tail = std::max<std::size_t>(1, mf.rows.size() / 10);
    std::array<double, 5> acc{};
    for (std::size_t i = mf.rows.size() - tail; i < mf.rows.size(); ++i) {
      const auto& r = mf.rows[i];
      if (r.size() != 7) throw std::runtime_error("bad metrics row in " + p.string());
      const double slots = r[1];
      acc[0] += r[2];
      acc[1] += r[3] / slots;
      acc[2] += r[4] / slots;
      acc[3] += r[5] / slots;
      acc[4] += r[6];
    }
    for (double& v : acc) v /= static_cast<double>(tail);
    per_config[mf.config].push_back(acc);
  }

  const char* metric_names[5] = {"reward", "f1_per_slot", "f2_per_slot", "f3_per_slot",
                                 "violation_rate"};
  std::vector<SummaryRow> rows;
  for (const auto& [config, samples] : per_config) {
    for (int m = 0; m < 5; ++m) {
      SummaryRow row;
      row.config = config;
      row.metric = metric_names[m];
      row.n = static_cast<int>(samples.size());
      double mean = 0.0;
      for (const auto& s : samples) mean += s[m];
      mean /= row.n;
      double var = 0.0;
      for (const auto& s : samples) var += (s[m] - mean) * (s[m] - mean);
      row.mean = mean;
      row.stddev = row.n > 1 ? std::sqrt(var / (row.n - 1)) : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string summarize(const std::string& dir) {
  const std::vector<SummaryRow> rows = summarize_rows(dir);
  const std::string path = (fs::path(dir) / "summary.csv").string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "config,metric,mean,std,n\n";
  for (const SummaryRow& r : rows) {
    f << r.config << ',' << r.metric << ',' << fmt(r.mean) << ',' << fmt(r.stddev) << ','
      << r.n << '\n';
  }
  return path;
}

}  // namespace lisac
