#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lisac/agents.hpp"
#include "lisac/scenario.hpp"

namespace lisac {

enum class SweepAxis { None, PMaxDbm, Zr, Antennas, UavStart };

const char* sweep_axis_name(SweepAxis a);
SweepAxis sweep_axis_from_name(const std::string& s);

struct ExperimentSpec {
  Scenario scenario;
  AgentConfig agent;
  SweepAxis axis = SweepAxis::None;
  std::vector<double> values;       // p_max_dbm / z_r / antennas sweeps
  std::vector<Position> starts;     // uav_start sweep
  std::vector<std::uint64_t> seeds = {1};
  std::string out_dir = "results";
  int eval_episodes = 10;
  bool save_checkpoints = false;

  int cell_count() const;
  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentSpec from_json(const nlohmann::json& j);
};

// Scenario for one sweep cell; index runs over values/starts (0 when none).
Scenario apply_axis(const Scenario& base, SweepAxis axis, const ExperimentSpec& spec,
                    int index);
// Short cell label used in file names, e.g. "base", "pmax20", "zr80".
std::string cell_tag(SweepAxis axis, const ExperimentSpec& spec, int index);

struct EvalResult {
  std::vector<EpisodeStats> episodes;
  // Slot-by-slot UAV positions of the first evaluated episode, starting at
  // the pre-flight position.
  std::vector<Position> trajectory;
};

// Greedy rollouts (no exploration noise) of a trained policy.
EvalResult evaluate_policy(RlEnv& env, const TrainedPolicy& policy, int episodes,
                           std::uint64_t seed);

// Trains and evaluates every (cell x seed), writing three CSVs per pair:
// metrics_, eval_ and trajectory_ (plus a checkpoint JSON when
// save_checkpoints is set). Returns the written paths.
std::vector<std::string> run_experiment(const ExperimentSpec& spec);

struct SummaryRow {
  std::string config;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;
  int n = 0;
};

// Final-10%-of-training means per config cell, aggregated across seeds.
std::vector<SummaryRow> summarize_rows(const std::string& dir);
// Writes the rows as <dir>/summary.csv (tidy long format) and returns the path.
std::string summarize(const std::string& dir);

}  // namespace lisac
