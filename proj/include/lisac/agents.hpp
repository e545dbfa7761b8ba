#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lisac/diffusion.hpp"
#include "lisac/env.hpp"
#include "lisac/linalg.hpp"
#include "lisac/nn.hpp"
#include "lisac/replay.hpp"
#include "lisac/rng.hpp"
#include "lisac/scenario.hpp"

namespace lisac {

enum class AgentKind { Gdmddpg, Ddpg, Td3, Random };
enum class Ablation { Full, CommOnly, SenseOnly };

const char* agent_name(AgentKind k);
AgentKind agent_from_name(const std::string& s);
const char* ablation_name(Ablation a);
Ablation ablation_from_name(const std::string& s);

struct AgentConfig {
  AgentKind kind = AgentKind::Gdmddpg;
  Ablation ablation = Ablation::Full;

  int episodes = 300;
  double gamma = 0.99;
  double lr_actor = 5e-4;
  double lr_critic = 5e-4;
  int batch = 128;
  double soft_eps = 0.005;
  int hidden = 256;
  int hidden_layers = 2;
  double grad_clip = 1.0;

  // diffusion actor
  int g_steps = 3;
  double c1 = 0.1;
  double c2 = 10.0;
  ReverseNoiseScale reverse_noise = ReverseNoiseScale::Sqrt;

  // exploration noise: sigma decays linearly over the first sigma_decay_frac
  // of episodes, then holds
  double sigma_start = 0.1;
  double sigma_end = 0.02;
  double sigma_decay_frac = 0.5;
  double noise_clip = 0.5;
  // uniform-random actions for the first warmup_steps env steps; updates
  // start once the buffer holds max(batch, warmup_steps) transitions
  int warmup_steps = 1000;

  // replay; beta2 anneals linearly across episodes
  bool use_rper = true;
  RperConfig replay;
  double beta2_start = 0.4;
  double beta2_end = 1.0;

  // td3
  int td3_delay = 2;
  double td3_sigma = 0.2;
  double td3_clip = 0.5;

  // scale for the single-term ablation rewards
  double xi1_ablation = 10.0;

  void validate() const;
  nlohmann::json to_json() const;
  static AgentConfig from_json(const nlohmann::json& j);
  // kind-appropriate defaults: RPER stays on only for the diffusion agent
  static AgentConfig for_kind(AgentKind kind);
};

// full -> the environment reward as computed; comm_only / sense_only keep the
// boundary penalty but score a single objective scaled by xi1_prime.
double ablation_reward(Ablation kind, double r_u, double r_st, double e_u, bool violated,
                       double full_reward, double xi1_prime, double p_o);

// Exploration noise schedule value for the given episode index.
double sigma_schedule(const AgentConfig& cfg, int episode);
// Importance exponent annealed across episodes.
double beta2_schedule(const AgentConfig& cfg, int episode);

// Minimal environment surface the trainer needs; SimEnv adapts the simulator
// and tests substitute stubs.
class RlEnv {
 public:
  struct Step {
    Vec next_state;
    double reward = 0.0;
    SlotMetrics metrics;
    bool done = false;
  };

  virtual ~RlEnv() = default;
  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual int horizon() const = 0;
  virtual double boundary_penalty() const { return 50.0; }
  virtual Vec reset(std::uint64_t seed) = 0;
  virtual Step step(const Vec& raw_action) = 0;
};

class SimEnv final : public RlEnv {
 public:
  explicit SimEnv(Scenario sc);

  int state_dim() const override { return sc_.state_dim(); }
  int action_dim() const override { return sc_.action_dim(); }
  int horizon() const override { return sc_.t_slots; }
  double boundary_penalty() const override { return sc_.p_o; }
  Vec reset(std::uint64_t seed) override;
  Step step(const Vec& raw_action) override;

  const Scenario& scenario() const { return sc_; }

 private:
  Scenario sc_;
  Env env_;
};

struct EpisodeStats {
  double mean_reward = 0.0;   // training reward averaged over the episode
  double f1 = 0.0;            // summed communication rate
  double f2 = 0.0;            // summed sensing rate
  double f3 = 0.0;            // summed propulsion energy, J
  double violation_rate = 0.0;
};

struct TrainReport {
  std::vector<EpisodeStats> episodes;
  nlohmann::json checkpoint;
  long long transitions = 0;
  long long update_rounds = 0;
};

// y = r + gamma * (1 - done) * q_next, elementwise over the batch.
Vec td_targets(const Vec& rewards, const Vec& q_next, const std::vector<bool>& done,
               double gamma);

// All learnable state for one agent: networks, their targets, optimizer
// moments, and the update rule. train() drives one of these per run.
struct Learner {
  const AgentConfig& cfg;
  int s_dim = 0;
  int a_dim = 0;

  DiffusionSchedule sch;
  Denoiser dn;
  MlpSpec actor_spec;
  MlpSpec critic_spec;

  ParamVector actor, actor_target;
  ParamVector critic, critic_target;
  ParamVector critic2, critic2_target;
  AdamState actor_adam, critic_adam, critic2_adam;
  AdamConfig actor_opt, critic_opt;

  long long critic_updates = 0;

  Learner(const AgentConfig& cfg, int s_dim, int a_dim, Rng& rng);

  bool diffusion() const { return cfg.kind == AgentKind::Gdmddpg; }
  bool twin() const { return cfg.kind == AgentKind::Td3; }

  Vec explore_action(const Vec& state, double sigma, Rng& rng);
  Vec greedy_action(const Vec& state, Rng& rng);
  // Target-policy actions for the bootstrap; TD3 adds clipped smoothing noise.
  Mat target_actions(const Mat& next_states, Rng& rng);
  // One update round: critic regression, then (on the delay schedule) the
  // actor step and soft target updates. Returns per-sample TD errors from the
  // first critic.
  Vec update(const Mat& s, const Mat& a, const Vec& r, const Mat& s2,
             const std::vector<bool>& done, const Vec& weights, Rng& rng, int episode,
             int step);
  nlohmann::json checkpoint_networks() const;
};

// Weighted critic regression toward fixed targets. Returns the loss and fills
// td_errors with the per-sample Q - y. Gradients accumulate into params.grad;
// the caller applies the optimizer.
double critic_loss_backward(const MlpSpec& spec, ParamVector& params, const Mat& states,
                            const Mat& actions, const Vec& targets, const Vec& weights,
                            Vec& td_errors);

// Loss only, no tape; for the oracle cross-checks.
double critic_loss_value(const MlpSpec& spec, const Vec& params, const Mat& states,
                         const Mat& actions, const Vec& targets, const Vec& weights);

// -(1/B) sum Q(s, mu(s)) with the critic frozen; gradients land in actor.grad.
// The MLP-actor form takes the policy network directly; the diffusion form
// differentiates through the whole reverse chain with pinned noises.
double actor_loss_backward_mlp(const MlpSpec& actor_spec, ParamVector& actor,
                               const MlpSpec& critic_spec, ParamVector& critic,
                               const Mat& states);
double actor_loss_backward_diffusion(const DiffusionSchedule& sch, const Denoiser& dn,
                                     ParamVector& actor, const MlpSpec& critic_spec,
                                     ParamVector& critic, const Mat& states,
                                     const ChainNoises& noises, ReverseNoiseScale ns);

// Full training loop; reproducible from (cfg, seed).
TrainReport train(RlEnv& env, const AgentConfig& cfg, std::uint64_t seed);

// Greedy policy reconstructed from a checkpoint: exploration noise off. MLP
// actors are deterministic as-is. The diffusion actor samples a fixed set of
// chain noises once at load time and act() returns the candidate action the
// trained critic scores highest, so repeated calls give identical actions.
struct TrainedPolicy {
  AgentKind kind = AgentKind::Random;
  int action_dim = 0;
  ReverseNoiseScale ns = ReverseNoiseScale::Sqrt;
  DiffusionSchedule sch;
  Denoiser dn;
  MlpSpec actor_spec;
  Vec actor_value;
  MlpSpec critic_spec;
  Vec critic_value;
  std::vector<ChainNoises> candidates;

  Vec act(const Vec& state, Rng& rng) const;
  static TrainedPolicy from_checkpoint(const nlohmann::json& ckpt);
};

}  // namespace lisac
