#include "lisac/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>

#include "lisac/tape.hpp"

namespace lisac {

namespace {

using nlohmann::json;

// Candidate actions per greedy act() call of the diffusion policy.
constexpr int kGreedyCandidates = 8;

void ensure_finite(double x, const char* what, int episode, int step) {
  if (std::isfinite(x)) return;
  char msg[160];
  std::snprintf(msg, sizeof msg, "train: %s is not finite at episode %d step %d", what,
                episode, step);
  throw std::runtime_error(msg);
}

}  // namespace

const char* agent_name(AgentKind k) {
  switch (k) {
    case AgentKind::Gdmddpg: return "gdmddpg";
    case AgentKind::Ddpg: return "ddpg";
    case AgentKind::Td3: return "td3";
    case AgentKind::Random: return "random";
  }
  throw std::logic_error("agent_name: bad enum");
}

AgentKind agent_from_name(const std::string& s) {
  if (s == "gdmddpg") return AgentKind::Gdmddpg;
  if (s == "ddpg") return AgentKind::Ddpg;
  if (s == "td3") return AgentKind::Td3;
  if (s == "random") return AgentKind::Random;
  throw std::invalid_argument("unknown agent kind: " + s);
}

const char* ablation_name(Ablation a) {
  switch (a) {
    case Ablation::Full: return "full";
    case Ablation::CommOnly: return "comm_only";
    case Ablation::SenseOnly: return "sense_only";
  }
  throw std::logic_error("ablation_name: bad enum");
}

Ablation ablation_from_name(const std::string& s) {
  if (s == "full") return Ablation::Full;
  if (s == "comm_only") return Ablation::CommOnly;
  if (s == "sense_only") return Ablation::SenseOnly;
  throw std::invalid_argument("unknown ablation: " + s);
}

void AgentConfig::validate() const {
  if (episodes < 1) throw std::invalid_argument("agent: episodes must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("agent: gamma out of range");
  if (lr_actor < 0.0 || lr_critic < 0.0)
    throw std::invalid_argument("agent: learning rates must be nonnegative");
  if (batch < 1) throw std::invalid_argument("agent: batch must be positive");
  if (batch > replay.b_max) throw std::invalid_argument("agent: batch exceeds buffer capacity");
  if (!(soft_eps >= 0.0 && soft_eps <= 1.0))
    throw std::invalid_argument("agent: soft_eps out of range");
  if (hidden < 1 || hidden_layers < 1) throw std::invalid_argument("agent: bad network shape");
  if (g_steps < 1) throw std::invalid_argument("agent: g_steps must be positive");
  if (!(c2 >= c1 && c1 >= 0.0)) throw std::invalid_argument("agent: bad beta range");
  if (sigma_start < 0.0 || sigma_end < 0.0 || noise_clip < 0.0)
    throw std::invalid_argument("agent: noise levels must be nonnegative");
  if (!(sigma_decay_frac > 0.0 && sigma_decay_frac <= 1.0))
    throw std::invalid_argument("agent: sigma_decay_frac out of range");
  if (warmup_steps < 0) throw std::invalid_argument("agent: warmup_steps must be nonnegative");
  if (td3_delay < 1) throw std::invalid_argument("agent: td3_delay must be positive");
  if (td3_sigma < 0.0 || td3_clip < 0.0)
    throw std::invalid_argument("agent: td3 noise must be nonnegative");
  if (grad_clip <= 0.0) throw std::invalid_argument("agent: grad_clip must be positive");
  if (xi1_ablation <= 0.0) throw std::invalid_argument("agent: xi1_ablation must be positive");
  replay.validate();
}

json AgentConfig::to_json() const {
  json j;
  j["kind"] = agent_name(kind);
  j["ablation"] = ablation_name(ablation);
  j["episodes"] = episodes;
  j["gamma"] = gamma;
  j["lr_actor"] = lr_actor;
  j["lr_critic"] = lr_critic;
  j["batch"] = batch;
  j["soft_eps"] = soft_eps;
  j["hidden"] = hidden;
  j["hidden_layers"] = hidden_layers;
  j["grad_clip"] = grad_clip;
  j["g_steps"] = g_steps;
  j["c1"] = c1;
  j["c2"] = c2;
  j["reverse_noise"] = reverse_noise == ReverseNoiseScale::Sqrt ? "sqrt" : "linear";
  j["sigma_start"] = sigma_start;
  j["sigma_end"] = sigma_end;
  j["sigma_decay_frac"] = sigma_decay_frac;
  j["noise_clip"] = noise_clip;
  j["warmup_steps"] = warmup_steps;
  j["use_rper"] = use_rper;
  j["replay"] = {{"b_max", replay.b_max},
                 {"f_min", replay.f_min},
                 {"rho", replay.rho},
                 {"beta1", replay.beta1},
                 {"eps_p", replay.eps_p}};
  j["beta2_start"] = beta2_start;
  j["beta2_end"] = beta2_end;
  j["td3_delay"] = td3_delay;
  j["td3_sigma"] = td3_sigma;
  j["td3_clip"] = td3_clip;
  j["xi1_ablation"] = xi1_ablation;
  return j;
}

AgentConfig AgentConfig::from_json(const json& j) {
  AgentConfig base;
  if (j.contains("kind")) base = for_kind(agent_from_name(j.at("kind").get<std::string>()));
  AgentConfig c = base;
  if (j.contains("ablation")) c.ablation = ablation_from_name(j.at("ablation").get<std::string>());
  c.episodes = j.value("episodes", c.episodes);
  c.gamma = j.value("gamma", c.gamma);
  c.lr_actor = j.value("lr_actor", c.lr_actor);
  c.lr_critic = j.value("lr_critic", c.lr_critic);
  c.batch = j.value("batch", c.batch);
  c.soft_eps = j.value("soft_eps", c.soft_eps);
  c.hidden = j.value("hidden", c.hidden);
  c.hidden_layers = j.value("hidden_layers", c.hidden_layers);
  c.grad_clip = j.value("grad_clip", c.grad_clip);
  c.g_steps = j.value("g_steps", c.g_steps);
  c.c1 = j.value("c1", c.c1);
  c.c2 = j.value("c2", c.c2);
  if (j.contains("reverse_noise")) {
    const std::string ns = j.at("reverse_noise").get<std::string>();
    if (ns == "sqrt") {
      c.reverse_noise = ReverseNoiseScale::Sqrt;
    } else if (ns == "linear") {
      c.reverse_noise = ReverseNoiseScale::Linear;
    } else {
      throw std::invalid_argument("unknown reverse_noise: " + ns);
    }
  }
  c.sigma_start = j.value("sigma_start", c.sigma_start);
  c.sigma_end = j.value("sigma_end", c.sigma_end);
  c.sigma_decay_frac = j.value("sigma_decay_frac", c.sigma_decay_frac);
  c.noise_clip = j.value("noise_clip", c.noise_clip);
  c.warmup_steps = j.value("warmup_steps", c.warmup_steps);
  c.use_rper = j.value("use_rper", c.use_rper);
  if (j.contains("replay")) {
    const json& r = j.at("replay");
    c.replay.b_max = r.value("b_max", c.replay.b_max);
    c.replay.f_min = r.value("f_min", c.replay.f_min);
    c.replay.rho = r.value("rho", c.replay.rho);
    c.replay.beta1 = r.value("beta1", c.replay.beta1);
    c.replay.eps_p = r.value("eps_p", c.replay.eps_p);
  }
  c.beta2_start = j.value("beta2_start", c.beta2_start);
  c.beta2_end = j.value("beta2_end", c.beta2_end);
  c.td3_delay = j.value("td3_delay", c.td3_delay);
  c.td3_sigma = j.value("td3_sigma", c.td3_sigma);
  c.td3_clip = j.value("td3_clip", c.td3_clip);
  c.xi1_ablation = j.value("xi1_ablation", c.xi1_ablation);
  c.validate();
  return c;
}

AgentConfig AgentConfig::for_kind(AgentKind k) {
  AgentConfig c;
  c.kind = k;
  c.use_rper = k == AgentKind::Gdmddpg;
  return c;
}

double ablation_reward(Ablation kind, double r_u, double r_st, double /*e_u*/, bool violated,
                       double full_reward, double xi1_prime, double p_o) {
  const double penalty = violated ? p_o : 0.0;
  switch (kind) {
    case Ablation::Full: return full_reward;
    case Ablation::CommOnly: return xi1_prime * r_u - penalty;
    case Ablation::SenseOnly: return xi1_prime * r_st - penalty;
  }
  throw std::logic_error("ablation_reward: bad enum");
}

double sigma_schedule(const AgentConfig& cfg, int episode) {
  const int span = std::max(1, static_cast<int>(cfg.episodes * cfg.sigma_decay_frac));
  if (episode >= span) return cfg.sigma_end;
  return cfg.sigma_start + (cfg.sigma_end - cfg.sigma_start) * episode / span;
}

double beta2_schedule(const AgentConfig& cfg, int episode) {
  if (cfg.episodes <= 1) return cfg.beta2_end;
  const double progress = static_cast<double>(episode) / (cfg.episodes - 1);
  return cfg.beta2_start + (cfg.beta2_end - cfg.beta2_start) * progress;
}

SimEnv::SimEnv(Scenario sc) : sc_(std::move(sc)), env_(sc_, 0) { sc_.validate(); }

Vec SimEnv::reset(std::uint64_t seed) { return encode_state(env_.reset(seed), sc_); }

RlEnv::Step SimEnv::step(const Vec& raw_action) {
  Env::StepResult r = env_.step(RawAction{raw_action});
  return Step{encode_state(r.state, sc_), r.reward, r.metrics, r.done};
}

Vec td_targets(const Vec& rewards, const Vec& q_next, const std::vector<bool>& done,
               double gamma) {
  if (rewards.size() != q_next.size() ||
      done.size() != static_cast<std::size_t>(rewards.size())) {
    throw std::invalid_argument("td_targets: size mismatch");
  }
  Vec y(rewards.size());
  for (int i = 0; i < rewards.size(); ++i) {
    y(i) = rewards(i) + (done[i] ? 0.0 : gamma * q_next(i));
  }
  return y;
}

double critic_loss_backward(const MlpSpec& spec, ParamVector& params, const Mat& states,
                            const Mat& actions, const Vec& targets, const Vec& weights,
                            Vec& td_errors) {
  const int b = static_cast<int>(states.rows());
  Mat sa(b, states.cols() + actions.cols());
  sa << states, actions;
  Tape t;
  const Tape::Var q = t.mlp(spec, params, t.constant(sa));
  const Tape::Var diff = t.sub(q, t.constant(targets));
  td_errors = t.value(diff).col(0);
  const Tape::Var loss = t.mean_all(t.hadamard(t.constant(weights), t.square(diff)));
  params.zero_grad();
  t.backward(loss);
  return t.value(loss)(0, 0);
}

double critic_loss_value(const MlpSpec& spec, const Vec& params, const Mat& states,
                         const Mat& actions, const Vec& targets, const Vec& weights) {
  Mat sa(states.rows(), states.cols() + actions.cols());
  sa << states, actions;
  const Vec q = mlp_forward(spec, params, sa).col(0);
  return (weights.array() * (q - targets).array().square()).mean();
}

double actor_loss_backward_mlp(const MlpSpec& actor_spec, ParamVector& actor,
                               const MlpSpec& critic_spec, ParamVector& critic,
                               const Mat& states) {
  Tape t;
  const Tape::Var s = t.constant(states);
  const Tape::Var a = t.mlp(actor_spec, actor, s);
  const Tape::Var q = t.mlp(critic_spec, critic, t.concat_cols({s, a}), /*frozen=*/true);
  const Tape::Var loss = t.scale(t.mean_all(q), -1.0);
  actor.zero_grad();
  t.backward(loss);
  return t.value(loss)(0, 0);
}

double actor_loss_backward_diffusion(const DiffusionSchedule& sch, const Denoiser& dn,
                                     ParamVector& actor, const MlpSpec& critic_spec,
                                     ParamVector& critic, const Mat& states,
                                     const ChainNoises& noises, ReverseNoiseScale ns) {
  Tape t;
  const Tape::Var a = chain_on_tape(t, sch, dn, actor, states, noises, ns);
  const Tape::Var q =
      t.mlp(critic_spec, critic, t.concat_cols({t.constant(states), a}), /*frozen=*/true);
  const Tape::Var loss = t.scale(t.mean_all(q), -1.0);
  actor.zero_grad();
  t.backward(loss);
  return t.value(loss)(0, 0);
}

Learner::Learner(const AgentConfig& cfg_, int s_dim_, int a_dim_, Rng& rng)
    : cfg(cfg_), s_dim(s_dim_), a_dim(a_dim_) {
  critic_spec = MlpSpec::dense(s_dim + a_dim, cfg.hidden, cfg.hidden_layers, 1, Act::Identity);
  if (diffusion()) {
    sch = vp_schedule(cfg.g_steps, cfg.c1, cfg.c2);
    dn = Denoiser::make(a_dim, s_dim, cfg.hidden, cfg.hidden_layers);
    init_mlp(dn.spec, actor, rng, /*zero_final=*/true);
  } else {
    actor_spec = MlpSpec::dense(s_dim, cfg.hidden, cfg.hidden_layers, a_dim, Act::Tanh);
    init_mlp(actor_spec, actor, rng, /*zero_final=*/true);
  }
  init_mlp(critic_spec, critic, rng);
  if (twin()) init_mlp(critic_spec, critic2, rng);
  actor_target = actor;
  critic_target = critic;
  critic2_target = critic2;
  actor_opt.lr = cfg.lr_actor;
  critic_opt.lr = cfg.lr_critic;
}

Vec Learner::explore_action(const Vec& state, double sigma, Rng& rng) {
  Vec a;
  if (diffusion()) {
    a = sample_action(state, sch, dn, actor.value, rng, cfg.reverse_noise);
  } else {
    a = mlp_forward(actor_spec, actor.value, state.transpose()).row(0).transpose();
  }
  return perturb(a, sigma, cfg.noise_clip, rng);
}

Vec Learner::greedy_action(const Vec& state, Rng& rng) {
  if (diffusion()) return sample_action(state, sch, dn, actor.value, rng, cfg.reverse_noise);
  return mlp_forward(actor_spec, actor.value, state.transpose()).row(0).transpose();
}

Mat Learner::target_actions(const Mat& next_states, Rng& rng) {
  const int b = static_cast<int>(next_states.rows());
  Mat a2;
  if (diffusion()) {
    const ChainNoises noises = ChainNoises::draw(b, a_dim, cfg.g_steps, rng);
    a2 = chain_eval(sch, dn, actor_target.value, next_states, noises, cfg.reverse_noise);
  } else {
    a2 = mlp_forward(actor_spec, actor_target.value, next_states);
  }
  if (twin()) {
    for (int i = 0; i < a2.rows(); ++i) {
      for (int j = 0; j < a2.cols(); ++j) {
        const double n = std::clamp(cfg.td3_sigma * rng.normal(), -cfg.td3_clip, cfg.td3_clip);
        a2(i, j) = std::clamp(a2(i, j) + n, -1.0, 1.0);
      }
    }
  }
  return a2;
}

Vec Learner::update(const Mat& s, const Mat& a, const Vec& r, const Mat& s2,
                    const std::vector<bool>& done, const Vec& weights, Rng& rng, int episode,
                    int step) {
  const int b = static_cast<int>(s.rows());
  const Mat a2 = target_actions(s2, rng);
  Mat sa2(b, s_dim + a_dim);
  sa2 << s2, a2;
  Vec q2 = mlp_forward(critic_spec, critic_target.value, sa2).col(0);
  if (twin()) {
    const Vec q2b = mlp_forward(critic_spec, critic2_target.value, sa2).col(0);
    q2 = q2.cwiseMin(q2b);
  }
  const Vec y = td_targets(r, q2, done, cfg.gamma);

  Vec delta;
  const double closs = critic_loss_backward(critic_spec, critic, s, a, y, weights, delta);
  ensure_finite(closs, "critic loss", episode, step);
  clip_grad_norm(critic.grad, cfg.grad_clip);
  adam_update(critic, critic_adam, critic_opt);
  if (twin()) {
    Vec delta2;
    const double closs2 = critic_loss_backward(critic_spec, critic2, s, a, y, weights, delta2);
    ensure_finite(closs2, "twin critic loss", episode, step);
    clip_grad_norm(critic2.grad, cfg.grad_clip);
    adam_update(critic2, critic2_adam, critic_opt);
  }
  critic_updates += 1;

  if (!twin() || critic_updates % cfg.td3_delay == 0) {
    double aloss;
    if (diffusion()) {
      const ChainNoises noises = ChainNoises::draw(b, a_dim, cfg.g_steps, rng);
      aloss = actor_loss_backward_diffusion(sch, dn, actor, critic_spec, critic, s, noises,
                                            cfg.reverse_noise);
    } else {
      aloss = actor_loss_backward_mlp(actor_spec, actor, critic_spec, critic, s);
    }
    ensure_finite(aloss, "actor loss", episode, step);
    clip_grad_norm(actor.grad, cfg.grad_clip);
    adam_update(actor, actor_adam, actor_opt);
    soft_update(actor_target, actor, cfg.soft_eps);
    soft_update(critic_target, critic, cfg.soft_eps);
    if (twin()) soft_update(critic2_target, critic2, cfg.soft_eps);
  }
  return delta;
}

json Learner::checkpoint_networks() const {
  json nets;
  if (diffusion()) {
    nets["actor"] = net_to_json(dn.spec, actor.value);
    nets["target_actor"] = net_to_json(dn.spec, actor_target.value);
  } else {
    nets["actor"] = net_to_json(actor_spec, actor.value);
    nets["target_actor"] = net_to_json(actor_spec, actor_target.value);
  }
  nets["critic"] = net_to_json(critic_spec, critic.value);
  nets["target_critic"] = net_to_json(critic_spec, critic_target.value);
  if (twin()) {
    nets["critic2"] = net_to_json(critic_spec, critic2.value);
    nets["target_critic2"] = net_to_json(critic_spec, critic2_target.value);
  }
  return nets;
}

TrainReport train(RlEnv& env, const AgentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const int s_dim = env.state_dim();
  const int a_dim = env.action_dim();
  const int horizon = env.horizon();
  const bool learns = cfg.kind != AgentKind::Random;

  Rng agent_rng(Rng::derive(seed, 0x41474e54));
  const std::uint64_t episode_stream = Rng::derive(seed, 0x45505353);

  std::unique_ptr<Learner> learner;
  if (learns) learner = std::make_unique<Learner>(cfg, s_dim, a_dim, agent_rng);

  ReplayBuffer buffer(cfg.replay);
  TrainReport report;
  report.episodes.reserve(cfg.episodes);

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const double sigma = sigma_schedule(cfg, ep);
    const double beta2 = beta2_schedule(cfg, ep);
    Vec s = env.reset(Rng::derive(episode_stream, static_cast<std::uint64_t>(ep)));

    EpisodeStats st;
    double reward_sum = 0.0;
    int steps = 0, violations = 0;

    for (int t_i = 1;; ++t_i) {
      Vec a(a_dim);
      if (learns && report.transitions >= cfg.warmup_steps) {
        a = learner->explore_action(s, sigma, agent_rng);
      } else {
        for (int i = 0; i < a_dim; ++i) a(i) = agent_rng.uniform(-1.0, 1.0);
      }

      const RlEnv::Step out = env.step(a);
      const double r_used =
          ablation_reward(cfg.ablation, out.metrics.r_u, out.metrics.r_st, out.metrics.e_u,
                          out.metrics.violated, out.reward, cfg.xi1_ablation,
                          env.boundary_penalty());
      ensure_finite(r_used, "reward", ep, t_i);

      buffer.push(Transition{s, a, r_used, out.next_state, out.done});
      report.transitions += 1;

      if (learns && buffer.size() >= cfg.batch && report.transitions >= cfg.warmup_steps) {
        ReplayBuffer::Batch batch;
        if (cfg.use_rper) {
          batch = buffer.sample(cfg.batch, buffer.ere_window(t_i, horizon), beta2, agent_rng);
        } else {
          batch = buffer.sample_uniform(cfg.batch, buffer.size(), agent_rng);
        }
        Mat bs(cfg.batch, s_dim), ba(cfg.batch, a_dim), bs2(cfg.batch, s_dim);
        Vec br(cfg.batch);
        std::vector<bool> bdone(cfg.batch);
        for (int k = 0; k < cfg.batch; ++k) {
          const Transition& tr = buffer.at(batch.slots[k]);
          bs.row(k) = tr.s.transpose();
          ba.row(k) = tr.a.transpose();
          bs2.row(k) = tr.s2.transpose();
          br(k) = tr.r;
          bdone[k] = tr.done;
        }
        const Vec delta =
            learner->update(bs, ba, br, bs2, bdone, batch.weights, agent_rng, ep, t_i);
        if (cfg.use_rper) {
          buffer.update_priorities(batch.slots,
                                   std::vector<double>(delta.data(), delta.data() + delta.size()));
        }
        report.update_rounds += 1;
      }

      reward_sum += r_used;
      st.f1 += out.metrics.r_u;
      st.f2 += out.metrics.r_st;
      st.f3 += out.metrics.e_u;
      violations += out.metrics.violated ? 1 : 0;
      steps += 1;
      s = out.next_state;
      if (out.done) break;
    }

    st.mean_reward = reward_sum / steps;
    st.violation_rate = static_cast<double>(violations) / steps;
    report.episodes.push_back(st);
  }

  json ckpt;
  ckpt["format"] = "lisac-checkpoint";
  ckpt["version"] = 1;
  ckpt["seed"] = seed;
  ckpt["state_dim"] = s_dim;
  ckpt["action_dim"] = a_dim;
  ckpt["config"] = cfg.to_json();
  ckpt["networks"] = learns ? learner->checkpoint_networks() : json::object();
  report.checkpoint = std::move(ckpt);
  return report;
}

Vec TrainedPolicy::act(const Vec& state, Rng& rng) const {
  switch (kind) {
    case AgentKind::Gdmddpg: {
      Vec best = Vec::Zero(action_dim);
      double best_q = -std::numeric_limits<double>::infinity();
      Mat sa(1, dn.state_dim + action_dim);
      for (const ChainNoises& noise : candidates) {
        const Mat a = chain_eval(sch, dn, actor_value, state.transpose(), noise, ns);
        sa << state.transpose(), a;
        const double q = mlp_forward(critic_spec, critic_value, sa)(0, 0);
        if (q > best_q) {
          best_q = q;
          best = a.row(0).transpose();
        }
      }
      return best;
    }
    case AgentKind::Ddpg:
    case AgentKind::Td3:
      return mlp_forward(actor_spec, actor_value, state.transpose()).row(0).transpose();
    case AgentKind::Random: {
      Vec a(action_dim);
      for (int i = 0; i < action_dim; ++i) a(i) = rng.uniform(-1.0, 1.0);
      return a;
    }
  }
  throw std::logic_error("TrainedPolicy::act: bad enum");
}

TrainedPolicy TrainedPolicy::from_checkpoint(const json& ckpt) {
  if (ckpt.value("format", "") != std::string("lisac-checkpoint")) {
    throw std::invalid_argument("not a checkpoint file");
  }
  const AgentConfig cfg = AgentConfig::from_json(ckpt.at("config"));
  TrainedPolicy p;
  p.kind = cfg.kind;
  p.action_dim = ckpt.at("action_dim").get<int>();
  p.ns = cfg.reverse_noise;
  if (p.kind == AgentKind::Random) return p;

  const json& actor = ckpt.at("networks").at("actor");
  if (p.kind == AgentKind::Gdmddpg) {
    p.sch = vp_schedule(cfg.g_steps, cfg.c1, cfg.c2);
    MlpSpec spec;
    net_from_json(actor, spec, p.actor_value);
    p.dn.spec = spec;
    p.dn.x_dim = p.action_dim;
    p.dn.state_dim = ckpt.at("state_dim").get<int>();
    p.dn.emb_dim = spec.input_dim() - p.dn.x_dim - p.dn.state_dim;
    p.dn.validate();
    net_from_json(ckpt.at("networks").at("critic"), p.critic_spec, p.critic_value);
    Rng noise_rng(0x475245454459ULL);
    p.candidates.reserve(kGreedyCandidates);
    for (int k = 0; k < kGreedyCandidates; ++k) {
      p.candidates.push_back(ChainNoises::draw(1, p.action_dim, cfg.g_steps, noise_rng));
    }
  } else {
    net_from_json(actor, p.actor_spec, p.actor_value);
  }
  return p;
}

}  // namespace lisac
