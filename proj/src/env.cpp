#include "lisac/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lisac/sensing.hpp"
#include "lisac/uav.hpp"

namespace lisac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double clip(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

}  // namespace

Vec encode_state(const EnvState& s, const Scenario& sc) {
  const double span = std::max(sc.x_max - sc.x_min, sc.y_max - sc.y_min);
  Vec out(sc.state_dim());
  int k = 0;
  out(k++) = static_cast<double>(s.t) / sc.t_slots;
  auto push = [&](const Position& p) {
    out(k++) = (p.x - sc.x_min) / span;
    out(k++) = (p.y - sc.y_min) / span;
    out(k++) = p.z / span;
  };
  push(s.uav);
  for (const Position& u : s.users) push(u);
  push(s.target);
  return out;
}

Action decode_action(const RawAction& raw, const Scenario& sc) {
  const int m = sc.m_antennas;
  const int n = sc.num_users();
  const int l = sc.l_elements;
  if (raw.v.size() != sc.action_dim())
    throw std::invalid_argument("decode_action: raw action has wrong length");

  Vec r = raw.v;
  for (int i = 0; i < r.size(); ++i) r(i) = clip(r(i), -1.0, 1.0);

  Action act;
  act.bf.w = CMat(m, n);
  int k = 0;
  for (int col = 0; col < n; ++col)
    for (int row = 0; row < m; ++row) {
      act.bf.w(row, col) = Complex(r(k), r(k + 1));
      k += 2;
    }
  const double power = act.bf.total_power();
  if (power > sc.p_max) act.bf.w *= std::sqrt(sc.p_max / power);

  act.theta = Vec(l);
  for (int i = 0; i < l; ++i) {
    double th = (r(k++) + 1.0) * std::numbers::pi;
    if (th >= kTwoPi) th = kTwoPi - 1e-12;
    act.theta(i) = th;
  }

  act.speed = sc.v_min + 0.5 * (r(k++) + 1.0) * (sc.v_max - sc.v_min);
  double yaw = r(k++) * std::numbers::pi;
  if (yaw >= std::numbers::pi) yaw = std::numbers::pi - 1e-12;
  act.yaw = yaw;
  return act;
}

double reward(double r_u_slot, double r_st_slot, double e_u_slot, bool violated,
              const Scenario& sc) {
  return sc.xi1 * r_u_slot * r_st_slot / e_u_slot - (violated ? sc.p_o : 0.0);
}

Env::Env(Scenario sc, std::uint64_t seed) : sc_(std::move(sc)), rng_(seed) {
  sc_.validate();
  reset(seed);
}

const EnvState& Env::reset(std::uint64_t seed) {
  rng_ = Rng(Rng::derive(seed, 0x454e56));  // "ENV" stream
  state_.t = 1;
  state_.uav = sc_.uav_start;
  state_.users = sc_.users;
  state_.target = sc_.target;
  finished_ = false;
  return state_;
}

Env::StepResult Env::step(const RawAction& raw) {
  if (finished_) throw std::logic_error("env: stepping past the final slot");

  const Action act = decode_action(raw, sc_);

  Position next = step_position(state_.uav, act.speed, act.yaw, sc_.t_d);
  const bool violated = next.x < sc_.x_min || next.x > sc_.x_max || next.y < sc_.y_min ||
                        next.y > sc_.y_max;
  next.x = clip(next.x, sc_.x_min, sc_.x_max);
  next.y = clip(next.y, sc_.y_min, sc_.y_max);

  const ChannelRealization ch = realize_channels(sc_.channel, sc_.bs, next, state_.users,
                                                 sc_.l_elements, sc_.m_antennas, act.theta, rng_);

  std::vector<double> rates(state_.users.size());
  for (int u = 0; u < static_cast<int>(state_.users.size()); ++u)
    rates[u] = user_rate(sinr(ch.composite[u], act.bf, u, sc_.sigma2));
  const double r_u = slot_sum_rate(rates);

  const double sin_st = sensing_sin_theta(next, state_.target);
  const CVec a = steering_vector(sc_.l_elements, sin_st, sc_.channel.d_r_over_lambda);
  const double alpha_r = alpha_r_coefficient(sc_.channel.l0, distance(next, state_.target),
                                             sc_.sensing.alpha_r_model);
  const CMat phi = phase_matrix(act.theta);
  const double gain = target_gain(a, phi, ch.h_br, act.bf, alpha_r);
  const double r_st = sensing_rate(gain, sc_.sigma2);

  const double e_u = propulsion_energy(act.speed, sc_.energy);

  StepResult res;
  res.metrics = SlotMetrics{r_u, r_st, e_u, violated, next};
  res.reward = reward(r_u, r_st, e_u, violated, sc_);
  res.done = state_.t >= sc_.t_slots;
  finished_ = res.done;

  state_.uav = next;
  if (!res.done) state_.t += 1;  // terminal observation keeps t = T
  res.state = state_;
  return res;
}

}  // namespace lisac
