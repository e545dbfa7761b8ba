#pragma once

#include <cstdint>
#include <vector>

#include "lisac/comms.hpp"
#include "lisac/linalg.hpp"
#include "lisac/rng.hpp"
#include "lisac/scenario.hpp"

namespace lisac {

// Observation at the start of slot t: slot index plus every node position.
// Users and the target are static; their positions ride along because the
// agent's state is defined over them.
struct EnvState {
  int t = 1;
  Position uav;
  std::vector<Position> users;
  Position target;
};

// Flat control vector with every component in [-1, 1]; clipped on ingestion.
struct RawAction {
  Vec v;
};

// Decoded control for one slot.
struct Action {
  Beamformer bf;   // M x N, power already projected onto the budget
  Vec theta;       // L IRS phases in [0, 2pi)
  double speed = 0.0;
  double yaw = 0.0;
};

struct SlotMetrics {
  double r_u = 0.0;     // per-slot communication sum rate
  double r_st = 0.0;    // per-slot sensing rate
  double e_u = 0.0;     // per-slot propulsion energy, J
  bool violated = false;
  Position position;    // UAV position after the move (clamped)
};

// Normalized network input: [t/T, uav, users..., target], coordinates scaled
// by the larger area span. Components stay within [0, 1.05].
Vec encode_state(const EnvState& s, const Scenario& sc);

// Raw layout: 2MN beamformer reals (user-major Re/Im pairs), L phases mapped
// by (raw+1)*pi, speed mapped to [v_min, v_max], yaw mapped by raw*pi.
// Beamformer power above p_max is projected back onto the budget sphere.
Action decode_action(const RawAction& raw, const Scenario& sc);

// xi1 * R_U * R_ST / E_u minus the out-of-area penalty.
double reward(double r_u_slot, double r_st_slot, double e_u_slot, bool violated,
              const Scenario& sc);

class Env {
 public:
  Env(Scenario sc, std::uint64_t seed);

  const EnvState& reset(std::uint64_t seed);

  struct StepResult {
    EnvState state;
    double reward = 0.0;
    SlotMetrics metrics;
    bool done = false;
  };

  // Executes the current slot: decode, move (clamping to the area), realize
  // channels at the new position, score the slot. Throws when called after
  // the episode ended.
  StepResult step(const RawAction& raw);

  const EnvState& state() const { return state_; }
  const Scenario& scenario() const { return sc_; }
  bool finished() const { return finished_; }

 private:
  Scenario sc_;
  EnvState state_;
  Rng rng_;
  bool finished_ = false;
};

}  // namespace lisac
