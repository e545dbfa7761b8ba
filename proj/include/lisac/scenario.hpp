#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lisac/channel.hpp"
#include "lisac/geometry.hpp"
#include "lisac/sensing.hpp"
#include "lisac/uav.hpp"

namespace lisac {

// Everything that defines one problem instance: mission area, node layout,
// radio constants, UAV energy model, episode timing and reward constants.
struct Scenario {
  double x_min = 0.0, x_max = 300.0;
  double y_min = 0.0, y_max = 300.0;

  Position bs{0.0, 0.0, 10.0};
  std::vector<Position> users;
  Position target{150.0, 150.0, 0.0};
  Position uav_start{0.0, 300.0, 40.0};
  double z_r = 40.0;  // fixed flight altitude; uav_start.z must match

  int t_slots = 100;   // T
  double t_d = 1.0;    // slot length, s
  int m_antennas = 4;  // M
  int l_elements = 16; // L

  double p_max = 1.0;      // BS power budget, W (30 dBm)
  double sigma2 = 1e-12;   // noise power, W (-90 dBm)
  double v_min = 0.0;      // hovering allowed
  double v_max = 30.0;     // m/s

  ChannelParams channel;
  SensingParams sensing;
  EnergyParams energy;

  double xi1 = 1000.0;  // reward scale
  double p_o = 50.0;    // out-of-area penalty

  int num_users() const { return static_cast<int>(users.size()); }
  // Raw action layout: 2MN beamformer reals, L phases, speed, yaw.
  int action_dim() const { return 2 * m_antennas * num_users() + l_elements + 2; }
  // Encoded state layout: t/T, UAV xyz, per-user xyz, target xyz.
  int state_dim() const { return 1 + 3 + 3 * num_users() + 3; }

  void validate() const;  // throws std::invalid_argument with a reason

  nlohmann::json to_json() const;
  static Scenario from_json(const nlohmann::json& j);
  static Scenario load(const std::string& path);

  // Desk-scale instance: 2 users, L = 8, M = 2, T = 40.
  static Scenario desk();
  // Full-scale instance: 3 users, L = 16, M = 4, T = 100.
  static Scenario paper();
};

// Drop n users and one target uniformly into a 60 m disc around (150, 150).
// The layout stream is fixed (seed 20240915) so default scenarios are stable.
void place_default_cluster(Scenario& sc, int n_users);

}  // namespace lisac
