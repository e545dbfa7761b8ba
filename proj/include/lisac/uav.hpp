#pragma once

#include "lisac/geometry.hpp"

namespace lisac {

// Rotary-wing propulsion constants (hover profile power, induced power, rotor
// tip speed, mean induced velocity, drag ratio, air density, rotor solidity,
// disc area) plus the slot length.
struct EnergyParams {
  double p_a = 79.85;    // blade profile power at hover, W
  double p_b = 88.63;    // induced power, W
  double v_tip = 120.0;  // rotor tip speed, m/s
  double v_a = 4.03;     // mean rotor induced velocity at hover, m/s
  double d_a = 0.6;      // fuselage drag ratio
  double rho = 1.225;    // air density, kg/m^3
  double s = 0.05;       // rotor solidity
  double a = 0.503;      // rotor disc area, m^2
  double t_d = 1.0;      // slot length, s

  void validate() const;
};

// Constant-altitude kinematics: x += v*t_d*cos(yaw), y += v*t_d*sin(yaw).
Position step_position(const Position& q_r, double speed, double yaw, double t_d);

// Rotary-wing propulsion energy over one slot:
//   [P_a(1 + 3v^2/V_tip^2) + P_b(sqrt(1 + v^4/(4v_a^4)) - v^2/(2v_a^2))^(1/2)
//    + 0.5 d_a rho s A v^3] * t_d
// Throws on negative speed.
double propulsion_energy(double speed, const EnergyParams& p);

}  // namespace lisac
