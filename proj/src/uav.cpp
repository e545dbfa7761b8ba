#include "lisac/uav.hpp"

#include <cmath>
#include <stdexcept>

namespace lisac {

void EnergyParams::validate() const {
  for (double v : {p_a, p_b, v_tip, v_a, d_a, rho, s, a, t_d}) {
    if (!(v > 0.0)) throw std::invalid_argument("energy: parameters must be positive");
  }
}

Position step_position(const Position& q_r, double speed, double yaw, double t_d) {
  Position next = q_r;
  next.x += speed * t_d * std::cos(yaw);
  next.y += speed * t_d * std::sin(yaw);
  return next;
}

double propulsion_energy(double speed, const EnergyParams& p) {
  if (speed < 0.0) throw std::invalid_argument("propulsion_energy: negative speed");
  const double v2 = speed * speed;
  const double blade = p.p_a * (1.0 + 3.0 * v2 / (p.v_tip * p.v_tip));
  // The radicand sqrt(1 + v^4/4v_a^4) - v^2/2v_a^2 stays strictly positive
  // for all v >= 0, so the outer square root is well defined.
  const double va2 = p.v_a * p.v_a;
  const double radicand = std::sqrt(1.0 + v2 * v2 / (4.0 * va2 * va2)) - v2 / (2.0 * va2);
  const double induced = p.p_b * std::sqrt(radicand);
  const double parasite = 0.5 * p.d_a * p.rho * p.s * p.a * v2 * speed;
  return (blade + induced + parasite) * p.t_d;
}

}  // namespace lisac
