#include "lisac/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace lisac {

double distance(const Position& p, const Position& q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  const double dz = p.z - q.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

LinkAngles link_angles(const Position& from, const Position& to) {
  const double d = distance(from, to);
  if (d == 0.0) throw std::invalid_argument("degenerate link");
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double horizontal = std::sqrt(dx * dx + dy * dy);
  LinkAngles a;
  a.cos_zeta = (to.z - from.z) / d;
  a.sin_iota = dy / std::max(horizontal, kEpsGeo);
  return a;
}

double sensing_sin_theta(const Position& from, const Position& to) {
  const double d = distance(from, to);
  if (d == 0.0) throw std::invalid_argument("degenerate link");
  return (from.z - to.z) / d;
}

}  // namespace lisac
