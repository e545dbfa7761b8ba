#pragma once

namespace lisac {

// Cartesian position in meters. Ground nodes (users, target) sit at z = 0;
// the airborne IRS keeps a fixed altitude z_r.
struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Direction cosines of a link. cos_zeta is zenith-referenced (vertical),
// sin_iota is the horizontal component; both lie in [-1, 1].
struct LinkAngles {
  double cos_zeta = 0.0;
  double sin_iota = 0.0;
};

// Guard for the horizontal-distance division on purely vertical links.
inline constexpr double kEpsGeo = 1e-9;

double distance(const Position& p, const Position& q);

// Angles of the from -> to link, measured at `to` for elevated endpoints.
// Throws std::invalid_argument("degenerate link") on coincident points.
LinkAngles link_angles(const Position& from, const Position& to);

// sin of the downward-looking angle from an elevated node toward a ground
// target: (from.z - to.z) / distance. Same degenerate-link error.
double sensing_sin_theta(const Position& from, const Position& to);

}  // namespace lisac
