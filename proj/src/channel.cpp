#include "lisac/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lisac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double path_gain(double l0, double d, double alpha) {
  return std::sqrt(l0 / std::pow(d, alpha));
}

}  // namespace

void ChannelParams::validate() const {
  if (!(l0 > 0.0)) throw std::invalid_argument("channel: L0 must be positive");
  for (double a : {alpha_bu, alpha_br, alpha_ru}) {
    if (!(a >= 1.5 && a <= 7.0))
      throw std::invalid_argument("channel: path-loss exponent outside [1.5, 7]");
  }
  if (!(rician_eta >= 0.0)) throw std::invalid_argument("channel: rician_eta must be >= 0");
  if (!(d_r_over_lambda > 0.0 && d_s_over_lambda > 0.0))
    throw std::invalid_argument("channel: spacings must be positive");
}

CVec direct_channel(const ChannelParams& p, const Position& q_b, const Position& q_u,
                    int m_antennas, Rng& rng) {
  const double d = distance(q_b, q_u);
  const LinkAngles ang = link_angles(q_b, q_u);  // throws on coincident positions
  const double scale = path_gain(p.l0, d, p.alpha_bu);
  const double w_los = std::sqrt(p.rician_eta / (p.rician_eta + 1.0));
  const double w_nlos = std::sqrt(1.0 / (p.rician_eta + 1.0));
  const double step = -kTwoPi * p.d_s_over_lambda * ang.sin_iota;

  constexpr double inv_sqrt2 = 0.7071067811865475244;  // unit-variance complex entries
  CVec h(m_antennas);
  for (int m = 0; m < m_antennas; ++m) {
    const Complex los = std::polar(1.0, step * m);
    const Complex nlos(rng.normal() * inv_sqrt2, rng.normal() * inv_sqrt2);
    h(m) = scale * (w_los * los + w_nlos * nlos);
  }
  return h;
}

CMat bs_irs_channel(const ChannelParams& p, const Position& q_b, const Position& q_r,
                    int l_elements, int m_antennas) {
  const double d = distance(q_b, q_r);
  const LinkAngles ang = link_angles(q_b, q_r);  // angles of arrival at the IRS
  const double scale = path_gain(p.l0, d, p.alpha_br);
  // IRS factor is Hermitian-transposed, so its phase sign flips.
  const double step_r = kTwoPi * p.d_r_over_lambda * ang.cos_zeta;
  const double step_s = -kTwoPi * p.d_s_over_lambda * ang.sin_iota;

  CMat g(l_elements, m_antennas);
  for (int l = 0; l < l_elements; ++l)
    for (int m = 0; m < m_antennas; ++m)
      g(l, m) = scale * std::polar(1.0, step_r * l + step_s * m);
  return g;
}

CVec irs_user_channel(const ChannelParams& p, const Position& q_r, const Position& q_u,
                      int l_elements) {
  const double d = distance(q_r, q_u);
  // Departure angle measured at the IRS: the elevated node is the reference.
  const LinkAngles ang = link_angles(q_u, q_r);
  const double scale = path_gain(p.l0, d, p.alpha_ru);
  const double step = -kTwoPi * p.d_r_over_lambda * ang.cos_zeta;

  CVec h(l_elements);
  for (int l = 0; l < l_elements; ++l) h(l) = scale * std::polar(1.0, step * l);
  return h;
}

CMat phase_matrix(const Vec& theta) {
  const int l = static_cast<int>(theta.size());
  for (int i = 0; i < l; ++i) {
    if (!(theta(i) >= 0.0 && theta(i) < kTwoPi))
      throw std::invalid_argument("phase_matrix: theta outside [0, 2pi)");
  }
  CMat phi = CMat::Zero(l, l);
  for (int i = 0; i < l; ++i) phi(i, i) = std::polar(1.0, theta(i));
  return phi;
}

CRow composite_channel(const CVec& h_bu, const CVec& h_ru, const CMat& phi, const CMat& h_br) {
  if (phi.rows() != phi.cols() || phi.rows() != h_ru.size() || h_br.rows() != h_ru.size() ||
      h_br.cols() != h_bu.size())
    throw std::invalid_argument("composite_channel: dimension mismatch");
  return h_bu.adjoint() + h_ru.adjoint() * phi * h_br;
}

ChannelRealization realize_channels(const ChannelParams& p, const Position& q_b,
                                    const Position& q_r, const std::vector<Position>& users,
                                    int l_elements, int m_antennas, const Vec& theta, Rng& rng) {
  ChannelRealization ch;
  ch.h_br = bs_irs_channel(p, q_b, q_r, l_elements, m_antennas);
  const CMat phi = phase_matrix(theta);
  ch.h_bu.reserve(users.size());
  ch.h_ru.reserve(users.size());
  ch.composite.reserve(users.size());
  for (const Position& q_u : users) {
    ch.h_bu.push_back(direct_channel(p, q_b, q_u, m_antennas, rng));
    ch.h_ru.push_back(irs_user_channel(p, q_r, q_u, l_elements));
    ch.composite.push_back(composite_channel(ch.h_bu.back(), ch.h_ru.back(), phi, ch.h_br));
  }
  return ch;
}

}  // namespace lisac
