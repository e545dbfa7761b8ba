#pragma once

#include <vector>

#include "lisac/geometry.hpp"
#include "lisac/linalg.hpp"
#include "lisac/rng.hpp"

namespace lisac {

// Large-scale and small-scale channel constants. Half-wavelength element and
// antenna spacings are the defaults; all gains are linear scale.
struct ChannelParams {
  double l0 = 1e-3;          // power gain at 1 m reference distance
  double alpha_bu = 4.6;     // BS-user path-loss exponent
  double alpha_br = 2.2;     // BS-IRS path-loss exponent
  double alpha_ru = 2.2;     // IRS-user path-loss exponent
  double rician_eta = 1.0;   // Rician factor of the direct link
  double d_r_over_lambda = 0.5;
  double d_s_over_lambda = 0.5;

  void validate() const;  // throws std::invalid_argument on bad values
};

// All channel quantities of one time slot.
struct ChannelRealization {
  std::vector<CVec> h_bu;      // direct BS-user, length M per user
  CMat h_br;                   // BS-IRS, L x M
  std::vector<CVec> h_ru;      // IRS-user, length L per user
  std::vector<CRow> composite; // effective BS-user row, 1 x M per user
};

// Rician direct link: sqrt(L0/d^a) * (sqrt(eta/(eta+1)) LoS + sqrt(1/(eta+1)) NLoS).
// The LoS part is the M-element BS array response toward the user; NLoS entries
// are i.i.d. unit-variance circular complex Gaussian, redrawn per call.
CVec direct_channel(const ChannelParams& p, const Position& q_b, const Position& q_u,
                    int m_antennas, Rng& rng);

// LoS-dominated BS-IRS link: outer product of the conjugated L-element IRS
// response (vertical angle) with the M-element BS response (horizontal angle),
// scaled by sqrt(L0/d^a). Every entry has the same magnitude.
CMat bs_irs_channel(const ChannelParams& p, const Position& q_b, const Position& q_r,
                    int l_elements, int m_antennas);

// LoS IRS-user link, entries sqrt(L0/d^a) * exp(-j*2pi*d_r/lambda*(l-1)*cos_zeta_n).
CVec irs_user_channel(const ChannelParams& p, const Position& q_r, const Position& q_u,
                      int l_elements);

// diag(exp(j*theta_l)). Each theta_l must lie in [0, 2pi); callers wrap first.
CMat phase_matrix(const Vec& theta);

// (h_bu)^H + (h_ru)^H * Phi * h_br, returned as a 1 x M row.
CRow composite_channel(const CVec& h_bu, const CVec& h_ru, const CMat& phi, const CMat& h_br);

// Convenience: realize every link and composite for one slot.
ChannelRealization realize_channels(const ChannelParams& p, const Position& q_b,
                                    const Position& q_r, const std::vector<Position>& users,
                                    int l_elements, int m_antennas, const Vec& theta, Rng& rng);

}  // namespace lisac
