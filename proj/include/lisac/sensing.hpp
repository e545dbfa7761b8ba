#pragma once

#include "lisac/comms.hpp"
#include "lisac/linalg.hpp"

namespace lisac {

struct SensingParams {
  double alpha_r_model = 2.2;  // IRS-target path-loss exponent

  void validate() const;
};

// L-element steering vector toward sin(theta): entries
// exp(j*2pi*d_r/lambda*(l-1)*sin_theta).
CVec steering_vector(int l_elements, double sin_theta_st, double d_r_over_lambda);

// Large-scale fading coefficient of the IRS-target hop: sqrt(L0/d^alpha).
double alpha_r_coefficient(double l0, double d_rg, double alpha_r_model);

// Beampattern gain toward the target: with g^H = alpha_r * a^H * Phi * h_br,
// returns g^H (sum_n w_n w_n^H) g. The result is real up to numerical slack;
// the imaginary part is asserted small and discarded.
double target_gain(const CVec& a, const CMat& phi, const CMat& h_br, const Beamformer& bf,
                   double alpha_r);

// log2(1 + gain/sigma2), bits/s/Hz.
double sensing_rate(double gain, double sigma2);

}  // namespace lisac
