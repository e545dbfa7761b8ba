#include "lisac/sensing.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lisac {

void SensingParams::validate() const {
  if (!(alpha_r_model >= 1.5 && alpha_r_model <= 7.0))
    throw std::invalid_argument("sensing: path-loss exponent outside [1.5, 7]");
}

CVec steering_vector(int l_elements, double sin_theta_st, double d_r_over_lambda) {
  const double step = 2.0 * std::numbers::pi * d_r_over_lambda * sin_theta_st;
  CVec a(l_elements);
  for (int l = 0; l < l_elements; ++l) a(l) = std::polar(1.0, step * l);
  return a;
}

double alpha_r_coefficient(double l0, double d_rg, double alpha_r_model) {
  return std::sqrt(l0 / std::pow(d_rg, alpha_r_model));
}

double target_gain(const CVec& a, const CMat& phi, const CMat& h_br, const Beamformer& bf,
                   double alpha_r) {
  if (a.size() != phi.rows() || phi.cols() != h_br.rows() || h_br.cols() != bf.w.rows())
    throw std::invalid_argument("target_gain: dimension mismatch");

  const CRow g_h = alpha_r * (a.adjoint() * phi * h_br);  // 1 x M
  const CMat cov = bf.w * bf.w.adjoint();                 // sum_n w_n w_n^H
  const Complex gain = (g_h * cov * g_h.adjoint())(0);

  if (std::abs(gain.imag()) >= 1e-9 * std::abs(gain.real()) + 1e-15)
    throw std::runtime_error("target_gain: quadratic form not numerically real");
  return std::max(gain.real(), 0.0);
}

double sensing_rate(double gain, double sigma2) { return std::log2(1.0 + gain / sigma2); }

}  // namespace lisac
