#include "lisac/comms.hpp"

#include <cmath>
#include <stdexcept>

namespace lisac {

double sinr(const CRow& composite_n, const Beamformer& bf, int n, double sigma2) {
  if (composite_n.size() != bf.w.rows())
    throw std::invalid_argument("sinr: composite/beamformer dimension mismatch");
  if (n < 0 || n >= bf.w.cols()) throw std::invalid_argument("sinr: user index out of range");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sinr: sigma2 must be positive");

  double signal = 0.0;
  double interference = 0.0;
  for (int i = 0; i < bf.w.cols(); ++i) {
    const double p = std::norm((composite_n * bf.w.col(i))(0));
    if (i == n)
      signal = p;
    else
      interference += p;
  }
  return signal / (interference + sigma2);
}

double user_rate(double sinr_value) { return std::log2(1.0 + sinr_value); }

double slot_sum_rate(const std::vector<double>& user_rates) {
  double s = 0.0;
  for (double r : user_rates) s += r;
  return s;
}

double sum_rate(const std::vector<std::vector<double>>& rates_per_slot) {
  double s = 0.0;
  for (const auto& slot : rates_per_slot) s += slot_sum_rate(slot);
  return s;
}

}  // namespace lisac
