#pragma once

#include <vector>

#include "lisac/linalg.hpp"

namespace lisac {

// Active beamformer at the BS; column n is the weight vector of user n.
struct Beamformer {
  CMat w;  // M x N

  double total_power() const { return w.squaredNorm(); }
};

// |H~ w_n|^2 / (sum_{i != n} |H~ w_i|^2 + sigma2) for the given user's
// composite row. Transmit symbols enter only through their unit-variance
// expectations, so no symbol sampling happens here.
double sinr(const CRow& composite_n, const Beamformer& bf, int n, double sigma2);

// log2(1 + sinr), bits/s/Hz.
double user_rate(double sinr_value);

// Per-slot sum over users.
double slot_sum_rate(const std::vector<double>& user_rates);

// Episode total: sum over slots of the per-slot user sums.
double sum_rate(const std::vector<std::vector<double>>& rates_per_slot);

}  // namespace lisac
