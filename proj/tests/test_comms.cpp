#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <complex>

#include "lisac/comms.hpp"
#include "lisac/rng.hpp"

using namespace lisac;

TEST_SUITE("comms") {

TEST_CASE("sinr at the signal-equals-noise point") {
  CRow comp(2);
  comp << Complex(1, 0), Complex(0, 0);
  Beamformer bf;
  bf.w = CMat::Zero(2, 1);
  bf.w(0, 0) = Complex(1e-6, 0);  // |H w|^2 = 1e-12 = sigma2
  CHECK(sinr(comp, bf, 0, 1e-12) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero beamformer gives zero sinr") {
  CRow comp(3);
  comp << Complex(1, 1), Complex(0, 2), Complex(-1, 0);
  Beamformer bf;
  bf.w = CMat::Zero(3, 2);
  CHECK(sinr(comp, bf, 0, 1e-12) == 0.0);
  CHECK(sinr(comp, bf, 1, 1e-12) == 0.0);
}

TEST_CASE("two-user sinr matches scalar arithmetic") {
  Rng rng(21);
  const int m = 3, n = 2;
  CRow comp(m);
  Beamformer bf;
  bf.w = CMat(m, n);
  for (int i = 0; i < m; ++i) {
    comp(i) = Complex(rng.normal(), rng.normal());
    for (int j = 0; j < n; ++j) bf.w(i, j) = Complex(rng.normal(), rng.normal());
  }
  const double sigma2 = 0.35;
  for (int user = 0; user < n; ++user) {
    Complex sig(0, 0), intf(0, 0);
    double intf_pow = 0.0;
    for (int i = 0; i < m; ++i) sig += comp(i) * bf.w(i, user);
    for (int j = 0; j < n; ++j) {
      if (j == user) continue;
      Complex acc(0, 0);
      for (int i = 0; i < m; ++i) acc += comp(i) * bf.w(i, j);
      intf_pow += std::norm(acc);
    }
    (void)intf;
    const double want = std::norm(sig) / (intf_pow + sigma2);
    CHECK(sinr(comp, bf, user, sigma2) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("sinr input validation") {
  CRow comp(2);
  comp << Complex(1, 0), Complex(0, 0);
  Beamformer bf;
  bf.w = CMat::Zero(3, 1);  // rows disagree with the composite length
  CHECK_THROWS_AS(sinr(comp, bf, 0, 1e-12), std::invalid_argument);
  bf.w = CMat::Zero(2, 1);
  CHECK_THROWS_AS(sinr(comp, bf, 1, 1e-12), std::invalid_argument);
  CHECK_THROWS_AS(sinr(comp, bf, 0, 0.0), std::invalid_argument);
}

TEST_CASE("rate table") {
  CHECK(user_rate(0.0) == 0.0);
  CHECK(user_rate(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(user_rate(3.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("rate sums are additive") {
  CHECK(slot_sum_rate({}) == 0.0);
  CHECK(slot_sum_rate({2.0}) == 2.0);
  CHECK(sum_rate({{1, 1, 1}, {1, 1, 1}}) == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("rate is monotone in desired power") {
  CRow comp(1);
  comp << Complex(1, 0);
  double last = -1.0;
  for (double a = 0.1; a < 2.0; a += 0.1) {
    Beamformer bf;
    bf.w = CMat(1, 2);
    bf.w(0, 0) = Complex(a, 0);
    bf.w(0, 1) = Complex(0.3, 0.1);  // interference held fixed
    const double r = user_rate(sinr(comp, bf, 0, 1e-3));
    CHECK(r > last);
    last = r;
  }
}

TEST_CASE("sinr scale invariance in the interference-limited limit") {
  Rng rng(22);
  CRow comp(2);
  Beamformer bf;
  bf.w = CMat(2, 2);
  for (int i = 0; i < 2; ++i) {
    comp(i) = Complex(rng.normal(), rng.normal());
    for (int j = 0; j < 2; ++j) bf.w(i, j) = Complex(rng.normal(), rng.normal());
  }
  const double base = sinr(comp, bf, 0, 1e-20);
  Beamformer scaled;
  scaled.w = bf.w * 3.7;
  CHECK(sinr(comp, scaled, 0, 1e-20) == doctest::Approx(base).epsilon(1e-6));
}

}  // TEST_SUITE
