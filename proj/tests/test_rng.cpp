#include <doctest.h>

#include <cmath>
#include <vector>

#include "lisac/rng.hpp"

using namespace lisac;

TEST_SUITE("rng") {

TEST_CASE("same seed, same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("different seeds diverge") {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += a.bits() == b.bits();
  CHECK(same == 0);
}

TEST_CASE("uniform range and mean") {
  Rng rng(7);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal moments") {
  Rng rng(8);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(sq / n - mean * mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("index stays in range") {
  Rng rng(9);
  for (int i = 0; i < 10000; ++i) CHECK(rng.index(7) < 7);
}

TEST_CASE("derived streams differ from the parent and each other") {
  Rng base(1234);
  Rng s1(Rng::derive(1234, 1)), s2(Rng::derive(1234, 2));
  CHECK(base.bits() != s1.bits());
  CHECK(s1.bits() != s2.bits());
  CHECK(Rng::derive(1234, 1) == Rng::derive(1234, 1));
}

}  // TEST_SUITE
