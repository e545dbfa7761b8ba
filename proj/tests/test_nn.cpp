#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lisac/nn.hpp"

using namespace lisac;

TEST_SUITE("nn") {

TEST_CASE("spec accounting") {
  const MlpSpec spec = MlpSpec::dense(3, 4, 2, 2, Act::Tanh);
  CHECK(spec.widths == std::vector<int>{3, 4, 4, 2});
  CHECK(spec.param_count() == (3 + 1) * 4 + (4 + 1) * 4 + (4 + 1) * 2);
  CHECK(spec.layer_count() == 3);

  MlpSpec bad = spec;
  bad.acts.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("zero parameters give zero output") {
  const MlpSpec spec = MlpSpec::dense(3, 5, 2, 2, Act::Identity);
  const Vec params = Vec::Zero(spec.param_count());
  Mat in(4, 3);
  in.setRandom();
  const Mat out = mlp_forward(spec, params, in);
  CHECK(out.rows() == 4);
  CHECK(out.cols() == 2);
  CHECK(out.norm() == 0.0);
}

TEST_CASE("identity single layer passes input through") {
  MlpSpec spec;
  spec.widths = {3, 3};
  spec.acts = {Act::Identity};
  Vec params = Vec::Zero(spec.param_count());
  // weight block is column-major 3 x 3 at offset 0
  params(0) = 1.0;  // (0,0)
  params(4) = 1.0;  // (1,1)
  params(8) = 1.0;  // (2,2)
  Mat in(2, 3);
  in << 1, 2, 3, -1, 0.5, 4;
  CHECK((mlp_forward(spec, params, in) - in).norm() < 1e-15);
}

TEST_CASE("forward matches a scalar-loop oracle") {
  const MlpSpec spec = MlpSpec::dense(2, 3, 1, 2, Act::Tanh);
  ParamVector params;
  Rng rng(61);
  init_mlp(spec, params, rng);
  Mat in(1, 2);
  in << 0.3, -0.7;
  const Mat out = mlp_forward(spec, params.value, in);

  // layer 1: w (2x3) then b (3); layer 2: w (3x2) then b (2)
  const double* p = params.value.data();
  double h[3];
  for (int j = 0; j < 3; ++j) {
    double acc = p[6 + j];  // bias after the 2*3 weights
    for (int i = 0; i < 2; ++i) acc += in(0, i) * p[j * 2 + i];
    h[j] = acc > 0 ? acc : 0.0;
  }
  const double* p2 = p + 9;
  for (int j = 0; j < 2; ++j) {
    double acc = p2[6 + j];
    for (int i = 0; i < 3; ++i) acc += h[i] * p2[j * 3 + i];
    CHECK(out(0, j) == doctest::Approx(std::tanh(acc)).epsilon(1e-12));
  }
}

TEST_CASE("init respects the fan-in bound and the zero head") {
  const MlpSpec spec = MlpSpec::dense(16, 8, 1, 4, Act::Identity);
  ParamVector params;
  Rng rng(62);
  init_mlp(spec, params, rng, true);
  const int first = (16 + 1) * 8;
  for (int i = 0; i < first; ++i) CHECK(std::abs(params.value(i)) <= 1.0 / 4.0);
  for (int i = first; i < params.size(); ++i) CHECK(params.value(i) == 0.0);
}

TEST_CASE("adam with zero gradient leaves parameters untouched") {
  ParamVector p(4);
  p.value << 1, -2, 3, 0.5;
  const Vec before = p.value;
  AdamState st(4);
  adam_update(p, st, AdamConfig{});
  CHECK((p.value - before).norm() == 0.0);
}

TEST_CASE("first adam step matches the scalar oracle") {
  ParamVector p(1);
  p.value(0) = 0.2;
  p.grad(0) = 0.37;
  AdamState st(1);
  adam_update(p, st, AdamConfig{});
  // frozen oracle: bias-corrected first step with lr 5e-4
  CHECK(p.value(0) - 0.2 == doctest::Approx(-0.0004999999864864869).epsilon(1e-12));
}

TEST_CASE("adam is deterministic") {
  auto run = [] {
    ParamVector p(3);
    p.value << 0.1, 0.2, 0.3;
    AdamState st(3);
    AdamConfig cfg;
    for (int i = 0; i < 10; ++i) {
      p.grad << 0.5, -0.25, 0.1;
      adam_update(p, st, cfg);
    }
    return p.value;
  };
  const Vec a = run(), b = run();
  CHECK((a - b).norm() == 0.0);
}

TEST_CASE("gradient clipping") {
  Vec g(2);
  g << 3.0, 4.0;
  const double pre = clip_grad_norm(g, 1.0);
  CHECK(pre == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-12));
  Vec small(2);
  small << 0.3, 0.4;
  clip_grad_norm(small, 1.0);
  CHECK(small.norm() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("soft update arithmetic") {
  ParamVector target(2), main(2);
  target.value << 0.0, 1.0;
  main.value << 1.0, 1.0;
  soft_update(target, main, 1.0);
  CHECK(target.value(0) == 1.0);

  target.value << 0.0, 2.0;
  soft_update(target, main, 0.0);
  CHECK(target.value(0) == 0.0);
  CHECK(target.value(1) == 2.0);

  target.value << 0.0, 0.0;
  soft_update(target, main, 0.005);
  CHECK(target.value(0) == doctest::Approx(0.005).epsilon(1e-15));
}

TEST_CASE("checkpoint record round trip") {
  const MlpSpec spec = MlpSpec::dense(4, 6, 2, 3, Act::Tanh);
  ParamVector params;
  Rng rng(63);
  init_mlp(spec, params, rng);
  const nlohmann::json j = net_to_json(spec, params.value);

  MlpSpec spec2;
  Vec value2;
  net_from_json(j, spec2, value2);
  CHECK(spec2.widths == spec.widths);
  CHECK(spec2.acts == spec.acts);
  CHECK((value2 - params.value).norm() == 0.0);

  nlohmann::json bad = j;
  bad["params"].erase(0);
  CHECK_THROWS_AS(net_from_json(bad, spec2, value2), std::invalid_argument);
}

}  // TEST_SUITE
