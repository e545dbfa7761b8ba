#include <doctest.h>

#include <cmath>
#include <functional>
#include <stdexcept>

#include "lisac/diffusion.hpp"

using namespace lisac;

namespace {

// frozen scalar oracles for the G=5, c1=0.1, c2=10 schedule
constexpr double kBeta1 = 0.19587455833344036;
constexpr double kBeta5 = 0.8350313791773686;
constexpr double kAlphaHat5 = 0.00640933344625638;
constexpr double kBetaTilde2 = 0.15911352676537596;
constexpr double kKappaStep1 = 1.1151623503414478;

}  // namespace

TEST_SUITE("diffusion") {

TEST_CASE("vp schedule matches the frozen oracle") {
  const DiffusionSchedule sch = vp_schedule(5, 0.1, 10.0);
  CHECK(sch.beta(0) == doctest::Approx(kBeta1).epsilon(1e-9));
  CHECK(sch.beta(4) == doctest::Approx(kBeta5).epsilon(1e-9));
  CHECK(sch.alpha_hat(4) == doctest::Approx(kAlphaHat5).epsilon(1e-9));
  CHECK(sch.beta_tilde(1) == doctest::Approx(kBetaTilde2).epsilon(1e-9));
}

TEST_CASE("vp schedule structure") {
  const DiffusionSchedule sch = vp_schedule(5, 0.1, 10.0);
  // the first posterior variance collapses because the g=0 convention is 1
  CHECK(sch.beta_tilde(0) == 0.0);
  for (int g = 1; g < 5; ++g) {
    CHECK(sch.beta(g) > sch.beta(g - 1));
    CHECK(sch.alpha_hat(g) < sch.alpha_hat(g - 1));
    CHECK(sch.beta_tilde(g) > 0.0);
    CHECK(sch.beta_tilde(g) <= sch.beta(g));
  }

  const DiffusionSchedule flat = vp_schedule(4, 0.3, 0.3);
  const double want = 1.0 - std::exp(-0.3 / 4.0);
  for (int g = 0; g < 4; ++g) CHECK(flat.beta(g) == doctest::Approx(want).epsilon(1e-12));

  CHECK_THROWS_AS(vp_schedule(0, 0.1, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(vp_schedule(5, 0.5, 0.1), std::invalid_argument);
}

TEST_CASE("pinned forward sample") {
  const DiffusionSchedule sch = vp_schedule(2, 0.1, 10.0);
  // with eps = 0 only the sqrt(alpha_hat) shrink remains
  Vec x0(1), eps0(1);
  x0 << 1.0;
  eps0 << 0.0;
  const Vec xg = forward_sample(x0, 2, sch, eps0);
  CHECK(xg(0) == doctest::Approx(std::sqrt(sch.alpha_hat(1))).epsilon(1e-12));
}

TEST_CASE("forward marginals match the stepwise chain") {
  const DiffusionSchedule sch = vp_schedule(5, 0.1, 10.0);
  Rng rng(81);
  const int draws = 100000;
  double sum_c = 0, sq_c = 0, sum_f = 0, sq_f = 0;
  Vec x0(1);
  x0 << 1.0;
  for (int i = 0; i < draws; ++i) {
    double x = x0(0);
    for (int g = 1; g <= 5; ++g)
      x = std::sqrt(sch.alpha(g - 1)) * x + std::sqrt(sch.beta(g - 1)) * rng.normal();
    sum_c += x;
    sq_c += x * x;
    const double y = forward_sample(x0, 5, sch, rng)(0);
    sum_f += y;
    sq_f += y * y;
  }
  const double mean_c = sum_c / draws, var_c = sq_c / draws - mean_c * mean_c;
  const double mean_f = sum_f / draws, var_f = sq_f / draws - mean_f * mean_f;
  CHECK(std::abs(mean_c - mean_f) < 0.02);
  CHECK(var_c == doctest::Approx(var_f).epsilon(0.02));
  // closed-form targets
  CHECK(mean_f == doctest::Approx(std::sqrt(sch.alpha_hat(4))).epsilon(0.05));
  CHECK(var_f == doctest::Approx(1.0 - sch.alpha_hat(4)).epsilon(0.02));
}

TEST_CASE("reverse step against the scalar oracle") {
  const DiffusionSchedule sch = vp_schedule(5, 0.1, 10.0);
  const Denoiser dn = Denoiser::make(1, 1, 4, 1);
  const Vec zero_params = Vec::Zero(dn.spec.param_count());
  Mat x(1, 1), s(1, 1), noise(1, 1);
  x << 1.0;
  s << 0.3;
  noise << 0.0;
  const Mat out = reverse_step(x, 1, s, sch, dn, zero_params, noise);
  CHECK(out(0, 0) == doctest::Approx(kKappaStep1).epsilon(1e-9));
}

TEST_CASE("last reverse step ignores the injected noise") {
  const DiffusionSchedule sch = vp_schedule(3, 0.1, 10.0);
  const Denoiser dn = Denoiser::make(2, 1, 4, 1);
  ParamVector params;
  Rng rng(82);
  init_mlp(dn.spec, params, rng);
  Mat x(1, 2), s(1, 1), huge(1, 2);
  x << 0.4, -0.2;
  s << 0.5;
  huge << 1e6, -1e6;
  const Mat a = reverse_step(x, 1, s, sch, dn, params.value, Mat::Zero(1, 2));
  const Mat b = reverse_step(x, 1, s, sch, dn, params.value, huge);
  CHECK((a - b).norm() == 0.0);
}

TEST_CASE("vanishing beta makes the reverse step a no-op") {
  const DiffusionSchedule sch = vp_schedule(1, 1e-9, 1e-9);
  const Denoiser dn = Denoiser::make(1, 1, 4, 1);
  const Vec zero_params = Vec::Zero(dn.spec.param_count());
  Mat x(1, 1), s(1, 1);
  x << 0.7;
  s << 0.1;
  const Mat out = reverse_step(x, 1, s, sch, dn, zero_params, Mat::Zero(1, 1));
  CHECK(out(0, 0) == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("single-step action sampling closed form") {
  const DiffusionSchedule sch = vp_schedule(1, 0.1, 10.0);
  const Denoiser dn = Denoiser::make(3, 2, 4, 1);
  const Vec zero_params = Vec::Zero(dn.spec.param_count());
  Vec state(2);
  state << 0.2, 0.8;

  Rng rng(83);
  const Vec a = sample_action(state, sch, dn, zero_params, rng);
  Rng replay(83);
  Vec x(3);
  for (int i = 0; i < 3; ++i) x(i) = replay.normal();
  for (int i = 0; i < 3; ++i)
    CHECK(a(i) == doctest::Approx(std::tanh(x(i) / std::sqrt(sch.alpha(0)))).epsilon(1e-12));
}

TEST_CASE("sampled actions stay inside the unit box") {
  const DiffusionSchedule sch = vp_schedule(3, 0.1, 10.0);
  const Denoiser dn = Denoiser::make(4, 2, 8, 2);
  ParamVector params;
  Rng rng(84);
  init_mlp(dn.spec, params, rng);
  Vec state(2);
  state << 0.4, 0.6;
  for (int i = 0; i < 200; ++i) {
    const Vec a = sample_action(state, sch, dn, params.value, rng);
    for (int k = 0; k < a.size(); ++k) {
      CHECK(a(k) >= -1.0);
      CHECK(a(k) <= 1.0);
    }
  }
}

TEST_CASE("sampling is reproducible") {
  const DiffusionSchedule sch = vp_schedule(3, 0.1, 10.0);
  const Denoiser dn = Denoiser::make(4, 2, 8, 1);
  ParamVector params;
  Rng init(85);
  init_mlp(dn.spec, params, init);
  Vec state(2);
  state << 0.1, 0.9;
  Rng r1(99), r2(99);
  const Vec a1 = sample_action(state, sch, dn, params.value, r1);
  const Vec a2 = sample_action(state, sch, dn, params.value, r2);
  CHECK((a1 - a2).norm() == 0.0);
}

TEST_CASE("perturbation clips both the noise and the result") {
  Rng rng(86);
  Vec a(3);
  a << 0.9, -0.5, 0.0;
  const Vec same = perturb(a, 0.0, 0.5, rng);
  CHECK((same - a).norm() == 0.0);

  // sigma large enough that nearly every draw hits the +-b clip
  Vec big(1);
  big << 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec out = perturb(big, 1e6, 0.5, rng);
    CHECK(std::abs(out(0)) == doctest::Approx(0.5).epsilon(1e-9));
  }

  Vec edge(1);
  edge << 0.9;
  for (int i = 0; i < 100; ++i) {
    const Vec out = perturb(edge, 1e6, 0.5, rng);
    CHECK(out(0) >= 0.4 - 1e-12);
    CHECK(out(0) <= 1.0);
  }
}

TEST_CASE("embedding shape and values") {
  const Vec e = sinusoidal_embedding(2, 4);
  CHECK(e.size() == 4);
  CHECK(e(0) == doctest::Approx(std::sin(2.0)).epsilon(1e-15));
  CHECK(e(1) == doctest::Approx(std::cos(2.0)).epsilon(1e-15));
  const double f1 = std::pow(10000.0, -0.5);
  CHECK(e(2) == doctest::Approx(std::sin(2.0 * f1)).epsilon(1e-15));
  CHECK_THROWS_AS(sinusoidal_embedding(1, 3), std::invalid_argument);
}

TEST_CASE("tape chain agrees with the plain chain") {
  const DiffusionSchedule sch = vp_schedule(3, 0.1, 10.0);
  const Denoiser dn = Denoiser::make(3, 2, 8, 2);
  ParamVector params;
  Rng rng(87);
  init_mlp(dn.spec, params, rng);
  Mat states(4, 2);
  states.setRandom();
  const ChainNoises noises = ChainNoises::draw(4, 3, 3, rng);

  Tape t;
  const Tape::Var a = chain_on_tape(t, sch, dn, params, states, noises);
  const Mat plain = chain_eval(sch, dn, params.value, states, noises);
  CHECK((t.value(a) - plain).norm() < 1e-13);
}

TEST_CASE("through-chain gradient passes finite differences") {
  const DiffusionSchedule sch = vp_schedule(3, 0.1, 10.0);
  const Denoiser dn = Denoiser::make(3, 2, 8, 2);
  ParamVector params;
  Rng rng(88);
  init_mlp(dn.spec, params, rng);
  Mat states(2, 2);
  states << 0.3, 0.7, -0.4, 0.1;
  const ChainNoises noises = ChainNoises::draw(2, 3, 3, rng);
  Mat target(2, 3);
  for (int i = 0; i < target.size(); ++i) target.data()[i] = rng.uniform(-0.5, 0.5);

  auto loss_value = [&] {
    const Mat a = chain_eval(sch, dn, params.value, states, noises);
    return (a - target).array().square().mean();
  };

  Tape t;
  const Tape::Var a = chain_on_tape(t, sch, dn, params, states, noises);
  const Tape::Var loss = t.mean_all(t.square(t.sub(a, t.constant(target))));
  CHECK(t.value(loss)(0, 0) == doctest::Approx(loss_value()).epsilon(1e-12));
  params.zero_grad();
  t.backward(loss);

  const double h = 1e-5;
  for (int i = 0; i < params.size(); ++i) {
    const double keep = params.value(i);
    params.value(i) = keep + h;
    const double up = loss_value();
    params.value(i) = keep - h;
    const double down = loss_value();
    params.value(i) = keep;
    const double fd = (up - down) / (2.0 * h);
    // Central differences bottom out near eps*|loss|/h, so components whose
    // true gradient sits below that resolution get an absolute bound instead.
    const double scale = std::max({std::abs(fd), std::abs(params.grad(i)), 1e-5});
    CHECK(std::abs(params.grad(i) - fd) / scale <= 1e-4);
  }
}

TEST_CASE("noise scale switch changes only the stochastic part") {
  const DiffusionSchedule sch = vp_schedule(3, 0.1, 10.0);
  const Denoiser dn = Denoiser::make(2, 1, 4, 1);
  ParamVector params;
  Rng rng(89);
  init_mlp(dn.spec, params, rng);
  Mat x(1, 2), s(1, 1), noise(1, 2);
  x << 0.4, -0.1;
  s << 0.2;
  noise << 1.0, -1.0;
  const Mat a = reverse_step(x, 2, s, sch, dn, params.value, noise, ReverseNoiseScale::Sqrt);
  const Mat b = reverse_step(x, 2, s, sch, dn, params.value, noise, ReverseNoiseScale::Linear);
  const double bt = sch.beta_tilde(1);
  CHECK((a - b).norm() ==
        doctest::Approx((std::sqrt(bt) - bt) * noise.norm()).epsilon(1e-10));
}

}  // TEST_SUITE
