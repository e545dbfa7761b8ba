#pragma once

#include <vector>

#include "lisac/linalg.hpp"
#include "lisac/nn.hpp"
#include "lisac/rng.hpp"
#include "lisac/tape.hpp"

namespace lisac {

// Noise schedule arrays, 1-indexed by chain step g (stored at g-1).
// alpha_hat[0] in the recurrences means 1 by convention, which makes
// beta_tilde at g=1 exactly zero.
struct DiffusionSchedule {
  int g_steps = 0;
  Vec beta, alpha, alpha_hat, beta_tilde;

  void validate() const;
};

// beta[g] = 1 - exp(-c1/G - (2g-1)/(2G^2) * (c2 - c1)), g = 1..G.
DiffusionSchedule vp_schedule(int g_steps, double c1 = 0.1, double c2 = 10.0);

// Reverse-step noise uses the posterior variance beta_tilde either under a
// square root (standard deviation, the default) or linearly.
enum class ReverseNoiseScale { Sqrt, Linear };

// Denoiser network wrapper: input [x | state | step embedding], output has
// x's width. The head is linear; the mean formula applies tanh itself.
struct Denoiser {
  MlpSpec spec;
  int x_dim = 0;
  int state_dim = 0;
  int emb_dim = 16;

  static Denoiser make(int x_dim, int state_dim, int hidden, int hidden_layers,
                       int emb_dim = 16);
  void validate() const;
};

// Classic sinusoidal position code of the integer step.
Vec sinusoidal_embedding(int g, int dim);

// x_g = sqrt(alpha_hat_g) * x0 + sqrt(1 - alpha_hat_g) * eps
Vec forward_sample(const Vec& x0, int g, const DiffusionSchedule& sch, const Vec& eps);
Vec forward_sample(const Vec& x0, int g, const DiffusionSchedule& sch, Rng& rng);

// Batched denoiser output for one chain step (rows = samples).
Mat denoiser_eval(const Denoiser& dn, const Vec& params, const Mat& x, const Mat& states,
                  int g);

// One reverse-chain step:
//   kappa = (x_g - beta_g / sqrt(1 - alpha_hat_g) * tanh(denoiser)) / sqrt(alpha_g)
//   x_{g-1} = kappa + noise_scale(beta_tilde_g) * noise
// noise is ignored at g = 1 (the last step is deterministic).
Mat reverse_step(const Mat& x_g, int g, const Mat& states, const DiffusionSchedule& sch,
                 const Denoiser& dn, const Vec& params, const Mat& noise,
                 ReverseNoiseScale ns = ReverseNoiseScale::Sqrt);

// Runs the whole reverse chain from x_G ~ N(0, I) and squashes: a = tanh(x_0).
Vec sample_action(const Vec& state, const DiffusionSchedule& sch, const Denoiser& dn,
                  const Vec& params, Rng& rng,
                  ReverseNoiseScale ns = ReverseNoiseScale::Sqrt);

// Exploration noise on top of the sampled action:
// clip_to_[-1,1](a + clip(N(0, sigma_hat), -b, b)) per component.
Vec perturb(const Vec& a_tilde, double sigma_hat, double b, Rng& rng);

// Pinned randomness for a differentiable chain evaluation: x_G plus one noise
// matrix per step g = G..2 (g = 1 takes none).
struct ChainNoises {
  Mat x_g;                  // B x D start
  std::vector<Mat> steps;   // indexed g-2 for g = 2..G, each B x D

  static ChainNoises draw(int batch, int x_dim, int g_steps, Rng& rng);
};

// The same chain on the tape, ending in tanh(x_0); gradients flow into params
// through every denoiser application.
Tape::Var chain_on_tape(Tape& t, const DiffusionSchedule& sch, const Denoiser& dn,
                        ParamVector& params, const Mat& states, const ChainNoises& noises,
                        ReverseNoiseScale ns = ReverseNoiseScale::Sqrt, bool frozen = false);

// Plain (no tape) chain replay with the same pinned noises; used by target
// actors and for cross-checking the tape values.
Mat chain_eval(const DiffusionSchedule& sch, const Denoiser& dn, const Vec& params,
               const Mat& states, const ChainNoises& noises,
               ReverseNoiseScale ns = ReverseNoiseScale::Sqrt);

}  // namespace lisac
