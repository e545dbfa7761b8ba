#include "lisac/diffusion.hpp"

#include <cmath>
#include <stdexcept>

namespace lisac {

void DiffusionSchedule::validate() const {
  if (g_steps < 1) throw std::invalid_argument("schedule needs at least one step");
  if (beta.size() != g_steps || alpha.size() != g_steps || alpha_hat.size() != g_steps ||
      beta_tilde.size() != g_steps)
    throw std::invalid_argument("schedule arrays disagree with g_steps");
  for (int g = 0; g < g_steps; ++g) {
    if (!(beta(g) > 0.0 && beta(g) < 1.0))
      throw std::invalid_argument("beta out of (0,1)");
    if (g > 0 && alpha_hat(g) >= alpha_hat(g - 1))
      throw std::invalid_argument("alpha_hat must decrease");
  }
}

DiffusionSchedule vp_schedule(int g_steps, double c1, double c2) {
  if (g_steps < 1) throw std::invalid_argument("vp_schedule: g_steps < 1");
  if (!(c1 > 0.0) || !(c2 >= c1)) throw std::invalid_argument("vp_schedule: need 0 < c1 <= c2");
  DiffusionSchedule sch;
  sch.g_steps = g_steps;
  sch.beta = Vec(g_steps);
  sch.alpha = Vec(g_steps);
  sch.alpha_hat = Vec(g_steps);
  sch.beta_tilde = Vec(g_steps);
  const double gd = static_cast<double>(g_steps);
  double acc = 1.0, prev_hat = 1.0;
  for (int g = 1; g <= g_steps; ++g) {
    const double b = 1.0 - std::exp(-c1 / gd - (2.0 * g - 1.0) / (2.0 * gd * gd) * (c2 - c1));
    sch.beta(g - 1) = b;
    sch.alpha(g - 1) = 1.0 - b;
    acc *= sch.alpha(g - 1);
    sch.alpha_hat(g - 1) = acc;
    sch.beta_tilde(g - 1) = (1.0 - prev_hat) / (1.0 - acc) * b;
    prev_hat = acc;
  }
  sch.validate();
  return sch;
}

Denoiser Denoiser::make(int x_dim, int state_dim, int hidden, int hidden_layers, int emb_dim) {
  Denoiser dn;
  dn.x_dim = x_dim;
  dn.state_dim = state_dim;
  dn.emb_dim = emb_dim;
  dn.spec = MlpSpec::dense(x_dim + state_dim + emb_dim, hidden, hidden_layers, x_dim,
                           Act::Identity);
  return dn;
}

void Denoiser::validate() const {
  spec.validate();
  if (x_dim < 1 || state_dim < 1 || emb_dim < 2 || emb_dim % 2 != 0)
    throw std::invalid_argument("denoiser dims invalid");
  if (spec.input_dim() != x_dim + state_dim + emb_dim || spec.output_dim() != x_dim)
    throw std::invalid_argument("denoiser spec disagrees with its dims");
}

Vec sinusoidal_embedding(int g, int dim) {
  if (dim < 2 || dim % 2 != 0) throw std::invalid_argument("embedding dim must be even");
  Vec e(dim);
  for (int i = 0; i < dim / 2; ++i) {
    const double freq = std::pow(10000.0, -2.0 * i / dim);
    e(2 * i) = std::sin(g * freq);
    e(2 * i + 1) = std::cos(g * freq);
  }
  return e;
}

Vec forward_sample(const Vec& x0, int g, const DiffusionSchedule& sch, const Vec& eps) {
  if (g < 1 || g > sch.g_steps) throw std::invalid_argument("forward_sample: g out of range");
  if (eps.size() != x0.size()) throw std::invalid_argument("forward_sample: eps size mismatch");
  const double ah = sch.alpha_hat(g - 1);
  return std::sqrt(ah) * x0 + std::sqrt(1.0 - ah) * eps;
}

Vec forward_sample(const Vec& x0, int g, const DiffusionSchedule& sch, Rng& rng) {
  Vec eps(x0.size());
  for (int i = 0; i < eps.size(); ++i) eps(i) = rng.normal();
  return forward_sample(x0, g, sch, eps);
}

static Mat chain_input(const Denoiser& dn, const Mat& x, const Mat& states, int g) {
  if (x.cols() != dn.x_dim || states.cols() != dn.state_dim || x.rows() != states.rows())
    throw std::invalid_argument("denoiser input dims mismatch");
  Mat in(x.rows(), dn.spec.input_dim());
  in.leftCols(dn.x_dim) = x;
  in.middleCols(dn.x_dim, dn.state_dim) = states;
  in.rightCols(dn.emb_dim) = sinusoidal_embedding(g, dn.emb_dim).transpose().replicate(x.rows(), 1);
  return in;
}

Mat denoiser_eval(const Denoiser& dn, const Vec& params, const Mat& x, const Mat& states,
                  int g) {
  return mlp_forward(dn.spec, params, chain_input(dn, x, states, g));
}

static double noise_sigma(const DiffusionSchedule& sch, int g, ReverseNoiseScale ns) {
  const double bt = sch.beta_tilde(g - 1);
  return ns == ReverseNoiseScale::Sqrt ? std::sqrt(bt) : bt;
}

Mat reverse_step(const Mat& x_g, int g, const Mat& states, const DiffusionSchedule& sch,
                 const Denoiser& dn, const Vec& params, const Mat& noise,
                 ReverseNoiseScale ns) {
  if (g < 1 || g > sch.g_steps) throw std::invalid_argument("reverse_step: g out of range");
  const double beta = sch.beta(g - 1);
  const double ah = sch.alpha_hat(g - 1);
  const double inv_sqrt_alpha = 1.0 / std::sqrt(sch.alpha(g - 1));
  const Mat eps = denoiser_eval(dn, params, x_g, states, g).array().tanh().matrix();
  Mat out = inv_sqrt_alpha * (x_g - (beta / std::sqrt(1.0 - ah)) * eps);
  if (g > 1) out += noise_sigma(sch, g, ns) * noise;
  return out;
}

Vec sample_action(const Vec& state, const DiffusionSchedule& sch, const Denoiser& dn,
                  const Vec& params, Rng& rng, ReverseNoiseScale ns) {
  Mat x(1, dn.x_dim);
  for (int i = 0; i < dn.x_dim; ++i) x(0, i) = rng.normal();
  const Mat s = state.transpose();
  for (int g = sch.g_steps; g >= 1; --g) {
    Mat noise = Mat::Zero(1, dn.x_dim);
    if (g > 1)
      for (int i = 0; i < dn.x_dim; ++i) noise(0, i) = rng.normal();
    x = reverse_step(x, g, s, sch, dn, params, noise, ns);
  }
  return x.array().tanh().matrix().row(0).transpose();
}

Vec perturb(const Vec& a_tilde, double sigma_hat, double b, Rng& rng) {
  Vec out(a_tilde.size());
  for (int i = 0; i < a_tilde.size(); ++i) {
    double n = sigma_hat > 0.0 ? sigma_hat * rng.normal() : 0.0;
    n = std::min(std::max(n, -b), b);
    out(i) = std::min(std::max(a_tilde(i) + n, -1.0), 1.0);
  }
  return out;
}

ChainNoises ChainNoises::draw(int batch, int x_dim, int g_steps, Rng& rng) {
  ChainNoises cn;
  cn.x_g = Mat(batch, x_dim);
  for (int i = 0; i < cn.x_g.size(); ++i) cn.x_g.data()[i] = rng.normal();
  for (int g = 2; g <= g_steps; ++g) {
    Mat m(batch, x_dim);
    for (int i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    cn.steps.push_back(std::move(m));
  }
  return cn;
}

Tape::Var chain_on_tape(Tape& t, const DiffusionSchedule& sch, const Denoiser& dn,
                        ParamVector& params, const Mat& states, const ChainNoises& noises,
                        ReverseNoiseScale ns, bool frozen) {
  dn.validate();
  if (static_cast<int>(noises.steps.size()) != sch.g_steps - 1)
    throw std::invalid_argument("chain_on_tape: noise count disagrees with the schedule");
  const int batch = static_cast<int>(states.rows());
  const Tape::Var s = t.constant(states);
  Tape::Var x = t.constant(noises.x_g);
  for (int g = sch.g_steps; g >= 1; --g) {
    const Mat emb =
        sinusoidal_embedding(g, dn.emb_dim).transpose().replicate(batch, 1);
    const Tape::Var in = t.concat_cols({x, s, t.constant(emb)});
    const Tape::Var eps = t.tanh_(t.mlp(dn.spec, params, in, frozen));
    const double beta = sch.beta(g - 1);
    const double ah = sch.alpha_hat(g - 1);
    const double inv_sqrt_alpha = 1.0 / std::sqrt(sch.alpha(g - 1));
    Tape::Var mean = t.scale(t.add_scaled(x, eps, -beta / std::sqrt(1.0 - ah)), inv_sqrt_alpha);
    if (g > 1)
      mean = t.add_scaled(mean, t.constant(noises.steps[g - 2]), noise_sigma(sch, g, ns));
    x = mean;
  }
  return t.tanh_(x);
}

Mat chain_eval(const DiffusionSchedule& sch, const Denoiser& dn, const Vec& params,
               const Mat& states, const ChainNoises& noises, ReverseNoiseScale ns) {
  if (static_cast<int>(noises.steps.size()) != sch.g_steps - 1)
    throw std::invalid_argument("chain_eval: noise count disagrees with the schedule");
  Mat x = noises.x_g;
  for (int g = sch.g_steps; g >= 1; --g) {
    const Mat noise = g > 1 ? noises.steps[g - 2] : Mat();
    x = reverse_step(x, g, states, sch, dn, params, noise, ns);
  }
  return x.array().tanh().matrix();
}

}  // namespace lisac
