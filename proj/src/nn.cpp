#include "lisac/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace lisac {

const char* act_name(Act a) {
  switch (a) {
    case Act::Identity: return "identity";
    case Act::Relu: return "relu";
    case Act::Tanh: return "tanh";
  }
  throw std::logic_error("unknown activation");
}

Act act_from_name(const std::string& name) {
  if (name == "identity") return Act::Identity;
  if (name == "relu") return Act::Relu;
  if (name == "tanh") return Act::Tanh;
  throw std::invalid_argument("unknown activation name: " + name);
}

int MlpSpec::param_count() const {
  int n = 0;
  for (int k = 0; k < layer_count(); ++k) n += (widths[k] + 1) * widths[k + 1];
  return n;
}

void MlpSpec::validate() const {
  if (widths.size() < 2) throw std::invalid_argument("mlp needs at least one layer");
  if (acts.size() != widths.size() - 1)
    throw std::invalid_argument("mlp needs one activation per layer");
  for (int w : widths)
    if (w < 1) throw std::invalid_argument("mlp layer width must be positive");
}

MlpSpec MlpSpec::dense(int in, int hidden, int hidden_layers, int out, Act head) {
  MlpSpec spec;
  spec.widths.push_back(in);
  for (int i = 0; i < hidden_layers; ++i) {
    spec.widths.push_back(hidden);
    spec.acts.push_back(Act::Relu);
  }
  spec.widths.push_back(out);
  spec.acts.push_back(head);
  spec.validate();
  return spec;
}

void init_mlp(const MlpSpec& spec, ParamVector& params, Rng& rng, bool zero_final) {
  spec.validate();
  params = ParamVector(spec.param_count());
  int off = 0;
  for (int k = 0; k < spec.layer_count(); ++k) {
    const int in = spec.widths[k], out = spec.widths[k + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    const bool zero = zero_final && k == spec.layer_count() - 1;
    for (int i = 0; i < (in + 1) * out; ++i)
      params.value(off + i) = zero ? 0.0 : rng.uniform(-bound, bound);
    off += (in + 1) * out;
  }
}

static Mat apply_act(Act a, Mat x) {
  switch (a) {
    case Act::Identity: return x;
    case Act::Relu: return x.cwiseMax(0.0);
    case Act::Tanh: return x.array().tanh().matrix();
  }
  throw std::logic_error("unknown activation");
}

Mat mlp_forward(const MlpSpec& spec, const Vec& params, const Mat& input) {
  if (params.size() != spec.param_count())
    throw std::invalid_argument("mlp_forward: parameter count mismatch");
  if (input.cols() != spec.input_dim())
    throw std::invalid_argument("mlp_forward: input width mismatch");
  Mat x = input;
  int off = 0;
  for (int k = 0; k < spec.layer_count(); ++k) {
    const int in = spec.widths[k], out = spec.widths[k + 1];
    const Eigen::Map<const Mat> w(params.data() + off, in, out);
    const Eigen::Map<const Vec> b(params.data() + off + in * out, out);
    x = apply_act(spec.acts[k], (x * w).rowwise() + b.transpose());
    off += (in + 1) * out;
  }
  return x;
}

void adam_update(ParamVector& params, AdamState& st, const AdamConfig& cfg) {
  if (st.m.size() == 0) st = AdamState(params.size());
  if (st.m.size() != params.value.size())
    throw std::invalid_argument("adam state size mismatch");
  st.step += 1;
  st.m = cfg.beta1 * st.m + (1.0 - cfg.beta1) * params.grad;
  st.v = cfg.beta2 * st.v + (1.0 - cfg.beta2) * params.grad.array().square().matrix();
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.step));
  params.value.array() -=
      cfg.lr * (st.m.array() / bc1) / ((st.v.array() / bc2).sqrt() + cfg.eps);
}

double clip_grad_norm(Vec& grad, double max_norm) {
  const double norm = grad.norm();
  if (norm > max_norm && norm > 0.0) grad *= max_norm / norm;
  return norm;
}

void soft_update(ParamVector& target, const ParamVector& main, double eps) {
  if (target.value.size() != main.value.size())
    throw std::invalid_argument("soft_update: size mismatch");
  if (eps == 1.0) {
    target.value = main.value;
    return;
  }
  // Incremental form: an exact no-op when target already equals main, so an
  // unchanging main never perturbs its target through rounding.
  target.value += eps * (main.value - target.value);
}

nlohmann::json net_to_json(const MlpSpec& spec, const Vec& value) {
  nlohmann::json j;
  j["widths"] = spec.widths;
  std::vector<std::string> acts;
  for (Act a : spec.acts) acts.emplace_back(act_name(a));
  j["acts"] = acts;
  std::vector<double> params(value.data(), value.data() + value.size());
  j["params"] = params;
  return j;
}

void net_from_json(const nlohmann::json& j, MlpSpec& spec, Vec& value) {
  spec.widths = j.at("widths").get<std::vector<int>>();
  spec.acts.clear();
  for (const auto& name : j.at("acts")) spec.acts.push_back(act_from_name(name));
  spec.validate();
  const auto params = j.at("params").get<std::vector<double>>();
  if (static_cast<int>(params.size()) != spec.param_count())
    throw std::invalid_argument("checkpoint parameter count mismatch");
  value = Eigen::Map<const Vec>(params.data(), params.size());
}

}  // namespace lisac
