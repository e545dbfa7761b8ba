#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lisac/linalg.hpp"
#include "lisac/rng.hpp"

namespace lisac {

enum class Act { Identity, Relu, Tanh };

const char* act_name(Act a);
Act act_from_name(const std::string& name);

// Fully connected network shape: widths = [in, h1, ..., out], one activation
// per affine layer. Parameters pack layer by layer, weights (in x out,
// column-major) then bias.
struct MlpSpec {
  std::vector<int> widths;
  std::vector<Act> acts;

  int input_dim() const { return widths.front(); }
  int output_dim() const { return widths.back(); }
  int layer_count() const { return static_cast<int>(widths.size()) - 1; }
  int param_count() const;
  void validate() const;

  // in -> hidden x layers (relu) -> out with the given head activation
  static MlpSpec dense(int in, int hidden, int hidden_layers, int out, Act head);
};

// Parameter values with a paired gradient accumulator.
struct ParamVector {
  Vec value;
  Vec grad;

  ParamVector() = default;
  explicit ParamVector(int n) : value(Vec::Zero(n)), grad(Vec::Zero(n)) {}
  int size() const { return static_cast<int>(value.size()); }
  void zero_grad() { grad.setZero(); }
};

// Uniform +-1/sqrt(fan_in) init; zero_final zeroes the last affine layer so a
// fresh policy head starts at its mean behaviour.
void init_mlp(const MlpSpec& spec, ParamVector& params, Rng& rng, bool zero_final = false);

// Batched forward pass; rows are samples.
Mat mlp_forward(const MlpSpec& spec, const Vec& params, const Mat& input);

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Vec m, v;
  std::int64_t step = 0;

  AdamState() = default;
  explicit AdamState(int n) : m(Vec::Zero(n)), v(Vec::Zero(n)) {}
};

// Bias-corrected moment update; consumes params.grad, leaves it in place.
void adam_update(ParamVector& params, AdamState& st, const AdamConfig& cfg);

// Scales grad down to the given global L2 norm if it exceeds it; returns the
// pre-clip norm.
double clip_grad_norm(Vec& grad, double max_norm);

// target <- eps * main + (1 - eps) * target
void soft_update(ParamVector& target, const ParamVector& main, double eps);

// One network's checkpoint record: shape plus flat parameters.
nlohmann::json net_to_json(const MlpSpec& spec, const Vec& value);
void net_from_json(const nlohmann::json& j, MlpSpec& spec, Vec& value);

}  // namespace lisac
