#pragma once

#include <functional>
#include <vector>

#include "lisac/linalg.hpp"
#include "lisac/nn.hpp"

namespace lisac {

// Reverse-mode autodiff over matrix-valued expressions. Nodes hold batch
// matrices (rows = samples); backward() walks the recording in reverse and
// accumulates parameter gradients straight into the ParamVector that supplied
// the leaf. One tape records one loss evaluation.
class Tape {
 public:
  struct Var {
    int i = -1;
  };

  const Mat& value(Var v) const { return nodes_[v.i].val; }

  Var constant(Mat m);
  // Weight block (rows x cols, column-major) or bias row read from a flat
  // parameter vector at the given offset. frozen leaves contribute no grads.
  Var param_block(ParamVector& p, int offset, int rows, int cols, bool frozen = false);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var add_rowvec(Var a, Var row);  // broadcast a 1 x n row over the batch
  Var scale(Var a, double c);
  Var add_scaled(Var a, Var b, double c);  // a + c * b
  Var hadamard(Var a, Var b);
  Var relu(Var a);
  Var tanh_(Var a);
  Var square(Var a);
  Var concat_cols(const std::vector<Var>& parts);
  Var mean_all(Var a);  // 1 x 1

  // Applies an MLP; parameter leaves are created on the fly so repeated
  // applications of the same network accumulate into one gradient.
  Var mlp(const MlpSpec& spec, ParamVector& params, Var input, bool frozen = false);

  // Seeds d(out)/d(out) = 1 (out must be 1 x 1) and back-propagates.
  void backward(Var out);

 private:
  struct Node {
    Mat val;
    Mat grad;
    std::function<void(Tape&, Node&)> back;
  };

  Var push(Mat val, std::function<void(Tape&, Node&)> back);
  Node& at(Var v) { return nodes_[v.i]; }

  std::vector<Node> nodes_;
};

}  // namespace lisac
