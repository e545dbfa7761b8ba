#include "lisac/tape.hpp"

#include <stdexcept>
#include <utility>

namespace lisac {

Tape::Var Tape::push(Mat val, std::function<void(Tape&, Node&)> back) {
  Node n;
  n.val = std::move(val);
  n.grad = Mat::Zero(n.val.rows(), n.val.cols());
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tape::Var Tape::constant(Mat m) { return push(std::move(m), nullptr); }

Tape::Var Tape::param_block(ParamVector& p, int offset, int rows, int cols, bool frozen) {
  if (offset < 0 || offset + rows * cols > p.size())
    throw std::invalid_argument("param_block out of range");
  Mat val = Eigen::Map<const Mat>(p.value.data() + offset, rows, cols);
  if (frozen) return constant(std::move(val));
  Vec* grad = &p.grad;
  return push(std::move(val), [grad, offset, rows, cols](Tape&, Node& n) {
    Eigen::Map<Mat>(grad->data() + offset, rows, cols) += n.grad;
  });
}

Tape::Var Tape::matmul(Var a, Var b) {
  Mat val = at(a).val * at(b).val;
  return push(std::move(val), [a, b](Tape& t, Node& n) {
    t.at(a).grad += n.grad * t.at(b).val.transpose();
    t.at(b).grad += t.at(a).val.transpose() * n.grad;
  });
}

Tape::Var Tape::add(Var a, Var b) {
  Mat val = at(a).val + at(b).val;
  return push(std::move(val), [a, b](Tape& t, Node& n) {
    t.at(a).grad += n.grad;
    t.at(b).grad += n.grad;
  });
}

Tape::Var Tape::sub(Var a, Var b) {
  Mat val = at(a).val - at(b).val;
  return push(std::move(val), [a, b](Tape& t, Node& n) {
    t.at(a).grad += n.grad;
    t.at(b).grad -= n.grad;
  });
}

Tape::Var Tape::add_rowvec(Var a, Var row) {
  if (at(row).val.rows() != 1) throw std::invalid_argument("add_rowvec wants a 1 x n row");
  Mat val = at(a).val.rowwise() + at(row).val.row(0);
  return push(std::move(val), [a, row](Tape& t, Node& n) {
    t.at(a).grad += n.grad;
    t.at(row).grad += n.grad.colwise().sum();
  });
}

Tape::Var Tape::scale(Var a, double c) {
  Mat val = c * at(a).val;
  return push(std::move(val), [a, c](Tape& t, Node& n) { t.at(a).grad += c * n.grad; });
}

Tape::Var Tape::add_scaled(Var a, Var b, double c) {
  Mat val = at(a).val + c * at(b).val;
  return push(std::move(val), [a, b, c](Tape& t, Node& n) {
    t.at(a).grad += n.grad;
    t.at(b).grad += c * n.grad;
  });
}

Tape::Var Tape::hadamard(Var a, Var b) {
  Mat val = at(a).val.cwiseProduct(at(b).val);
  return push(std::move(val), [a, b](Tape& t, Node& n) {
    t.at(a).grad += n.grad.cwiseProduct(t.at(b).val);
    t.at(b).grad += n.grad.cwiseProduct(t.at(a).val);
  });
}

Tape::Var Tape::relu(Var a) {
  Mat val = at(a).val.cwiseMax(0.0);
  return push(std::move(val), [a](Tape& t, Node& n) {
    t.at(a).grad += n.grad.cwiseProduct(
        (t.at(a).val.array() > 0.0).cast<double>().matrix());
  });
}

Tape::Var Tape::tanh_(Var a) {
  Mat val = at(a).val.array().tanh().matrix();
  return push(std::move(val), [a](Tape& t, Node& n) {
    t.at(a).grad += n.grad.cwiseProduct((1.0 - n.val.array().square()).matrix());
  });
}

Tape::Var Tape::square(Var a) {
  Mat val = at(a).val.array().square().matrix();
  return push(std::move(val), [a](Tape& t, Node& n) {
    t.at(a).grad += 2.0 * n.grad.cwiseProduct(t.at(a).val);
  });
}

Tape::Var Tape::concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols of nothing");
  const auto rows = at(parts[0]).val.rows();
  int cols = 0;
  for (Var p : parts) {
    if (at(p).val.rows() != rows) throw std::invalid_argument("concat_cols row mismatch");
    cols += static_cast<int>(at(p).val.cols());
  }
  Mat val(rows, cols);
  int off = 0;
  for (Var p : parts) {
    const int w = static_cast<int>(at(p).val.cols());
    val.middleCols(off, w) = at(p).val;
    off += w;
  }
  std::vector<Var> ps = parts;
  return push(std::move(val), [ps](Tape& t, Node& n) {
    int off = 0;
    for (Var p : ps) {
      const int w = static_cast<int>(t.at(p).val.cols());
      t.at(p).grad += n.grad.middleCols(off, w);
      off += w;
    }
  });
}

Tape::Var Tape::mean_all(Var a) {
  const double denom = static_cast<double>(at(a).val.size());
  Mat val(1, 1);
  val(0, 0) = at(a).val.sum() / denom;
  return push(std::move(val), [a, denom](Tape& t, Node& n) {
    t.at(a).grad.array() += n.grad(0, 0) / denom;
  });
}

Tape::Var Tape::mlp(const MlpSpec& spec, ParamVector& params, Var input, bool frozen) {
  if (params.size() != spec.param_count())
    throw std::invalid_argument("tape mlp: parameter count mismatch");
  Var x = input;
  int off = 0;
  for (int k = 0; k < spec.layer_count(); ++k) {
    const int in = spec.widths[k], out = spec.widths[k + 1];
    const Var w = param_block(params, off, in, out, frozen);
    const Var b = param_block(params, off + in * out, 1, out, frozen);
    x = add_rowvec(matmul(x, w), b);
    switch (spec.acts[k]) {
      case Act::Identity: break;
      case Act::Relu: x = relu(x); break;
      case Act::Tanh: x = tanh_(x); break;
    }
    off += (in + 1) * out;
  }
  return x;
}

void Tape::backward(Var out) {
  if (at(out).val.size() != 1) throw std::invalid_argument("backward wants a scalar node");
  at(out).grad(0, 0) = 1.0;
  for (int i = out.i; i >= 0; --i)
    if (nodes_[i].back) nodes_[i].back(*this, nodes_[i]);
}

}  // namespace lisac
