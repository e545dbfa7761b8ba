#include "lisac/replay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lisac {

void RperConfig::validate() const {
  if (b_max < 1) throw std::invalid_argument("replay: b_max must be positive");
  if (f_min < 1 || f_min > b_max) throw std::invalid_argument("replay: f_min out of range");
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("replay: rho out of range");
  if (!(beta1 >= 0.0)) throw std::invalid_argument("replay: beta1 must be nonnegative");
  if (!(eps_p > 0.0)) throw std::invalid_argument("replay: eps_p must be positive");
}

SumTree::SumTree(int capacity) : cap_(capacity) {
  if (capacity < 1) throw std::invalid_argument("sum tree: capacity must be positive");
  base_ = 1;
  while (base_ < cap_) base_ *= 2;
  tree_.assign(2 * base_, 0.0);
}

void SumTree::set(int i, double v) {
  if (i < 0 || i >= cap_) throw std::out_of_range("sum tree: leaf index");
  if (!(v >= 0.0)) throw std::invalid_argument("sum tree: weights must be nonnegative");
  int node = base_ + i;
  tree_[node] = v;
  for (node /= 2; node >= 1; node /= 2) {
    tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
  }
}

double SumTree::get(int i) const {
  if (i < 0 || i >= cap_) throw std::out_of_range("sum tree: leaf index");
  return tree_[base_ + i];
}

double SumTree::total() const { return tree_[1]; }

double SumTree::range_sum(int lo, int hi) const {
  lo = std::max(lo, 0);
  hi = std::min(hi, cap_);
  if (lo >= hi) return 0.0;
  double sum = 0.0;
  int l = base_ + lo, r = base_ + hi;
  while (l < r) {
    if (l & 1) sum += tree_[l++];
    if (r & 1) sum += tree_[--r];
    l /= 2;
    r /= 2;
  }
  return sum;
}

int SumTree::find_prefix_in_range(int lo, int hi, double mass) const {
  if (lo < 0 || hi > cap_ || lo >= hi) throw std::out_of_range("sum tree: search range");
  // Smallest j with range_sum(lo, j+1) > mass; binary search keeps the
  // restricted search simple at O(log^2 n).
  int a = lo, b = hi - 1;
  while (a < b) {
    int mid = a + (b - a) / 2;
    if (range_sum(lo, mid + 1) > mass) {
      b = mid;
    } else {
      a = mid + 1;
    }
  }
  return a;
}

ReplayBuffer::ReplayBuffer(RperConfig cfg) : cfg_(cfg), tree_(cfg.b_max) {
  cfg_.validate();
  store_.resize(cfg_.b_max);
  prio_.assign(cfg_.b_max, 0.0);
}

void ReplayBuffer::push(Transition tr) {
  int slot = head_;
  store_[slot] = std::move(tr);
  prio_[slot] = max_prio_;
  tree_.set(slot, std::pow(max_prio_, cfg_.beta1));
  head_ = (head_ + 1) % cfg_.b_max;
  count_ = std::min(count_ + 1, cfg_.b_max);
}

int ReplayBuffer::ere_window(int u, int u_total) const {
  if (u_total < 1) throw std::invalid_argument("replay: u_total must be positive");
  double shrunk = cfg_.b_max * std::pow(cfg_.rho, static_cast<double>(u) * 1000.0 / u_total);
  int window = std::max(static_cast<int>(shrunk), cfg_.f_min);
  return std::min(window, count_);
}

int ReplayBuffer::window_start(int window) const {
  return ((head_ - window) % cfg_.b_max + cfg_.b_max) % cfg_.b_max;
}

ReplayBuffer::Batch ReplayBuffer::sample(int b, int window, double beta2, Rng& rng,
                                         bool normalize) const {
  if (b < 1) throw std::invalid_argument("replay: batch size must be positive");
  if (window < 1 || window > count_) throw std::invalid_argument("replay: window out of range");
  int ws = window_start(window);
  bool wraps = ws + window > cfg_.b_max;
  int first_len = wraps ? cfg_.b_max - ws : window;
  double m1 = tree_.range_sum(ws, ws + first_len);
  double m2 = wraps ? tree_.range_sum(0, window - first_len) : 0.0;
  double pm = m1 + m2;
  if (!(pm > 0.0)) throw std::logic_error("replay: window has zero priority mass");

  Batch out;
  out.slots.resize(b);
  out.weights.resize(b);
  for (int k = 0; k < b; ++k) {
    double mass = pm * (k + rng.uniform()) / b;
    int slot;
    if (mass < m1) {
      slot = tree_.find_prefix_in_range(ws, ws + first_len, mass);
    } else {
      slot = tree_.find_prefix_in_range(0, window - first_len, std::min(mass - m1, m2 * (1.0 - 1e-15)));
    }
    out.slots[k] = slot;
    double p = tree_.get(slot) / pm;
    out.weights[k] = std::pow(1.0 / (cfg_.b_max * p), beta2);
  }
  if (normalize) {
    double wmax = out.weights.maxCoeff();
    if (wmax > 0.0) out.weights /= wmax;
  }
  return out;
}

ReplayBuffer::Batch ReplayBuffer::sample_uniform(int b, int window, Rng& rng) const {
  if (b < 1) throw std::invalid_argument("replay: batch size must be positive");
  if (window < 1 || window > count_) throw std::invalid_argument("replay: window out of range");
  int ws = window_start(window);
  Batch out;
  out.slots.resize(b);
  out.weights = Vec::Ones(b);
  for (int k = 0; k < b; ++k) {
    int off = static_cast<int>(rng.index(static_cast<std::uint64_t>(window)));
    out.slots[k] = (ws + off) % cfg_.b_max;
  }
  return out;
}

void ReplayBuffer::update_priorities(const std::vector<int>& slots,
                                     const std::vector<double>& td_errors) {
  if (slots.size() != td_errors.size()) {
    throw std::invalid_argument("replay: slots and td_errors must align");
  }
  for (std::size_t k = 0; k < slots.size(); ++k) {
    int slot = slots[k];
    if (slot < 0 || slot >= count_) throw std::out_of_range("replay: slot index");
    double p = std::abs(td_errors[k]) + cfg_.eps_p;
    prio_[slot] = p;
    tree_.set(slot, std::pow(p, cfg_.beta1));
    max_prio_ = std::max(max_prio_, p);
  }
}

}  // namespace lisac
