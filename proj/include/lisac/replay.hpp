#pragma once

#include <vector>

#include "lisac/linalg.hpp"
#include "lisac/rng.hpp"

namespace lisac {

struct Transition {
  Vec s;
  Vec a;
  double r = 0.0;
  Vec s2;
  bool done = false;
};

struct RperConfig {
  int b_max = 100000;   // capacity
  int f_min = 3000;     // recency-window floor
  double rho = 0.996;   // window shrink factor
  double beta1 = 0.6;   // priority exponent
  double eps_p = 1e-3;  // priority floor

  void validate() const;
};

// Fixed-capacity sum tree over nonnegative leaf weights. Supports point
// updates, range sums, and prefix-mass search restricted to a leaf range,
// all O(log n) (range-restricted search is O(log^2 n)).
class SumTree {
 public:
  explicit SumTree(int capacity);

  int capacity() const { return cap_; }
  void set(int i, double v);
  double get(int i) const;
  double total() const;
  double range_sum(int lo, int hi) const;  // [lo, hi)
  // Smallest leaf index in [lo, hi) whose cumulative weight within the range
  // exceeds mass. mass must lie in [0, range_sum(lo, hi)).
  int find_prefix_in_range(int lo, int hi, double mass) const;

 private:
  int cap_, base_;
  std::vector<double> tree_;
};

// Ring buffer with priority sampling restricted to a recency window.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(RperConfig cfg);

  void push(Transition tr);  // enters at the current max priority
  int size() const { return count_; }
  int capacity() const { return cfg_.b_max; }
  const Transition& at(int slot) const { return store_[slot]; }

  // max(b_max * rho^(u * 1000 / u_total), f_min), floored, capped at size().
  int ere_window(int u, int u_total) const;

  struct Batch {
    std::vector<int> slots;
    Vec weights;  // importance weights, batch-max normalized by default
  };

  // Stratified priority sampling over the window most-recent entries.
  // beta2 is the importance exponent; normalize divides by the batch max.
  Batch sample(int b, int window, double beta2, Rng& rng, bool normalize = true) const;

  // Restricted-uniform sampling over the same window, unit weights.
  Batch sample_uniform(int b, int window, Rng& rng) const;

  void update_priorities(const std::vector<int>& slots, const std::vector<double>& td_errors);

  double priority(int slot) const { return prio_[slot]; }
  double tree_total() const { return tree_.total(); }
  double tree_leaf(int slot) const { return tree_.get(slot); }

 private:
  int window_start(int window) const;  // oldest slot of the recency window

  RperConfig cfg_;
  std::vector<Transition> store_;
  std::vector<double> prio_;
  SumTree tree_;  // holds prio^beta1
  int head_ = 0;  // next write slot
  int count_ = 0;
  double max_prio_ = 1.0;
};

}  // namespace lisac
