#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dyadic/tree.hpp"

namespace dyadic {

/// One real per non-leaf interval, default 0. Node-id indexed internally.
class IntervalSequence {
 public:
  explicit IntervalSequence(DyadicTree tree) : tree_(tree), vals_(tree.nonleaf_count(), 0.0) {}

  IntervalSequence(DyadicTree tree, std::vector<double> values) : tree_(tree), vals_(std::move(values)) {
    if (vals_.size() != tree_.nonleaf_count())
      throw InvariantViolation("sequence must cover exactly the non-leaf intervals");
    for (double v : vals_)
      if (!std::isfinite(v)) throw InvariantViolation("non-finite sequence entry");
  }

  const DyadicTree& tree() const noexcept { return tree_; }

  double at(DyadicIndex I) const { return vals_[checked_id(I)]; }
  void set(DyadicIndex I, double v) {
    if (!std::isfinite(v)) throw InvariantViolation("non-finite sequence entry");
    vals_[checked_id(I)] = v;
  }

  std::span<const double> values() const noexcept { return vals_; }

 private:
  std::size_t checked_id(DyadicIndex I) const {
    if (tree_.is_leaf(I)) throw LeafInterval("sequence has no entry at leaf " + to_string(I));
    return tree_.node_id(I);
  }

  DyadicTree tree_;
  std::vector<double> vals_;
};

/// Non-negative interval sequence (lambda_I).
class CarlesonSequence : public IntervalSequence {
 public:
  explicit CarlesonSequence(DyadicTree tree) : IntervalSequence(tree) {}

  CarlesonSequence(DyadicTree tree, std::vector<double> values)
      : IntervalSequence(tree, std::move(values)) {
    for (double v : this->values())
      if (v < 0.0) throw InvariantViolation("Carleson entries must be non-negative");
  }

  void set(DyadicIndex I, double v) {
    if (v < 0.0) throw InvariantViolation("Carleson entries must be non-negative");
    IntervalSequence::set(I, v);
  }
};

/// sigma_I = +/-1 per non-leaf interval, default +1.
class SignPattern {
 public:
  explicit SignPattern(DyadicTree tree, int default_sign = +1)
      : tree_(tree), signs_(tree.nonleaf_count(), check_sign(default_sign)) {}

  const DyadicTree& tree() const noexcept { return tree_; }

  int at(DyadicIndex I) const { return signs_[checked_id(I)]; }
  void set(DyadicIndex I, int sign) { signs_[checked_id(I)] = check_sign(sign); }
  void flip(DyadicIndex I) {
    auto& s = signs_[checked_id(I)];
    s = static_cast<std::int8_t>(-s);
  }

  SignPattern negated() const {
    SignPattern out = *this;
    for (auto& s : out.signs_) s = static_cast<std::int8_t>(-s);
    return out;
  }

  std::span<const std::int8_t> values() const noexcept { return signs_; }

  friend bool operator==(const SignPattern& a, const SignPattern& b) {
    return a.tree_ == b.tree_ && a.signs_ == b.signs_;
  }

 private:
  static std::int8_t check_sign(int s) {
    if (s != 1 && s != -1) throw InvariantViolation("sign entries must be +1 or -1");
    return static_cast<std::int8_t>(s);
  }

  std::size_t checked_id(DyadicIndex I) const {
    if (tree_.is_leaf(I)) throw LeafInterval("sign pattern has no entry at leaf " + to_string(I));
    return tree_.node_id(I);
  }

  DyadicTree tree_;
  std::vector<std::int8_t> signs_;
};

}  // namespace dyadic
