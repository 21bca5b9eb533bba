#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "dyadic/tree.hpp"

namespace dyadic {

/// Per-node integrals of a leafwise density: out[id(I)] = sum over leaves of I of value * 2^-N.
/// Built bottom-up, so the parent entry is exactly the sum of its children's entries.
inline std::vector<double> interval_integrals(const DyadicTree& tree, std::span<const double> leaf_values) {
  std::vector<double> out(tree.node_count());
  const double cell = length({tree.depth(), 0});
  const std::size_t first_leaf_id = tree.nonleaf_count();
  for (std::size_t k = 0; k < tree.leaf_count(); ++k) out[first_leaf_id + k] = leaf_values[k] * cell;
  for (std::size_t id = first_leaf_id; id-- > 0;) out[id] = out[2 * id + 1] + out[2 * id + 2];
  return out;
}

/// Piecewise-constant function on the leaf cells of a tree.
class StepFunction {
 public:
  StepFunction(DyadicTree tree, std::vector<double> leaf_values)
      : tree_(tree), leaf_(std::move(leaf_values)) {
    if (leaf_.size() != tree_.leaf_count())
      throw InvariantViolation("leaf array size " + std::to_string(leaf_.size()) +
                               " does not match leaf count " + std::to_string(tree_.leaf_count()));
    for (double v : leaf_)
      if (!std::isfinite(v)) throw InvariantViolation("non-finite leaf value");
    integral_ = interval_integrals(tree_, leaf_);
  }

  static StepFunction constant(const DyadicTree& tree, double c) {
    return StepFunction(tree, std::vector<double>(tree.leaf_count(), c));
  }

  const DyadicTree& tree() const noexcept { return tree_; }
  std::span<const double> leaf_values() const noexcept { return leaf_; }
  double at_leaf(std::size_t k) const { return leaf_.at(k); }

  /// Integral of f over I (Lebesgue).
  double integral(DyadicIndex I) const { return integral_[tree_.node_id(I)]; }

  /// Plain average of f over I.
  double average(DyadicIndex I) const { return integral(I) / length(I); }

  double norm_l2(std::span<const double> measure_leaf_densities) const {
    const double cell = length({tree_.depth(), 0});
    double s = 0.0;
    for (std::size_t k = 0; k < leaf_.size(); ++k)
      s += leaf_[k] * leaf_[k] * measure_leaf_densities[k] * cell;
    return std::sqrt(s);
  }

  double norm_l2() const {
    const double cell = length({tree_.depth(), 0});
    double s = 0.0;
    for (double v : leaf_) s += v * v * cell;
    return std::sqrt(s);
  }

 private:
  DyadicTree tree_;
  std::vector<double> leaf_;
  std::vector<double> integral_;
};

/// Strictly positive leafwise density with cached interval masses.
class StepWeight {
 public:
  StepWeight(DyadicTree tree, std::vector<double> leaf_densities)
      : tree_(tree), leaf_(std::move(leaf_densities)) {
    if (leaf_.size() != tree_.leaf_count())
      throw InvariantViolation("leaf array size " + std::to_string(leaf_.size()) +
                               " does not match leaf count " + std::to_string(tree_.leaf_count()));
    for (double v : leaf_)
      if (!(v > 0.0) || !std::isfinite(v))
        throw InvariantViolation("weight leaf values must be strictly positive and finite");
    mass_ = interval_integrals(tree_, leaf_);
  }

  static StepWeight constant(const DyadicTree& tree, double c = 1.0) {
    return StepWeight(tree, std::vector<double>(tree.leaf_count(), c));
  }

  const DyadicTree& tree() const noexcept { return tree_; }
  std::span<const double> leaf_values() const noexcept { return leaf_; }
  double at_leaf(std::size_t k) const { return leaf_.at(k); }

  /// w(I), additive over children by construction.
  double mass(DyadicIndex I) const { return mass_[tree_.node_id(I)]; }
  double total_mass() const { return mass_[0]; }

  /// <w>_I = w(I)/|I|.
  double average(DyadicIndex I) const { return mass(I) / length(I); }

  StepFunction as_function() const { return StepFunction(tree_, leaf_); }

 private:
  DyadicTree tree_;
  std::vector<double> leaf_;
  std::vector<double> mass_;
};

/// <f>_I^w: w-average of f over I.
inline double weighted_average(const StepFunction& f, const StepWeight& w, DyadicIndex I) {
  const auto [first, last] = f.tree().leaf_span(I);
  double num = 0.0;
  for (std::size_t k = first; k < last; ++k) num += f.leaf_values()[k] * w.leaf_values()[k];
  const double cell = length({f.tree().depth(), 0});
  return num * cell / w.mass(I);
}

namespace detail {

/// Cached per-node integrals of f*w, for repeated w-averages along a tree sweep.
class WeightedAverages {
 public:
  WeightedAverages(const StepFunction& f, const StepWeight& w) : w_(&w) {
    std::vector<double> prod(f.tree().leaf_count());
    for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = f.leaf_values()[k] * w.leaf_values()[k];
    fw_ = interval_integrals(f.tree(), prod);
  }

  double integral_fw(DyadicIndex I) const { return fw_[w_->tree().node_id(I)]; }
  double operator()(DyadicIndex I) const { return integral_fw(I) / w_->mass(I); }

 private:
  const StepWeight* w_;
  std::vector<double> fw_;
};

}  // namespace detail

// Pointwise algebra. Products, reciprocals and real powers of weights stay weights.

inline StepWeight product(const StepWeight& a, const StepWeight& b) {
  std::vector<double> out(a.leaf_values().begin(), a.leaf_values().end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= b.leaf_values()[k];
  return StepWeight(a.tree(), std::move(out));
}

inline StepWeight reciprocal(const StepWeight& a) {
  std::vector<double> out(a.leaf_values().begin(), a.leaf_values().end());
  for (double& v : out) v = 1.0 / v;
  return StepWeight(a.tree(), std::move(out));
}

inline StepWeight power(const StepWeight& a, double exponent) {
  std::vector<double> out(a.leaf_values().begin(), a.leaf_values().end());
  for (double& v : out) v = std::pow(v, exponent);
  return StepWeight(a.tree(), std::move(out));
}

inline StepFunction product(const StepFunction& f, const StepWeight& w) {
  std::vector<double> out(f.leaf_values().begin(), f.leaf_values().end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= w.leaf_values()[k];
  return StepFunction(f.tree(), std::move(out));
}

inline StepFunction operator+(const StepFunction& f, const StepFunction& g) {
  std::vector<double> out(f.leaf_values().begin(), f.leaf_values().end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += g.leaf_values()[k];
  return StepFunction(f.tree(), std::move(out));
}

inline StepFunction operator-(const StepFunction& f, const StepFunction& g) {
  std::vector<double> out(f.leaf_values().begin(), f.leaf_values().end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= g.leaf_values()[k];
  return StepFunction(f.tree(), std::move(out));
}

inline StepFunction operator*(double c, const StepFunction& f) {
  std::vector<double> out(f.leaf_values().begin(), f.leaf_values().end());
  for (double& v : out) v *= c;
  return StepFunction(f.tree(), std::move(out));
}

/// Indicator of I as a StepFunction.
inline StepFunction indicator(const DyadicTree& tree, DyadicIndex I) {
  std::vector<double> out(tree.leaf_count(), 0.0);
  const auto [first, last] = tree.leaf_span(I);
  for (std::size_t k = first; k < last; ++k) out[k] = 1.0;
  return StepFunction(tree, std::move(out));
}

/// Split every leaf cell in two, keeping the density; plain averages are unchanged.
inline StepWeight refine(const StepWeight& w) {
  DyadicTree finer(w.tree().depth() + 1);
  std::vector<double> out(finer.leaf_count());
  for (std::size_t k = 0; k < w.leaf_values().size(); ++k) out[2 * k] = out[2 * k + 1] = w.leaf_values()[k];
  return StepWeight(finer, std::move(out));
}

inline StepFunction refine(const StepFunction& f) {
  DyadicTree finer(f.tree().depth() + 1);
  std::vector<double> out(finer.leaf_count());
  for (std::size_t k = 0; k < f.leaf_values().size(); ++k) out[2 * k] = out[2 * k + 1] = f.leaf_values()[k];
  return StepFunction(finer, std::move(out));
}

}  // namespace dyadic
