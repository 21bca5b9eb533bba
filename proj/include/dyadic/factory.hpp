#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dyadic/sequence.hpp"
#include "dyadic/step.hpp"

namespace dyadic {

/// Haar coefficients of a multiplicative product weight, with a margin that
/// keeps every factor 1 + b_I h_I away from zero: |b_I| <= (1 - slack) sqrt(|I|).
/// normalization records any mass divided out when the coefficients were read
/// off an existing weight.
class FkpCoefficients {
 public:
  FkpCoefficients(IntervalSequence values, double slack, double normalization = 1.0)
      : values_(std::move(values)), slack_(slack), normalization_(normalization) {
    if (!(slack_ > 0.0) || slack_ > 1.0)
      throw SlackViolation("slack must lie in (0, 1]");
    values_.tree().for_each_nonleaf([&](DyadicIndex I) {
      const double budget = (1.0 - slack_) * std::sqrt(length(I));
      if (std::abs(values_.at(I)) > budget * (1.0 + 1e-12) + 1e-300)
        throw SlackViolation("coefficient at " + to_string(I) + " exceeds the slack budget");
    });
  }

  const IntervalSequence& values() const noexcept { return values_; }
  double slack() const noexcept { return slack_; }
  double normalization() const noexcept { return normalization_; }

 private:
  IntervalSequence values_;
  double slack_;
  double normalization_;
};

/// Leafwise product of the factors 1 + b_J h_J over the ancestors of each
/// leaf. Every factor preserves total mass, so the result is a unit-mass
/// weight; positivity follows from the slack margin.
inline StepWeight fkp_product(const FkpCoefficients& b, const DyadicTree& tree) {
  if (!(b.values().tree() == tree))
    throw InvariantViolation("coefficients were built for a different tree");
  std::vector<double> prod(tree.node_count(), 1.0);
  std::size_t id = 0;
  for (int l = 0; l < tree.depth(); ++l) {
    const double inv_sqrt = std::sqrt(std::ldexp(1.0, l));
    for (std::uint32_t k = 0; k < (std::uint32_t{1} << l); ++k, ++id) {
      const double step = b.values().at({l, k}) * inv_sqrt;
      prod[2 * id + 1] = prod[id] * (1.0 - step);
      prod[2 * id + 2] = prod[id] * (1.0 + step);
    }
  }
  const std::size_t first_leaf = tree.nonleaf_count();
  return StepWeight(tree,
                    std::vector<double>(prod.begin() + static_cast<std::ptrdiff_t>(first_leaf),
                                        prod.end()));
}

/// Reads the product coefficients back off a weight: b_I is the plain Haar
/// coefficient of w divided by its average on I, which telescopes the product
/// exactly. The weight's total mass is divided out and recorded.
inline FkpCoefficients extract_coefficients(const StepWeight& w) {
  const auto& tree = w.tree();
  IntervalSequence b(tree);
  double worst = 0.0;
  tree.for_each_nonleaf([&](DyadicIndex I) {
    const double wl = w.mass(tree.left_child(I));
    const double wr = w.mass(tree.right_child(I));
    const double ratio = (wr - wl) / w.mass(I);
    b.set(I, ratio * std::sqrt(length(I)));
    worst = std::max(worst, std::abs(ratio));
  });
  return FkpCoefficients(std::move(b), 1.0 - worst, w.total_mass());
}

/// Cell-exact discretization of x^alpha on [0,1): each leaf carries the exact
/// average of the power over its cell, via the antiderivative.
inline StepWeight power_weight(double alpha, const DyadicTree& tree) {
  if (!(alpha > -1.0)) throw BadExponent("power weight needs alpha > -1");
  const int n = tree.depth();
  std::vector<double> leaves(tree.leaf_count());
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const double a = static_cast<double>(k);
    const double hi = std::pow(a + 1.0, alpha + 1.0) - std::pow(a, alpha + 1.0);
    leaves[k] = hi * std::exp2(-static_cast<double>(n) * alpha) / (alpha + 1.0);
  }
  return StepWeight(tree, std::move(leaves));
}

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Counter-mode draw in [0,1) keyed by (seed, level, position); independent
/// of traversal order and of the tree depth.
inline double keyed_unit(std::uint64_t seed, int level, std::uint32_t pos) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ (static_cast<std::uint64_t>(level) + 1));
  h = mix64(h ^ (static_cast<std::uint64_t>(pos) + 0x632be59bd9b4e019ull));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Unit-mass product weight with independent coefficients drawn uniformly
/// from the largest interval the slack margin epsilon allows.
inline StepWeight random_doubling_weight(std::uint64_t seed, double epsilon,
                                         const DyadicTree& tree) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw InvariantViolation("epsilon must lie in (0, 1)");
  IntervalSequence b(tree);
  tree.for_each_nonleaf([&](DyadicIndex I) {
    const double r = detail::keyed_unit(seed, I.level, I.pos);
    b.set(I, (2.0 * r - 1.0) * (1.0 - epsilon) * std::sqrt(length(I)));
  });
  return fkp_product(FkpCoefficients(std::move(b), epsilon), tree);
}

}  // namespace dyadic
