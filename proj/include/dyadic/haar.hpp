#pragma once

#include <cmath>

#include "dyadic/step.hpp"

namespace dyadic {

/// Two-value profile of a (possibly weighted) Haar function supported on I:
/// plus_value on the right child, minus_value on the left child, zero elsewhere.
struct HaarVector {
  DyadicIndex interval;
  double plus_value;
  double minus_value;

  StepFunction as_function(const DyadicTree& tree) const {
    std::vector<double> out(tree.leaf_count(), 0.0);
    const auto [lf, ll] = tree.leaf_span(tree.left_child(interval));
    for (std::size_t k = lf; k < ll; ++k) out[k] = minus_value;
    const auto [rf, rl] = tree.leaf_span(tree.right_child(interval));
    for (std::size_t k = rf; k < rl; ++k) out[k] = plus_value;
    return StepFunction(tree, std::move(out));
  }

  double at_leaf(const DyadicTree& tree, std::size_t k) const {
    const auto [first, last] = tree.leaf_span(interval);
    if (k < first || k >= last) return 0.0;
    return k < (first + last) / 2 ? minus_value : plus_value;
  }
};

/// Haar function of the weight w on I: w-mean zero and unit L^2(w) norm.
inline HaarVector haar_vector(const StepWeight& w, DyadicIndex I) {
  if (w.tree().is_leaf(I)) throw LeafInterval("no Haar function on a leaf " + to_string(I));
  const double ml = w.mass(w.tree().left_child(I));
  const double mr = w.mass(w.tree().right_child(I));
  const double m = w.mass(I);
  return {I, std::sqrt(ml / (mr * m)), -std::sqrt(mr / (ml * m))};
}

/// Plain Haar function on I: |I|^{-1/2} on the right child, -|I|^{-1/2} on the left.
inline HaarVector haar_vector(const DyadicTree& tree, DyadicIndex I) {
  if (tree.is_leaf(I)) throw LeafInterval("no Haar function on a leaf " + to_string(I));
  const double a = 1.0 / std::sqrt(length(I));
  return {I, a, -a};
}

/// <f, h_I^w>_w.
inline double haar_coefficient(const StepFunction& f, const StepWeight& w, DyadicIndex I) {
  const HaarVector h = haar_vector(w, I);
  const detail::WeightedAverages fw(f, w);
  return h.plus_value * fw.integral_fw(w.tree().right_child(I)) +
         h.minus_value * fw.integral_fw(w.tree().left_child(I));
}

/// Plain <f, h_I>.
inline double haar_coefficient(const StepFunction& f, DyadicIndex I) {
  const HaarVector h = haar_vector(f.tree(), I);
  return h.plus_value * f.integral(f.tree().right_child(I)) +
         h.minus_value * f.integral(f.tree().left_child(I));
}

/// Delta_I^w(f): difference of the children's w-averages, right minus left.
inline double weighted_delta(const StepFunction& f, const StepWeight& w, DyadicIndex I) {
  if (w.tree().is_leaf(I)) throw LeafInterval("no children at " + to_string(I));
  return weighted_average(f, w, w.tree().right_child(I)) -
         weighted_average(f, w, w.tree().left_child(I));
}

/// <f>_I^w - <f>_parent^w. The magnitude equals
/// sqrt(w(sibling)/(w(parent) w(I))) |<f, h_parent^w>_w|.
inline double parent_difference(const StepFunction& f, const StepWeight& w, DyadicIndex I) {
  return weighted_average(f, w, I) - weighted_average(f, w, w.tree().parent(I));
}

/// Coefficients writing h_I^w in the Haar function of another weight:
/// h_I^w = alpha h_I^nu + beta 1_I.
struct DecompositionCoefficients {
  double alpha;
  double beta;
};

inline DecompositionCoefficients decompose(const StepWeight& w, const StepWeight& nu, DyadicIndex I) {
  if (w.tree().is_leaf(I)) throw LeafInterval("no Haar function on a leaf " + to_string(I));
  const auto& tree = w.tree();
  const StepFunction ratio = product(nu, reciprocal(w)).as_function();
  const detail::WeightedAverages avg(ratio, w);
  const double mean_plus = avg(tree.right_child(I));
  const double mean_minus = avg(tree.left_child(I));
  const double mean = avg(I);
  const double ml = w.mass(tree.left_child(I));
  const double mr = w.mass(tree.right_child(I));
  const double m = w.mass(I);
  return {std::sqrt(mean_plus * mean_minus / mean),
          std::sqrt(ml * mr / m) * (mean_plus - mean_minus) / (m * mean)};
}

}  // namespace dyadic
