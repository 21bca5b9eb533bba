#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dyadic/haar.hpp"
#include "dyadic/sequence.hpp"
#include "dyadic/step.hpp"

namespace dyadic {

namespace detail {

inline void require_same_tree(const DyadicTree& a, const DyadicTree& b) {
  if (!(a == b)) throw InvariantViolation("operands live on different trees");
}

}  // namespace detail

/// Sign-and-exponent data for the signed weighted multiplier family.
/// exponent 0 makes the operator independent of the weight; exponent 1 with
/// all-plus signs is the plain weighted multiplier.
struct HaarMultiplierSpec {
  StepWeight weight;
  double exponent = 0.0;
  SignPattern signs;

  HaarMultiplierSpec(StepWeight w, double t, SignPattern s)
      : weight(std::move(w)), exponent(t), signs(std::move(s)) {
    detail::require_same_tree(weight.tree(), signs.tree());
  }
  HaarMultiplierSpec(StepWeight w, double t)
      : weight(std::move(w)), exponent(t), signs(weight.tree()) {}
};

/// Leafwise square function: at a leaf, the root of the summed squared jumps
/// of the w-average along the chain of intervals containing it, the root
/// interval excluded (its parent leaves the tree).
inline StepFunction apply_square_function(const StepWeight& w, const StepFunction& f) {
  detail::require_same_tree(w.tree(), f.tree());
  const auto& tree = w.tree();
  const detail::WeightedAverages wa(f, w);
  std::vector<double> acc(tree.node_count(), 0.0);
  std::vector<double> avg(tree.node_count(), 0.0);
  tree.for_each_node([&](DyadicIndex I) { avg[tree.node_id(I)] = wa(I); });
  for (std::size_t id = 0; id < tree.nonleaf_count(); ++id) {
    for (std::size_t c : {2 * id + 1, 2 * id + 2}) {
      const double d = avg[c] - avg[id];
      acc[c] = acc[id] + d * d;
    }
  }
  std::vector<double> out(tree.leaf_count());
  const std::size_t first_leaf = tree.nonleaf_count();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::sqrt(acc[first_leaf + k]);
  return StepFunction(tree, std::move(out));
}

/// T f = sum over non-leaf I of sign_I (w(x)/<w>_I)^t <f,h_I> h_I(x), plain
/// Haar throughout. The leaf factor w(x)^t multiplies a path-accumulated sum.
inline StepFunction apply_haar_multiplier(const HaarMultiplierSpec& spec, const StepFunction& f) {
  detail::require_same_tree(spec.weight.tree(), f.tree());
  const auto& tree = f.tree();
  const double t = spec.exponent;
  std::vector<double> acc(tree.node_count(), 0.0);
  std::size_t id = 0;
  for (int l = 0; l < tree.depth(); ++l) {
    const double len = std::ldexp(1.0, -l);
    const double inv_sqrt = 1.0 / std::sqrt(len);
    for (std::uint32_t k = 0; k < (std::uint32_t{1} << l); ++k, ++id) {
      const DyadicIndex I{l, k};
      const double coeff =
          (f.integral(tree.right_child(I)) - f.integral(tree.left_child(I))) * inv_sqrt;
      const double scale =
          static_cast<double>(spec.signs.at(I)) * coeff * inv_sqrt / std::pow(spec.weight.average(I), t);
      acc[2 * id + 1] = acc[id] - scale;
      acc[2 * id + 2] = acc[id] + scale;
    }
  }
  std::vector<double> out(tree.leaf_count());
  const std::size_t first_leaf = tree.nonleaf_count();
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = std::pow(spec.weight.leaf_values()[k], t) * acc[first_leaf + k];
  return StepFunction(tree, std::move(out));
}

/// Paraproduct: sum over non-leaf J of <f>_J b_J h_J with plain averages and
/// plain Haar functions.
inline StepFunction apply_paraproduct(const IntervalSequence& b, const StepFunction& f) {
  detail::require_same_tree(b.tree(), f.tree());
  const auto& tree = f.tree();
  std::vector<double> acc(tree.node_count(), 0.0);
  std::size_t id = 0;
  for (int l = 0; l < tree.depth(); ++l) {
    const double inv_sqrt = std::sqrt(std::ldexp(1.0, l));
    for (std::uint32_t k = 0; k < (std::uint32_t{1} << l); ++k, ++id) {
      const DyadicIndex J{l, k};
      const double term = f.average(J) * b.at(J) * inv_sqrt;
      acc[2 * id + 1] = acc[id] - term;
      acc[2 * id + 2] = acc[id] + term;
    }
  }
  std::vector<double> out(tree.leaf_count());
  const std::size_t first_leaf = tree.nonleaf_count();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = acc[first_leaf + k];
  return StepFunction(tree, std::move(out));
}

/// Resolvent of the paraproduct through the product weight it generates:
/// with w = prod over J of (1 + b_J h_J), returns
/// sum over I of (w(x) / (<w>_I (1 + b_I h_I(x)))) <f,h_I> h_I(x),
/// which solves (Id - paraproduct)(result) = f - <f>_root. That identity is
/// re-checked on exit at absolute tolerance 1e-8 per leaf.
inline StepFunction apply_product_resolvent(const IntervalSequence& b, const StepFunction& f) {
  detail::require_same_tree(b.tree(), f.tree());
  const auto& tree = f.tree();

  tree.for_each_nonleaf([&](DyadicIndex I) {
    if (std::abs(b.at(I)) / std::sqrt(length(I)) >= 1.0 - 1e-6)
      throw NearSingular("coefficient at " + to_string(I) + " reaches the unit threshold");
  });

  // product weight on leaves, accumulated multiplicatively down the tree
  std::vector<double> prod(tree.node_count(), 1.0);
  std::size_t id = 0;
  for (int l = 0; l < tree.depth(); ++l) {
    const double inv_sqrt = std::sqrt(std::ldexp(1.0, l));
    for (std::uint32_t k = 0; k < (std::uint32_t{1} << l); ++k, ++id) {
      const double step = b.at({l, k}) * inv_sqrt;
      prod[2 * id + 1] = prod[id] * (1.0 - step);
      prod[2 * id + 2] = prod[id] * (1.0 + step);
    }
  }
  const std::size_t first_leaf = tree.nonleaf_count();
  std::vector<double> wleaf(prod.begin() + static_cast<std::ptrdiff_t>(first_leaf), prod.end());
  const StepWeight w(tree, wleaf);

  std::vector<double> acc(tree.node_count(), 0.0);
  id = 0;
  for (int l = 0; l < tree.depth(); ++l) {
    const double inv_sqrt = std::sqrt(std::ldexp(1.0, l));
    for (std::uint32_t k = 0; k < (std::uint32_t{1} << l); ++k, ++id) {
      const DyadicIndex I{l, k};
      const double coeff =
          (f.integral(tree.right_child(I)) - f.integral(tree.left_child(I))) * inv_sqrt;
      const double step = b.at(I) * inv_sqrt;
      const double base = coeff * inv_sqrt / w.average(I);
      acc[2 * id + 1] = acc[id] - base / (1.0 - step);
      acc[2 * id + 2] = acc[id] + base / (1.0 + step);
    }
  }
  std::vector<double> out(tree.leaf_count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = wleaf[k] * acc[first_leaf + k];
  StepFunction result(tree, std::move(out));

  // exit check: applying (Id - paraproduct) must reproduce f minus its mean
  const StepFunction back = result - apply_paraproduct(b, result);
  const double mean = f.average(tree.root());
  double scale = 1.0;
  for (double x : f.leaf_values()) scale = std::max(scale, std::abs(x));
  for (std::size_t k = 0; k < tree.leaf_count(); ++k) {
    const double expect = f.leaf_values()[k] - mean;
    if (std::abs(back.leaf_values()[k] - expect) > 1e-8 * scale)
      throw InvariantViolation("resolvent exit check failed at leaf " + std::to_string(k));
  }
  return result;
}

/// Positive averaging operator: at a leaf, w(x) times the sum over containing
/// non-leaf I of lambda_I <f>_I / |I|.
inline StepFunction apply_positive_operator(const StepWeight& w, const CarlesonSequence& lambda,
                                            const StepFunction& f) {
  detail::require_same_tree(w.tree(), f.tree());
  detail::require_same_tree(lambda.tree(), f.tree());
  const auto& tree = f.tree();
  std::vector<double> acc(tree.node_count(), 0.0);
  std::size_t id = 0;
  for (int l = 0; l < tree.depth(); ++l) {
    const double inv_len = std::ldexp(1.0, l);
    for (std::uint32_t k = 0; k < (std::uint32_t{1} << l); ++k, ++id) {
      const DyadicIndex I{l, k};
      const double total = acc[id] + lambda.at(I) * f.average(I) * inv_len;
      acc[2 * id + 1] = total;
      acc[2 * id + 2] = total;
    }
  }
  std::vector<double> out(tree.leaf_count());
  const std::size_t first_leaf = tree.nonleaf_count();
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = w.leaf_values()[k] * acc[first_leaf + k];
  return StepFunction(tree, std::move(out));
}

/// Intensities lambda_I = (|Delta_I u^{-1}| / <u^{-1}>_I) (|Delta_I vw^2| / <vw^2>_I) (|I| / <w>_I)
/// on every non-leaf interval, plain averages throughout.
inline CarlesonSequence lambda_from_weights(const StepWeight& u, const StepWeight& v,
                                            const StepWeight& w) {
  detail::require_same_tree(u.tree(), w.tree());
  detail::require_same_tree(v.tree(), w.tree());
  const auto& tree = w.tree();
  std::vector<double> inv_u(tree.leaf_count()), vw2(tree.leaf_count());
  for (std::size_t k = 0; k < tree.leaf_count(); ++k) {
    inv_u[k] = 1.0 / u.leaf_values()[k];
    vw2[k] = v.leaf_values()[k] * w.leaf_values()[k] * w.leaf_values()[k];
  }
  const auto iu = interval_integrals(tree, inv_u);
  const auto iv = interval_integrals(tree, vw2);
  CarlesonSequence lam(tree);
  tree.for_each_nonleaf([&](DyadicIndex I) {
    const std::size_t id = tree.node_id(I);
    const std::size_t lc = 2 * id + 1, rc = 2 * id + 2;
    // averages of each child share the child length, so the ratio of the
    // average difference to the parent average equals the integral version
    const double du = std::abs(iu[rc] - iu[lc]) * 2.0 / iu[id];
    const double dv = std::abs(iv[rc] - iv[lc]) * 2.0 / iv[id];
    lam.set(I, du * dv * length(I) / w.average(I));
  });
  return lam;
}

/// K coefficient of the square-function quadratic form:
/// (v(I+) w(I-) / w(I+) + v(I-) w(I+) / w(I-)) / w(I).
inline double k_constant(const StepWeight& w, const StepWeight& v, DyadicIndex I) {
  detail::require_same_tree(w.tree(), v.tree());
  const auto& tree = w.tree();
  const auto lc = tree.left_child(I), rc = tree.right_child(I);
  const double wl = w.mass(lc), wr = w.mass(rc);
  return (v.mass(rc) * wl / wr + v.mass(lc) * wr / wl) / w.mass(I);
}

}  // namespace dyadic
