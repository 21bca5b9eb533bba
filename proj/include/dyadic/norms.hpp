#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dyadic/haar.hpp"
#include "dyadic/operators.hpp"

namespace dyadic {

struct NormResult {
  enum class Method { eigen, exhaustive, sampled };
  double value = 0.0;
  Method method = Method::eigen;
  long iterations = 0;
  int depth = 0;
};

inline const char* to_string(NormResult::Method m) {
  switch (m) {
    case NormResult::Method::eigen: return "eigen";
    case NormResult::Method::exhaustive: return "exhaustive";
    case NormResult::Method::sampled: return "sampled";
  }
  return "eigen";
}

namespace detail {

struct PowerOutcome {
  double value = 0.0;
  long iterations = 0;
};

/// Largest eigenvalue of a symmetric PSD operator given by its matvec.
/// Deterministic seeded start (or a caller-provided warm start), Rayleigh
/// quotient stopping at relative change < 1e-12, at most 1e5 iterations.
/// In strict mode a budget overrun throws; otherwise the last quotient (a
/// valid lower bound for PSD operators) is returned.
template <class MatVec>
PowerOutcome power_iteration(std::size_t n, MatVec&& apply, std::vector<double>* warm = nullptr,
                             bool strict = true) {
  constexpr long max_iterations = 100000;
  constexpr double rel_tol = 1e-12;
  std::vector<double> x;
  if (warm != nullptr && warm->size() == n) {
    x = *warm;
  } else {
    x.resize(n);
    std::mt19937_64 gen(0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& c : x) c = dist(gen);
  }
  double nx = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
  if (nx == 0.0) x.assign(n, 1.0), nx = std::sqrt(static_cast<double>(n));
  for (double& c : x) c /= nx;

  std::vector<double> y(n);
  double lam = 0.0;
  for (long it = 1; it <= max_iterations; ++it) {
    apply(x, y);
    const double quotient = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
    const double ny = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
    if (ny == 0.0) {
      if (warm != nullptr) *warm = x;
      return {0.0, it};
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
    if (it > 1 && std::abs(quotient - lam) <= rel_tol * std::max(1.0, std::abs(quotient))) {
      if (warm != nullptr) *warm = x;
      return {quotient, it};
    }
    lam = quotient;
  }
  if (strict) throw EigenFailure("power iteration exhausted its budget");
  if (warm != nullptr) *warm = x;
  return {lam, max_iterations};
}

}  // namespace detail

/// The pair (A, B) behind the square-function norm: <Af,f> is the squared
/// v-weighted norm of the square function of f, and B is the diagonal of
/// leaf u-masses. Also holds the symmetric conjugation of A by B^{-1/2}.
class QuadraticFormPair {
 public:
  QuadraticFormPair(const StepWeight& u, const StepWeight& v, const StepWeight& w) {
    detail::require_same_tree(u.tree(), w.tree());
    detail::require_same_tree(v.tree(), w.tree());
    const auto& tree = w.tree();
    depth_ = tree.depth();
    n_ = tree.leaf_count();
    const double cell = length({tree.depth(), 0});
    diag_b_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) diag_b_[i] = u.leaf_values()[i] * cell;
    a_.assign(n_ * n_, 0.0);
    std::vector<double> r(n_);
    tree.for_each_nonleaf([&](DyadicIndex I) {
      const HaarVector h = haar_vector(w, I);
      const double k = k_constant(w, v, I);
      const auto [first, last] = tree.leaf_span(I);
      const std::size_t mid = (first + last) / 2;
      for (std::size_t i = first; i < last; ++i)
        r[i] = (i < mid ? h.minus_value : h.plus_value) * w.leaf_values()[i] * cell;
      for (std::size_t i = first; i < last; ++i)
        for (std::size_t j = first; j < last; ++j) a_[i * n_ + j] += k * r[i] * r[j];
    });
    g_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        g_[i * n_ + j] = a_[i * n_ + j] / std::sqrt(diag_b_[i] * diag_b_[j]);
  }

  std::size_t dimension() const noexcept { return n_; }
  int depth() const noexcept { return depth_; }

  double numerator_quadratic(std::span<const double> f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n_; ++j) row += a_[i * n_ + j] * f[j];
      s += f[i] * row;
    }
    return s;
  }

  double denominator_quadratic(std::span<const double> f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += diag_b_[i] * f[i] * f[i];
    return s;
  }

  /// One application of the conjugated matrix.
  void apply_conjugated(const std::vector<double>& x, std::vector<double>& y) const {
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n_; ++j) s += g_[i * n_ + j] * x[j];
      y[i] = s;
    }
  }

 private:
  std::size_t n_ = 0;
  int depth_ = 0;
  std::vector<double> a_, g_, diag_b_;
};

/// Largest ratio of the v-weighted square-function energy to the u-weighted
/// energy, as the square root of the top generalized eigenvalue.
inline NormResult square_function_norm_detailed(const StepWeight& u, const StepWeight& v,
                                                const StepWeight& w) {
  const QuadraticFormPair pair(u, v, w);
  const auto out = detail::power_iteration(
      pair.dimension(), [&](const std::vector<double>& x, std::vector<double>& y) {
        pair.apply_conjugated(x, y);
      });
  return {std::sqrt(std::max(0.0, out.value)), NormResult::Method::eigen, out.iterations,
          pair.depth()};
}

inline double square_function_norm(const StepWeight& u, const StepWeight& v, const StepWeight& w) {
  return square_function_norm_detailed(u, v, w).value;
}

/// Largest singular value of a linear map between the u- and v-weighted
/// spaces. The map is sampled on the leaf basis; a random probe checks that
/// the closure is actually linear before the basis matrix is trusted.
template <class Op>
NormResult linear_operator_norm_detailed(Op&& op, const StepWeight& u, const StepWeight& v) {
  detail::require_same_tree(u.tree(), v.tree());
  const auto& tree = u.tree();
  const std::size_t n = tree.leaf_count();
  const double cell = length({tree.depth(), 0});

  std::vector<double> m(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    const StepFunction img = op(StepFunction(tree, e));
    for (std::size_t i = 0; i < n; ++i) m[i * n + j] = img.at_leaf(i);
  }

  {
    std::mt19937_64 gen(0xc2b2ae3d27d4eb4full);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> probe(n);
    for (double& c : probe) c = dist(gen);
    const StepFunction img = op(StepFunction(tree, probe));
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += m[i * n + j] * probe[j];
      scale = std::max({scale, std::abs(row), std::abs(img.at_leaf(i))});
    }
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += m[i * n + j] * probe[j];
      if (std::abs(row - img.at_leaf(i)) > 1e-8 * scale)
        throw NonlinearOperator("closure disagrees with its basis matrix");
    }
  }

  // conjugate by the diagonal weight roots
  std::vector<double> c(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      c[i * n + j] = m[i * n + j] * std::sqrt(v.leaf_values()[i] * cell) /
                     std::sqrt(u.leaf_values()[j] * cell);

  std::vector<double> tmp(n);
  const auto out =
      detail::power_iteration(n, [&](const std::vector<double>& x, std::vector<double>& y) {
        for (std::size_t i = 0; i < n; ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += c[i * n + j] * x[j];
          tmp[i] = s;
        }
        for (std::size_t j = 0; j < n; ++j) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += c[i * n + j] * tmp[i];
          y[j] = s;
        }
      });
  return {std::sqrt(std::max(0.0, out.value)), NormResult::Method::eigen, out.iterations,
          tree.depth()};
}

template <class Op>
double linear_operator_norm(Op&& op, const StepWeight& u, const StepWeight& v) {
  return linear_operator_norm_detailed(std::forward<Op>(op), u, v).value;
}

struct SamplingBudget {
  std::size_t patterns = 2048;
  std::uint64_t seed = 1;
};

struct SigmaNormResult {
  NormResult norm;
  SignPattern argmax;
};

/// Largest multiplier norm over sign choices. Exhaustive Gray-code walk over
/// every pattern when at most 15 signs exist; beyond that, seeded random
/// patterns plus the two constant patterns give a certified lower bound,
/// flagged by the sampled method tag.
inline SigmaNormResult uniform_sigma_norm(const StepWeight& w, double t, const StepWeight& u,
                                          const StepWeight& v, SamplingBudget budget = {}) {
  detail::require_same_tree(w.tree(), u.tree());
  detail::require_same_tree(w.tree(), v.tree());
  const auto& tree = w.tree();
  const std::size_t n = tree.leaf_count();
  const std::size_t m = tree.nonleaf_count();
  const double cell = length({tree.depth(), 0});

  // per-interval conjugated blocks; the sign pattern mixes them linearly
  std::vector<std::vector<double>> blocks(m);
  std::vector<std::pair<std::size_t, std::size_t>> spans(m);
  tree.for_each_nonleaf([&](DyadicIndex I) {
    const std::size_t id = tree.node_id(I);
    const auto [first, last] = tree.leaf_span(I);
    spans[id] = {first, last};
    const std::size_t width = last - first;
    const std::size_t mid = (first + last) / 2;
    const double inv_sqrt = 1.0 / std::sqrt(length(I));
    const double wavg = w.average(I);
    std::vector<double> block(width * width);
    for (std::size_t i = first; i < last; ++i) {
      const double row = std::sqrt(v.leaf_values()[i] * cell) *
                         std::pow(w.leaf_values()[i] / wavg, t) *
                         ((i < mid ? -1.0 : 1.0) * inv_sqrt);
      for (std::size_t j = first; j < last; ++j) {
        const double col =
            ((j < mid ? -1.0 : 1.0) * inv_sqrt) * cell / std::sqrt(u.leaf_values()[j] * cell);
        block[(i - first) * width + (j - first)] = row * col;
      }
    }
    blocks[id] = std::move(block);
  });

  std::vector<double> c(n * n, 0.0);
  auto add_block = [&](std::size_t id, double factor) {
    const auto [first, last] = spans[id];
    const std::size_t width = last - first;
    const auto& block = blocks[id];
    for (std::size_t i = 0; i < width; ++i)
      for (std::size_t j = 0; j < width; ++j)
        c[(first + i) * n + (first + j)] += factor * block[i * width + j];
  };

  std::vector<double> tmp(n);
  auto normal_apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += c[i * n + j] * x[j];
      tmp[i] = s;
    }
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += c[i * n + j] * tmp[i];
      y[j] = s;
    }
  };

  SignPattern sigma(tree);      // current pattern, all plus
  SignPattern best_sigma(tree);
  double best = -1.0;
  long iterations = 0;
  std::vector<double> warm;

  auto node_of = [&](std::size_t id) { return tree.node_at(id); };
  auto evaluate = [&](bool strict) {
    const auto out = detail::power_iteration(n, normal_apply, &warm, strict);
    iterations += out.iterations;
    const double value = std::sqrt(std::max(0.0, out.value));
    if (value > best) {
      best = value;
      best_sigma = sigma;
    }
  };

  const bool exhaustive = m <= 15;
  if (exhaustive) {
    for (std::size_t id = 0; id < m; ++id) add_block(id, 1.0);
    evaluate(false);
    // Gray-code walk: one sign flip per step covers every pattern
    const std::uint64_t total = std::uint64_t{1} << m;
    for (std::uint64_t k = 1; k < total; ++k) {
      const int bit = std::countr_zero(k);
      const std::size_t id = static_cast<std::size_t>(bit);
      const DyadicIndex I = node_of(id);
      sigma.flip(I);
      add_block(id, 2.0 * static_cast<double>(sigma.at(I)));
      evaluate(false);
    }
    return {{best, NormResult::Method::exhaustive, iterations, tree.depth()}, best_sigma};
  }

  std::mt19937_64 gen(budget.seed);
  auto load_pattern = [&](const SignPattern& next) {
    for (std::size_t id = 0; id < m; ++id) {
      const DyadicIndex I = node_of(id);
      if (next.at(I) != sigma.at(I)) {
        sigma.flip(I);
        add_block(id, 2.0 * static_cast<double>(sigma.at(I)));
      }
    }
  };

  for (std::size_t id = 0; id < m; ++id) add_block(id, 1.0);
  evaluate(false);
  load_pattern(SignPattern(tree, -1));
  evaluate(false);
  for (std::size_t s = 0; s < budget.patterns; ++s) {
    SignPattern next(tree);
    tree.for_each_nonleaf([&](DyadicIndex I) {
      if (gen() & 1u) next.flip(I);
    });
    load_pattern(next);
    evaluate(false);
  }
  return {{best, NormResult::Method::sampled, iterations, tree.depth()}, best_sigma};
}

}  // namespace dyadic
