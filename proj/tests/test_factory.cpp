#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "dyadic/characteristics.hpp"
#include "dyadic/factory.hpp"
#include "dyadic/haar.hpp"

using namespace dyadic;
using Catch::Approx;

namespace {

// Leafwise product over the ancestor chain, evaluating each Haar sign in
// place. Independent of the top-down accumulation in fkp_product.
std::vector<double> oracle_product(const IntervalSequence& b, const DyadicTree& tree) {
  std::vector<double> out(tree.leaf_count(), 1.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (int l = 0; l < tree.depth(); ++l) {
      const std::uint32_t pos = static_cast<std::uint32_t>(k >> (tree.depth() - l));
      const DyadicIndex I{l, pos};
      const bool right_half = ((k >> (tree.depth() - l - 1)) & 1u) != 0;
      const double h = (right_half ? 1.0 : -1.0) / std::sqrt(length(I));
      out[k] *= 1.0 + b.at(I) * h;
    }
  }
  return out;
}

IntervalSequence random_coefficients(const DyadicTree& tree, unsigned seed, double margin) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> unif(-margin, margin);
  IntervalSequence b(tree);
  tree.for_each_nonleaf([&](DyadicIndex I) { b.set(I, unif(gen) * std::sqrt(length(I))); });
  return b;
}

}  // namespace

TEST_CASE("zero coefficients produce the constant weight") {
  const DyadicTree tree(3);
  const StepWeight w = fkp_product(FkpCoefficients(IntervalSequence(tree), 1.0), tree);
  for (double x : w.leaf_values()) REQUIRE(x == 1.0);
  REQUIRE(w.total_mass() == Approx(1.0));
}

TEST_CASE("depth one product fixture") {
  const DyadicTree tree(1);
  IntervalSequence b(tree);
  b.set({0, 0}, 0.5);
  const StepWeight w = fkp_product(FkpCoefficients(std::move(b), 0.4), tree);
  REQUIRE(w.leaf_values()[0] == Approx(0.5));
  REQUIRE(w.leaf_values()[1] == Approx(1.5));
  REQUIRE(w.total_mass() == Approx(1.0));
}

TEST_CASE("product matches the per-leaf ancestor walk") {
  const DyadicTree tree(5);
  const IntervalSequence b = random_coefficients(tree, 11u, 0.7);
  const StepWeight w = fkp_product(FkpCoefficients(b, 0.3), tree);
  const std::vector<double> ref = oracle_product(b, tree);
  for (std::size_t k = 0; k < ref.size(); ++k)
    REQUIRE(w.leaf_values()[k] == Approx(ref[k]).epsilon(1e-13));
  double mass = 0.0;
  for (double x : w.leaf_values()) {
    REQUIRE(x > 0.0);
    mass += x * std::ldexp(1.0, -tree.depth());
  }
  REQUIRE(mass == Approx(1.0).margin(1e-12));
}

TEST_CASE("slack budget is enforced") {
  const DyadicTree tree(2);
  IntervalSequence big(tree);
  big.set({0, 0}, 0.95);
  REQUIRE_THROWS_AS(FkpCoefficients(big, 0.2), SlackViolation);
  IntervalSequence deep(tree);
  deep.set({1, 1}, 0.6 * std::sqrt(0.5));
  REQUIRE_THROWS_AS(FkpCoefficients(deep, 0.5), SlackViolation);
  REQUIRE_NOTHROW(FkpCoefficients(deep, 0.4));
  REQUIRE_THROWS_AS(FkpCoefficients(IntervalSequence(tree), 0.0), SlackViolation);
  REQUIRE_THROWS_AS(FkpCoefficients(IntervalSequence(tree), 1.5), SlackViolation);
  const FkpCoefficients ok(IntervalSequence(tree), 0.5);
  REQUIRE_THROWS_AS(fkp_product(ok, DyadicTree(3)), InvariantViolation);
}

TEST_CASE("extraction fixtures") {
  const DyadicTree tree(1);
  const FkpCoefficients flat = extract_coefficients(StepWeight(tree, {1.0, 1.0}));
  REQUIRE(flat.values().at({0, 0}) == 0.0);
  REQUIRE(flat.slack() == Approx(1.0));
  REQUIRE(flat.normalization() == Approx(1.0));

  const FkpCoefficients half = extract_coefficients(StepWeight(tree, {0.5, 1.5}));
  REQUIRE(half.values().at({0, 0}) == Approx(0.5));
  REQUIRE(half.slack() == Approx(0.5));

  const FkpCoefficients scaled = extract_coefficients(StepWeight(tree, {1.0, 3.0}));
  REQUIRE(scaled.values().at({0, 0}) == Approx(0.5));
  REQUIRE(scaled.normalization() == Approx(2.0));
  const StepWeight back = fkp_product(scaled, tree);
  REQUIRE(back.leaf_values()[0] == Approx(0.5));
  REQUIRE(back.leaf_values()[1] == Approx(1.5));
}

TEST_CASE("extraction inverts the product") {
  const DyadicTree tree(4);
  const IntervalSequence b = random_coefficients(tree, 23u, 0.65);
  const FkpCoefficients round = extract_coefficients(fkp_product(FkpCoefficients(b, 0.3), tree));
  tree.for_each_nonleaf([&](DyadicIndex I) {
    REQUIRE(round.values().at(I) == Approx(b.at(I)).margin(1e-12));
  });
  REQUIRE(round.slack() >= 0.3 - 1e-9);
  REQUIRE(round.normalization() == Approx(1.0).margin(1e-12));
}

TEST_CASE("product inverts the extraction") {
  const DyadicTree tree(4);
  std::mt19937 gen(5u);
  std::uniform_real_distribution<double> unif(0.2, 3.0);
  std::vector<double> leaves(tree.leaf_count());
  for (double& x : leaves) x = unif(gen);
  const StepWeight w(tree, leaves);
  const FkpCoefficients coeffs = extract_coefficients(w);
  const StepWeight round = fkp_product(coeffs, tree);
  for (std::size_t k = 0; k < leaves.size(); ++k)
    REQUIRE(round.leaf_values()[k] * coeffs.normalization() ==
            Approx(leaves[k]).epsilon(1e-10));
}

TEST_CASE("extraction agrees with the Haar coefficient ratio") {
  const DyadicTree tree(4);
  std::mt19937 gen(7u);
  std::uniform_real_distribution<double> unif(0.5, 2.5);
  std::vector<double> leaves(tree.leaf_count());
  for (double& x : leaves) x = unif(gen);
  const StepWeight w(tree, leaves);
  const FkpCoefficients coeffs = extract_coefficients(w);
  const StepFunction f = w.as_function();
  tree.for_each_nonleaf([&](DyadicIndex I) {
    const double ref = haar_coefficient(f, I) / w.average(I);
    REQUIRE(coeffs.values().at(I) == Approx(ref).margin(1e-13));
  });
}

TEST_CASE("power weight fixtures") {
  const DyadicTree tree(1);
  const StepWeight flat = power_weight(0.0, tree);
  REQUIRE(flat.leaf_values()[0] == Approx(1.0));
  REQUIRE(flat.leaf_values()[1] == Approx(1.0));
  const StepWeight linear = power_weight(1.0, tree);
  REQUIRE(linear.leaf_values()[0] == Approx(0.25));
  REQUIRE(linear.leaf_values()[1] == Approx(0.75));
  REQUIRE_THROWS_AS(power_weight(-1.0, tree), BadExponent);
  REQUIRE_THROWS_AS(power_weight(-1.5, tree), BadExponent);
}

TEST_CASE("power weight mass equals the exact integral") {
  const DyadicTree tree(6);
  for (double alpha : {-0.9, -0.5, 0.5, 1.0, 2.0}) {
    const StepWeight w = power_weight(alpha, tree);
    REQUIRE(w.total_mass() == Approx(1.0 / (alpha + 1.0)).epsilon(1e-12));
    const auto leaves = w.leaf_values();
    for (std::size_t k = 0; k + 1 < leaves.size(); ++k) {
      if (alpha < 0.0) REQUIRE(leaves[k] > leaves[k + 1]);
      if (alpha > 0.0) REQUIRE(leaves[k] < leaves[k + 1]);
    }
  }
}

TEST_CASE("power weight characteristic approaches its closed form") {
  // For |alpha| < 1 the sup sits at the root and equals 1/((1+alpha)(1-alpha));
  // the cell discretization approaches it from below as the tree deepens.
  for (double alpha : {-0.9, -0.5, 0.5}) {
    const double closed = 1.0 / ((1.0 + alpha) * (1.0 - alpha));
    const double shallow = ap_characteristic(power_weight(alpha, DyadicTree(3)), 2.0);
    const double deep = ap_characteristic(power_weight(alpha, DyadicTree(6)), 2.0);
    REQUIRE(deep >= shallow);
    REQUIRE(deep <= closed + 1e-9);
    REQUIRE(deep > 0.95 * closed);
  }
}

TEST_CASE("power weight characteristic blows up past the integrable range") {
  // At alpha = 1 the reciprocal is no longer integrable, so the truncated
  // characteristic must keep growing with depth.
  const double shallow = ap_characteristic(power_weight(1.0, DyadicTree(3)), 2.0);
  const double deep = ap_characteristic(power_weight(1.0, DyadicTree(6)), 2.0);
  REQUIRE(deep > shallow + 0.5);
}

TEST_CASE("random weights are reproducible") {
  const DyadicTree tree(5);
  const StepWeight a = random_doubling_weight(42u, 0.5, tree);
  const StepWeight b = random_doubling_weight(42u, 0.5, tree);
  for (std::size_t k = 0; k < a.leaf_values().size(); ++k)
    REQUIRE(a.leaf_values()[k] == b.leaf_values()[k]);
  const StepWeight c = random_doubling_weight(43u, 0.5, tree);
  bool differs = false;
  for (std::size_t k = 0; k < a.leaf_values().size(); ++k)
    differs = differs || a.leaf_values()[k] != c.leaf_values()[k];
  REQUIRE(differs);
}

TEST_CASE("random coefficients do not depend on the tree depth") {
  const StepWeight shallow = random_doubling_weight(9u, 0.4, DyadicTree(3));
  const StepWeight deep = random_doubling_weight(9u, 0.4, DyadicTree(5));
  const FkpCoefficients bs = extract_coefficients(shallow);
  const FkpCoefficients bd = extract_coefficients(deep);
  DyadicTree(3).for_each_nonleaf([&](DyadicIndex I) {
    REQUIRE(bs.values().at(I) == Approx(bd.values().at(I)).margin(1e-12));
  });
}

TEST_CASE("random weights keep unit mass and positivity") {
  const DyadicTree tree(6);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const StepWeight w = random_doubling_weight(seed, 0.5, tree);
    for (double x : w.leaf_values()) REQUIRE(x > 0.0);
    REQUIRE(w.total_mass() == Approx(1.0).margin(1e-12));
    const double d = doubling_constant(w);
    REQUIRE(d >= 2.0);
    REQUIRE(d < 1e6);
  }
}

TEST_CASE("small coefficient amplitude keeps the weight near one") {
  const DyadicTree tree(6);
  const StepWeight w = random_doubling_weight(3u, 0.9, tree);
  for (double x : w.leaf_values()) {
    REQUIRE(x > 0.5);
    REQUIRE(x < 1.9);
  }
}

TEST_CASE("random weight rejects a degenerate amplitude") {
  const DyadicTree tree(2);
  REQUIRE_THROWS_AS(random_doubling_weight(1u, 0.0, tree), InvariantViolation);
  REQUIRE_THROWS_AS(random_doubling_weight(1u, 1.0, tree), InvariantViolation);
  REQUIRE_THROWS_AS(random_doubling_weight(1u, -0.2, tree), InvariantViolation);
}

TEST_CASE("weight algebra fixtures") {
  const DyadicTree tree(1);
  const StepWeight u(tree, {1.0, 2.0});
  const StepWeight w(tree, {1.0, 3.0});
  const StepWeight combo = product(reciprocal(u), power(w, 2.0));
  REQUIRE(combo.leaf_values()[0] == Approx(1.0));
  REQUIRE(combo.leaf_values()[1] == Approx(4.5));
  const StepWeight one = product(w, reciprocal(w));
  REQUIRE(one.leaf_values()[0] == Approx(1.0));
  REQUIRE(one.leaf_values()[1] == Approx(1.0));
}

TEST_CASE("powers compose multiplicatively") {
  const DyadicTree tree(4);
  const StepWeight w = random_doubling_weight(17u, 0.4, tree);
  const StepWeight twice = power(power(w, 0.7), -1.3);
  const StepWeight direct = power(w, 0.7 * -1.3);
  for (std::size_t k = 0; k < twice.leaf_values().size(); ++k)
    REQUIRE(twice.leaf_values()[k] == Approx(direct.leaf_values()[k]).epsilon(1e-12));
}

TEST_CASE("algebra commutes with refinement") {
  const DyadicTree tree(3);
  const StepWeight u = random_doubling_weight(2u, 0.5, tree);
  const StepWeight w = random_doubling_weight(4u, 0.5, tree);
  const StepWeight a = refine(product(u, w));
  const StepWeight b = product(refine(u), refine(w));
  for (std::size_t k = 0; k < a.leaf_values().size(); ++k)
    REQUIRE(a.leaf_values()[k] == b.leaf_values()[k]);
  const StepWeight c = refine(power(w, -0.8));
  const StepWeight d = power(refine(w), -0.8);
  for (std::size_t k = 0; k < c.leaf_values().size(); ++k)
    REQUIRE(c.leaf_values()[k] == d.leaf_values()[k]);
}
