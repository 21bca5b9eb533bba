#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>

#include "dyadic/error.hpp"

namespace dyadic {

/// The interval [k 2^-j, (k+1) 2^-j) as (level j, position k).
struct DyadicIndex {
  int level = 0;
  std::uint32_t pos = 0;

  friend constexpr bool operator==(const DyadicIndex&, const DyadicIndex&) = default;
};

inline std::string to_string(DyadicIndex I) {
  return "(" + std::to_string(I.level) + "," + std::to_string(I.pos) + ")";
}

/// |I| = 2^-level.
inline double length(DyadicIndex I) { return std::ldexp(1.0, -I.level); }

/// All dyadic subintervals of [0,1) down to a fixed leaf level.
///
/// Nodes are addressed either by DyadicIndex or by a heap id
/// (id = 2^level - 1 + pos, children of id at 2id+1 and 2id+2).
class DyadicTree {
 public:
  static constexpr int max_depth = 12;

  explicit DyadicTree(int depth) : depth_(depth) {
    if (depth < 1 || depth > max_depth)
      throw InvariantViolation("tree depth must be in [1, " + std::to_string(max_depth) +
                               "], got " + std::to_string(depth));
  }

  int depth() const noexcept { return depth_; }
  std::size_t leaf_count() const noexcept { return std::size_t{1} << depth_; }
  std::size_t node_count() const noexcept { return (std::size_t{2} << depth_) - 1; }
  std::size_t nonleaf_count() const noexcept { return (std::size_t{1} << depth_) - 1; }

  static constexpr DyadicIndex root() noexcept { return {0, 0}; }

  bool contains(DyadicIndex I) const noexcept {
    return I.level >= 0 && I.level <= depth_ && I.pos < (std::uint32_t{1} << I.level);
  }

  bool is_leaf(DyadicIndex I) const { return check(I).level == depth_; }

  std::size_t node_id(DyadicIndex I) const {
    check(I);
    return (std::size_t{1} << I.level) - 1 + I.pos;
  }

  DyadicIndex node_at(std::size_t id) const {
    if (id >= node_count()) throw OutOfTree("node id " + std::to_string(id) + " out of range");
    int level = 0;
    while ((std::size_t{2} << level) - 1 <= id) ++level;
    return {level, static_cast<std::uint32_t>(id - ((std::size_t{1} << level) - 1))};
  }

  DyadicIndex parent(DyadicIndex I) const {
    check(I);
    if (I.level == 0) throw RootInterval("root has no parent");
    return {I.level - 1, I.pos >> 1};
  }

  DyadicIndex sibling(DyadicIndex I) const {
    check(I);
    if (I.level == 0) throw RootInterval("root has no sibling");
    return {I.level, I.pos ^ 1u};
  }

  DyadicIndex left_child(DyadicIndex I) const {
    check(I);
    if (I.level == depth_) throw LeafInterval("leaf " + to_string(I) + " has no children");
    return {I.level + 1, I.pos << 1};
  }

  DyadicIndex right_child(DyadicIndex I) const {
    check(I);
    if (I.level == depth_) throw LeafInterval("leaf " + to_string(I) + " has no children");
    return {I.level + 1, (I.pos << 1) | 1u};
  }

  /// Positions of the leaves covered by I, as the half-open range [first, last).
  std::pair<std::size_t, std::size_t> leaf_span(DyadicIndex I) const {
    check(I);
    const int shift = depth_ - I.level;
    return {std::size_t{I.pos} << shift, (std::size_t{I.pos} + 1) << shift};
  }

  template <class F>
  void for_each_node(F&& fn) const {
    for (int l = 0; l <= depth_; ++l)
      for (std::uint32_t k = 0; k < (std::uint32_t{1} << l); ++k) fn(DyadicIndex{l, k});
  }

  template <class F>
  void for_each_nonleaf(F&& fn) const {
    for (int l = 0; l < depth_; ++l)
      for (std::uint32_t k = 0; k < (std::uint32_t{1} << l); ++k) fn(DyadicIndex{l, k});
  }

  /// Intervals that have a parent in the tree (levels 1..depth).
  template <class F>
  void for_each_with_parent(F&& fn) const {
    for (int l = 1; l <= depth_; ++l)
      for (std::uint32_t k = 0; k < (std::uint32_t{1} << l); ++k) fn(DyadicIndex{l, k});
  }

  /// D(J): dyadic subintervals of J within the tree, J itself included.
  template <class F>
  void for_each_descendant(DyadicIndex J, F&& fn) const {
    check(J);
    for (int l = J.level; l <= depth_; ++l) {
      const int shift = l - J.level;
      const std::uint32_t first = J.pos << shift;
      for (std::uint32_t k = first; k < first + (std::uint32_t{1} << shift); ++k)
        fn(DyadicIndex{l, k});
    }
  }

  friend bool operator==(const DyadicTree& a, const DyadicTree& b) noexcept {
    return a.depth_ == b.depth_;
  }

 private:
  DyadicIndex check(DyadicIndex I) const {
    if (!contains(I)) throw OutOfTree("interval " + to_string(I) + " not in tree of depth " + std::to_string(depth_));
    return I;
  }

  int depth_;
};

}  // namespace dyadic
