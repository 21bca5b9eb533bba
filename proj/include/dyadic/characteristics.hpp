#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "dyadic/sequence.hpp"
#include "dyadic/step.hpp"

namespace dyadic {

namespace detail {

/// Per-node plain averages of a leaf array, node-id indexed.
inline std::vector<double> node_averages(const DyadicTree& tree, std::span<const double> leaves) {
  std::vector<double> v = interval_integrals(tree, leaves);
  std::size_t id = 0;
  for (int l = 0; l <= tree.depth(); ++l) {
    const double scale = std::ldexp(1.0, l);
    for (std::uint32_t k = 0; k < (std::uint32_t{1} << l); ++k, ++id) v[id] *= scale;
  }
  return v;
}

template <class Fn>
std::vector<double> map_leaves(const StepWeight& w, Fn&& fn) {
  std::vector<double> out(w.leaf_values().begin(), w.leaf_values().end());
  for (double& x : out) x = fn(x);
  return out;
}

/// Pointwise product of two leaf spans.
inline std::vector<double> leaf_product(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.begin(), a.end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= b[k];
  return out;
}

/// Sums S(J) = sum of term[I] over I in D(J), given term per node id (leaf entries allowed).
inline std::vector<double> subtree_sums(const DyadicTree& tree, std::vector<double> term) {
  for (std::size_t id = tree.nonleaf_count(); id-- > 0;) term[id] += term[2 * id + 1] + term[2 * id + 2];
  return term;
}

}  // namespace detail

/// [u,v]_{A_p^d(w)}: max over intervals of <v>_I^w (<u^{-1/(p-1)}>_I^w)^{p-1}.
inline double pair_ap(const StepWeight& u, const StepWeight& v, const StepWeight& w, double p) {
  if (!(p > 1.0)) throw BadExponent("A_p requires p > 1");
  const double s = -1.0 / (p - 1.0);
  const auto vw = interval_integrals(w.tree(), detail::leaf_product(v.leaf_values(), w.leaf_values()));
  const auto uw = interval_integrals(
      w.tree(), detail::leaf_product(detail::map_leaves(u, [s](double x) { return std::pow(x, s); }),
                                     w.leaf_values()));
  double best = 0.0;
  for (std::size_t id = 0; id < w.tree().node_count(); ++id) {
    const double m = w.mass(w.tree().node_at(id));
    best = std::max(best, vw[id] / m * std::pow(uw[id] / m, p - 1.0));
  }
  return best;
}

/// [u,v]_{RH_p^d(w)}: max over intervals of (<v^p>_I^w)^{1/p} / <u>_I^w.
inline double pair_rhp(const StepWeight& u, const StepWeight& v, const StepWeight& w, double p) {
  if (!(p > 1.0)) throw BadExponent("RH_p requires p > 1");
  const auto vpw = interval_integrals(
      w.tree(), detail::leaf_product(detail::map_leaves(v, [p](double x) { return std::pow(x, p); }),
                                     w.leaf_values()));
  const auto uw = interval_integrals(w.tree(), detail::leaf_product(u.leaf_values(), w.leaf_values()));
  double best = 0.0;
  for (std::size_t id = 0; id < w.tree().node_count(); ++id) {
    const double m = w.mass(w.tree().node_at(id));
    best = std::max(best, std::pow(vpw[id] / m, 1.0 / p) * m / uw[id]);
  }
  return best;
}

/// [w]_{A_p^d}: max over intervals of <w>_I <w^{-1/(p-1)}>_I^{p-1}.
inline double ap_characteristic(const StepWeight& w, double p) {
  if (!(p > 1.0)) throw BadExponent("A_p requires p > 1");
  const double s = -1.0 / (p - 1.0);
  const auto avg = detail::node_averages(w.tree(), w.leaf_values());
  const auto dual =
      detail::node_averages(w.tree(), detail::map_leaves(w, [s](double x) { return std::pow(x, s); }));
  double best = 0.0;
  for (std::size_t id = 0; id < w.tree().node_count(); ++id)
    best = std::max(best, avg[id] * std::pow(dual[id], p - 1.0));
  return best;
}

/// [w]_{RH_p^d}: max over intervals of <w^p>_I^{1/p} / <w>_I.
inline double rhp_characteristic(const StepWeight& w, double p) {
  if (!(p > 1.0)) throw BadExponent("RH_p requires p > 1");
  const auto avg = detail::node_averages(w.tree(), w.leaf_values());
  const auto pw =
      detail::node_averages(w.tree(), detail::map_leaves(w, [p](double x) { return std::pow(x, p); }));
  double best = 0.0;
  for (std::size_t id = 0; id < w.tree().node_count(); ++id)
    best = std::max(best, std::pow(pw[id], 1.0 / p) / avg[id]);
  return best;
}

struct EntropyPair {
  double a_inf;  // max of <w>_I exp(-<log w>_I)
  double rh1;    // max of <(w/<w>_I) log(w/<w>_I)>_I
};

inline EntropyPair ainf_and_rh1(const StepWeight& w) {
  const auto avg = detail::node_averages(w.tree(), w.leaf_values());
  const auto log_avg =
      detail::node_averages(w.tree(), detail::map_leaves(w, [](double x) { return std::log(x); }));
  const auto wlogw_avg = detail::node_averages(
      w.tree(), detail::map_leaves(w, [](double x) { return x * std::log(x); }));
  EntropyPair out{0.0, 0.0};
  for (std::size_t id = 0; id < w.tree().node_count(); ++id) {
    out.a_inf = std::max(out.a_inf, avg[id] * std::exp(-log_avg[id]));
    out.rh1 = std::max(out.rh1, wlogw_avg[id] / avg[id] - std::log(avg[id]));
  }
  return out;
}

/// D(w): max over intervals with a parent of w(parent)/w(I). Always >= 2.
inline double doubling_constant(const StepWeight& w) {
  double best = 0.0;
  w.tree().for_each_with_parent(
      [&](DyadicIndex I) { best = std::max(best, w.mass(w.tree().parent(I)) / w.mass(I)); });
  return best;
}

/// [u,v]_{A_2^d(w)}.
inline double joint_a2(const StepWeight& u, const StepWeight& v, const StepWeight& w) {
  return pair_ap(u, v, w, 2.0);
}

/// [u,v]_{restricted A_2^d(w)}: the joint quantity damped by (w(J*)/w(parent))^2,
/// over intervals J with a parent.
inline double restricted_a2(const StepWeight& u, const StepWeight& v, const StepWeight& w) {
  const auto& tree = w.tree();
  const auto vw = interval_integrals(tree, detail::leaf_product(v.leaf_values(), w.leaf_values()));
  const auto uw = interval_integrals(
      tree, detail::leaf_product(detail::map_leaves(u, [](double x) { return 1.0 / x; }), w.leaf_values()));
  double best = 0.0;
  tree.for_each_with_parent([&](DyadicIndex J) {
    const double m = w.mass(J);
    const double damp = w.mass(tree.sibling(J)) / w.mass(tree.parent(J));
    const std::size_t id = tree.node_id(J);
    best = std::max(best, damp * damp * (uw[id] / m) * (vw[id] / m));
  });
  return best;
}

enum class BuckleyMode { ap, rhp, rh1, fkp, chmpw };

/// Local best constant at J of the summation characterization selected by mode:
/// the left-hand sum at J divided by its right-hand average factor.
inline double buckley_sum(const StepWeight& w, double p, BuckleyMode mode, DyadicIndex J) {
  const auto& tree = w.tree();
  if (tree.is_leaf(J)) throw LeafInterval("summation conditions need a non-leaf J");
  if ((mode == BuckleyMode::ap || mode == BuckleyMode::rhp || mode == BuckleyMode::chmpw) && !(p > 1.0))
    throw BadExponent("mode requires p > 1");

  const auto avg = detail::node_averages(tree, w.leaf_values());
  std::vector<double> pow_avg;
  if (mode == BuckleyMode::chmpw)
    pow_avg = detail::node_averages(tree, detail::map_leaves(w, [p](double x) { return std::pow(x, p); }));

  double sum = 0.0;
  tree.for_each_descendant(J, [&](DyadicIndex I) {
    if (tree.is_leaf(I)) return;
    const std::size_t id = tree.node_id(I);
    const double delta = mode == BuckleyMode::chmpw
                             ? pow_avg[2 * id + 2] - pow_avg[2 * id + 1]
                             : avg[2 * id + 2] - avg[2 * id + 1];
    double term = length(I) * delta * delta;
    switch (mode) {
      case BuckleyMode::ap:
        term *= std::pow(avg[id], -1.0 / (p - 1.0)) / (avg[id] * avg[id]);
        break;
      case BuckleyMode::rhp:
        term *= std::pow(avg[id], p) / (avg[id] * avg[id]);
        break;
      case BuckleyMode::rh1:
        term *= avg[id] / (avg[id] * avg[id]);
        break;
      case BuckleyMode::fkp:
        term /= avg[id] * avg[id];
        break;
      case BuckleyMode::chmpw:
        term /= std::pow(avg[id], p);
        break;
    }
    sum += term;
  });
  sum /= length(J);

  const std::size_t jid = tree.node_id(J);
  switch (mode) {
    case BuckleyMode::ap:
      return sum / std::pow(avg[jid], -1.0 / (p - 1.0));
    case BuckleyMode::rhp:
      return sum / std::pow(avg[jid], p);
    case BuckleyMode::rh1:
      return sum / avg[jid];
    case BuckleyMode::fkp:
      return sum;
    case BuckleyMode::chmpw:
      return sum / pow_avg[jid];
  }
  return sum;
}

/// Best packing constant: max over J of (1/|J|) sum_{I in D(J)} lambda_I.
inline double carleson_constant(const CarlesonSequence& lambda) {
  const auto& tree = lambda.tree();
  std::vector<double> term(tree.node_count(), 0.0);
  tree.for_each_nonleaf([&](DyadicIndex I) { term[tree.node_id(I)] = lambda.at(I); });
  const auto sums = detail::subtree_sums(tree, std::move(term));
  double best = 0.0;
  std::size_t id = 0;
  for (int l = 0; l <= tree.depth(); ++l) {
    const double scale = std::ldexp(1.0, l);
    for (std::uint32_t k = 0; k < (std::uint32_t{1} << l); ++k, ++id)
      best = std::max(best, sums[id] * scale);
  }
  return best;
}

/// Best weighted packing constant: max over J of
/// (1/|J|) sum_{I in D(J)} lambda_I <w>_I / <w>_J.
inline double carleson_constant(const CarlesonSequence& lambda, const StepWeight& w) {
  const auto& tree = lambda.tree();
  const auto avg = detail::node_averages(tree, w.leaf_values());
  std::vector<double> term(tree.node_count(), 0.0);
  tree.for_each_nonleaf(
      [&](DyadicIndex I) { term[tree.node_id(I)] = lambda.at(I) * avg[tree.node_id(I)]; });
  const auto sums = detail::subtree_sums(tree, std::move(term));
  double best = 0.0;
  std::size_t id = 0;
  for (int l = 0; l <= tree.depth(); ++l) {
    const double scale = std::ldexp(1.0, l);
    for (std::uint32_t k = 0; k < (std::uint32_t{1} << l); ++k, ++id)
      best = std::max(best, sums[id] * scale / avg[id]);
  }
  return best;
}

/// nu_I = lambda_I / (<w^{-1}>_I <w>_I): the transform that turns a plain
/// packing sequence into a w-weighted one.
inline CarlesonSequence beznosova_transform(const CarlesonSequence& lambda, const StepWeight& w) {
  const auto& tree = lambda.tree();
  const auto avg = detail::node_averages(tree, w.leaf_values());
  const auto inv_avg =
      detail::node_averages(tree, detail::map_leaves(w, [](double x) { return 1.0 / x; }));
  CarlesonSequence nu(tree);
  tree.for_each_nonleaf([&](DyadicIndex I) {
    const std::size_t id = tree.node_id(I);
    nu.set(I, lambda.at(I) / (inv_avg[id] * avg[id]));
  });
  return nu;
}

/// The four equivalent three-weight quantities: the direct supremum
/// sup <vw^2>_I <u^{-1}>_I / <w>_I^2 and its three disguises as pair
/// characteristics. All four agree up to rounding.
struct FourForms {
  double direct;
  double via_pair_a2;   // [uw, vw]_{A_2(w)}
  double via_dual_pair; // [(vw)^{-1}, (uw)^{-1}]_{A_2(w)}
  double via_rh2;       // [uw, (uv)^{1/2} w]_{RH_2(u^{-1})} squared
};

inline FourForms three_weight_forms(const StepWeight& u, const StepWeight& v, const StepWeight& w) {
  const auto& tree = w.tree();
  const auto inv_u = detail::node_averages(tree, detail::map_leaves(u, [](double x) { return 1.0 / x; }));
  const auto vw2 = detail::node_averages(
      tree, detail::leaf_product(v.leaf_values(),
                                 detail::map_leaves(w, [](double x) { return x * x; })));
  const auto wavg = detail::node_averages(tree, w.leaf_values());
  double direct = 0.0;
  for (std::size_t id = 0; id < tree.node_count(); ++id)
    direct = std::max(direct, vw2[id] * inv_u[id] / (wavg[id] * wavg[id]));

  const StepWeight uw = product(u, w);
  const StepWeight vw = product(v, w);
  const double via_pair = pair_ap(uw, vw, w, 2.0);
  const double via_dual = pair_ap(reciprocal(vw), reciprocal(uw), w, 2.0);
  const double rh = pair_rhp(uw, product(power(product(u, v), 0.5), w), reciprocal(u), 2.0);
  return {direct, via_pair, via_dual, rh * rh};
}

struct CharacteristicReport {
  int depth = 0;
  std::map<double, double> ap;
  std::map<double, double> rhp;
  double a_inf = 0.0;
  double rh1 = 0.0;
  double doubling = 0.0;
  // three-weight block, absent when only a single weight was supplied
  std::optional<double> joint_a2w, restricted_a2w;
  std::optional<double> sf_joint, sf_carleson;
  std::optional<double> mult_joint, mult_carleson, mult_dual_carleson;
  std::optional<double> q_max, r_max;
};

inline CharacteristicReport single_weight_report(const StepWeight& w,
                                                 const std::vector<double>& ps = {2.0}) {
  CharacteristicReport rep;
  rep.depth = w.tree().depth();
  for (double p : ps) {
    rep.ap[p] = ap_characteristic(w, p);
    rep.rhp[p] = rhp_characteristic(w, p);
  }
  const EntropyPair e = ainf_and_rh1(w);
  rep.a_inf = e.a_inf;
  rep.rh1 = e.rh1;
  rep.doubling = doubling_constant(w);
  return rep;
}

/// All report fields for a triple (u, v, w): single-weight characteristics of w,
/// the joint and restricted two-weight quantities, the square-function bound
/// constants, the multiplier bound constants, and the two tail suprema.
inline CharacteristicReport theorem_constants(const StepWeight& u, const StepWeight& v,
                                              const StepWeight& w,
                                              const std::vector<double>& ps = {2.0}) {
  const auto& tree = w.tree();
  CharacteristicReport rep = single_weight_report(w, ps);
  rep.joint_a2w = joint_a2(u, v, w);
  rep.restricted_a2w = restricted_a2(u, v, w);

  const StepWeight winv = reciprocal(w);
  rep.sf_joint = pair_ap(product(u, winv), product(v, winv), w, 2.0);

  // Carleson constant of the square-function sufficiency condition:
  // per-interval terms |Delta_I^w(u^{-1}w)|^2 [w(I-)^2 v(I+) + w(I+)^2 v(I-)] / w(I)^2,
  // subtree-summed and normalized by the integral of u^{-1}w^2 over J.
  {
    const auto u1w2 = interval_integrals(
        tree, detail::leaf_product(detail::map_leaves(u, [](double x) { return 1.0 / x; }),
                                   detail::map_leaves(w, [](double x) { return x * x; })));
    const auto vmass = interval_integrals(tree, v.leaf_values());
    std::vector<double> term(tree.node_count(), 0.0);
    tree.for_each_nonleaf([&](DyadicIndex I) {
      const std::size_t id = tree.node_id(I);
      const std::size_t l = 2 * id + 1, r = 2 * id + 2;
      const double wl = w.mass(tree.left_child(I)), wr = w.mass(tree.right_child(I));
      const double wm = w.mass(I);
      const double delta = u1w2[r] / wr - u1w2[l] / wl;
      term[id] = delta * delta * (wl * wl * vmass[r] + wr * wr * vmass[l]) / (wm * wm);
    });
    const auto sums = detail::subtree_sums(tree, std::move(term));
    double best = 0.0;
    for (std::size_t id = 0; id < tree.node_count(); ++id)
      if (u1w2[id] > 0.0) best = std::max(best, sums[id] / u1w2[id]);
    rep.sf_carleson = best;
  }

  const auto inv_u = detail::node_averages(tree, detail::map_leaves(u, [](double x) { return 1.0 / x; }));
  const auto vw2 = detail::node_averages(
      tree,
      detail::leaf_product(v.leaf_values(), detail::map_leaves(w, [](double x) { return x * x; })));
  const auto wavg = detail::node_averages(tree, w.leaf_values());

  double c1 = 0.0;
  for (std::size_t id = 0; id < tree.node_count(); ++id)
    c1 = std::max(c1, inv_u[id] * vw2[id] / (wavg[id] * wavg[id]));
  rep.mult_joint = c1;

  // Multiplier Carleson conditions: |I| |Delta_I u^{-1}|^2 <vw^2>_I / <w>_I^2
  // against <u^{-1}>_J, and the dual with the roles of u^{-1} and vw^2 exchanged.
  {
    std::vector<double> t2(tree.node_count(), 0.0), t3(tree.node_count(), 0.0);
    tree.for_each_nonleaf([&](DyadicIndex I) {
      const std::size_t id = tree.node_id(I);
      const std::size_t l = 2 * id + 1, r = 2 * id + 2;
      const double du = inv_u[r] - inv_u[l];
      const double dv = vw2[r] - vw2[l];
      const double denom = wavg[id] * wavg[id];
      t2[id] = length(I) * du * du * vw2[id] / denom;
      t3[id] = length(I) * dv * dv * inv_u[id] / denom;
    });
    const auto s2 = detail::subtree_sums(tree, std::move(t2));
    const auto s3 = detail::subtree_sums(tree, std::move(t3));
    double b2 = 0.0, b3 = 0.0;
    std::size_t id = 0;
    for (int l = 0; l <= tree.depth(); ++l) {
      const double scale = std::ldexp(1.0, l);
      for (std::uint32_t k = 0; k < (std::uint32_t{1} << l); ++k, ++id) {
        b2 = std::max(b2, s2[id] * scale / inv_u[id]);
        b3 = std::max(b3, s3[id] * scale / vw2[id]);
      }
    }
    rep.mult_carleson = b2;
    rep.mult_dual_carleson = b3;
  }

  // Tail sums Q_J and R_J: every proper descendant I of J contributes a term
  // built from its own averages and its parent's. The sum over D(J) \ {J} is
  // the full subtree sum minus the J term itself.
  {
    std::vector<double> q(tree.node_count(), 0.0), r(tree.node_count(), 0.0);
    tree.for_each_with_parent([&](DyadicIndex I) {
      const std::size_t id = tree.node_id(I);
      const std::size_t pid = tree.node_id(tree.parent(I));
      const double dev = 1.0 - wavg[id] / wavg[pid];
      const double plen = length(tree.parent(I));
      const double uratio = inv_u[id] / wavg[id];
      const double vratio = vw2[id] / wavg[id];
      q[id] = plen * uratio * uratio * dev * dev * vw2[pid];
      r[id] = plen * vratio * vratio * dev * dev * inv_u[pid];
    });
    const auto sq = detail::subtree_sums(tree, q);
    const auto sr = detail::subtree_sums(tree, r);
    double qb = 0.0, rb = 0.0;
    std::size_t id = 0;
    for (int l = 0; l <= tree.depth(); ++l) {
      const double scale = std::ldexp(1.0, l);
      for (std::uint32_t k = 0; k < (std::uint32_t{1} << l); ++k, ++id) {
        qb = std::max(qb, (sq[id] - q[id]) * scale / inv_u[id]);
        rb = std::max(rb, (sr[id] - r[id]) * scale / vw2[id]);
      }
    }
    rep.q_max = qb;
    rep.r_max = rb;
  }

  return rep;
}

}  // namespace dyadic
