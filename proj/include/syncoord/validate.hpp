#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "syncoord/pipeline.hpp"

namespace syncoord {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t checked = 0;
  std::string detail;  // first failure, if any
};

namespace detail {

class Check {
 public:
  explicit Check(std::string name) { r_.name = std::move(name); }

  void expect(bool ok, const std::string& what) {
    ++r_.checked;
    if (!ok && r_.passed) {
      r_.passed = false;
      r_.detail = what;
    }
  }
  CheckResult done() { return std::move(r_); }

 private:
  CheckResult r_;
};

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

/// d(i,i) = 0, symmetry to 1e-12, triangle inequality to 1e-9 on all triples.
inline CheckResult check_metric_axioms(const MatrixD& d) {
  detail::Check c("metric_axioms");
  const std::size_t n = d.rows();
  for (std::size_t i = 0; i < n; ++i) {
    c.expect(d(i, i) == 0.0, "d(" + std::to_string(i) + "," + std::to_string(i) + ") != 0");
    for (std::size_t j = 0; j < n; ++j) {
      c.expect(std::abs(d(i, j) - d(j, i)) <= 1e-12, "asymmetric pair " + std::to_string(i) + "," + std::to_string(j));
      if (i != j) c.expect(d(i, j) > 0.0, "zero distance between distinct atoms");
      for (std::size_t k = 0; k < n; ++k)
        c.expect(d(i, k) <= d(i, j) + d(j, k) + 1e-9,
                 "triangle violated for " + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k));
    }
  }
  return c.done();
}

/// Π symmetric to 1e-10 and Π + 1e-10·I admits a Cholesky factor.
inline CheckResult check_sppr_psd(const MatrixD& pi) {
  detail::Check c("sppr_symmetric_psd");
  const std::size_t n = pi.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) c.expect(std::abs(pi(i, j) - pi(j, i)) <= 1e-10, "asymmetric pi");
  MatrixD shifted = pi;
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) += 1e-10;
  c.expect(cholesky(shifted).has_value(), "pi is not positive semidefinite");
  return c.done();
}

/// Dense solve against the truncated series, |diff| <= 1e-8 per entry.
inline CheckResult check_oracle_equivalence(const MolecularGraph& g, const SpprConfig& cfg) {
  detail::Check c("oracle_equivalence");
  const MatrixD solved = sppr_matrix(g, cfg);
  const MatrixD series = sppr_series_oracle(g, cfg, series_terms_for(cfg.alpha, 1e-9 * cfg.alpha));
  for (std::size_t i = 0; i < solved.rows(); ++i)
    for (std::size_t j = 0; j < solved.cols(); ++j)
      c.expect(std::abs(solved(i, j) - series(i, j)) <= 1e-8,
               "entry " + std::to_string(i) + "," + std::to_string(j) + " differs by " +
                   detail::fmt(std::abs(solved(i, j) - series(i, j))));
  return c.done();
}

/// Every sppr triplet angle argument lies in [-1, 1 + 1e-9].
inline CheckResult check_sppr_angle_arguments(const DirectedLineGraph& lg, const MatrixD& dist) {
  detail::Check c("sppr_angle_arguments");
  for (const LineEdge& e : lg.edges) {
    const auto [u, v, w] = lg.triplet(e);
    if (u == w) continue;
    const double a = dist(u, v), b = dist(v, w), o = dist(u, w);
    const double arg = (a * a + b * b - o * o) / (2.0 * a * b);
    c.expect(arg >= -1.0 - 1e-9 && arg <= 1.0 + 1e-9, "arccos argument " + detail::fmt(arg));
  }
  return c.done();
}

/// Positivity and ordering per entry, exact 0.02 Å bond widths, tolerance
/// rule on unrefined 2-hop entries, and both smoothing inequalities on every
/// triple of the refined matrix.
inline CheckResult check_bounds_invariants(const MolecularGraph& g, const BoundsMatrix& refined,
                                           const BondParams& params = BondParams::builtin()) {
  detail::Check c("bounds_invariants");
  constexpr double kEps = 1e-12;
  const BoundsMatrix one_hop = bond_bounds(g, params);
  const BoundsMatrix raw = two_hop_bounds(g, one_hop);

  for (const auto& [pair, iv] : refined.entries()) {
    const auto [i, j] = pair;
    const std::string tag = std::to_string(i) + "-" + std::to_string(j);
    c.expect(iv.min > 0.0, "non-positive d_min for " + tag);
    c.expect(iv.min <= iv.max, "d_min > d_max for " + tag);
    if (iv.hops == 1) {
      c.expect(g.bonded(i, j), "1-hop entry without bond " + tag);
      c.expect(std::abs(iv.width() - 2.0 * kBondTolerance) <= kEps, "bond width != 0.02 for " + tag);
    }
  }
  c.expect(refined.size() == raw.size(), "refinement changed the entry set");

  for (const auto& [pair, iv] : raw.entries()) {
    if (iv.hops != 2) continue;
    const auto [i, k] = pair;
    int paths = 0;
    for (const Neighbor& nb : g.neighbors(i)) paths += g.bonded(nb.atom, k);
    const double t = g.atom(i).element > kHeavyAtomThreshold || g.atom(k).element > kHeavyAtomThreshold
                         ? 0.08
                         : 0.04;
    c.expect(iv.width() <= 2.0 * t + kEps, "2-hop width exceeds tolerance");
    if (paths == 1) c.expect(std::abs(iv.width() - 2.0 * t) <= kEps, "2-hop tolerance mismatch");
  }

  std::vector<int> atoms;
  for (std::size_t a = 0; a < refined.num_atoms(); ++a) atoms.push_back(static_cast<int>(a));
  for (int i : atoms) {
    for (int k : atoms) {
      if (i >= k) continue;
      auto ik = refined.find(i, k);
      if (!ik) continue;
      for (int j : atoms) {
        if (j == i || j == k) continue;
        auto ij = refined.find(i, j);
        auto jk = refined.find(j, k);
        if (!ij || !jk) continue;
        c.expect(ik->max <= ij->max + jk->max + kEps, "upper triangle inequality violated");
        c.expect(ik->min >= std::max({ij->min - jk->max, jk->min - ij->max, 0.0}) - kEps,
                 "lower triangle inequality violated");
      }
    }
  }
  return c.done();
}

struct LabeledAngleBounds {
  std::array<int, 3> triplet;
  AngleBounds angles;
};

/// α_min <= α_center <= α_max, all inside [0, π].
inline CheckResult check_angle_ordering(const std::vector<LabeledAngleBounds>& all) {
  detail::Check c("angle_bound_ordering");
  constexpr double kEps = 1e-12;
  for (const auto& [t, a] : all) {
    const std::string tag = std::to_string(t[0]) + "-" + std::to_string(t[1]) + "-" + std::to_string(t[2]);
    c.expect(a.min <= a.center + kEps && a.center <= a.max + kEps, "alpha_min <= alpha_center <= alpha_max violated for " + tag);
    c.expect(a.min >= 0.0 && a.max <= std::numbers::pi, "angle outside [0, pi] for " + tag);
  }
  return c.done();
}

/// Node and edge counts plus equality with an O(E²) brute-force build.
inline CheckResult check_line_graph_counts(const MolecularGraph& g, const DirectedLineGraph& lg,
                                           bool include_backtrack = false) {
  detail::Check c("line_graph_counts");
  c.expect(lg.nodes.size() == 2 * g.num_bonds(), "|V_L| != 2|E|");
  std::size_t expected = 0;
  for (int v = 0; v < static_cast<int>(g.num_atoms()); ++v) {
    const std::size_t d = static_cast<std::size_t>(g.degree(v));
    expected += include_backtrack ? d * d : d * (d == 0 ? 0 : d - 1);
  }
  c.expect(lg.edges.size() == expected, "|E_L| != sum deg(deg-1)");

  std::vector<std::pair<int, int>> directed;
  for (const Bond& b : g.bonds()) {
    directed.emplace_back(b.a, b.b);
    directed.emplace_back(b.b, b.a);
  }
  std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> brute;
  for (const auto& x : directed)
    for (const auto& y : directed)
      if (x.second == y.first && (include_backtrack || y.second != x.first)) brute.insert({x, y});
  std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> built;
  for (const LineEdge& e : lg.edges) {
    const LineNode& a = lg.nodes[e.from];
    const LineNode& b = lg.nodes[e.to];
    c.expect(a.target == b.source, "line edge does not share the middle atom");
    built.insert({{a.source, a.target}, {b.source, b.target}});
  }
  c.expect(built.size() == lg.edges.size(), "duplicate line edges");
  c.expect(built == brute, "line graph differs from brute-force construction");
  return c.done();
}

inline double max_relative_difference(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-300});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

/// Random atom relabeling together with a random bond order.
inline MolecularGraph random_relabel(const MolecularGraph& g, std::mt19937_64& rng) {
  std::vector<int> perm(g.num_atoms());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> bond_order(g.num_bonds());
  std::iota(bond_order.begin(), bond_order.end(), 0);
  std::shuffle(bond_order.begin(), bond_order.end(), rng);
  return permute_atoms(g, perm, bond_order);
}

/// Bitwise determinism, invariance under relabelings and under reversed
/// line-node enumeration.
inline std::vector<CheckResult> check_refnet_invariances(const MolecularGraph& g, const PipelineConfig& cfg,
                                                         int relabelings, std::uint64_t seed,
                                                         const BondParams& params = BondParams::builtin()) {
  detail::Check det("refnet_determinism");
  detail::Check perm("refnet_permutation_invariance");
  detail::Check rev("refnet_reversal_invariance");
  const auto base = forward(run_pipeline(g, cfg, params).features, cfg.refnet);
  const auto again = forward(run_pipeline(g, cfg, params).features, cfg.refnet);
  det.expect(base.pooled == again.pooled, "pooled output differs between identical runs");

  std::mt19937_64 rng(seed);
  for (int r = 0; r < relabelings; ++r) {
    const MolecularGraph h = random_relabel(g, rng);
    const auto out = forward(run_pipeline(h, cfg, params).features, cfg.refnet);
    const double diff = max_relative_difference(base.pooled, out.pooled);
    perm.expect(diff <= 1e-6, "relabeled pooled output differs by " + detail::fmt(diff));
  }

  PipelineConfig flipped = cfg;
  flipped.line_graph.reverse_direction = !cfg.line_graph.reverse_direction;
  const auto out = forward(run_pipeline(g, flipped, params).features, cfg.refnet);
  const double diff = max_relative_difference(base.pooled, out.pooled);
  rev.expect(diff <= 1e-6, "reversed enumeration changes pooled output by " + detail::fmt(diff));
  return {det.done(), perm.done(), rev.done()};
}

enum class InjectedFault { NONE, ANGLE_ORDER };

struct ValidateOptions {
  int relabelings = 5;
  std::uint64_t seed = 1234;
  InjectedFault fault = InjectedFault::NONE;
};

/// Runs every property check on one molecule.
inline std::vector<CheckResult> validate_molecule(const MolecularGraph& g, const PipelineConfig& cfg,
                                                  const ValidateOptions& opts = {},
                                                  const BondParams& params = BondParams::builtin()) {
  std::vector<CheckResult> out;
  const SpprResult sppr = compute_sppr(g, cfg.sppr);
  out.push_back(check_metric_axioms(sppr.dist));
  out.push_back(check_sppr_psd(sppr.pi));
  out.push_back(check_oracle_equivalence(g, cfg.sppr));

  const BoundsMatrix bounds = compute_bounds(g, params, cfg.bounds);
  out.push_back(check_bounds_invariants(g, bounds, params));

  const DirectedLineGraph lg = build_line_graph(g, cfg.line_graph);
  std::vector<LabeledAngleBounds> angles;
  for (const LineEdge& e : lg.edges) {
    const auto t = lg.triplet(e);
    if (t[0] == t[2]) continue;
    AngleBounds a = angle_bounds(bounds, t[0], t[1], t[2]);
    if (opts.fault == InjectedFault::ANGLE_ORDER) std::swap(a.min, a.max);
    angles.push_back({t, a});
  }
  out.push_back(check_angle_ordering(angles));
  out.push_back(check_line_graph_counts(g, lg, cfg.line_graph.include_backtrack));
  out.push_back(check_sppr_angle_arguments(lg, sppr.dist));
  for (CheckResult& r : check_refnet_invariances(g, cfg, opts.relabelings, opts.seed, params)) out.push_back(std::move(r));
  return out;
}

}  // namespace syncoord
