#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "syncoord/error.hpp"
#include "syncoord/matrix.hpp"
#include "syncoord/molgraph.hpp"
#include "syncoord/uff_params.hpp"

namespace syncoord {

inline constexpr double kBondTolerance = 0.01;        // Angstrom, 1-hop
inline constexpr double kTwoHopTolerance = 0.04;      // Angstrom, 2-hop
inline constexpr double kTwoHopHeavyTolerance = 0.08; // either end heavier than Al
inline constexpr int kHeavyAtomThreshold = 13;        // atomic number of Al

/// Tetrahedral angle arccos(-1/3).
inline const double kTetrahedralAngle = std::acos(-1.0 / 3.0);

struct DistanceInterval {
  double min = 0.0;
  double max = 0.0;
  int hops = 1;

  double center() const { return 0.5 * (min + max); }
  double width() const { return max - min; }

  friend bool operator==(const DistanceInterval&, const DistanceInterval&) = default;
};

/// Distance intervals for unordered atom pairs at graph distance 1 or 2.
class BoundsMatrix {
 public:
  using Key = std::pair<int, int>;

  BoundsMatrix() = default;
  explicit BoundsMatrix(std::size_t num_atoms) : n_(num_atoms) {}

  static Key key(int i, int j) { return i < j ? Key{i, j} : Key{j, i}; }

  std::size_t num_atoms() const noexcept { return n_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  bool contains(int i, int j) const { return entries_.count(key(i, j)) != 0; }
  std::optional<DistanceInterval> find(int i, int j) const {
    auto it = entries_.find(key(i, j));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }
  const DistanceInterval& at(int i, int j) const {
    auto it = entries_.find(key(i, j));
    if (it == entries_.end())
      throw Error("no distance bound for pair " + std::to_string(i) + "-" + std::to_string(j));
    return it->second;
  }
  void set(int i, int j, DistanceInterval v) {
    if (i == j) throw Error("distance bound on identical atoms");
    entries_[key(i, j)] = v;
  }

  const std::map<Key, DistanceInterval>& entries() const noexcept { return entries_; }

  friend bool operator==(const BoundsMatrix&, const BoundsMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::map<Key, DistanceInterval> entries_;
};

struct AngleBounds {
  double min = 0.0;
  double center = 0.0;
  double max = 0.0;

  friend bool operator==(const AngleBounds&, const AngleBounds&) = default;
};

/// One interval per bond: equilibrium length ± 0.01 Å.
inline BoundsMatrix bond_bounds(const MolecularGraph& g, const BondParams& params = BondParams::builtin(),
                                Warnings* warnings = nullptr) {
  BoundsMatrix out(g.num_atoms());
  for (const Bond& b : g.bonds()) {
    const double l = equilibrium_bond_length(g.atom(b.a), g.atom(b.b), b.order, params, warnings);
    out.set(b.a, b.b, {l - kBondTolerance, l + kBondTolerance, 1});
  }
  return out;
}

inline double ideal_angle(Hybridization h) {
  switch (h) {
    case Hybridization::SP: return std::numbers::pi;
    case Hybridization::SP2: return 2.0 * std::numbers::pi / 3.0;
    case Hybridization::SP3:
    case Hybridization::OTHER: return kTetrahedralAngle;
  }
  return kTetrahedralAngle;
}

/// Interior angle of a regular polygon with `m` vertices.
inline double polygon_angle(int m) { return std::numbers::pi * (m - 2) / m; }

/// Ideal i-j-k angle at the central atom j. When i-j-k lies on j's smallest
/// ring the regular-polygon angle of that ring wins over hybridization.
inline double estimate_angle(const MolecularGraph& g, int i, int j, int k) {
  if (!g.bonded(i, j) || !g.bonded(j, k)) throw Error("estimate_angle: atoms are not bonded i-j-k");
  const Atom& center = g.atom(j);
  if (center.in_ring) {
    if (auto m = smallest_ring_through_path(g, i, j, k); m && *m == *center.smallest_ring_size)
      return polygon_angle(*m);
  }
  return ideal_angle(center.hybridization);
}

/// Third side of a triangle with sides `a`, `b` enclosing `angle`.
inline double law_of_cosines(double a, double b, double angle) {
  return std::sqrt(std::max(0.0, a * a + b * b - 2.0 * a * b * std::cos(angle)));
}

inline double two_hop_tolerance(int element_i, int element_k) {
  return (element_i > kHeavyAtomThreshold || element_k > kHeavyAtomThreshold) ? kTwoHopHeavyTolerance
                                                                              : kTwoHopTolerance;
}

/// Adds 2-hop intervals (path i-j-k, i and k unbonded) to a matrix holding
/// 1-hop intervals. Intervals from alternative middle atoms are intersected;
/// an empty intersection falls back to the hull.
inline BoundsMatrix two_hop_bounds(const MolecularGraph& g, const BoundsMatrix& one_hop,
                                   Warnings* warnings = nullptr) {
  BoundsMatrix out = one_hop;
  std::map<BoundsMatrix::Key, std::vector<DistanceInterval>> candidates;
  for (int j = 0; j < static_cast<int>(g.num_atoms()); ++j) {
    auto nbrs = g.neighbors(j);
    for (std::size_t a = 0; a < nbrs.size(); ++a) {
      for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
        const int i = nbrs[a].atom;
        const int k = nbrs[b].atom;
        if (g.bonded(i, k)) continue;
        const double lij = one_hop.at(i, j).center();
        const double ljk = one_hop.at(j, k).center();
        const double d = law_of_cosines(lij, ljk, estimate_angle(g, i, j, k));
        const double t = two_hop_tolerance(g.atom(i).element, g.atom(k).element);
        candidates[BoundsMatrix::key(i, k)].push_back({d - t, d + t, 2});
      }
    }
  }
  for (const auto& [pair, list] : candidates) {
    DistanceInterval meet = list.front();
    DistanceInterval hull = list.front();
    for (const DistanceInterval& c : list) {
      meet.min = std::max(meet.min, c.min);
      meet.max = std::min(meet.max, c.max);
      hull.min = std::min(hull.min, c.min);
      hull.max = std::max(hull.max, c.max);
    }
    if (meet.min > meet.max) {
      warn(warnings, "conflicting 2-hop bounds for pair " + std::to_string(pair.first) + "-" +
                         std::to_string(pair.second) + "; using hull");
      meet = hull;
    }
    meet.min = std::max(meet.min, std::numeric_limits<double>::min());
    out.set(pair.first, pair.second, meet);
  }
  return out;
}

struct RefineOptions {
  /// Smooth over all atom pairs (unknown pairs start at [0, inf)) instead of
  /// only triples whose pairs all carry bounds. Output keeps the original keys.
  bool full_matrix = false;
  int max_sweeps = 10000;
};

/// Triangle-inequality bound smoothing iterated to its fixpoint.
inline BoundsMatrix refine_triangle(const BoundsMatrix& bounds, RefineOptions opts = {},
                                    Warnings* warnings = nullptr) {
  const std::size_t n = bounds.num_atoms();
  const double inf = std::numeric_limits<double>::infinity();
  MatrixD lo(n, n, opts.full_matrix ? 0.0 : -1.0);
  MatrixD hi(n, n, opts.full_matrix ? inf : -1.0);
  Matrix<char> present(n, n, opts.full_matrix ? 1 : 0);
  for (std::size_t i = 0; i < n; ++i) {
    lo(i, i) = 0.0;
    hi(i, i) = 0.0;
  }
  for (const auto& [pair, iv] : bounds.entries()) {
    const auto [i, j] = pair;
    lo(i, j) = lo(j, i) = iv.min;
    hi(i, j) = hi(j, i) = iv.max;
    present(i, j) = present(j, i) = 1;
  }

  // Triples (i, j, k) with all three pairs known, i < k, j distinct.
  std::vector<std::array<int, 3>> triples;
  for (int i = 0; i < static_cast<int>(n); ++i) {
    for (int k = i + 1; k < static_cast<int>(n); ++k) {
      if (!present(i, k)) continue;
      for (int j = 0; j < static_cast<int>(n); ++j) {
        if (j == i || j == k || !present(i, j) || !present(j, k)) continue;
        triples.push_back({i, j, k});
      }
    }
  }

  bool changed = true;
  int sweeps = 0;
  while (changed && sweeps < opts.max_sweeps) {
    changed = false;
    ++sweeps;
    for (const auto& [i, j, k] : triples) {
      const double up = hi(i, j) + hi(j, k);
      if (up < hi(i, k)) {
        hi(i, k) = hi(k, i) = up;
        changed = true;
      }
      const double low = std::max(lo(i, j) - hi(j, k), lo(j, k) - hi(i, j));
      if (low > lo(i, k)) {
        lo(i, k) = lo(k, i) = low;
        changed = true;
      }
    }
  }
  if (changed) warn(warnings, "bound smoothing did not converge");

  BoundsMatrix out(n);
  for (const auto& [pair, iv] : bounds.entries()) {
    const auto [i, j] = pair;
    DistanceInterval r{lo(i, j), hi(i, j), iv.hops};
    if (r.min > r.max) {
      warn(warnings, "inconsistent bounds for pair " + std::to_string(i) + "-" + std::to_string(j) +
                         " after smoothing; keeping unrefined interval");
      r = iv;
    }
    out.set(i, j, r);
  }
  return out;
}

struct BoundsOptions {
  RefineOptions refine;
};

/// 1-hop bounds, 2-hop bounds, then smoothing.
inline BoundsMatrix compute_bounds(const MolecularGraph& g, const BondParams& params = BondParams::builtin(),
                                   BoundsOptions opts = {}, Warnings* warnings = nullptr) {
  return refine_triangle(two_hop_bounds(g, bond_bounds(g, params, warnings), warnings), opts.refine, warnings);
}

namespace detail {

inline double clamped_acos(double arg, bool* clamped_far) {
  constexpr double kSilentClamp = 1e-6;
  if (!(arg >= -1.0 - kSilentClamp && arg <= 1.0 + kSilentClamp) && clamped_far != nullptr) *clamped_far = true;
  return std::acos(std::clamp(arg, -1.0, 1.0));
}

inline double cosine_rule_angle(double side_a, double side_b, double opposite, bool* clamped_far) {
  return clamped_acos((side_a * side_a + side_b * side_b - opposite * opposite) / (2.0 * side_a * side_b),
                      clamped_far);
}

}  // namespace detail

/// Minimally, centrally and maximally realizable i-j-k angles from the
/// interval matrix. The longest i-k with the shortest arms gives the largest
/// angle and vice versa.
inline AngleBounds angle_bounds(const BoundsMatrix& bounds, int i, int j, int k, Warnings* warnings = nullptr) {
  const auto ij = bounds.find(i, j);
  const auto jk = bounds.find(j, k);
  if (!ij || !jk) throw Error("angle bounds: missing bond bound for triplet");
  const auto ik = bounds.find(i, k);
  if (!ik) throw Error("triplet without 2-hop bound");
  bool far = false;
  AngleBounds out;
  out.max = detail::cosine_rule_angle(ij->min, jk->min, ik->max, &far);
  out.min = detail::cosine_rule_angle(ij->max, jk->max, ik->min, &far);
  out.center = detail::cosine_rule_angle(ij->center(), jk->center(), ik->center(), &far);
  if (far)
    warn(warnings, "angle bound for triplet " + std::to_string(i) + "-" + std::to_string(j) + "-" +
                       std::to_string(k) + " clamped");
  return out;
}

}  // namespace syncoord
