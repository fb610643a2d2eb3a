#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "syncoord/elements.hpp"
#include "syncoord/error.hpp"

namespace syncoord {

enum class Hybridization { SP, SP2, SP3, OTHER };
enum class BondOrder { SINGLE, DOUBLE, TRIPLE, AROMATIC };

inline std::string_view to_string(Hybridization h) {
  switch (h) {
    case Hybridization::SP: return "SP";
    case Hybridization::SP2: return "SP2";
    case Hybridization::SP3: return "SP3";
    case Hybridization::OTHER: return "OTHER";
  }
  return "OTHER";
}

inline std::optional<Hybridization> hybridization_from_string(std::string_view s) {
  if (s == "SP" || s == "sp") return Hybridization::SP;
  if (s == "SP2" || s == "sp2") return Hybridization::SP2;
  if (s == "SP3" || s == "sp3") return Hybridization::SP3;
  if (s == "OTHER" || s == "other") return Hybridization::OTHER;
  return std::nullopt;
}

inline std::string_view to_string(BondOrder o) {
  switch (o) {
    case BondOrder::SINGLE: return "SINGLE";
    case BondOrder::DOUBLE: return "DOUBLE";
    case BondOrder::TRIPLE: return "TRIPLE";
    case BondOrder::AROMATIC: return "AROMATIC";
  }
  return "SINGLE";
}

inline std::optional<BondOrder> bond_order_from_string(std::string_view s) {
  if (s == "SINGLE" || s == "single") return BondOrder::SINGLE;
  if (s == "DOUBLE" || s == "double") return BondOrder::DOUBLE;
  if (s == "TRIPLE" || s == "triple") return BondOrder::TRIPLE;
  if (s == "AROMATIC" || s == "aromatic") return BondOrder::AROMATIC;
  return std::nullopt;
}

/// Numeric bond order as used by the UFF bond-length correction.
inline double numeric_order(BondOrder o) {
  switch (o) {
    case BondOrder::SINGLE: return 1.0;
    case BondOrder::DOUBLE: return 2.0;
    case BondOrder::TRIPLE: return 3.0;
    case BondOrder::AROMATIC: return 1.5;
  }
  return 1.0;
}

struct Atom {
  int index = 0;
  int element = 6;
  int formal_charge = 0;
  bool aromatic = false;
  bool in_ring = false;
  std::optional<int> smallest_ring_size;
  Hybridization hybridization = Hybridization::OTHER;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::SINGLE;

  bool connects(int i, int j) const { return (a == i && b == j) || (a == j && b == i); }
  int other(int i) const { return i == a ? b : a; }

  friend bool operator==(const Bond&, const Bond&) = default;
};

struct Neighbor {
  int atom;
  int bond;
};

/// Simple undirected heavy-atom graph. Immutable once constructed; the
/// constructor validates structure and builds adjacency.
class MolecularGraph {
 public:
  MolecularGraph() = default;

  MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds)
      : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
    if (atoms_.empty()) throw GraphError("molecular graph has no atoms");
    const int n = static_cast<int>(atoms_.size());
    for (int i = 0; i < n; ++i) {
      if (atoms_[i].index != i) throw GraphError("atom indices must be dense 0..N-1");
      if (atoms_[i].element < 1 || atoms_[i].element > kMaxAtomicNumber)
        throw GraphError("atom " + std::to_string(i) + ": element out of range");
      if (atoms_[i].in_ring != atoms_[i].smallest_ring_size.has_value())
        throw GraphError("atom " + std::to_string(i) + ": ring size present iff in ring");
      if (atoms_[i].smallest_ring_size && *atoms_[i].smallest_ring_size < 3)
        throw GraphError("atom " + std::to_string(i) + ": ring size must be >= 3");
    }
    adjacency_.assign(atoms_.size(), {});
    for (int bi = 0; bi < static_cast<int>(bonds_.size()); ++bi) {
      const Bond& b = bonds_[bi];
      if (b.a < 0 || b.a >= n || b.b < 0 || b.b >= n)
        throw GraphError("bond " + std::to_string(bi) + ": index out of range");
      if (b.a == b.b) throw GraphError("bond " + std::to_string(bi) + ": self-loop");
      if (bond_index(b.a, b.b))
        throw GraphError("duplicate bond " + std::to_string(b.a) + "-" + std::to_string(b.b));
      adjacency_[b.a].push_back({b.b, bi});
      adjacency_[b.b].push_back({b.a, bi});
    }
  }

  std::size_t num_atoms() const noexcept { return atoms_.size(); }
  std::size_t num_bonds() const noexcept { return bonds_.size(); }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<Bond>& bonds() const noexcept { return bonds_; }
  const Atom& atom(int i) const { return atoms_.at(i); }
  const Bond& bond(int b) const { return bonds_.at(b); }

  std::span<const Neighbor> neighbors(int i) const { return adjacency_.at(i); }
  int degree(int i) const { return static_cast<int>(adjacency_.at(i).size()); }

  std::optional<int> bond_index(int i, int j) const {
    if (i < 0 || i >= static_cast<int>(adjacency_.size())) return std::nullopt;
    for (const Neighbor& nb : adjacency_[i])
      if (nb.atom == j) return nb.bond;
    return std::nullopt;
  }
  bool bonded(int i, int j) const { return bond_index(i, j).has_value(); }

  friend bool operator==(const MolecularGraph& x, const MolecularGraph& y) {
    return x.atoms_ == y.atoms_ && x.bonds_ == y.bonds_;
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Bonds-only path length from `src` to `dst` that never visits
/// `blocked_atom` and never traverses `blocked_bond`. nullopt if unreachable.
inline std::optional<int> shortest_path_length(const MolecularGraph& g, int src, int dst,
                                               int blocked_atom = -1, int blocked_bond = -1) {
  if (src == dst) return 0;
  std::vector<int> dist(g.num_atoms(), -1);
  std::deque<int> queue{src};
  dist[src] = 0;
  while (!queue.empty()) {
    const int cur = queue.front();
    queue.pop_front();
    for (const Neighbor& nb : g.neighbors(cur)) {
      if (nb.bond == blocked_bond || nb.atom == blocked_atom || dist[nb.atom] >= 0) continue;
      dist[nb.atom] = dist[cur] + 1;
      if (nb.atom == dst) return dist[nb.atom];
      queue.push_back(nb.atom);
    }
  }
  return std::nullopt;
}

/// Size of the smallest cycle containing bond `b`, if any.
inline std::optional<int> smallest_ring_through_bond(const MolecularGraph& g, int b) {
  const Bond& bond = g.bond(b);
  if (auto p = shortest_path_length(g, bond.a, bond.b, -1, b)) return *p + 1;
  return std::nullopt;
}

/// Size of the smallest cycle containing the path i-j-k, if any.
inline std::optional<int> smallest_ring_through_path(const MolecularGraph& g, int i, int j, int k) {
  if (i == k) return std::nullopt;
  if (auto p = shortest_path_length(g, i, k, j)) return *p + 2;
  return std::nullopt;
}

/// Recomputes `in_ring` and `smallest_ring_size` from topology. Atoms whose
/// index is in `keep` retain their given values.
inline MolecularGraph perceive_rings(const MolecularGraph& g, std::span<const int> keep = {}) {
  std::vector<Atom> atoms = g.atoms();
  std::vector<std::optional<int>> ring(atoms.size());
  for (int b = 0; b < static_cast<int>(g.num_bonds()); ++b) {
    if (auto size = smallest_ring_through_bond(g, b)) {
      for (int end : {g.bond(b).a, g.bond(b).b}) {
        if (!ring[end] || *size < *ring[end]) ring[end] = size;
      }
    }
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (std::find(keep.begin(), keep.end(), static_cast<int>(i)) != keep.end()) continue;
    atoms[i].in_ring = ring[i].has_value();
    atoms[i].smallest_ring_size = ring[i];
  }
  return MolecularGraph(std::move(atoms), g.bonds());
}

/// Hybridization from bond orders for a single atom.
inline Hybridization hybridization_rule(const MolecularGraph& g, int i) {
  const Atom& atom = g.atom(i);
  const int deg = g.degree(i);
  if (deg == 0 || is_halogen(atom.element)) return Hybridization::OTHER;
  int doubles = 0;
  int triples = 0;
  for (const Neighbor& nb : g.neighbors(i)) {
    const BondOrder o = g.bond(nb.bond).order;
    doubles += o == BondOrder::DOUBLE;
    triples += o == BondOrder::TRIPLE;
  }
  // Hypervalent centres (sulfones, phosphates) keep tetrahedral geometry.
  if (deg >= 4 && !atom.aromatic) return Hybridization::SP3;
  if ((triples >= 1 || doubles >= 2) && deg <= 2) return Hybridization::SP;
  if (atom.aromatic || doubles >= 1 || triples >= 1) return Hybridization::SP2;
  switch (atom.element) {
    case 5: case 6: case 7: case 8: case 15: case 16:
      return Hybridization::SP3;
    default:
      return Hybridization::OTHER;
  }
}

/// Assigns hybridization to every atom not listed in `keep`.
inline MolecularGraph infer_hybridization(const MolecularGraph& g, std::span<const int> keep = {}) {
  std::vector<Atom> atoms = g.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (std::find(keep.begin(), keep.end(), static_cast<int>(i)) != keep.end()) continue;
    atoms[i].hybridization = hybridization_rule(g, static_cast<int>(i));
  }
  return MolecularGraph(std::move(atoms), g.bonds());
}

/// Relabels atoms so that old atom i becomes new atom perm[i]. Bonds keep
/// their relative order unless `bond_order` is given (new position -> old bond).
inline MolecularGraph permute_atoms(const MolecularGraph& g, std::span<const int> perm,
                                    std::span<const int> bond_order = {}) {
  const std::size_t n = g.num_atoms();
  if (perm.size() != n) throw GraphError("permutation size mismatch");
  std::vector<Atom> atoms(n);
  for (std::size_t i = 0; i < n; ++i) {
    Atom a = g.atom(static_cast<int>(i));
    a.index = perm[i];
    atoms.at(perm[i]) = a;
  }
  std::vector<Bond> bonds;
  bonds.reserve(g.num_bonds());
  for (std::size_t k = 0; k < g.num_bonds(); ++k) {
    const int src = bond_order.empty() ? static_cast<int>(k) : bond_order[k];
    Bond b = g.bond(src);
    bonds.push_back({perm[b.a], perm[b.b], b.order});
  }
  return MolecularGraph(std::move(atoms), std::move(bonds));
}

}  // namespace syncoord
