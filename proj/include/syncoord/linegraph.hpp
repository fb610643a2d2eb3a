#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "syncoord/bounds.hpp"
#include "syncoord/error.hpp"
#include "syncoord/featurize.hpp"
#include "syncoord/matrix.hpp"
#include "syncoord/molgraph.hpp"
#include "syncoord/pprdist.hpp"

namespace syncoord {

struct LineGraphOptions {
  /// Keep ((u,v),(v,u)) edges. The reversed edge has a zero angle.
  bool include_backtrack = false;
  /// Enumerate (b,a) before (a,b) for every bond.
  bool reverse_direction = false;
};

struct LineNode {
  int source;  // u
  int target;  // v
  int bond;

  friend bool operator==(const LineNode&, const LineNode&) = default;
};

struct LineEdge {
  std::size_t from;  // line node (u,v)
  std::size_t to;    // line node (v,w)

  friend bool operator==(const LineEdge&, const LineEdge&) = default;
};

/// Nodes are the directed edges of the molecule; ((u,v),(v,w)) is an edge.
struct DirectedLineGraph {
  std::vector<LineNode> nodes;
  std::vector<LineEdge> edges;

  /// Atom triplet (u, v, w) spanned by a line edge.
  std::array<int, 3> triplet(const LineEdge& e) const {
    return {nodes[e.from].source, nodes[e.from].target, nodes[e.to].target};
  }
};

inline DirectedLineGraph build_line_graph(const MolecularGraph& g, LineGraphOptions opts = {}) {
  DirectedLineGraph lg;
  lg.nodes.reserve(2 * g.num_bonds());
  for (int b = 0; b < static_cast<int>(g.num_bonds()); ++b) {
    const Bond& bond = g.bond(b);
    LineNode fwd{bond.a, bond.b, b};
    LineNode rev{bond.b, bond.a, b};
    if (opts.reverse_direction) std::swap(fwd, rev);
    lg.nodes.push_back(fwd);
    lg.nodes.push_back(rev);
  }
  // outgoing[v] lists the line nodes whose source atom is v.
  std::vector<std::vector<std::size_t>> outgoing(g.num_atoms());
  for (std::size_t idx = 0; idx < lg.nodes.size(); ++idx) outgoing[lg.nodes[idx].source].push_back(idx);
  for (std::size_t idx = 0; idx < lg.nodes.size(); ++idx) {
    const LineNode& in = lg.nodes[idx];
    for (std::size_t next : outgoing[in.target]) {
      if (!opts.include_backtrack && lg.nodes[next].target == in.source) continue;
      lg.edges.push_back({idx, next});
    }
  }
  return lg;
}

// Atom one-hot vocabulary; anything else maps to the final "other" slot.
inline constexpr std::array<int, 12> kAtomVocabulary = {1, 5, 6, 7, 8, 9, 14, 15, 16, 17, 35, 53};
inline constexpr int kAtomFeatureWidth = static_cast<int>(kAtomVocabulary.size()) + 1 + 4 + 2;
inline constexpr int kBondFeatureWidth = 4;

/// Element one-hot ‖ hybridization one-hot ‖ aromatic ‖ in_ring.
inline std::vector<double> atom_features(const Atom& a) {
  std::vector<double> f(kAtomFeatureWidth, 0.0);
  std::size_t slot = kAtomVocabulary.size();
  for (std::size_t i = 0; i < kAtomVocabulary.size(); ++i)
    if (kAtomVocabulary[i] == a.element) slot = i;
  f[slot] = 1.0;
  const std::size_t hyb_base = kAtomVocabulary.size() + 1;
  f[hyb_base + static_cast<std::size_t>(a.hybridization)] = 1.0;
  f[hyb_base + 4] = a.aromatic ? 1.0 : 0.0;
  f[hyb_base + 5] = a.in_ring ? 1.0 : 0.0;
  return f;
}

inline std::vector<double> bond_features(BondOrder o) {
  std::vector<double> f(kBondFeatureWidth, 0.0);
  f[static_cast<std::size_t>(o)] = 1.0;
  return f;
}

inline std::vector<FeatureBlock> node_layout(const FeaturizeConfig& cfg, CoordSources sources) {
  std::vector<FeatureBlock> out = {{"atom_source", "graph", kAtomFeatureWidth},
                                   {"atom_target", "graph", kAtomFeatureWidth},
                                   {"bond_order", "graph", kBondFeatureWidth}};
  for (FeatureBlock& b : distance_layout(cfg, sources)) out.push_back(std::move(b));
  return out;
}

inline std::vector<FeatureBlock> edge_layout(const FeaturizeConfig& cfg, CoordSources sources) {
  return angle_layout(cfg, sources);
}

struct FeaturizedLineGraph {
  DirectedLineGraph topology;
  CoordSources sources;
  std::vector<FeatureBlock> node_layout;
  std::vector<FeatureBlock> edge_layout;
  MatrixD node_features;  // |nodes| x total_width(node_layout)
  MatrixD edge_features;  // |edges| x total_width(edge_layout)
  std::vector<PairDistances> node_distances;
  std::vector<TripletAngles> edge_angles;
};

/// Raw pair distances and triplet angles for each node and edge of `lg`.
/// Separate from basis expansion so callers can perturb the raw values.
struct LineGraphGeometry {
  std::vector<PairDistances> node_distances;
  std::vector<TripletAngles> edge_angles;
};

inline LineGraphGeometry line_graph_geometry(const DirectedLineGraph& lg, CoordSources sources,
                                             const BoundsMatrix* bounds, const SpprResult* sppr,
                                             Warnings* warnings = nullptr) {
  if (sources.bounds && bounds == nullptr) throw Error("line graph payload: missing source 'bounds'");
  if (sources.sppr && sppr == nullptr) throw Error("line graph payload: missing source 'ppr'");
  LineGraphGeometry geo;
  geo.node_distances.reserve(lg.nodes.size());
  for (const LineNode& n : lg.nodes) {
    PairDistances p;
    if (sources.bounds) p.bounds = bounds->at(n.source, n.target);
    if (sources.sppr) p.sppr = sppr->dist(n.source, n.target);
    geo.node_distances.push_back(p);
  }
  geo.edge_angles.reserve(lg.edges.size());
  for (const LineEdge& e : lg.edges) {
    const auto [u, v, w] = lg.triplet(e);
    TripletAngles t;
    if (u == w) {
      // Backtracking edge: the two directions coincide.
      if (sources.bounds) t.bounds = AngleBounds{0.0, 0.0, 0.0};
      if (sources.sppr) t.sppr = 0.0;
    } else {
      if (sources.bounds) t.bounds = angle_bounds(*bounds, u, v, w, warnings);
      if (sources.sppr) t.sppr = angles_from_metric(sppr->dist, u, v, w);
    }
    geo.edge_angles.push_back(t);
  }
  return geo;
}

/// Expands raw geometry into the node and edge feature matrices.
inline FeaturizedLineGraph featurize_line_graph(const MolecularGraph& g, DirectedLineGraph lg,
                                                LineGraphGeometry geo, CoordSources sources,
                                                const FeaturizeConfig& cfg) {
  cfg.validate(sources);
  FeaturizedLineGraph out;
  out.sources = sources;
  out.node_layout = node_layout(cfg, sources);
  out.edge_layout = edge_layout(cfg, sources);
  out.node_features = MatrixD(lg.nodes.size(), total_width(out.node_layout));
  out.edge_features = MatrixD(lg.edges.size(), total_width(out.edge_layout));

  for (std::size_t r = 0; r < lg.nodes.size(); ++r) {
    const LineNode& n = lg.nodes[r];
    auto row = out.node_features.row(r);
    std::size_t c = 0;
    auto put = [&](const std::vector<double>& v) {
      for (double x : v) row[c++] = x;
    };
    put(atom_features(g.atom(n.source)));
    put(atom_features(g.atom(n.target)));
    put(bond_features(g.bond(n.bond).order));
    put(distance_block(sources, geo.node_distances[r], cfg));
  }
  for (std::size_t r = 0; r < lg.edges.size(); ++r) {
    const std::vector<double> v = angle_block(sources, geo.edge_angles[r], cfg);
    std::copy(v.begin(), v.end(), out.edge_features.row(r).begin());
  }
  out.topology = std::move(lg);
  out.node_distances = std::move(geo.node_distances);
  out.edge_angles = std::move(geo.edge_angles);
  return out;
}

/// Attaches distance features to line nodes and angle features to line
/// edges. Blocks concatenate bounds first, then sppr.
inline FeaturizedLineGraph attach_payloads(const MolecularGraph& g, DirectedLineGraph lg, CoordSources sources,
                                           const BoundsMatrix* bounds, const SpprResult* sppr,
                                           const FeaturizeConfig& cfg, Warnings* warnings = nullptr) {
  LineGraphGeometry geo = line_graph_geometry(lg, sources, bounds, sppr, warnings);
  return featurize_line_graph(g, std::move(lg), std::move(geo), sources, cfg);
}

}  // namespace syncoord
