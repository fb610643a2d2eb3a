#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "syncoord/bounds.hpp"
#include "syncoord/featurize.hpp"
#include "syncoord/graph_json.hpp"
#include "syncoord/linegraph.hpp"
#include "syncoord/pprdist.hpp"
#include "syncoord/refnet.hpp"
#include "syncoord/uff_params.hpp"

namespace syncoord {

inline constexpr const char* kToolName = "syncoord";
inline constexpr const char* kToolVersion = "1.0.0";

/// Largest molecule for which the dense sppr matrices are written by default.
inline constexpr std::size_t kDenseMatrixAtomLimit = 512;

struct PipelineConfig {
  CoordSources sources = CoordSources::both();
  SpprConfig sppr;
  FeaturizeConfig featurize;
  LineGraphOptions line_graph;
  BoundsOptions bounds;
  RefNetConfig refnet;

  void validate() const {
    if (!sources.bounds && !sources.sppr) throw Error("no coordinate source selected");
    sppr.validate();
    featurize.validate(sources);
    refnet.validate();
  }
};

struct MoleculeResult {
  MolecularGraph graph;
  std::optional<BoundsMatrix> bounds;
  std::optional<SpprResult> sppr;
  FeaturizedLineGraph features;
  Warnings warnings;
};

inline MoleculeResult run_pipeline(const MolecularGraph& g, const PipelineConfig& cfg,
                                   const BondParams& params = BondParams::builtin()) {
  cfg.validate();
  MoleculeResult r;
  r.graph = g;
  if (cfg.sources.bounds) r.bounds = compute_bounds(g, params, cfg.bounds, &r.warnings);
  if (cfg.sources.sppr) r.sppr = compute_sppr(g, cfg.sppr);
  DirectedLineGraph lg = build_line_graph(g, cfg.line_graph);
  if (lg.nodes.empty()) warn(&r.warnings, "molecule has no bonds; line graph is empty");
  r.features = attach_payloads(g, std::move(lg), cfg.sources, r.bounds ? &*r.bounds : nullptr,
                               r.sppr ? &*r.sppr : nullptr, cfg.featurize, &r.warnings);
  return r;
}

// ---------------------------------------------------------------------------
// Output document

inline nlohmann::json config_to_json(const PipelineConfig& cfg) {
  return {{"alpha", cfg.sppr.alpha},
          {"weighted_adjacency", cfg.sppr.weighted},
          {"n_rbf", cfg.featurize.n_rbf},
          {"n_abf", cfg.featurize.n_abf},
          {"angle_mode", std::string(to_string(cfg.featurize.angle_mode))},
          {"coords", std::string(to_string(cfg.sources))},
          {"include_backtrack", cfg.line_graph.include_backtrack},
          {"reverse_direction", cfg.line_graph.reverse_direction},
          {"full_matrix_smoothing", cfg.bounds.refine.full_matrix},
          {"d_max_global", {{"bounds", cfg.featurize.d_max_bounds}, {"ppr", cfg.featurize.d_max_sppr}}},
          {"refnet", {{"seed", cfg.refnet.seed},
                      {"hidden", cfg.refnet.hidden},
                      {"layers", cfg.refnet.layers},
                      {"bottleneck", cfg.refnet.bottleneck}}}};
}

inline nlohmann::json layout_to_json(const std::vector<FeatureBlock>& layout) {
  nlohmann::json out = nlohmann::json::array();
  int offset = 0;
  for (const FeatureBlock& b : layout) {
    out.push_back({{"block", b.name}, {"source", b.source}, {"width", b.width}, {"offset", offset}});
    offset += b.width;
  }
  return out;
}

inline nlohmann::json matrix_to_json(const MatrixD& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(nlohmann::json(std::vector<double>(row.begin(), row.end())));
  }
  return rows;
}

inline nlohmann::json bounds_to_json(const BoundsMatrix& b) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [pair, iv] : b.entries())
    out.push_back({{"i", pair.first}, {"j", pair.second}, {"hops", iv.hops}, {"d_min", iv.min}, {"d_max", iv.max}});
  return out;
}

struct RecordOptions {
  bool emit_dist_matrix = false;
  bool force_dist_matrix = false;
};

inline nlohmann::json manifest_json(const PipelineConfig& cfg, const std::string& status, const Warnings& warnings) {
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"config", config_to_json(cfg)},
          {"status", status},
          {"warnings", warnings}};
}

/// One output document for a successfully processed molecule.
inline nlohmann::json result_to_json(const MoleculeResult& r, const PipelineConfig& cfg, const RecordOptions& opts) {
  const auto& flg = r.features;
  nlohmann::json doc;
  doc["graph"] = graph_to_json(r.graph);
  doc["bounds"] = r.bounds ? bounds_to_json(*r.bounds) : nlohmann::json(nullptr);

  nlohmann::json lnodes = nlohmann::json::array();
  for (const LineNode& n : flg.topology.nodes) lnodes.push_back({n.source, n.target});
  nlohmann::json ledges = nlohmann::json::array();
  for (const LineEdge& e : flg.topology.edges) ledges.push_back({e.from, e.to});
  doc["line_graph"] = {{"nodes", std::move(lnodes)}, {"edges", std::move(ledges)}};

  doc["node_layout"] = layout_to_json(flg.node_layout);
  doc["edge_layout"] = layout_to_json(flg.edge_layout);
  doc["node_features"] = matrix_to_json(flg.node_features);
  doc["edge_features"] = matrix_to_json(flg.edge_features);

  if (opts.emit_dist_matrix && r.sppr) {
    if (r.graph.num_atoms() <= kDenseMatrixAtomLimit || opts.force_dist_matrix) {
      doc["sppr"] = {{"pi", matrix_to_json(r.sppr->pi)}, {"dist", matrix_to_json(r.sppr->dist)}};
    } else {
      doc["sppr"] = nullptr;
    }
  }
  doc["manifest"] = manifest_json(cfg, r.warnings.empty() ? "ok" : "warnings", r.warnings);
  return doc;
}

}  // namespace syncoord
