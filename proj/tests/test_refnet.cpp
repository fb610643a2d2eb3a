#include <gtest/gtest.h>

#include <random>

#include "syncoord/pipeline.hpp"
#include "syncoord/refnet.hpp"
#include "syncoord/smiles.hpp"
#include "syncoord/validate.hpp"
#include "test_support.hpp"

using namespace syncoord;

namespace {

std::vector<double> pooled(const MolecularGraph& g, const PipelineConfig& cfg = {}) {
  return forward(run_pipeline(g, cfg).features, cfg.refnet).pooled;
}

}  // namespace

TEST(RefNet, Deterministic) {
  const MolecularGraph g = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
  EXPECT_EQ(pooled(g), pooled(g));
  PipelineConfig other;
  other.refnet.seed = 7;
  EXPECT_NE(pooled(g), pooled(g, other));
}

TEST(RefNet, PermutationInvariant) {
  const MolecularGraph g = parse_smiles("Cn1cnc2c1c(=O)n(C)c(=O)n2C");
  std::mt19937_64 rng(99);
  const auto base = pooled(g);
  for (int r = 0; r < 5; ++r) EXPECT_LE(max_relative_difference(base, pooled(random_relabel(g, rng))), 1e-6);
}

TEST(RefNet, ReversalInvariant) {
  const MolecularGraph g = parse_smiles("CC(C)Cc1ccc(cc1)C(C)C(=O)O");
  PipelineConfig flipped;
  flipped.line_graph.reverse_direction = true;
  EXPECT_LE(max_relative_difference(pooled(g), pooled(g, flipped)), 1e-6);
}

TEST(RefNet, BondFreeIsZero) {
  const auto v = pooled(parse_smiles("[Na+].[Cl-]"));
  ASSERT_EQ(v.size(), 32u);
  for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(RefNet, OutputShape) {
  PipelineConfig cfg;
  cfg.refnet.hidden = 8;
  cfg.refnet.layers = 2;
  const auto out = forward(run_pipeline(parse_smiles("CCO"), cfg).features, cfg.refnet);
  EXPECT_EQ(out.pooled.size(), 8u);
  EXPECT_EQ(out.per_node.rows(), 4u);
  EXPECT_EQ(out.per_node.cols(), 8u);
}

TEST(RefNet, WidthMismatchRejected) {
  auto flg = run_pipeline(parse_smiles("CCO"), {}).features;
  flg.node_layout.pop_back();
  EXPECT_THROW(forward(flg), Error);
  auto flg2 = run_pipeline(parse_smiles("CCO"), {}).features;
  flg2.edge_layout.push_back({"extra", "ppr", 2});
  EXPECT_THROW(forward(flg2), Error);
}

TEST(RefNet, SensitiveToEverySingleDistance) {
  // Perturbing any one raw pair distance by 10% must move the pooled output.
  const MolecularGraph g = parse_smiles("CC(=O)Oc1ccccc1");
  for (auto sources : {CoordSources::only_bounds(), CoordSources::only_sppr()}) {
    PipelineConfig cfg;
    cfg.sources = sources;
    const MoleculeResult r = run_pipeline(g, cfg);
    const auto lg = build_line_graph(g, cfg.line_graph);
    const auto geo = line_graph_geometry(lg, sources, r.bounds ? &*r.bounds : nullptr, r.sppr ? &*r.sppr : nullptr);
    const auto base = forward(featurize_line_graph(g, lg, geo, sources, cfg.featurize), cfg.refnet).pooled;
    for (std::size_t n = 0; n < geo.node_distances.size(); ++n) {
      auto perturbed = geo;
      auto& p = perturbed.node_distances[n];
      if (p.bounds) {
        p.bounds->min *= 1.1;
        p.bounds->max *= 1.1;
      }
      if (p.sppr) *p.sppr *= 1.1;
      const auto out = forward(featurize_line_graph(g, lg, perturbed, sources, cfg.featurize), cfg.refnet).pooled;
      EXPECT_GT(max_relative_difference(base, out), 1e-9) << "line node " << n;
    }
  }
}

TEST(RefNet, SwishValues) {
  EXPECT_EQ(detail::swish(0.0), 0.0);
  EXPECT_NEAR(detail::swish(1.0), 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
}
