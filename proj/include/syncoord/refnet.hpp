#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "syncoord/error.hpp"
#include "syncoord/linegraph.hpp"
#include "syncoord/matrix.hpp"

namespace syncoord {

struct RefNetConfig {
  int hidden = 32;
  int layers = 3;
  std::uint64_t seed = 0x5eed5eedULL;
  int bottleneck = 4;

  void validate() const {
    if (hidden < 1) throw Error("refnet: hidden must be >= 1");
    if (layers < 1) throw Error("refnet: layers must be >= 1");
    if (bottleneck < 1) throw Error("refnet: bottleneck must be >= 1");
  }
};

struct RefNetOutput {
  std::vector<double> pooled;
  MatrixD per_node;
};

namespace detail {

/// Fully connected layer y = W x + b.
struct Linear {
  MatrixD weight;  // out x in
  std::vector<double> bias;

  Linear() = default;
  Linear(int out, int in, bool with_bias, std::mt19937_64& rng) : weight(out, in), bias(with_bias ? out : 0, 0.0) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    // Explicit uniform draw: std::uniform_real_distribution is not portable.
    auto draw = [&] {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      return (2.0 * u - 1.0) * bound;
    };
    for (double& w : weight.data()) w = draw();
    for (double& b : bias) b = draw();
  }

  void apply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t r = 0; r < weight.rows(); ++r) {
      double s = bias.empty() ? 0.0 : bias[r];
      auto w = weight.row(r);
      for (std::size_t c = 0; c < w.size(); ++c) s += w[c] * x[c];
      y[r] = s;
    }
  }
};

inline double swish(double x) { return x / (1.0 + std::exp(-x)); }

}  // namespace detail

/// Seeded directional message passing over a featurized line graph:
///   h0      = W_in x_node
///   a_l     = W_abf2[l] W_abf1 x_edge           (shared bottleneck, per-layer map)
///   m       = W_msg[l] (h_to ‖ h_from ‖ a_l)     per line edge from -> to
///   h_to'   = swish(W_upd[l] (h_to ‖ Σ m))
///   pooled  = mean over line nodes
/// Weights depend only on the seed and the layer widths.
inline RefNetOutput forward(const FeaturizedLineGraph& flg, const RefNetConfig& cfg = {}) {
  cfg.validate();
  const int node_width = total_width(flg.node_layout);
  const int edge_width = total_width(flg.edge_layout);
  if (static_cast<int>(flg.node_features.cols()) != node_width)
    throw Error("refnet: node payload width " + std::to_string(flg.node_features.cols()) + " != layout width " +
                std::to_string(node_width));
  if (static_cast<int>(flg.edge_features.cols()) != edge_width)
    throw Error("refnet: edge payload width " + std::to_string(flg.edge_features.cols()) + " != layout width " +
                std::to_string(edge_width));
  if (flg.node_features.rows() != flg.topology.nodes.size() || flg.edge_features.rows() != flg.topology.edges.size())
    throw Error("refnet: payload rows do not match line graph");

  const int h = cfg.hidden;
  std::mt19937_64 rng(cfg.seed);
  detail::Linear input(h, node_width, true, rng);
  detail::Linear abf_global(cfg.bottleneck, std::max(edge_width, 1), false, rng);
  std::vector<detail::Linear> abf_local, message, update;
  for (int l = 0; l < cfg.layers; ++l) {
    abf_local.emplace_back(h, cfg.bottleneck, false, rng);
    message.emplace_back(h, 3 * h, true, rng);
    update.emplace_back(h, 2 * h, true, rng);
  }

  const std::size_t nodes = flg.topology.nodes.size();
  const std::size_t edges = flg.topology.edges.size();
  RefNetOutput out;
  out.pooled.assign(h, 0.0);
  out.per_node = MatrixD(nodes, h);
  if (nodes == 0) return out;

  MatrixD state(nodes, h);
  for (std::size_t i = 0; i < nodes; ++i) input.apply(flg.node_features.row(i), state.row(i));

  MatrixD edge_bottleneck(edges, cfg.bottleneck);
  if (edge_width > 0)
    for (std::size_t e = 0; e < edges; ++e) abf_global.apply(flg.edge_features.row(e), edge_bottleneck.row(e));

  std::vector<double> concat3(3 * h), concat2(2 * h), angle(h), msg(h);
  for (int l = 0; l < cfg.layers; ++l) {
    MatrixD agg(nodes, h);
    for (std::size_t e = 0; e < edges; ++e) {
      const LineEdge& le = flg.topology.edges[e];
      abf_local[l].apply(edge_bottleneck.row(e), angle);
      auto to = state.row(le.to);
      auto from = state.row(le.from);
      std::copy(to.begin(), to.end(), concat3.begin());
      std::copy(from.begin(), from.end(), concat3.begin() + h);
      std::copy(angle.begin(), angle.end(), concat3.begin() + 2 * h);
      message[l].apply(concat3, msg);
      auto acc = agg.row(le.to);
      for (int c = 0; c < h; ++c) acc[c] += msg[c];
    }
    MatrixD next(nodes, h);
    for (std::size_t i = 0; i < nodes; ++i) {
      auto cur = state.row(i);
      auto a = agg.row(i);
      std::copy(cur.begin(), cur.end(), concat2.begin());
      std::copy(a.begin(), a.end(), concat2.begin() + h);
      auto dst = next.row(i);
      update[l].apply(concat2, dst);
      for (double& v : dst) v = detail::swish(v);
    }
    state = std::move(next);
  }

  for (std::size_t i = 0; i < nodes; ++i) {
    auto row = state.row(i);
    for (int c = 0; c < h; ++c) out.pooled[c] += row[c];
  }
  for (double& v : out.pooled) {
    v /= static_cast<double>(nodes);
    if (!std::isfinite(v)) throw Error("refnet: non-finite output");
  }
  out.per_node = std::move(state);
  return out;
}

}  // namespace syncoord
