#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "syncoord/error.hpp"
#include "syncoord/matrix.hpp"
#include "syncoord/molgraph.hpp"

namespace syncoord {

struct SpprConfig {
  double alpha = 0.15;  // teleport probability, (0, 1]
  /// Weight adjacency entries by numeric bond order instead of 1.
  bool weighted = false;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("sppr: alpha must lie in (0, 1]");
  }
};

struct SpprResult {
  MatrixD pi;
  MatrixD dist;
};

/// Symmetrically normalized adjacency D^{-1/2} A D^{-1/2}; isolated atoms get
/// zero rows and columns.
inline MatrixD normalized_adjacency(const MolecularGraph& g, bool weighted = false) {
  const std::size_t n = g.num_atoms();
  MatrixD a(n, n);
  for (const Bond& b : g.bonds()) {
    const double w = weighted ? numeric_order(b.order) : 1.0;
    a(b.a, b.b) = w;
    a(b.b, b.a) = w;
  }
  std::vector<double> inv_sqrt_deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (double v : a.row(i)) deg += v;
    inv_sqrt_deg[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv_sqrt_deg[i] * inv_sqrt_deg[j];
  return a;
}

/// α (I − (1−α) S)^{-1} via Cholesky; the system matrix is SPD for α > 0.
inline MatrixD sppr_matrix(const MolecularGraph& g, const SpprConfig& cfg = {}) {
  cfg.validate();
  const std::size_t n = g.num_atoms();
  const MatrixD s = normalized_adjacency(g, cfg.weighted);
  MatrixD system = MatrixD::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) system(i, j) -= (1.0 - cfg.alpha) * s(i, j);

  auto l = cholesky(system);
  if (!l) throw Error("sppr: system matrix is not positive definite");
  MatrixD rhs = MatrixD::identity(n);
  for (std::size_t i = 0; i < n; ++i) rhs(i, i) = cfg.alpha;
  MatrixD pi = cholesky_solve(*l, std::move(rhs));

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = 0.5 * (pi(i, j) + pi(j, i));
      if (!std::isfinite(v)) throw Error("sppr: non-finite solution");
      pi(i, j) = pi(j, i) = v;
    }
  }
  return pi;
}

/// Kernel-induced distance sqrt(Π_ii + Π_jj − 2Π_ij).
inline MatrixD sppr_distance(const MatrixD& pi) {
  const std::size_t n = pi.rows();
  MatrixD d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::sqrt(std::max(pi(i, i) + pi(j, j) - 2.0 * pi(i, j), 0.0));
      d(i, j) = d(j, i) = v;
    }
  }
  return d;
}

inline SpprResult compute_sppr(const MolecularGraph& g, const SpprConfig& cfg = {}) {
  SpprResult r;
  r.pi = sppr_matrix(g, cfg);
  r.dist = sppr_distance(r.pi);
  return r;
}

/// Truncated Neumann series α Σ_{k=0..K} (1−α)^k S^k. Independent of the
/// factorization path; used to cross-check `sppr_matrix`.
inline MatrixD sppr_series_oracle(const MolecularGraph& g, const SpprConfig& cfg, int terms) {
  cfg.validate();
  const std::size_t n = g.num_atoms();
  const MatrixD s = normalized_adjacency(g, cfg.weighted);
  MatrixD power = MatrixD::identity(n);
  MatrixD sum(n, n);
  double scale = cfg.alpha;
  for (int k = 0; k <= terms; ++k) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) sum(i, j) += scale * power(i, j);
    if (k == terms) break;
    scale *= 1.0 - cfg.alpha;
    if (scale == 0.0) break;
    power = multiply(power, s);
  }
  return sum;
}

/// Smallest K with (1−α)^{K+1} < tol.
inline int series_terms_for(double alpha, double tol) {
  if (alpha >= 1.0) return 0;
  const double ratio = 1.0 - alpha;
  int k = std::max(0, static_cast<int>(std::floor(std::log(tol) / std::log(ratio))));
  while (std::pow(ratio, k + 1) >= tol) ++k;
  while (k > 0 && std::pow(ratio, k) < tol) --k;
  return k;
}

/// Angle at the middle point from the three pairwise distances of a triplet.
inline double angle_from_distances(double d_ij, double d_jk, double d_ik) {
  if (!(d_ij > 0.0) || !(d_jk > 0.0)) throw Error("degenerate triplet");
  const double arg = (d_ij * d_ij + d_jk * d_jk - d_ik * d_ik) / (2.0 * d_ij * d_jk);
  return std::acos(std::clamp(arg, -1.0, 1.0));
}

inline double angles_from_metric(const MatrixD& dist, int i, int j, int k) {
  return angle_from_distances(dist(i, j), dist(j, k), dist(i, k));
}

}  // namespace syncoord
