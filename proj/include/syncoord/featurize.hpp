#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "syncoord/bounds.hpp"
#include "syncoord/error.hpp"

namespace syncoord {

enum class AngleMode { CENTER, MIN, MAX, MIN_MAX, CENTER_MIN_MAX };

inline std::string_view to_string(AngleMode m) {
  switch (m) {
    case AngleMode::CENTER: return "center";
    case AngleMode::MIN: return "min";
    case AngleMode::MAX: return "max";
    case AngleMode::MIN_MAX: return "min_max";
    case AngleMode::CENTER_MIN_MAX: return "center_min_max";
  }
  return "center_min_max";
}

inline std::optional<AngleMode> angle_mode_from_string(std::string_view s) {
  for (AngleMode m : {AngleMode::CENTER, AngleMode::MIN, AngleMode::MAX, AngleMode::MIN_MAX,
                      AngleMode::CENTER_MIN_MAX})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

enum class AngleComponent { CENTER, MIN, MAX };

/// Selected angle-bound components in emission order (center, min, max).
inline std::vector<AngleComponent> angle_components(AngleMode m) {
  switch (m) {
    case AngleMode::CENTER: return {AngleComponent::CENTER};
    case AngleMode::MIN: return {AngleComponent::MIN};
    case AngleMode::MAX: return {AngleComponent::MAX};
    case AngleMode::MIN_MAX: return {AngleComponent::MIN, AngleComponent::MAX};
    case AngleMode::CENTER_MIN_MAX: return {AngleComponent::CENTER, AngleComponent::MIN, AngleComponent::MAX};
  }
  return {};
}

inline std::string_view to_string(AngleComponent c) {
  switch (c) {
    case AngleComponent::CENTER: return "center";
    case AngleComponent::MIN: return "min";
    case AngleComponent::MAX: return "max";
  }
  return "center";
}

/// Which synthetic coordinates feed the features.
struct CoordSources {
  bool bounds = true;
  bool sppr = true;

  static CoordSources only_bounds() { return {true, false}; }
  static CoordSources only_sppr() { return {false, true}; }
  static CoordSources both() { return {true, true}; }

  friend bool operator==(const CoordSources&, const CoordSources&) = default;
};

inline std::string_view to_string(CoordSources s) {
  if (s.bounds && s.sppr) return "both";
  if (s.bounds) return "bounds";
  if (s.sppr) return "ppr";
  return "none";
}

inline std::optional<CoordSources> coord_sources_from_string(std::string_view s) {
  if (s == "both") return CoordSources::both();
  if (s == "bounds") return CoordSources::only_bounds();
  if (s == "ppr" || s == "sppr") return CoordSources::only_sppr();
  return std::nullopt;
}

/// Default RBF range for the sppr source: sqrt(2) upper-bounds d_sppr, plus 10%.
inline const double kDefaultSpprDistanceMax = std::numbers::sqrt2 * 1.1;

struct FeaturizeConfig {
  int n_rbf = 16;  // total distance basis size per source
  int n_abf = 18;  // total angle basis size per source
  AngleMode angle_mode = AngleMode::CENTER_MIN_MAX;
  double d_max_bounds = 5.0;  // Angstrom
  double d_max_sppr = kDefaultSpprDistanceMax;

  int angle_component_count() const { return static_cast<int>(angle_components(angle_mode).size()); }

  void validate(CoordSources sources = CoordSources::both()) const {
    if (n_rbf < 2) throw Error("featurize: n_rbf must be >= 2");
    if (n_abf < 1) throw Error("featurize: n_abf must be >= 1");
    if (!(d_max_bounds > 0.0) || !(d_max_sppr > 0.0)) throw Error("featurize: d_max must be positive");
    if (sources.bounds) {
      if (n_rbf % 2 != 0 || n_rbf < 4)
        throw Error("featurize: bounds source needs an even n_rbf >= 4 (min/max halves)");
      if (n_abf % angle_component_count() != 0)
        throw Error("featurize: n_abf must be divisible by the number of angle components");
    }
  }
};

/// Gaussian radial basis with `count` centers spread uniformly over [0, d_max]
/// and width equal to the center spacing.
inline std::vector<double> rbf(double d, int count, double d_max) {
  if (count < 2) throw Error("rbf: need at least 2 centers");
  const double spacing = d_max / (count - 1);
  std::vector<double> out(count);
  for (int n = 0; n < count; ++n) {
    const double x = (d - n * spacing) / spacing;
    out[n] = std::exp(-0.5 * x * x);
  }
  return out;
}

/// Cosine angular basis cos(n·angle), n = 0..count-1.
inline std::vector<double> abf(double angle, int count) {
  std::vector<double> out(count);
  for (int n = 0; n < count; ++n) out[n] = std::cos(n * angle);
  return out;
}

/// Layout entry of a feature matrix.
struct FeatureBlock {
  std::string name;
  std::string source;
  int width = 0;

  friend bool operator==(const FeatureBlock&, const FeatureBlock&) = default;
};

inline int total_width(std::span<const FeatureBlock> layout) {
  int w = 0;
  for (const FeatureBlock& b : layout) w += b.width;
  return w;
}

/// Raw distances available for one atom pair.
struct PairDistances {
  std::optional<DistanceInterval> bounds;
  std::optional<double> sppr;
};

/// Raw angles available for one atom triplet.
struct TripletAngles {
  std::optional<AngleBounds> bounds;
  std::optional<double> sppr;
};

inline std::vector<FeatureBlock> distance_layout(const FeaturizeConfig& cfg, CoordSources sources) {
  std::vector<FeatureBlock> out;
  if (sources.bounds) {
    out.push_back({"rbf_dmin", "bounds", cfg.n_rbf / 2});
    out.push_back({"rbf_dmax", "bounds", cfg.n_rbf / 2});
  }
  if (sources.sppr) out.push_back({"rbf_d", "ppr", cfg.n_rbf});
  return out;
}

inline std::vector<FeatureBlock> angle_layout(const FeaturizeConfig& cfg, CoordSources sources) {
  std::vector<FeatureBlock> out;
  if (sources.bounds) {
    const auto comps = angle_components(cfg.angle_mode);
    const int w = cfg.n_abf / static_cast<int>(comps.size());
    for (AngleComponent c : comps) out.push_back({"abf_" + std::string(to_string(c)), "bounds", w});
  }
  if (sources.sppr) out.push_back({"abf_angle", "ppr", cfg.n_abf});
  return out;
}

/// rbf(d_min) ‖ rbf(d_max) for bounds, then rbf(d) for sppr.
inline std::vector<double> distance_block(CoordSources sources, const PairDistances& pair,
                                          const FeaturizeConfig& cfg) {
  std::vector<double> out;
  if (sources.bounds) {
    if (!pair.bounds) throw Error("distance block: missing bounds data");
    const int half = cfg.n_rbf / 2;
    for (double v : rbf(pair.bounds->min, half, cfg.d_max_bounds)) out.push_back(v);
    for (double v : rbf(pair.bounds->max, half, cfg.d_max_bounds)) out.push_back(v);
  }
  if (sources.sppr) {
    if (!pair.sppr) throw Error("distance block: missing ppr data");
    for (double v : rbf(*pair.sppr, cfg.n_rbf, cfg.d_max_sppr)) out.push_back(v);
  }
  return out;
}

/// One abf block per selected bounds component (n_abf split evenly), then
/// one full-width block for the sppr angle.
inline std::vector<double> angle_block(CoordSources sources, const TripletAngles& triplet,
                                       const FeaturizeConfig& cfg) {
  std::vector<double> out;
  if (sources.bounds) {
    if (!triplet.bounds) throw Error("angle block: missing bounds data");
    const auto comps = angle_components(cfg.angle_mode);
    const int w = cfg.n_abf / static_cast<int>(comps.size());
    for (AngleComponent c : comps) {
      const double a = c == AngleComponent::CENTER ? triplet.bounds->center
                       : c == AngleComponent::MIN  ? triplet.bounds->min
                                                   : triplet.bounds->max;
      for (double v : abf(a, w)) out.push_back(v);
    }
  }
  if (sources.sppr) {
    if (!triplet.sppr) throw Error("angle block: missing ppr data");
    for (double v : abf(*triplet.sppr, cfg.n_abf)) out.push_back(v);
  }
  return out;
}

}  // namespace syncoord
