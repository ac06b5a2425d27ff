// Multi-sensor fusion of per-voxel measurements into one entropy value.
//
// Sensors are partitioned into groups. Within a group raw measurements are
// summed (early fusion; homogeneous LiDAR clouds merge directly). Across
// groups the per-group Gaussians combine as a normalized product, i.e.
// inverse-variance weighting of the sigmas (late fusion). Cameras cannot
// share a group: images are fused late.

#pragma once

#include "percept/entropy.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace percept {

enum class Modality { kLidar, kCamera };

inline const char* to_string(Modality m) {
  return m == Modality::kLidar ? "lidar" : "camera";
}

/// One early-fusion group: sensor indices sharing a modality and an AP curve.
struct FusionGroup {
  std::vector<int> sensor_ids;
  Modality modality = Modality::kLidar;
  ApCurve curve;
};

/// Partition of all configured sensors into fusion groups.
struct FusionGraph {
  std::vector<FusionGroup> groups;

  /// Checks the partition property against a sensor count and the
  /// per-modality grouping rules.
  void validate(int sensor_count) const {
    if (groups.empty()) {
      throw std::invalid_argument("FusionGraph: no fusion groups");
    }
    std::vector<int> seen(static_cast<size_t>(sensor_count), 0);
    for (const auto& g : groups) {
      if (g.sensor_ids.empty()) {
        throw std::invalid_argument("FusionGraph: empty fusion group");
      }
      if (g.modality == Modality::kCamera && g.sensor_ids.size() > 1) {
        throw std::invalid_argument(
            "FusionGraph: a camera fusion group must contain exactly one "
            "sensor (images cannot be early-fused)");
      }
      for (int id : g.sensor_ids) {
        if (id < 0 || id >= sensor_count) {
          throw std::invalid_argument("FusionGraph: sensor id " +
                                      std::to_string(id) + " out of range");
        }
        if (seen[static_cast<size_t>(id)]++) {
          throw std::invalid_argument("FusionGraph: sensor id " +
                                      std::to_string(id) +
                                      " appears in more than one group");
        }
      }
    }
    for (int id = 0; id < sensor_count; ++id) {
      if (!seen[static_cast<size_t>(id)]) {
        throw std::invalid_argument("FusionGraph: sensor id " +
                                    std::to_string(id) + " not in any group");
      }
    }
  }
};

/// Early fusion: measurements within a group are summed.
inline std::int64_t fuse_early(const std::vector<std::int64_t>& measurements) {
  if (measurements.empty()) {
    throw std::invalid_argument("fuse_early: empty measurement list");
  }
  std::int64_t total = 0;
  for (std::int64_t m : measurements) total += m;
  return total;
}

/// Late fusion: sigma of the normalized product of Gaussians,
/// sqrt(1 / sum(1/sigma_i^2)). Never exceeds the smallest input; a single
/// sigma is returned unchanged.
inline double fuse_late(const std::vector<double>& sigmas) {
  if (sigmas.empty()) {
    throw std::invalid_argument("fuse_late: empty sigma list");
  }
  double inv_var = 0.0;
  for (double s : sigmas) {
    if (!(s > 0.0)) {
      throw std::invalid_argument("fuse_late: sigmas must be positive");
    }
    inv_var += 1.0 / (s * s);
  }
  if (sigmas.size() == 1) return sigmas.front();
  return std::sqrt(1.0 / inv_var);
}

namespace detail {

/// Arithmetic core of fused_voxel_entropy; the graph must already be valid
/// for per_sensor.size(). Reproduces fuse_late bit for bit without
/// allocating, so the evaluator hot loop can share it.
inline double fused_entropy_core(const FusionGraph& graph,
                                 const std::vector<std::int64_t>& per_sensor) {
  if (graph.groups.size() == 1) {
    const FusionGroup& g = graph.groups.front();
    std::int64_t fused = 0;
    for (int id : g.sensor_ids) fused += per_sensor[static_cast<size_t>(id)];
    return gaussian_entropy(sigma_from_ap(
        ap_from_measurement(static_cast<double>(fused), g.curve)));
  }
  double inv_var = 0.0;
  for (const FusionGroup& g : graph.groups) {
    std::int64_t fused = 0;
    for (int id : g.sensor_ids) fused += per_sensor[static_cast<size_t>(id)];
    const double s = sigma_from_ap(
        ap_from_measurement(static_cast<double>(fused), g.curve));
    inv_var += 1.0 / (s * s);
  }
  return gaussian_entropy(std::sqrt(1.0 / inv_var));
}

}  // namespace detail

/// Entropy of one voxel under the full fusion graph: early-sum per group,
/// per-group sigma through the AP chain, late-fuse sigmas, Gaussian entropy.
/// A group with zero fused measurement still participates with its clamped
/// (maximal) sigma rather than being dropped.
inline double fused_voxel_entropy(const FusionGraph& graph,
                                  const std::vector<std::int64_t>& per_sensor) {
  graph.validate(static_cast<int>(per_sensor.size()));
  return detail::fused_entropy_core(graph, per_sensor);
}

}  // namespace percept
