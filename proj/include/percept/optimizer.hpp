// Shrinking-neighborhood random search over sensor placements. Each round
// draws candidate joint placements uniformly within the current neighborhood
// of the incumbent (per sensor: translation box +-n_trans per axis, pitch
// +-n_rot), clamps them to the search space, evaluates them, recenters on
// the round's best, then multiplies both neighborhood sizes by the decay
// factor. Terminates once both sizes have reached their final values; the
// final round is still evaluated.
//
// Searched dimensions are t_x, t_y, t_z and pitch; roll and yaw stay at
// their template values. Ties break toward the incumbent, then toward the
// lower candidate index, so results are deterministic for a given seed and
// independent of evaluation thread count.

#pragma once

#include "percept/evaluator.hpp"
#include "percept/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace percept {

/// Admissible placement set for one sensor. The mount region may be
/// degenerate (zero width on any axis) to pin coordinates.
struct SensorSearch {
  Aabb mount_region{Vec3{0.0, 0.0, 0.0}, Vec3{0.0, 0.0, 0.0}};
  double pitch_min = 0.0;
  double pitch_max = 0.0;

  void validate() const {
    for (int i = 0; i < 3; ++i) {
      if (!(mount_region.min[i] <= mount_region.max[i])) {
        throw std::invalid_argument(
            "SensorSearch: mount_region bounds are inverted");
      }
    }
    if (!(pitch_min <= pitch_max)) {
      throw std::invalid_argument("SensorSearch: pitch range is inverted");
    }
    if (!(pitch_min > -kPi / 2.0 && pitch_max < kPi / 2.0)) {
      throw std::invalid_argument(
          "SensorSearch: pitch range must lie within (-pi/2, pi/2)");
    }
  }
};

struct SearchSpace {
  std::vector<SensorSearch> sensors;

  void validate(size_t sensor_count) const {
    if (sensors.size() != sensor_count) {
      throw std::invalid_argument(
          "SearchSpace: one search region per sensor is required");
    }
    for (const SensorSearch& s : sensors) s.validate();
  }
};

/// Neighborhood sizes and decay of the random search.
struct NeighborhoodSchedule {
  double n_init_trans = 1.0;            // meters
  double n_final_trans = 0.01;          // meters
  double n_init_rot = 30.0 * kPi / 180.0;   // radians
  double n_final_rot = 0.3 * kPi / 180.0;   // radians
  int samples_per_round = 1000;
  double decay = 0.5;

  void validate() const {
    if (!(n_final_trans > 0.0) || !(n_final_trans <= n_init_trans)) {
      throw std::invalid_argument(
          "NeighborhoodSchedule: need 0 < n_final_trans <= n_init_trans");
    }
    if (!(n_final_rot > 0.0) || !(n_final_rot <= n_init_rot)) {
      throw std::invalid_argument(
          "NeighborhoodSchedule: need 0 < n_final_rot <= n_init_rot");
    }
    if (samples_per_round < 1) {
      throw std::invalid_argument(
          "NeighborhoodSchedule: samples_per_round must be at least 1");
    }
    if (!(decay > 0.0 && decay < 1.0)) {
      throw std::invalid_argument(
          "NeighborhoodSchedule: decay must lie in (0, 1)");
    }
  }
};

struct OptimizationRound {
  double neighborhood_trans = 0.0;
  double neighborhood_rot = 0.0;
  double best_entropy = 0.0;
  std::vector<SensorPose> best_poses;
};

struct OptimizationTrace {
  std::uint64_t seed = 0;
  std::vector<OptimizationRound> rounds;
};

struct OptimizeResult {
  Configuration best_configuration;
  OptimizationTrace trace;
  double initial_entropy = 0.0;
  double best_entropy = 0.0;
};

namespace detail {

// Portable uniform double in [0, 1) from the top 53 bits of the generator.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline void check_inside(const SensorPose& pose, const SensorSearch& search,
                         int sensor_index) {
  const auto& box = search.mount_region;
  const bool t_ok = pose.t.x() >= box.min.x() && pose.t.x() <= box.max.x() &&
                    pose.t.y() >= box.min.y() && pose.t.y() <= box.max.y() &&
                    pose.t.z() >= box.min.z() && pose.t.z() <= box.max.z();
  if (!t_ok || pose.pitch < search.pitch_min || pose.pitch > search.pitch_max) {
    throw std::invalid_argument(
        "optimize: template pose of sensor " + std::to_string(sensor_index) +
        " lies outside its search region");
  }
}

}  // namespace detail

/// Random search for the entropy-minimizing placement. Deterministic for a
/// given seed: all of a round's perturbations are drawn from one generator
/// stream before any evaluation.
inline OptimizeResult optimize(const Configuration& config_template,
                               const SearchSpace& search,
                               const NeighborhoodSchedule& schedule,
                               const PriorField& field,
                               const PerceptionSpace& space,
                               std::uint64_t seed,
                               const EvaluateOptions& eval_options = {}) {
  config_template.validate();
  schedule.validate();
  search.validate(config_template.sensors.size());
  const size_t n_sensors = config_template.sensors.size();
  for (size_t i = 0; i < n_sensors; ++i) {
    detail::check_inside(config_template.sensors[i].pose, search.sensors[i],
                         static_cast<int>(i));
  }

  EvaluateOptions eval_opts = eval_options;
  eval_opts.retain_per_voxel = false;

  Configuration current = config_template;
  auto entropy_of = [&](const Configuration& c) {
    return evaluate(c, field, space, eval_opts).total_entropy;
  };

  std::vector<SensorPose> best_poses(n_sensors);
  for (size_t i = 0; i < n_sensors; ++i) {
    best_poses[i] = config_template.sensors[i].pose;
  }
  double best_entropy = entropy_of(config_template);

  OptimizeResult result;
  result.initial_entropy = best_entropy;
  result.trace.seed = seed;

  std::mt19937_64 rng(seed);
  double n_trans = schedule.n_init_trans;
  double n_rot = schedule.n_init_rot;

  while (true) {
    std::vector<std::vector<SensorPose>> candidates(
        static_cast<size_t>(schedule.samples_per_round));
    for (auto& cand : candidates) {
      cand.resize(n_sensors);
      for (size_t i = 0; i < n_sensors; ++i) {
        const SensorSearch& region = search.sensors[i];
        SensorPose pose = best_poses[i];
        for (int axis = 0; axis < 3; ++axis) {
          const double delta = (2.0 * detail::uniform01(rng) - 1.0) * n_trans;
          pose.t[axis] = std::clamp(pose.t[axis] + delta,
                                    region.mount_region.min[axis],
                                    region.mount_region.max[axis]);
        }
        const double dpitch = (2.0 * detail::uniform01(rng) - 1.0) * n_rot;
        pose.pitch = std::clamp(pose.pitch + dpitch, region.pitch_min,
                                region.pitch_max);
        cand[i] = pose;
      }
    }

    for (const auto& cand : candidates) {
      for (size_t i = 0; i < n_sensors; ++i) current.sensors[i].pose = cand[i];
      const double h = entropy_of(current);
      if (h < best_entropy) {
        best_entropy = h;
        best_poses = cand;
      }
    }

    OptimizationRound round;
    round.neighborhood_trans = n_trans;
    round.neighborhood_rot = n_rot;
    round.best_entropy = best_entropy;
    round.best_poses = best_poses;
    result.trace.rounds.push_back(std::move(round));

    if (n_trans <= schedule.n_final_trans && n_rot <= schedule.n_final_rot) {
      break;
    }
    n_trans *= schedule.decay;
    n_rot *= schedule.decay;
  }

  result.best_configuration = config_template;
  for (size_t i = 0; i < n_sensors; ++i) {
    result.best_configuration.sensors[i].pose = best_poses[i];
  }
  result.best_entropy = best_entropy;
  return result;
}

}  // namespace percept
