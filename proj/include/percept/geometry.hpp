// Ground-frame geometry: poses, rotations, rays, and axis-aligned boxes.
//
// Conventions used throughout the library:
//   - Ground frame: x forward, y left, z up; origin on the ground plane at
//     the vehicle center.
//   - A SensorPose maps sensor-frame vectors into the ground frame via
//     R = Rz(yaw) * Ry(pitch) * Rx(roll); t is the sensor origin expressed
//     in ground coordinates.
//   - Beam directions are given by zenith angle theta (from sensor +z) and
//     azimuth phi (from sensor +x, counterclockwise around +z).
//   - All angles are radians, all lengths meters.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace percept {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

/// Mounting pose of one sensor in the ground frame.
struct SensorPose {
  Vec3 t{0.0, 0.0, 0.0};  // sensor origin in ground coordinates [m]
  double roll = 0.0;      // about sensor x [rad]
  double pitch = 0.0;     // about sensor y [rad]
  double yaw = 0.0;       // about sensor z [rad]

  /// Sensor-frame -> ground-frame rotation, Rz(yaw) * Ry(pitch) * Rx(roll).
  Mat3 rotation() const {
    return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
            Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
            Eigen::AngleAxisd(roll, Vec3::UnitX()))
        .toRotationMatrix();
  }

  void validate() const {
    auto in_range = [](double a) { return a > -kPi && a <= kPi; };
    if (!in_range(roll) || !in_range(pitch) || !in_range(yaw)) {
      throw std::invalid_argument(
          "SensorPose: euler angles must lie in (-pi, pi]");
    }
    const Mat3 r = rotation();
    if ((r * r.transpose() - Mat3::Identity()).norm() > 1e-9 ||
        std::abs(r.determinant() - 1.0) > 1e-9) {
      throw std::invalid_argument("SensorPose: rotation is not special orthogonal");
    }
  }
};

/// Axis-aligned box, min corner strictly below max corner componentwise.
struct Aabb {
  Vec3 min{0.0, 0.0, 0.0};
  Vec3 max{0.0, 0.0, 0.0};

  void validate() const {
    for (int i = 0; i < 3; ++i) {
      if (!(min[i] < max[i])) {
        throw std::invalid_argument("Aabb: min corner must be below max corner");
      }
    }
  }

  bool contains(const Vec3& p) const {
    return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() &&
           p.y() <= max.y() && p.z() >= min.z() && p.z() <= max.z();
  }
};

/// Self-occluding parts of the ego vehicle (hood, roof rack, pillars)
/// as boxes in the ground frame.
struct VehicleBody {
  std::vector<Aabb> boxes;

  void validate() const {
    for (const auto& b : boxes) b.validate();
  }
};

/// Unit direction for zenith angle theta and azimuth phi in the local frame.
inline Vec3 unit_from_zenith_azimuth(double theta, double phi) {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

/// Beam direction in the ground frame for a beam at (theta, phi) in the
/// sensor frame of the given pose. Returns a unit vector.
inline Vec3 beam_direction(double theta, double phi, const SensorPose& pose) {
  return pose.rotation() * unit_from_zenith_azimuth(theta, phi);
}

/// Parameter interval [t_near, t_far] of a ray against a box, or nothing.
/// The ray is origin + t * dir for all real t; callers clip to t >= 0.
struct RayInterval {
  double t_near;
  double t_far;
};

inline std::optional<RayInterval> ray_aabb(const Vec3& origin, const Vec3& dir,
                                           const Aabb& box) {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (dir[i] != 0.0) {
      double ta = (box.min[i] - origin[i]) / dir[i];
      double tb = (box.max[i] - origin[i]) / dir[i];
      if (ta > tb) std::swap(ta, tb);
      if (ta > t0) t0 = ta;
      if (tb < t1) t1 = tb;
      if (t0 > t1) return std::nullopt;
    } else if (origin[i] < box.min[i] || origin[i] > box.max[i]) {
      return std::nullopt;  // parallel to the slab and outside it
    }
  }
  return RayInterval{t0, t1};
}

inline constexpr double kRayEpsilonM = 1e-6;  // self-hit guard at the mount point

/// True iff the open segment origin + t*dir, t in (kRayEpsilonM, t_max),
/// intersects any body box.
inline bool ray_blocked(const Vec3& origin, const Vec3& dir, double t_max,
                        const VehicleBody& body) {
  for (const auto& box : body.boxes) {
    const auto hit = ray_aabb(origin, dir, box);
    if (!hit) continue;
    const double lo = std::max(hit->t_near, kRayEpsilonM);
    const double hi = std::min(hit->t_far, t_max);
    if (lo < hi) return true;
  }
  return false;
}

}  // namespace percept
