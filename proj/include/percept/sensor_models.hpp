// Geometric sensor simulation: per-voxel measurement counts for spinning
// LiDARs (beam hits) and pinhole cameras (covered pixel centers).
//
// Camera frame convention: the optical frame is z-forward / x-right /
// y-down, with the optical axis along the sensor-frame +x. For a point p in
// the ground frame the optical coordinates are
//     p_opt = P * R^T * (p - t),
// where R, t are the mounting rotation/translation and P is the fixed
// sensor-to-optical axis permutation.
//
// LiDAR beams sample azimuth uniformly at phi_j = j * azimuth_step with
// phi = 0 on the sensor-frame +x axis; one beam per (channel, azimuth
// sample). Measurement counting prunes beams by the voxel's angular window
// as seen from the sensor, which is exact: only beams that provably cannot
// hit the voxel cube are skipped.

#pragma once

#include "percept/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace percept {

inline constexpr double kVoxelSideM = 0.1;

/// One evaluation cube. The side length is the library-wide voxelization
/// constant; positions are cube centers in the ground frame.
struct Voxel {
  Vec3 center{0.0, 0.0, 0.0};
  double side = kVoxelSideM;

  Aabb bounds() const {
    const Vec3 half{side / 2.0, side / 2.0, side / 2.0};
    return Aabb{center - half, center + half};
  }

  void validate() const {
    if (side != kVoxelSideM) {
      throw std::invalid_argument("Voxel: side must be exactly 0.1 m");
    }
  }
};

/// Spinning LiDAR specification: fixed zenith channels swept over azimuth.
class LidarModel {
 public:
  /// channels are zenith angles in (0, pi), measured from sensor +z.
  LidarModel(std::vector<double> channels_rad, double azimuth_step_rad,
             double max_range_m)
      : channels_(std::move(channels_rad)),
        azimuth_step_(azimuth_step_rad),
        max_range_(max_range_m) {
    if (channels_.empty()) {
      throw std::invalid_argument("LidarModel: channel list is empty");
    }
    for (double th : channels_) {
      if (!(th > 0.0 && th < kPi)) {
        throw std::invalid_argument(
            "LidarModel: channel zenith angles must lie in (0, pi)");
      }
    }
    if (!(azimuth_step_ > 0.0)) {
      throw std::invalid_argument("LidarModel: azimuth step must be positive");
    }
    n_azimuth_ = static_cast<int>(std::llround(2.0 * kPi / azimuth_step_));
    if (n_azimuth_ < 1) {
      throw std::invalid_argument(
          "LidarModel: azimuth step exceeds a full revolution");
    }
    if (!(max_range_ > 0.0)) {
      throw std::invalid_argument("LidarModel: max range must be positive");
    }
    sorted_zenith_ = channels_;
    std::sort(sorted_zenith_.begin(), sorted_zenith_.end());
  }

  const std::vector<double>& channels() const { return channels_; }
  const std::vector<double>& sorted_channels() const { return sorted_zenith_; }
  double azimuth_step() const { return azimuth_step_; }
  double max_range() const { return max_range_; }
  int azimuth_count() const { return n_azimuth_; }

 private:
  std::vector<double> channels_;
  double azimuth_step_;
  double max_range_;
  int n_azimuth_ = 0;
  std::vector<double> sorted_zenith_;
};

/// Pinhole camera specification. The intrinsic matrix is derived from the
/// horizontal FOV; both focal entries use the width-based focal length.
struct CameraModel {
  double hfov = 0.0;      // horizontal field of view [rad], in (0, pi)
  int width = 0;          // active resolution [px]
  int height = 0;
  double max_range = 0.0; // evaluation cutoff [m]

  double focal() const { return width / (2.0 * std::tan(hfov / 2.0)); }

  void validate() const {
    if (!(hfov > 0.0 && hfov < kPi)) {
      throw std::invalid_argument("CameraModel: hfov must lie in (0, pi)");
    }
    if (width < 1 || height < 1) {
      throw std::invalid_argument("CameraModel: resolution must be at least 1x1");
    }
    if (!(max_range > 0.0)) {
      throw std::invalid_argument("CameraModel: max range must be positive");
    }
    const double f = focal();
    if (!std::isfinite(f) || !(f > 0.0)) {
      throw std::invalid_argument("CameraModel: derived focal length is not positive");
    }
  }
};

/// K = [[f, 0, W/2], [0, f, H/2], [0, 0, 1]] with f = W / (2 tan(hfov/2)).
inline Mat3 intrinsics_from_spec(const CameraModel& cam) {
  cam.validate();
  const double f = cam.focal();
  Mat3 k;
  k << f, 0.0, cam.width / 2.0,
       0.0, f, cam.height / 2.0,
       0.0, 0.0, 1.0;
  return k;
}

/// Fixed sensor-to-optical axis permutation: optical x = right = -y_s,
/// optical y = down = -z_s, optical z = forward = +x_s.
inline const Mat3& sensor_to_optical() {
  static const Mat3 p = [] {
    Mat3 m;
    m << 0.0, -1.0, 0.0,
         0.0, 0.0, -1.0,
         1.0, 0.0, 0.0;
    return m;
  }();
  return p;
}

/// Pixel location of a ground-frame point, or nothing when the point is on
/// or behind the image plane. Pixels may land outside [0,W)x[0,H).
inline std::optional<Eigen::Vector2d> project_point(const Vec3& p_ground,
                                                    const SensorPose& pose,
                                                    const Mat3& k) {
  const Vec3 p_opt =
      sensor_to_optical() * (pose.rotation().transpose() * (p_ground - pose.t));
  if (!(p_opt.z() > 0.0)) return std::nullopt;
  return Eigen::Vector2d{k(0, 0) * p_opt.x() / p_opt.z() + k(0, 2),
                         k(1, 1) * p_opt.y() / p_opt.z() + k(1, 2)};
}

namespace detail {

// Count pixel centers (u+0.5, v+0.5), u in [0,W), v in [0,H), inside the
// convex hull of the given image points, by scanline over the hull.
inline std::int64_t count_pixel_centers_in_hull(
    std::array<Eigen::Vector2d, 8> pts, int width, int height) {
  // Monotone chain; collinear points are dropped (same hull region).
  std::sort(pts.begin(), pts.end(),
            [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
              return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
            });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) -
           (a.y() - o.y()) * (b.x() - o.x());
  };
  std::array<Eigen::Vector2d, 17> hull;
  int h = 0;
  for (int i = 0; i < 8; ++i) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0.0) --h;
    hull[h++] = pts[i];
  }
  const int lower = h + 1;
  for (int i = 6; i >= 0; --i) {
    while (h >= lower && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0.0) --h;
    hull[h++] = pts[i];
  }
  const int n = h - 1;  // last point repeats the first
  if (n < 1) return 0;

  double y_min = hull[0].y(), y_max = hull[0].y();
  for (int i = 1; i < n; ++i) {
    y_min = std::min(y_min, hull[i].y());
    y_max = std::max(y_max, hull[i].y());
  }
  const int v_lo = std::max(0, static_cast<int>(std::ceil(y_min - 0.5)));
  const int v_hi = std::min(height - 1, static_cast<int>(std::floor(y_max - 0.5)));

  std::int64_t count = 0;
  for (int v = v_lo; v <= v_hi; ++v) {
    const double y = v + 0.5;
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector2d& a = hull[i];
      const Eigen::Vector2d& b = hull[(i + 1) % n];
      if ((a.y() - y) * (b.y() - y) > 0.0) continue;
      if (a.y() == b.y()) {
        if (a.y() != y) continue;
        x_min = std::min({x_min, a.x(), b.x()});
        x_max = std::max({x_max, a.x(), b.x()});
      } else {
        const double s = (y - a.y()) / (b.y() - a.y());
        const double x = a.x() + s * (b.x() - a.x());
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
      }
    }
    if (!(x_min <= x_max)) continue;
    const int u_lo = std::max(0, static_cast<int>(std::ceil(x_min - 0.5)));
    const int u_hi =
        std::min(width - 1, static_cast<int>(std::floor(x_max - 0.5)));
    if (u_hi >= u_lo) count += u_hi - u_lo + 1;
  }
  return count;
}

}  // namespace detail

/// A LiDAR bound to a mounting pose; caches the rotation and per-channel
/// trigonometry for repeated per-voxel queries.
class PosedLidar {
 public:
  PosedLidar(const LidarModel& model, const SensorPose& pose)
      : model_(&model),
        origin_(pose.t),
        rot_(pose.rotation()),
        rot_t_(rot_.transpose()) {
    const auto& zen = model.sorted_channels();
    sin_zen_.reserve(zen.size());
    cos_zen_.reserve(zen.size());
    for (double th : zen) {
      sin_zen_.push_back(std::sin(th));
      cos_zen_.push_back(std::cos(th));
    }
  }

  /// Number of beams hitting the voxel cube within range and not blocked by
  /// the vehicle body before the hit. Equals the exhaustive all-beams scan.
  std::int64_t measure(const VehicleBody& body, const Voxel& v) const {
    const Aabb box = v.bounds();
    const Vec3 c_s = rot_t_ * (v.center - origin_);
    const double d = c_s.norm();
    const double r = (v.side / 2.0) * std::sqrt(3.0);  // cube bounding radius
    if (d - r > model_->max_range()) return 0;

    const auto& zen = model_->sorted_channels();
    const int n_ch = static_cast<int>(zen.size());
    const int n_az = model_->azimuth_count();
    const double step = model_->azimuth_step();

    int ch_lo = 0, ch_hi = n_ch - 1;
    std::int64_t j_lo = 0, j_hi = n_az - 1;
    bool wrap_azimuth = false;
    if (d > r) {
      // Every point of the cube lies within angle rho of the center
      // direction, so beams outside the zenith band cannot hit.
      const double pad = 1e-9;
      const double rho = std::asin(std::min(1.0, r / d)) + pad;
      const double theta_c = std::atan2(std::hypot(c_s.x(), c_s.y()), c_s.z());
      ch_lo = static_cast<int>(
          std::lower_bound(zen.begin(), zen.end(), theta_c - rho) - zen.begin());
      ch_hi = static_cast<int>(
          std::upper_bound(zen.begin(), zen.end(), theta_c + rho) - zen.begin()) - 1;
      if (ch_lo > ch_hi) return 0;

      // In the xy projection the cube stays inside a disk of radius r; the
      // tangent lines from the origin bound the azimuth window. A cube
      // overlapping the spin axis sees all azimuths.
      const double rho_xy = std::hypot(c_s.x(), c_s.y());
      if (rho_xy > r) {
        const double dphi = std::asin(std::min(1.0, r / rho_xy)) + pad;
        const double phi_c = std::atan2(c_s.y(), c_s.x());
        // One extra index on each side: the step need not divide 2*pi
        // exactly, so a wrapped index is offset from its true beam angle by
        // up to half a step. The extra beams just fail the ray test.
        j_lo = static_cast<std::int64_t>(std::ceil((phi_c - dphi) / step)) - 1;
        j_hi = static_cast<std::int64_t>(std::floor((phi_c + dphi) / step)) + 1;
        if (j_hi - j_lo + 1 >= n_az) {
          j_lo = 0;
          j_hi = n_az - 1;
        } else {
          wrap_azimuth = true;
        }
      }
    }

    std::int64_t count = 0;
    for (int i = ch_lo; i <= ch_hi; ++i) {
      const double st = sin_zen_[static_cast<size_t>(i)];
      const double ct = cos_zen_[static_cast<size_t>(i)];
      for (std::int64_t j = j_lo; j <= j_hi; ++j) {
        const std::int64_t jw =
            wrap_azimuth ? ((j % n_az) + n_az) % n_az : j;
        const double phi = static_cast<double>(jw) * step;
        const Vec3 dir =
            rot_ * Vec3{st * std::cos(phi), st * std::sin(phi), ct};
        const auto hit = ray_aabb(origin_, dir, box);
        if (!hit || hit->t_far < 0.0) continue;
        const double t_hit = std::max(hit->t_near, 0.0);
        if (t_hit > model_->max_range()) continue;
        if (ray_blocked(origin_, dir, t_hit, body)) continue;
        ++count;
      }
    }
    return count;
  }

  const LidarModel& model() const { return *model_; }

 private:
  const LidarModel* model_;
  Vec3 origin_;
  Mat3 rot_;    // sensor -> ground
  Mat3 rot_t_;  // ground -> sensor
  std::vector<double> sin_zen_, cos_zen_;
};

/// A camera bound to a mounting pose; caches the ground-to-optical transform.
class PosedCamera {
 public:
  PosedCamera(const CameraModel& model, const SensorPose& pose)
      : model_(model),
        origin_(pose.t),
        ground_to_optical_(sensor_to_optical() * pose.rotation().transpose()) {
    model_.validate();
    fx_ = model_.focal();
    cx_ = model_.width / 2.0;
    cy_ = model_.height / 2.0;
  }

  /// Number of pixel centers covered by the voxel's projected convex hull.
  /// Zero for voxels out of range, behind or straddling the image plane, or
  /// whose center ray is blocked by the vehicle body.
  std::int64_t measure(const VehicleBody& body, const Voxel& v) const {
    const Vec3 rel = v.center - origin_;
    const double dist = rel.norm();
    if (dist > model_.max_range || dist == 0.0) return 0;

    const Aabb box = v.bounds();
    std::array<Eigen::Vector2d, 8> px;
    double u_min = std::numeric_limits<double>::infinity(), u_max = -u_min;
    double v_min = u_min, v_max = -u_min;
    for (int corner = 0; corner < 8; ++corner) {
      const Vec3 p{(corner & 1) ? box.max.x() : box.min.x(),
                   (corner & 2) ? box.max.y() : box.min.y(),
                   (corner & 4) ? box.max.z() : box.min.z()};
      const Vec3 p_opt = ground_to_optical_ * (p - origin_);
      if (!(p_opt.z() > 0.0)) return 0;  // straddles the image plane
      const double u = fx_ * p_opt.x() / p_opt.z() + cx_;
      const double w = fx_ * p_opt.y() / p_opt.z() + cy_;
      px[static_cast<size_t>(corner)] = {u, w};
      u_min = std::min(u_min, u);
      u_max = std::max(u_max, u);
      v_min = std::min(v_min, w);
      v_max = std::max(v_max, w);
    }
    // Quick reject: no pixel center inside the footprint's bounding box.
    if (u_max < 0.5 || u_min > model_.width - 0.5 || v_max < 0.5 ||
        v_min > model_.height - 0.5) {
      return 0;
    }
    if (ray_blocked(origin_, rel / dist, dist, body)) return 0;
    return detail::count_pixel_centers_in_hull(px, model_.width, model_.height);
  }

  const CameraModel& model() const { return model_; }

 private:
  CameraModel model_;
  Vec3 origin_;
  Mat3 ground_to_optical_;
  double fx_ = 0.0, cx_ = 0.0, cy_ = 0.0;
};

/// Beam-hit count for one voxel. Convenience wrapper over PosedLidar.
inline std::int64_t lidar_voxel_measurement(const LidarModel& lidar,
                                            const SensorPose& pose,
                                            const VehicleBody& body,
                                            const Voxel& v) {
  return PosedLidar(lidar, pose).measure(body, v);
}

/// Covered-pixel count for one voxel. Convenience wrapper over PosedCamera.
inline std::int64_t camera_voxel_measurement(const CameraModel& cam,
                                             const SensorPose& pose,
                                             const VehicleBody& body,
                                             const Voxel& v) {
  return PosedCamera(cam, pose).measure(body, v);
}

}  // namespace percept
