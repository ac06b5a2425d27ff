// The measurement -> AP -> sigma -> entropy chain and AP curve fitting.
//
// A sensor's perception quality at a voxel is summarized by the measurement
// count m (laser points or pixels). A fitted log-linear curve maps m to the
// expected detector average precision, AP ~ a*ln(m) + b, which in turn fixes
// the standard deviation sigma = 1/AP - 1 of a symmetric 2D Gaussian position
// estimate. The differential entropy of that Gaussian, 2*ln(sigma) + 1 +
// ln(2*pi) nats, is the per-voxel score; lower means better perception.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace percept {

/// Log-linear AP curve for one sensor modality, with clamp bounds.
struct ApCurve {
  double a = 0.0;       // slope against ln(m)
  double b = 0.0;       // intercept
  double ap_min = 0.001;
  double ap_max = 0.999;

  void validate() const {
    if (!(a > 0.0)) {
      throw std::invalid_argument("ApCurve: slope a must be positive");
    }
    if (!(0.0 < ap_min && ap_min < ap_max && ap_max < 1.0)) {
      throw std::invalid_argument("ApCurve: need 0 < ap_min < ap_max < 1");
    }
  }
};

/// One fitted data point: normalized measurement and observed AP.
struct ApSample {
  double m_norm = 0.0;
  double ap = 0.0;
};

/// AP predicted for measurement m, clamped to [ap_min, ap_max].
/// m = 0 maps directly to ap_min (the ln(0) limit lands on the lower clamp).
inline double ap_from_measurement(double m, const ApCurve& curve) {
  if (m <= 0.0) return curve.ap_min;
  return std::clamp(curve.a * std::log(m) + curve.b, curve.ap_min, curve.ap_max);
}

/// sigma = 1/AP - 1; strictly decreasing in AP.
inline double sigma_from_ap(double ap) {
  if (!(ap > 0.0)) {
    throw std::invalid_argument("sigma_from_ap: ap must be positive");
  }
  return 1.0 / ap - 1.0;
}

/// Differential entropy of a symmetric 2D Gaussian, in nats.
inline double gaussian_entropy(double sigma) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("gaussian_entropy: sigma must be positive");
  }
  return 2.0 * std::log(sigma) + 1.0 + std::log(2.0 * std::numbers::pi);
}

/// Entropy of a single-sensor voxel estimate with measurement m.
/// Exactly the composition of the three steps above.
inline double voxel_entropy(double m, const ApCurve& curve) {
  return gaussian_entropy(sigma_from_ap(ap_from_measurement(m, curve)));
}

inline constexpr double kVoxelSurfaceAreaM2 = 0.06;  // 6 * 0.1^2

/// Scale an object-level measurement down to a per-voxel equivalent by the
/// object/voxel surface area ratio.
inline double normalize_measurement(double m_object, double object_surface_area,
                                    double voxel_surface_area = kVoxelSurfaceAreaM2) {
  if (!(object_surface_area > 0.0) || !(voxel_surface_area > 0.0)) {
    throw std::invalid_argument("normalize_measurement: surface areas must be positive");
  }
  return m_object / (object_surface_area / voxel_surface_area);
}

/// Ordinary least squares of ap against ln(m_norm).
/// Throws "degenerate fit" when all m_norm coincide or the slope is <= 0.
inline ApCurve fit_ap_curve(const std::vector<ApSample>& samples,
                            double ap_min = 0.001, double ap_max = 0.999) {
  if (samples.size() < 2) {
    throw std::invalid_argument(
        "fit_ap_curve: degenerate fit (need at least 2 samples)");
  }
  double sx = 0.0, sy = 0.0;
  for (const auto& s : samples) {
    if (!(s.m_norm > 0.0)) {
      throw std::invalid_argument("fit_ap_curve: m_norm must be positive");
    }
    sx += std::log(s.m_norm);
    sy += s.ap;
  }
  const double n = static_cast<double>(samples.size());
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& s : samples) {
    const double dx = std::log(s.m_norm) - mx;
    sxx += dx * dx;
    sxy += dx * (s.ap - my);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("fit_ap_curve: degenerate fit (all m_norm equal)");
  }
  const double a = sxy / sxx;
  if (!(a > 0.0)) {
    throw std::invalid_argument("fit_ap_curve: degenerate fit (slope not positive)");
  }
  ApCurve curve{a, my - a * mx, ap_min, ap_max};
  curve.validate();
  return curve;
}

}  // namespace percept
