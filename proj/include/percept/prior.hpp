// Prior field over the perception space: per-class spatial densities,
// multiplicative perception-weight regions, and the normalizer eta such that
// the density values at all sample-grid positions sum to 1.
//
// Sample positions sit at cell centers: min + (i + 0.5) * interval per axis,
// enumerated in lexicographic (x, then y, then z) order. Per-axis counts are
// floor(extent / interval) with a small epsilon guard, at least 1.

#pragma once

#include "percept/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace percept {

/// Bounded rectangular evaluation region plus the grid sampling interval.
struct PerceptionSpace {
  double x_min = -80.0, x_max = 80.0;
  double y_min = -40.0, y_max = 40.0;
  double z_min = 0.0, z_max = 5.0;
  double sample_interval = 0.5;

  static int axis_count(double lo, double hi, double interval) {
    const double q = (hi - lo) / interval;
    return std::max(1, static_cast<int>(std::floor(q + 1e-9)));
  }

  int nx() const { return axis_count(x_min, x_max, sample_interval); }
  int ny() const { return axis_count(y_min, y_max, sample_interval); }
  int nz() const { return axis_count(z_min, z_max, sample_interval); }

  std::int64_t sample_count() const {
    return static_cast<std::int64_t>(nx()) * ny() * nz();
  }

  bool contains(const Vec3& s) const {
    return s.x() >= x_min && s.x() <= x_max && s.y() >= y_min &&
           s.y() <= y_max && s.z() >= z_min && s.z() <= z_max;
  }

  void validate() const {
    if (!(x_min < x_max) || !(y_min < y_max) || !(z_min < z_max)) {
      throw std::invalid_argument(
          "PerceptionSpace: ranges must be non-degenerate (min < max)");
    }
    if (!(sample_interval > 0.0)) {
      throw std::invalid_argument(
          "PerceptionSpace: sample_interval must be positive");
    }
  }
};

/// Deterministic enumeration of the sample positions of a PerceptionSpace.
class SampleGrid {
 public:
  explicit SampleGrid(const PerceptionSpace& space)
      : space_(space), nx_(space.nx()), ny_(space.ny()), nz_(space.nz()) {
    space_.validate();
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  std::int64_t size() const {
    return static_cast<std::int64_t>(nx_) * ny_ * nz_;
  }

  Vec3 position(int ix, int iy, int iz) const {
    const double h = space_.sample_interval;
    return Vec3{space_.x_min + (ix + 0.5) * h, space_.y_min + (iy + 0.5) * h,
                space_.z_min + (iz + 0.5) * h};
  }

  Vec3 position(std::int64_t flat) const {
    const int iz = static_cast<int>(flat % nz_);
    const std::int64_t rest = flat / nz_;
    const int iy = static_cast<int>(rest % ny_);
    const int ix = static_cast<int>(rest / ny_);
    return position(ix, iy, iz);
  }

  const PerceptionSpace& space() const { return space_; }

 private:
  PerceptionSpace space_;
  int nx_, ny_, nz_;
};

inline SampleGrid sample_grid(const PerceptionSpace& space) {
  return SampleGrid(space);
}

/// 2D density histogram over (x, y), row-major with x as the slow index.
struct Histogram2d {
  double x_min = 0.0;
  double y_min = 0.0;
  double bin_size = 1.0;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;  // values[ix * ny + iy]

  double at(double x, double y) const {
    const int ix = static_cast<int>(std::floor((x - x_min) / bin_size));
    const int iy = static_cast<int>(std::floor((y - y_min) / bin_size));
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) return 0.0;
    return values[static_cast<size_t>(ix) * ny + iy];
  }

  void validate() const {
    if (!(bin_size > 0.0)) {
      throw std::invalid_argument("Histogram2d: bin_size must be positive");
    }
    if (nx < 1 || ny < 1) {
      throw std::invalid_argument("Histogram2d: nx and ny must be at least 1");
    }
    if (values.size() != static_cast<size_t>(nx) * ny) {
      throw std::invalid_argument(
          "Histogram2d: values size does not match nx*ny");
    }
    for (double v : values) {
      if (!(v >= 0.0)) {
        throw std::invalid_argument(
            "Histogram2d: density values must be non-negative");
      }
    }
  }
};

/// One object class: its (x, y) density histogram and the z interval the
/// class occupies (density is constant in z inside the interval).
struct ClassPrior {
  std::string class_name;
  Histogram2d histogram;
  double z_lo = 0.0;
  double z_hi = 0.0;

  void validate() const {
    if (class_name.empty()) {
      throw std::invalid_argument("ClassPrior: class_name is empty");
    }
    histogram.validate();
    if (!(z_lo < z_hi)) {
      throw std::invalid_argument(
          "ClassPrior: z_extent must be non-degenerate (lo < hi)");
    }
    bool any_positive = false;
    for (double v : histogram.values) any_positive |= v > 0.0;
    if (!any_positive) {
      throw std::invalid_argument(
          "ClassPrior: histogram needs at least one positive bin");
    }
  }
};

/// Multiplicative perception weight over an (x, y) box, optionally limited
/// to one class. Omitted bounds default to +-infinity (half spaces).
struct WeightRegion {
  double x_min = -std::numeric_limits<double>::infinity();
  double x_max = std::numeric_limits<double>::infinity();
  double y_min = -std::numeric_limits<double>::infinity();
  double y_max = std::numeric_limits<double>::infinity();
  std::optional<std::string> class_filter;
  double multiplier = 1.0;

  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }

  void validate() const {
    if (!(multiplier > 0.0)) {
      throw std::invalid_argument("WeightRegion: multiplier must be positive");
    }
    if (!(x_min <= x_max) || !(y_min <= y_max)) {
      throw std::invalid_argument("WeightRegion: box bounds are inverted");
    }
  }
};

/// Combined weight at (x, y) for a class. Overlapping regions compose
/// multiplicatively; class-filtered regions apply only to the named class.
inline double region_weight(const std::vector<WeightRegion>& regions, double x,
                            double y, const std::string& class_name) {
  double w = 1.0;
  for (const WeightRegion& r : regions) {
    if (!r.contains(x, y)) continue;
    if (r.class_filter && *r.class_filter != class_name) continue;
    w *= r.multiplier;
  }
  return w;
}

/// Normalized prior p_S over the sample grid: the weighted class mixture
/// scaled by eta so that the densities at all grid samples sum to 1. With no
/// classes the base density is uniform (1 before weighting and
/// normalization); class-filtered weight regions do not apply to it.
class PriorField {
 public:
  PriorField(const PerceptionSpace& space, std::vector<ClassPrior> classes,
             std::vector<WeightRegion> regions)
      : space_(space),
        classes_(std::move(classes)),
        regions_(std::move(regions)) {
    space_.validate();
    for (const ClassPrior& c : classes_) c.validate();
    for (const WeightRegion& r : regions_) r.validate();

    const SampleGrid grid(space_);
    long double sum = 0.0L;
    const std::int64_t n = grid.size();
    for (std::int64_t i = 0; i < n; ++i) {
      sum += unnormalized(grid.position(i));
    }
    if (!(sum > 0.0L)) {
      throw std::invalid_argument(
          "PriorField: combined density is zero everywhere on the grid");
    }
    eta_ = static_cast<double>(1.0L / sum);
  }

  /// eta * sum_c w(s,c) * p_c(s); zero outside the perception space.
  double density(const Vec3& s) const {
    if (!space_.contains(s)) return 0.0;
    return eta_ * unnormalized(s);
  }

  double eta() const { return eta_; }
  const PerceptionSpace& space() const { return space_; }
  const std::vector<ClassPrior>& classes() const { return classes_; }
  const std::vector<WeightRegion>& regions() const { return regions_; }

 private:
  double unnormalized(const Vec3& s) const {
    if (classes_.empty()) {
      return region_weight(regions_, s.x(), s.y(), std::string());
    }
    double d = 0.0;
    for (const ClassPrior& c : classes_) {
      if (s.z() < c.z_lo || s.z() > c.z_hi) continue;
      const double bin = c.histogram.at(s.x(), s.y());
      if (bin == 0.0) continue;
      d += region_weight(regions_, s.x(), s.y(), c.class_name) * bin;
    }
    return d;
  }

  PerceptionSpace space_;
  std::vector<ClassPrior> classes_;
  std::vector<WeightRegion> regions_;
  double eta_ = 0.0;
};

inline double prior_density(const PriorField& field, const Vec3& s) {
  return field.density(s);
}

/// Histogram CSV layout: line 1 is the literal header
/// "x_min,y_min,bin_size,nx,ny", line 2 carries those five values, and the
/// remaining lines carry the nx*ny densities row-major (x slow, y fast),
/// separated by commas and/or line breaks.
inline Histogram2d read_histogram_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("Histogram CSV: cannot open " + path);
  }
  auto fail = [&path](int line, const std::string& what) {
    throw std::invalid_argument("Histogram CSV " + path + ": " + what +
                                " at line " + std::to_string(line));
  };

  std::string line;
  if (!std::getline(in, line)) fail(1, "missing header");
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
    line.pop_back();
  }
  if (line != "x_min,y_min,bin_size,nx,ny") {
    fail(1, "expected header \"x_min,y_min,bin_size,nx,ny\"");
  }

  auto parse_fields = [&](const std::string& text, int line_no) {
    std::vector<double> out;
    std::string token;
    std::istringstream ss(text);
    while (std::getline(ss, token, ',')) {
      size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &pos);
      } catch (const std::exception&) {
        fail(line_no, "non-numeric value \"" + token + "\"");
      }
      while (pos < token.size() &&
             (token[pos] == ' ' || token[pos] == '\r' || token[pos] == '\t')) {
        ++pos;
      }
      if (pos != token.size()) {
        fail(line_no, "non-numeric value \"" + token + "\"");
      }
      out.push_back(v);
    }
    return out;
  };

  if (!std::getline(in, line)) fail(2, "missing metadata values");
  const std::vector<double> meta = parse_fields(line, 2);
  if (meta.size() != 5) fail(2, "expected 5 metadata values");

  Histogram2d h;
  h.x_min = meta[0];
  h.y_min = meta[1];
  h.bin_size = meta[2];
  h.nx = static_cast<int>(std::llround(meta[3]));
  h.ny = static_cast<int>(std::llround(meta[4]));
  if (h.nx < 1 || h.ny < 1) fail(2, "nx and ny must be at least 1");
  const size_t expected = static_cast<size_t>(h.nx) * static_cast<size_t>(h.ny);

  int line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    for (double v : parse_fields(line, line_no)) {
      if (h.values.size() == expected) fail(line_no, "trailing data");
      h.values.push_back(v);
    }
  }
  if (h.values.size() != expected) {
    throw std::invalid_argument(
        "Histogram CSV " + path + ": expected " + std::to_string(expected) +
        " density values, got " + std::to_string(h.values.size()));
  }
  h.validate();
  return h;
}

/// File-level description of one class prior.
struct ClassSpec {
  std::string class_name;
  std::string csv_path;
  double z_lo = 0.0;
  double z_hi = 0.0;
};

/// Build the prior from histogram files. A class whose file does not exist
/// is omitted; zero remaining classes fall back to the uniform prior.
inline PriorField load_prior(const PerceptionSpace& space,
                             const std::vector<ClassSpec>& class_specs,
                             std::vector<WeightRegion> regions) {
  std::vector<ClassPrior> classes;
  for (const ClassSpec& spec : class_specs) {
    std::ifstream probe(spec.csv_path);
    if (!probe) continue;
    probe.close();
    ClassPrior c;
    c.class_name = spec.class_name;
    c.histogram = read_histogram_csv(spec.csv_path);
    c.z_lo = spec.z_lo;
    c.z_hi = spec.z_hi;
    classes.push_back(std::move(c));
  }
  return PriorField(space, std::move(classes), std::move(regions));
}

}  // namespace percept
