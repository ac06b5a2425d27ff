// Whole-configuration evaluation: sweep the sample grid, fuse per-sensor
// measurements into per-voxel entropy, and reduce to the prior-weighted
// total. The reduction is deterministic for any thread count: the grid is
// chunked by x slab, each slab accumulates its partial sum sequentially, and
// the partials are combined in slab index order.
//
// Samples inside the vehicle body receive zero prior weight: the ego body
// cannot contain targets.

#pragma once

#include "percept/entropy.hpp"
#include "percept/fusion.hpp"
#include "percept/geometry.hpp"
#include "percept/prior.hpp"
#include "percept/sensor_models.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace percept {

using SensorSpec = std::variant<LidarModel, CameraModel>;

inline Modality modality_of(const SensorSpec& spec) {
  return std::holds_alternative<LidarModel>(spec) ? Modality::kLidar
                                                  : Modality::kCamera;
}

/// One mounted sensor: its specification, pose, and early-fusion group id.
struct SensorEntry {
  SensorSpec spec;
  SensorPose pose;
  int fusion_group = 0;
};

/// AP curves per modality.
struct CurveSet {
  ApCurve lidar{0.152, 0.659};
  ApCurve camera{0.055, 0.155};

  void validate() const {
    lidar.validate();
    camera.validate();
  }
};

/// A complete sensor configuration: mounted sensors with fusion grouping,
/// the occluding vehicle body, and the per-modality AP curves.
struct Configuration {
  std::vector<SensorEntry> sensors;
  VehicleBody body;
  CurveSet curves;

  /// Groups sensors by fusion_group id (ascending); validates modality
  /// uniformity per group and the single-sensor rule for camera groups.
  FusionGraph fusion_graph() const {
    std::map<int, FusionGroup> by_id;
    for (int i = 0; i < static_cast<int>(sensors.size()); ++i) {
      const Modality m = modality_of(sensors[static_cast<size_t>(i)].spec);
      const int id = sensors[static_cast<size_t>(i)].fusion_group;
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        FusionGroup g;
        g.modality = m;
        g.curve = m == Modality::kLidar ? curves.lidar : curves.camera;
        g.sensor_ids.push_back(i);
        by_id.emplace(id, std::move(g));
      } else {
        if (it->second.modality != m) {
          throw std::invalid_argument(
              "Configuration: fusion_group " + std::to_string(id) +
              " mixes LiDAR and camera sensors");
        }
        it->second.sensor_ids.push_back(i);
      }
    }
    FusionGraph graph;
    for (auto& [id, group] : by_id) {
      if (group.modality == Modality::kCamera && group.sensor_ids.size() > 1) {
        throw std::invalid_argument(
            "Configuration: fusion_group " + std::to_string(id) +
            " holds more than one camera; camera images cannot be early-fused");
      }
      graph.groups.push_back(std::move(group));
    }
    graph.validate(static_cast<int>(sensors.size()));
    return graph;
  }

  void validate() const {
    if (sensors.empty()) {
      throw std::invalid_argument(
          "Configuration: at least one sensor is required");
    }
    for (const SensorEntry& s : sensors) {
      s.pose.validate();
      if (const auto* cam = std::get_if<CameraModel>(&s.spec)) cam->validate();
    }
    body.validate();
    curves.validate();
    fusion_graph();
  }
};

namespace detail {

class Fnv1a {
 public:
  void bytes(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 1099511628211ull;
    }
  }
  void f64(double v) {
    std::uint64_t b;
    std::memcpy(&b, &v, sizeof b);
    u64(b);
  }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void i64(std::int64_t v) { bytes(&v, sizeof v); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 1469598103934665603ull;
};

}  // namespace detail

/// FNV-1a 64 over the configuration's canonical byte pattern (exact double
/// bits). Identical configurations hash identically across platforms with
/// IEEE-754 doubles.
inline std::uint64_t config_hash(const Configuration& config) {
  detail::Fnv1a h;
  h.u64(static_cast<std::uint64_t>(config.sensors.size()));
  for (const SensorEntry& s : config.sensors) {
    if (const auto* lidar = std::get_if<LidarModel>(&s.spec)) {
      h.u64(0);
      h.u64(static_cast<std::uint64_t>(lidar->channels().size()));
      for (double c : lidar->channels()) h.f64(c);
      h.f64(lidar->azimuth_step());
      h.f64(lidar->max_range());
    } else {
      const CameraModel& cam = std::get<CameraModel>(s.spec);
      h.u64(1);
      h.f64(cam.hfov);
      h.i64(cam.width);
      h.i64(cam.height);
      h.f64(cam.max_range);
    }
    h.f64(s.pose.t.x());
    h.f64(s.pose.t.y());
    h.f64(s.pose.t.z());
    h.f64(s.pose.roll);
    h.f64(s.pose.pitch);
    h.f64(s.pose.yaw);
    h.i64(s.fusion_group);
  }
  h.u64(static_cast<std::uint64_t>(config.body.boxes.size()));
  for (const Aabb& b : config.body.boxes) {
    for (int i = 0; i < 3; ++i) h.f64(b.min[i]);
    for (int i = 0; i < 3; ++i) h.f64(b.max[i]);
  }
  for (const ApCurve& c : {config.curves.lidar, config.curves.camera}) {
    h.f64(c.a);
    h.f64(c.b);
    h.f64(c.ap_min);
    h.f64(c.ap_max);
  }
  return h.value();
}

inline std::string config_hash_hex(const Configuration& config) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t v = config_hash(config);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

struct EvaluateOptions {
  int threads = 1;
  bool retain_per_voxel = false;
};

/// Per-sample breakdown, in lexicographic grid order.
struct VoxelRecord {
  Vec3 position{0.0, 0.0, 0.0};
  std::vector<std::int64_t> group_measurements;
  double entropy = 0.0;
  double weight = 0.0;  // prior weight used in the total (0 inside the body)
};

struct GridInfo {
  int nx = 0, ny = 0, nz = 0;
  double sample_interval = 0.0;
};

struct EntropyReport {
  double total_entropy = 0.0;
  std::vector<VoxelRecord> per_voxel;  // empty unless retained
  GridInfo grid;
  std::string config_hash;
  double runtime_ms = 0.0;
};

/// Perception entropy of a configuration: the prior-weighted sum of fused
/// per-voxel entropies over the sample grid. Bit-identical results for any
/// options.threads.
inline EntropyReport evaluate(const Configuration& config,
                              const PriorField& field,
                              const PerceptionSpace& space,
                              const EvaluateOptions& options = {}) {
  const auto t_start = std::chrono::steady_clock::now();
  config.validate();
  space.validate();
  if (options.threads < 1) {
    throw std::invalid_argument("evaluate: threads must be at least 1");
  }

  const FusionGraph graph = config.fusion_graph();
  const size_t n_sensors = config.sensors.size();
  const size_t n_groups = graph.groups.size();

  std::vector<std::variant<PosedLidar, PosedCamera>> posed;
  posed.reserve(n_sensors);
  for (const SensorEntry& s : config.sensors) {
    if (const auto* lidar = std::get_if<LidarModel>(&s.spec)) {
      posed.emplace_back(std::in_place_type<PosedLidar>, *lidar, s.pose);
    } else {
      posed.emplace_back(std::in_place_type<PosedCamera>,
                         std::get<CameraModel>(s.spec), s.pose);
    }
  }

  const SampleGrid grid(space);
  const int nx = grid.nx(), ny = grid.ny(), nz = grid.nz();

  EntropyReport report;
  report.grid = GridInfo{nx, ny, nz, space.sample_interval};
  report.config_hash = config_hash_hex(config);
  if (options.retain_per_voxel) {
    report.per_voxel.resize(static_cast<size_t>(grid.size()));
  }

  std::vector<double> partials(static_cast<size_t>(nx), 0.0);

  auto run_chunk = [&](int ix, std::vector<std::int64_t>& per_sensor,
                       std::vector<std::int64_t>& per_group) {
    double partial = 0.0;
    for (int iy = 0; iy < ny; ++iy) {
      for (int iz = 0; iz < nz; ++iz) {
        const Vec3 pos = grid.position(ix, iy, iz);
        bool in_body = false;
        for (const Aabb& b : config.body.boxes) {
          if (b.contains(pos)) {
            in_body = true;
            break;
          }
        }
        const double w = in_body ? 0.0 : field.density(pos);
        if (!options.retain_per_voxel && w == 0.0) continue;

        const Voxel v{pos};
        for (size_t i = 0; i < n_sensors; ++i) {
          per_sensor[i] = std::visit(
              [&](const auto& sensor) { return sensor.measure(config.body, v); },
              posed[i]);
        }
        // graph was validated once above; skip re-validation per sample.
        const double h = detail::fused_entropy_core(graph, per_sensor);
        partial += w * h;

        if (options.retain_per_voxel) {
          for (size_t g = 0; g < n_groups; ++g) {
            std::int64_t sum = 0;
            for (int id : graph.groups[g].sensor_ids) {
              sum += per_sensor[static_cast<size_t>(id)];
            }
            per_group[g] = sum;
          }
          VoxelRecord& rec =
              report.per_voxel[(static_cast<size_t>(ix) * ny + iy) * nz + iz];
          rec.position = pos;
          rec.group_measurements.assign(per_group.begin(), per_group.end());
          rec.entropy = h;
          rec.weight = w;
        }
      }
    }
    partials[static_cast<size_t>(ix)] = partial;
  };

  const int n_threads = std::min(options.threads, nx);
  if (n_threads <= 1) {
    std::vector<std::int64_t> per_sensor(n_sensors), per_group(n_groups);
    for (int ix = 0; ix < nx; ++ix) run_chunk(ix, per_sensor, per_group);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        std::vector<std::int64_t> per_sensor(n_sensors), per_group(n_groups);
        for (int ix = next.fetch_add(1); ix < nx; ix = next.fetch_add(1)) {
          run_chunk(ix, per_sensor, per_group);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  double total = 0.0;
  for (int ix = 0; ix < nx; ++ix) total += partials[static_cast<size_t>(ix)];
  report.total_entropy = total;
  report.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t_start)
          .count();
  return report;
}

/// Write a top-down entropy map: one CSV row per (x, y) column holding the
/// prior-weighted mean entropy over that column's z samples; columns with
/// zero total weight fall back to the unweighted mean. Requires a report
/// with retained per-voxel data.
inline void export_heatmap(const EntropyReport& report, const PriorField& field,
                           const std::string& path) {
  const GridInfo& g = report.grid;
  const size_t expected = static_cast<size_t>(g.nx) *
                          static_cast<size_t>(g.ny) *
                          static_cast<size_t>(g.nz);
  if (report.per_voxel.size() != expected) {
    throw std::invalid_argument(
        "export_heatmap: report holds no per-voxel data (re-run with "
        "retain_per_voxel)");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("export_heatmap: cannot open " + path +
                             " for writing");
  }
  out.precision(12);
  out << "x,y,entropy\n";
  for (int ix = 0; ix < g.nx; ++ix) {
    for (int iy = 0; iy < g.ny; ++iy) {
      double w_sum = 0.0, wh_sum = 0.0, h_sum = 0.0;
      Vec3 column{0.0, 0.0, 0.0};
      for (int iz = 0; iz < g.nz; ++iz) {
        const VoxelRecord& rec =
            report.per_voxel[(static_cast<size_t>(ix) * g.ny + iy) * g.nz + iz];
        const double w = field.density(rec.position);
        w_sum += w;
        wh_sum += w * rec.entropy;
        h_sum += rec.entropy;
        column = rec.position;
      }
      const double value = w_sum > 0.0 ? wh_sum / w_sum : h_sum / g.nz;
      out << column.x() << ',' << column.y() << ',' << value << '\n';
    }
  }
  if (!out) {
    throw std::runtime_error("export_heatmap: write to " + path + " failed");
  }
}

}  // namespace percept
