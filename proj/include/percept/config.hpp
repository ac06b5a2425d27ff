// File-boundary layer: the JSON run configuration (one file per scenario),
// report/trace/curve writers, and the AP-sample CSV reader.
//
// Unit conventions for files: every length is meters (_m), every angle is
// degrees (_deg). Conversion to radians happens exactly once, at
// materialization; the RunConfig itself stores file-facing values verbatim.
//
// Error conventions: malformed or invalid content throws
// std::invalid_argument (or a nlohmann parse error) naming the offending
// key; unreadable or unwritable files throw std::runtime_error. The CLI
// maps these to exit codes 1 and 2 respectively.

#pragma once

#include "percept/evaluator.hpp"
#include "percept/optimizer.hpp"
#include "percept/prior.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace percept {

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct PoseConfig {
  std::array<double, 3> t_m{0.0, 0.0, 0.0};
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
  double yaw_deg = 0.0;
};

struct MountRegionConfig {
  std::array<double, 3> min{0.0, 0.0, 0.0};
  std::array<double, 3> max{0.0, 0.0, 0.0};
};

struct PitchRangeConfig {
  double min_deg = 0.0;
  double max_deg = 0.0;
};

struct SensorConfig {
  std::string type;  // "lidar" or "camera"
  std::vector<double> channels_deg;
  double azimuth_step_deg = 0.0;
  double hfov_deg = 0.0;
  int width = 0;
  int height = 0;
  double max_range_m = 0.0;
  PoseConfig pose;
  int fusion_group = 0;
  std::optional<MountRegionConfig> mount_region_m;
  std::optional<PitchRangeConfig> pitch_range_deg;
};

struct SpaceConfig {
  double x_min_m = -80.0, x_max_m = 80.0;
  double y_min_m = -40.0, y_max_m = 40.0;
  double z_min_m = 0.0, z_max_m = 5.0;
  double sample_interval_m = 0.5;
};

struct BoxConfig {
  std::array<double, 3> min{0.0, 0.0, 0.0};
  std::array<double, 3> max{0.0, 0.0, 0.0};
};

struct ClassConfig {
  std::string name;
  std::string histogram_csv;
  double z_min_m = 0.0;
  double z_max_m = 0.0;
};

struct RegionConfig {
  std::optional<double> x_min_m, x_max_m, y_min_m, y_max_m;
  std::optional<std::string> class_filter;
  double multiplier = 1.0;
};

struct CurveConfig {
  double a = 0.0;
  double b = 0.0;
  double ap_min = 0.001;
  double ap_max = 0.999;
};

struct OptimizerConfig {
  double n_init_trans_m = 1.0;
  double n_final_trans_m = 0.01;
  double n_init_rot_deg = 30.0;
  double n_final_rot_deg = 0.3;
  int samples_per_round = 1000;
  double decay = 0.5;
};

/// The whole scenario as stored on disk, in file units.
struct RunConfig {
  int schema_version = 1;
  SpaceConfig space;
  std::vector<SensorConfig> sensors;
  std::vector<BoxConfig> vehicle_boxes_m;
  std::vector<ClassConfig> prior_classes;
  std::vector<RegionConfig> weight_regions;
  CurveConfig lidar_curve{0.152, 0.659, 0.001, 0.999};
  CurveConfig camera_curve{0.055, 0.155, 0.001, 0.999};
  OptimizerConfig optimizer;
};

namespace detail {

using Json = nlohmann::json;

inline void reject_unknown_keys(const Json& obj,
                                const std::set<std::string>& allowed,
                                const std::string& context) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw std::invalid_argument("Config: unknown key \"" + item.key() +
                                  "\" in " + context);
    }
  }
}

inline const Json& require_key(const Json& obj, const std::string& key,
                               const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw std::invalid_argument("Config: missing key \"" + key + "\" in " +
                                context);
  }
  return *it;
}

inline double get_number(const Json& obj, const std::string& key,
                         const std::string& context) {
  const Json& v = require_key(obj, key, context);
  if (!v.is_number()) {
    throw std::invalid_argument("Config: key \"" + key + "\" in " + context +
                                " must be a number");
  }
  return v.get<double>();
}

inline double get_number_or(const Json& obj, const std::string& key,
                            const std::string& context, double fallback) {
  return obj.contains(key) ? get_number(obj, key, context) : fallback;
}

inline int get_int(const Json& obj, const std::string& key,
                   const std::string& context) {
  const Json& v = require_key(obj, key, context);
  if (!v.is_number_integer()) {
    throw std::invalid_argument("Config: key \"" + key + "\" in " + context +
                                " must be an integer");
  }
  return v.get<int>();
}

inline std::string get_string(const Json& obj, const std::string& key,
                              const std::string& context) {
  const Json& v = require_key(obj, key, context);
  if (!v.is_string()) {
    throw std::invalid_argument("Config: key \"" + key + "\" in " + context +
                                " must be a string");
  }
  return v.get<std::string>();
}

inline std::array<double, 3> get_vec3(const Json& obj, const std::string& key,
                                      const std::string& context) {
  const Json& v = require_key(obj, key, context);
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() ||
      !v[1].is_number() || !v[2].is_number()) {
    throw std::invalid_argument("Config: key \"" + key + "\" in " + context +
                                " must be an array of 3 numbers");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

inline PoseConfig parse_pose(const Json& obj, const std::string& context) {
  reject_unknown_keys(obj, {"t_m", "roll_deg", "pitch_deg", "yaw_deg"},
                      context);
  PoseConfig p;
  p.t_m = get_vec3(obj, "t_m", context);
  p.roll_deg = get_number_or(obj, "roll_deg", context, 0.0);
  p.pitch_deg = get_number_or(obj, "pitch_deg", context, 0.0);
  p.yaw_deg = get_number_or(obj, "yaw_deg", context, 0.0);
  return p;
}

inline SensorConfig parse_sensor(const Json& obj, const std::string& context) {
  SensorConfig s;
  s.type = get_string(obj, "type", context);
  if (s.type == "lidar") {
    reject_unknown_keys(obj,
                        {"type", "channels_deg", "azimuth_step_deg",
                         "max_range_m", "pose", "fusion_group",
                         "mount_region_m", "pitch_range_deg"},
                        context);
    const Json& ch = require_key(obj, "channels_deg", context);
    if (!ch.is_array() || ch.empty()) {
      throw std::invalid_argument("Config: key \"channels_deg\" in " + context +
                                  " must be a non-empty array");
    }
    for (const Json& v : ch) {
      if (!v.is_number()) {
        throw std::invalid_argument("Config: key \"channels_deg\" in " +
                                    context + " must hold numbers");
      }
      s.channels_deg.push_back(v.get<double>());
    }
    s.azimuth_step_deg = get_number(obj, "azimuth_step_deg", context);
  } else if (s.type == "camera") {
    reject_unknown_keys(obj,
                        {"type", "hfov_deg", "width", "height", "max_range_m",
                         "pose", "fusion_group", "mount_region_m",
                         "pitch_range_deg"},
                        context);
    s.hfov_deg = get_number(obj, "hfov_deg", context);
    s.width = get_int(obj, "width", context);
    s.height = get_int(obj, "height", context);
  } else {
    throw std::invalid_argument("Config: key \"type\" in " + context +
                                " must be \"lidar\" or \"camera\"");
  }
  s.max_range_m = get_number(obj, "max_range_m", context);
  s.pose = parse_pose(require_key(obj, "pose", context), context + ".pose");
  s.fusion_group = get_int(obj, "fusion_group", context);
  if (obj.contains("mount_region_m")) {
    const Json& mr = obj["mount_region_m"];
    reject_unknown_keys(mr, {"min", "max"}, context + ".mount_region_m");
    MountRegionConfig region;
    region.min = get_vec3(mr, "min", context + ".mount_region_m");
    region.max = get_vec3(mr, "max", context + ".mount_region_m");
    s.mount_region_m = region;
  }
  if (obj.contains("pitch_range_deg")) {
    const Json& pr = obj["pitch_range_deg"];
    reject_unknown_keys(pr, {"min", "max"}, context + ".pitch_range_deg");
    PitchRangeConfig range;
    range.min_deg = get_number(pr, "min", context + ".pitch_range_deg");
    range.max_deg = get_number(pr, "max", context + ".pitch_range_deg");
    s.pitch_range_deg = range;
  }
  return s;
}

inline CurveConfig parse_curve(const Json& obj, const std::string& context) {
  reject_unknown_keys(obj, {"a", "b", "ap_min", "ap_max"}, context);
  CurveConfig c;
  c.a = get_number(obj, "a", context);
  c.b = get_number(obj, "b", context);
  c.ap_min = get_number_or(obj, "ap_min", context, 0.001);
  c.ap_max = get_number_or(obj, "ap_max", context, 0.999);
  return c;
}

}  // namespace detail

/// Parse a RunConfig from JSON text. Unknown keys anywhere are rejected
/// with a message naming the key and its location.
inline RunConfig parse_run_config(const nlohmann::json& root) {
  using detail::Json;
  if (!root.is_object()) {
    throw std::invalid_argument("Config: top level must be a JSON object");
  }
  detail::reject_unknown_keys(
      root,
      {"schema_version", "perception_space", "sensors", "vehicle_boxes_m",
       "prior", "curves", "optimizer", "config_hash"},
      "top level");

  RunConfig rc;
  rc.schema_version = detail::get_int(root, "schema_version", "top level");
  if (rc.schema_version != 1) {
    throw std::invalid_argument(
        "Config: unsupported schema_version " +
        std::to_string(rc.schema_version) + " (expected 1)");
  }

  if (root.contains("perception_space")) {
    const Json& sp = root["perception_space"];
    const std::string ctx = "perception_space";
    detail::reject_unknown_keys(sp,
                                {"x_min_m", "x_max_m", "y_min_m", "y_max_m",
                                 "z_min_m", "z_max_m", "sample_interval_m"},
                                ctx);
    SpaceConfig& s = rc.space;
    s.x_min_m = detail::get_number_or(sp, "x_min_m", ctx, s.x_min_m);
    s.x_max_m = detail::get_number_or(sp, "x_max_m", ctx, s.x_max_m);
    s.y_min_m = detail::get_number_or(sp, "y_min_m", ctx, s.y_min_m);
    s.y_max_m = detail::get_number_or(sp, "y_max_m", ctx, s.y_max_m);
    s.z_min_m = detail::get_number_or(sp, "z_min_m", ctx, s.z_min_m);
    s.z_max_m = detail::get_number_or(sp, "z_max_m", ctx, s.z_max_m);
    s.sample_interval_m =
        detail::get_number_or(sp, "sample_interval_m", ctx, s.sample_interval_m);
  }

  const Json& sensors = detail::require_key(root, "sensors", "top level");
  if (!sensors.is_array() || sensors.empty()) {
    throw std::invalid_argument(
        "Config: key \"sensors\" must be a non-empty array");
  }
  for (size_t i = 0; i < sensors.size(); ++i) {
    rc.sensors.push_back(detail::parse_sensor(
        sensors[i], "sensors[" + std::to_string(i) + "]"));
  }

  if (root.contains("vehicle_boxes_m")) {
    const Json& boxes = root["vehicle_boxes_m"];
    if (!boxes.is_array()) {
      throw std::invalid_argument(
          "Config: key \"vehicle_boxes_m\" must be an array");
    }
    for (size_t i = 0; i < boxes.size(); ++i) {
      const std::string ctx = "vehicle_boxes_m[" + std::to_string(i) + "]";
      detail::reject_unknown_keys(boxes[i], {"min", "max"}, ctx);
      BoxConfig b;
      b.min = detail::get_vec3(boxes[i], "min", ctx);
      b.max = detail::get_vec3(boxes[i], "max", ctx);
      rc.vehicle_boxes_m.push_back(b);
    }
  }

  if (root.contains("prior")) {
    const Json& prior = root["prior"];
    detail::reject_unknown_keys(prior, {"classes", "weight_regions"}, "prior");
    if (prior.contains("classes")) {
      const Json& classes = prior["classes"];
      if (!classes.is_array()) {
        throw std::invalid_argument(
            "Config: key \"classes\" in prior must be an array");
      }
      for (size_t i = 0; i < classes.size(); ++i) {
        const std::string ctx = "prior.classes[" + std::to_string(i) + "]";
        detail::reject_unknown_keys(
            classes[i], {"name", "histogram_csv", "z_extent_m"}, ctx);
        ClassConfig c;
        c.name = detail::get_string(classes[i], "name", ctx);
        c.histogram_csv = detail::get_string(classes[i], "histogram_csv", ctx);
        const Json& z = detail::require_key(classes[i], "z_extent_m", ctx);
        if (!z.is_array() || z.size() != 2 || !z[0].is_number() ||
            !z[1].is_number()) {
          throw std::invalid_argument("Config: key \"z_extent_m\" in " + ctx +
                                      " must be an array of 2 numbers");
        }
        c.z_min_m = z[0].get<double>();
        c.z_max_m = z[1].get<double>();
        rc.prior_classes.push_back(std::move(c));
      }
    }
    if (prior.contains("weight_regions")) {
      const Json& regions = prior["weight_regions"];
      if (!regions.is_array()) {
        throw std::invalid_argument(
            "Config: key \"weight_regions\" in prior must be an array");
      }
      for (size_t i = 0; i < regions.size(); ++i) {
        const std::string ctx =
            "prior.weight_regions[" + std::to_string(i) + "]";
        detail::reject_unknown_keys(regions[i],
                                    {"x_min_m", "x_max_m", "y_min_m",
                                     "y_max_m", "class_filter", "multiplier"},
                                    ctx);
        RegionConfig r;
        if (regions[i].contains("x_min_m"))
          r.x_min_m = detail::get_number(regions[i], "x_min_m", ctx);
        if (regions[i].contains("x_max_m"))
          r.x_max_m = detail::get_number(regions[i], "x_max_m", ctx);
        if (regions[i].contains("y_min_m"))
          r.y_min_m = detail::get_number(regions[i], "y_min_m", ctx);
        if (regions[i].contains("y_max_m"))
          r.y_max_m = detail::get_number(regions[i], "y_max_m", ctx);
        if (regions[i].contains("class_filter"))
          r.class_filter = detail::get_string(regions[i], "class_filter", ctx);
        r.multiplier = detail::get_number(regions[i], "multiplier", ctx);
        rc.weight_regions.push_back(std::move(r));
      }
    }
  }

  if (root.contains("curves")) {
    const Json& curves = root["curves"];
    detail::reject_unknown_keys(curves, {"lidar", "camera"}, "curves");
    if (curves.contains("lidar")) {
      rc.lidar_curve = detail::parse_curve(curves["lidar"], "curves.lidar");
    }
    if (curves.contains("camera")) {
      rc.camera_curve = detail::parse_curve(curves["camera"], "curves.camera");
    }
  }

  if (root.contains("optimizer")) {
    const Json& opt = root["optimizer"];
    const std::string ctx = "optimizer";
    detail::reject_unknown_keys(opt,
                                {"n_init_trans_m", "n_final_trans_m",
                                 "n_init_rot_deg", "n_final_rot_deg",
                                 "samples_per_round", "decay"},
                                ctx);
    OptimizerConfig& o = rc.optimizer;
    o.n_init_trans_m =
        detail::get_number_or(opt, "n_init_trans_m", ctx, o.n_init_trans_m);
    o.n_final_trans_m =
        detail::get_number_or(opt, "n_final_trans_m", ctx, o.n_final_trans_m);
    o.n_init_rot_deg =
        detail::get_number_or(opt, "n_init_rot_deg", ctx, o.n_init_rot_deg);
    o.n_final_rot_deg =
        detail::get_number_or(opt, "n_final_rot_deg", ctx, o.n_final_rot_deg);
    o.samples_per_round = opt.contains("samples_per_round")
                              ? detail::get_int(opt, "samples_per_round", ctx)
                              : o.samples_per_round;
    o.decay = detail::get_number_or(opt, "decay", ctx, o.decay);
  }

  return rc;
}

/// Read and parse a RunConfig file.
inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("Config: cannot open " + path);
  }
  nlohmann::json root = nlohmann::json::parse(in);
  return parse_run_config(root);
}

/// Serialize a RunConfig back to JSON (file units, degree angles).
inline nlohmann::json run_config_to_json(const RunConfig& rc) {
  using detail::Json;
  Json root;
  root["schema_version"] = rc.schema_version;
  root["perception_space"] = {
      {"x_min_m", rc.space.x_min_m},   {"x_max_m", rc.space.x_max_m},
      {"y_min_m", rc.space.y_min_m},   {"y_max_m", rc.space.y_max_m},
      {"z_min_m", rc.space.z_min_m},   {"z_max_m", rc.space.z_max_m},
      {"sample_interval_m", rc.space.sample_interval_m}};
  root["sensors"] = Json::array();
  for (const SensorConfig& s : rc.sensors) {
    Json obj;
    obj["type"] = s.type;
    if (s.type == "lidar") {
      obj["channels_deg"] = s.channels_deg;
      obj["azimuth_step_deg"] = s.azimuth_step_deg;
    } else {
      obj["hfov_deg"] = s.hfov_deg;
      obj["width"] = s.width;
      obj["height"] = s.height;
    }
    obj["max_range_m"] = s.max_range_m;
    obj["pose"] = {{"t_m", s.pose.t_m},
                   {"roll_deg", s.pose.roll_deg},
                   {"pitch_deg", s.pose.pitch_deg},
                   {"yaw_deg", s.pose.yaw_deg}};
    obj["fusion_group"] = s.fusion_group;
    if (s.mount_region_m) {
      obj["mount_region_m"] = {{"min", s.mount_region_m->min},
                               {"max", s.mount_region_m->max}};
    }
    if (s.pitch_range_deg) {
      obj["pitch_range_deg"] = {{"min", s.pitch_range_deg->min_deg},
                                {"max", s.pitch_range_deg->max_deg}};
    }
    root["sensors"].push_back(std::move(obj));
  }
  if (!rc.vehicle_boxes_m.empty()) {
    root["vehicle_boxes_m"] = Json::array();
    for (const BoxConfig& b : rc.vehicle_boxes_m) {
      root["vehicle_boxes_m"].push_back({{"min", b.min}, {"max", b.max}});
    }
  }
  if (!rc.prior_classes.empty() || !rc.weight_regions.empty()) {
    Json prior;
    if (!rc.prior_classes.empty()) {
      prior["classes"] = Json::array();
      for (const ClassConfig& c : rc.prior_classes) {
        prior["classes"].push_back(
            {{"name", c.name},
             {"histogram_csv", c.histogram_csv},
             {"z_extent_m", std::array<double, 2>{c.z_min_m, c.z_max_m}}});
      }
    }
    if (!rc.weight_regions.empty()) {
      prior["weight_regions"] = Json::array();
      for (const RegionConfig& r : rc.weight_regions) {
        Json obj;
        if (r.x_min_m) obj["x_min_m"] = *r.x_min_m;
        if (r.x_max_m) obj["x_max_m"] = *r.x_max_m;
        if (r.y_min_m) obj["y_min_m"] = *r.y_min_m;
        if (r.y_max_m) obj["y_max_m"] = *r.y_max_m;
        if (r.class_filter) obj["class_filter"] = *r.class_filter;
        obj["multiplier"] = r.multiplier;
        prior["weight_regions"].push_back(std::move(obj));
      }
    }
    root["prior"] = std::move(prior);
  }
  root["curves"] = {{"lidar",
                     {{"a", rc.lidar_curve.a},
                      {"b", rc.lidar_curve.b},
                      {"ap_min", rc.lidar_curve.ap_min},
                      {"ap_max", rc.lidar_curve.ap_max}}},
                    {"camera",
                     {{"a", rc.camera_curve.a},
                      {"b", rc.camera_curve.b},
                      {"ap_min", rc.camera_curve.ap_min},
                      {"ap_max", rc.camera_curve.ap_max}}}};
  root["optimizer"] = {{"n_init_trans_m", rc.optimizer.n_init_trans_m},
                       {"n_final_trans_m", rc.optimizer.n_final_trans_m},
                       {"n_init_rot_deg", rc.optimizer.n_init_rot_deg},
                       {"n_final_rot_deg", rc.optimizer.n_final_rot_deg},
                       {"samples_per_round", rc.optimizer.samples_per_round},
                       {"decay", rc.optimizer.decay}};
  return root;
}

/// Materialize the in-memory perception space (validates it).
inline PerceptionSpace materialize_space(const RunConfig& rc) {
  PerceptionSpace space;
  space.x_min = rc.space.x_min_m;
  space.x_max = rc.space.x_max_m;
  space.y_min = rc.space.y_min_m;
  space.y_max = rc.space.y_max_m;
  space.z_min = rc.space.z_min_m;
  space.z_max = rc.space.z_max_m;
  space.sample_interval = rc.space.sample_interval_m;
  space.validate();
  return space;
}

/// Materialize the sensor configuration (radian internals), validating
/// every module-level invariant.
inline Configuration materialize_configuration(const RunConfig& rc) {
  Configuration config;
  for (const SensorConfig& s : rc.sensors) {
    SensorEntry entry{CameraModel{}, SensorPose{}, s.fusion_group};
    if (s.type == "lidar") {
      std::vector<double> channels;
      channels.reserve(s.channels_deg.size());
      for (double deg : s.channels_deg) channels.push_back(deg_to_rad(deg));
      entry.spec.emplace<LidarModel>(std::move(channels),
                                     deg_to_rad(s.azimuth_step_deg),
                                     s.max_range_m);
    } else {
      CameraModel cam;
      cam.hfov = deg_to_rad(s.hfov_deg);
      cam.width = s.width;
      cam.height = s.height;
      cam.max_range = s.max_range_m;
      cam.validate();
      entry.spec = cam;
    }
    entry.pose.t = Vec3{s.pose.t_m[0], s.pose.t_m[1], s.pose.t_m[2]};
    entry.pose.roll = deg_to_rad(s.pose.roll_deg);
    entry.pose.pitch = deg_to_rad(s.pose.pitch_deg);
    entry.pose.yaw = deg_to_rad(s.pose.yaw_deg);
    config.sensors.push_back(std::move(entry));
  }
  for (const BoxConfig& b : rc.vehicle_boxes_m) {
    config.body.boxes.push_back(Aabb{Vec3{b.min[0], b.min[1], b.min[2]},
                                     Vec3{b.max[0], b.max[1], b.max[2]}});
  }
  config.curves.lidar =
      ApCurve{rc.lidar_curve.a, rc.lidar_curve.b, rc.lidar_curve.ap_min,
              rc.lidar_curve.ap_max};
  config.curves.camera =
      ApCurve{rc.camera_curve.a, rc.camera_curve.b, rc.camera_curve.ap_min,
              rc.camera_curve.ap_max};
  config.validate();
  return config;
}

/// Build the prior field; class histogram paths resolve relative to
/// base_dir (typically the config file's directory) unless absolute.
inline PriorField materialize_prior(const RunConfig& rc,
                                    const std::string& base_dir) {
  std::vector<ClassSpec> specs;
  for (const ClassConfig& c : rc.prior_classes) {
    std::filesystem::path p(c.histogram_csv);
    if (p.is_relative() && !base_dir.empty()) {
      p = std::filesystem::path(base_dir) / p;
    }
    specs.push_back(ClassSpec{c.name, p.string(), c.z_min_m, c.z_max_m});
  }
  std::vector<WeightRegion> regions;
  for (const RegionConfig& r : rc.weight_regions) {
    WeightRegion w;
    if (r.x_min_m) w.x_min = *r.x_min_m;
    if (r.x_max_m) w.x_max = *r.x_max_m;
    if (r.y_min_m) w.y_min = *r.y_min_m;
    if (r.y_max_m) w.y_max = *r.y_max_m;
    w.class_filter = r.class_filter;
    w.multiplier = r.multiplier;
    regions.push_back(std::move(w));
  }
  return load_prior(materialize_space(rc), specs, std::move(regions));
}

/// Per-sensor search regions. A sensor without mount_region_m is pinned to
/// its pose translation; one without pitch_range_deg keeps its pose pitch.
inline SearchSpace materialize_search(const RunConfig& rc,
                                      const Configuration& config) {
  SearchSpace search;
  for (size_t i = 0; i < rc.sensors.size(); ++i) {
    const SensorConfig& s = rc.sensors[i];
    const SensorPose& pose = config.sensors[i].pose;
    SensorSearch region;
    if (s.mount_region_m) {
      region.mount_region.min = Vec3{s.mount_region_m->min[0],
                                     s.mount_region_m->min[1],
                                     s.mount_region_m->min[2]};
      region.mount_region.max = Vec3{s.mount_region_m->max[0],
                                     s.mount_region_m->max[1],
                                     s.mount_region_m->max[2]};
    } else {
      region.mount_region.min = pose.t;
      region.mount_region.max = pose.t;
    }
    if (s.pitch_range_deg) {
      region.pitch_min = deg_to_rad(s.pitch_range_deg->min_deg);
      region.pitch_max = deg_to_rad(s.pitch_range_deg->max_deg);
    } else {
      region.pitch_min = pose.pitch;
      region.pitch_max = pose.pitch;
    }
    search.sensors.push_back(region);
  }
  return search;
}

inline NeighborhoodSchedule materialize_schedule(const RunConfig& rc) {
  NeighborhoodSchedule schedule;
  schedule.n_init_trans = rc.optimizer.n_init_trans_m;
  schedule.n_final_trans = rc.optimizer.n_final_trans_m;
  schedule.n_init_rot = deg_to_rad(rc.optimizer.n_init_rot_deg);
  schedule.n_final_rot = deg_to_rad(rc.optimizer.n_final_rot_deg);
  schedule.samples_per_round = rc.optimizer.samples_per_round;
  schedule.decay = rc.optimizer.decay;
  schedule.validate();
  return schedule;
}

/// Copy optimized poses back into file units (radians to degrees).
inline RunConfig with_poses(const RunConfig& rc, const Configuration& config) {
  RunConfig out = rc;
  for (size_t i = 0; i < out.sensors.size(); ++i) {
    const SensorPose& pose = config.sensors[i].pose;
    out.sensors[i].pose.t_m = {pose.t.x(), pose.t.y(), pose.t.z()};
    out.sensors[i].pose.roll_deg = rad_to_deg(pose.roll);
    out.sensors[i].pose.pitch_deg = rad_to_deg(pose.pitch);
    out.sensors[i].pose.yaw_deg = rad_to_deg(pose.yaw);
  }
  return out;
}

namespace detail {

inline std::ofstream open_for_write(const std::string& path,
                                    const std::string& what) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error(what + ": cannot open " + path + " for writing");
  }
  return out;
}

inline void finish_write(std::ofstream& out, const std::string& path,
                         const std::string& what) {
  out.flush();
  if (!out) {
    throw std::runtime_error(what + ": write to " + path + " failed");
  }
}

}  // namespace detail

/// Report JSON: total entropy, grid description, config hash, runtime.
inline void write_report_json(const EntropyReport& report,
                              const std::string& path) {
  nlohmann::json root{
      {"total_entropy", report.total_entropy},
      {"grid",
       {{"nx", report.grid.nx},
        {"ny", report.grid.ny},
        {"nz", report.grid.nz},
        {"sample_interval_m", report.grid.sample_interval}}},
      {"config_hash", report.config_hash},
      {"runtime_ms", report.runtime_ms}};
  auto out = detail::open_for_write(path, "Report");
  out << root.dump(2) << '\n';
  detail::finish_write(out, path, "Report");
}

/// Trace JSON lines: one round per line, angles in degrees.
inline void write_trace_jsonl(const OptimizationTrace& trace,
                              const std::string& path) {
  auto out = detail::open_for_write(path, "Trace");
  for (size_t i = 0; i < trace.rounds.size(); ++i) {
    const OptimizationRound& r = trace.rounds[i];
    nlohmann::json line{
        {"round", i},
        {"seed", trace.seed},
        {"neighborhood_trans_m", r.neighborhood_trans},
        {"neighborhood_rot_deg", rad_to_deg(r.neighborhood_rot)},
        {"best_entropy", r.best_entropy}};
    nlohmann::json poses = nlohmann::json::array();
    for (const SensorPose& p : r.best_poses) {
      poses.push_back({{"t_m", std::array<double, 3>{p.t.x(), p.t.y(), p.t.z()}},
                       {"roll_deg", rad_to_deg(p.roll)},
                       {"pitch_deg", rad_to_deg(p.pitch)},
                       {"yaw_deg", rad_to_deg(p.yaw)}});
    }
    line["best_poses"] = std::move(poses);
    out << line.dump() << '\n';
  }
  detail::finish_write(out, path, "Trace");
}

/// Curve JSON: {"a","b","ap_min","ap_max"}.
inline void write_curve_json(const ApCurve& curve, const std::string& path) {
  nlohmann::json root{{"a", curve.a},
                      {"b", curve.b},
                      {"ap_min", curve.ap_min},
                      {"ap_max", curve.ap_max}};
  auto out = detail::open_for_write(path, "Curve");
  out << root.dump(2) << '\n';
  detail::finish_write(out, path, "Curve");
}

inline ApCurve read_curve_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("Curve: cannot open " + path);
  }
  nlohmann::json root = nlohmann::json::parse(in);
  detail::reject_unknown_keys(root, {"a", "b", "ap_min", "ap_max"}, "curve");
  ApCurve curve{detail::get_number(root, "a", "curve"),
                detail::get_number(root, "b", "curve"),
                detail::get_number_or(root, "ap_min", "curve", 0.001),
                detail::get_number_or(root, "ap_max", "curve", 0.999)};
  curve.validate();
  return curve;
}

/// AP sample CSV: literal header "m_norm,ap", then one "m,ap" row per line.
inline std::vector<ApSample> load_ap_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("AP samples CSV: cannot open " + path);
  }
  auto fail = [&path](int line, const std::string& what) {
    throw std::invalid_argument("AP samples CSV " + path + ": " + what +
                                " at line " + std::to_string(line));
  };
  std::string line;
  if (!std::getline(in, line)) fail(1, "missing header");
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
    line.pop_back();
  }
  if (line != "m_norm,ap") fail(1, "expected header \"m_norm,ap\"");

  std::vector<ApSample> samples;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream ss(line);
    std::string left, right;
    if (!std::getline(ss, left, ',') || !std::getline(ss, right)) {
      fail(line_no, "expected \"m_norm,ap\" values");
    }
    try {
      samples.push_back(ApSample{std::stod(left), std::stod(right)});
    } catch (const std::exception&) {
      fail(line_no, "non-numeric value");
    }
  }
  if (samples.empty()) fail(2, "no samples (expected a data row)");
  return samples;
}

}  // namespace percept
