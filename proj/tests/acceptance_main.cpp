/// Acceptance gate: one PASS/FAIL line per criterion, exit 1 on any failure.
/// Each criterion pins its tolerance and wall-clock budget in code.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "percept/config.hpp"
#include "percept/evaluator.hpp"
#include "percept/optimizer.hpp"

#include "oracles.hpp"
#include "testutil.hpp"

namespace {

using percept::Aabb;
using percept::ApCurve;
using percept::ApSample;
using percept::CameraModel;
using percept::ClassPrior;
using percept::Configuration;
using percept::deg_to_rad;
using percept::EvaluateOptions;
using percept::Histogram2d;
using percept::LidarModel;
using percept::PerceptionSpace;
using percept::PriorField;
using percept::SensorEntry;
using percept::SensorPose;
using percept::SensorSearch;
using percept::Vec3;
using percept::VehicleBody;
using percept::Voxel;
using percept::WeightRegion;

// Pinned references and tolerances.
constexpr double kRefGaussianUnit = 2.8378770664093453;  // 1 + ln(2*pi)
constexpr double kTolGaussianUnit = 1e-9;
constexpr double kRefLidarM1 = 1.520195;
constexpr double kTolLidarM1 = 1e-6;
constexpr double kRefFuseLate34 = 2.4;
constexpr double kTolFuseLate34 = 1e-12;
constexpr double kRefZeroMeasurement = 16.651387;
constexpr double kTolZeroMeasurement = 1e-6;
constexpr double kTolFitNoiseless = 1e-12;
constexpr double kTolFitNoisy = 0.005;
constexpr double kTolAimRad = percept::kPi / 180.0;  // one degree

// Wall-clock budgets in milliseconds; exceeding one fails the criterion.
constexpr double kBudgetClosedFormMs = 1000.0;
constexpr double kBudgetOracleMs = 60000.0;
constexpr double kBudgetMonotonicityMs = 120000.0;
constexpr double kBudgetLidarPairMs = 60000.0;
constexpr double kBudgetFarVsWideMs = 900000.0;
constexpr double kBudgetFitMs = 60000.0;
constexpr double kBudgetOptimizerMs = 300000.0;
constexpr double kBudgetFullScaleWallMs = 30000.0;
constexpr double kBudgetFullScaleEvalMs = 5000.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------------------
// Closed-form entropy values.

Outcome closed_form_values() {
  const ApCurve lidar_curve{0.152, 0.659};
  const double g1 = percept::gaussian_entropy(1.0);
  const double v1 = percept::voxel_entropy(1, lidar_curve);
  const double f34 = percept::fuse_late({3.0, 4.0});
  const double z0 = percept::voxel_entropy(0, lidar_curve);

  const bool pass = std::abs(g1 - kRefGaussianUnit) <= kTolGaussianUnit &&
                    std::abs(v1 - kRefLidarM1) <= kTolLidarM1 &&
                    std::abs(f34 - kRefFuseLate34) <= kTolFuseLate34 &&
                    std::abs(z0 - kRefZeroMeasurement) <= kTolZeroMeasurement;
  return {pass,
          fmt("gaussian(1)=%.12f voxel(1)=%.9f fuse_late([3,4])=%.14f "
              "zero=%.9f",
              g1, v1, f34, z0)};
}

// ---------------------------------------------------------------------------
// Randomized scenes where pruned counting must equal the exhaustive oracles.

Vec3 random_probe_center(std::mt19937_64& g, const Vec3& anchor, int index) {
  if (index < 6) {
    return anchor + Vec3{testutil::urand(g, -0.25, 0.25),
                         testutil::urand(g, -0.25, 0.25),
                         testutil::urand(g, -0.25, 0.25)};
  }
  return Vec3{testutil::urand(g, -12.0, 12.0), testutil::urand(g, -12.0, 12.0),
              testutil::urand(g, -2.0, 6.0)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 g(9001);
  long long checks = 0;

  for (int scene = 0; scene < 120; ++scene) {
    const LidarModel lidar = testutil::random_lidar(g);
    const SensorPose pose = testutil::random_pose(g);
    const VehicleBody body = testutil::random_body(g);
    for (int i = 0; i < 40; ++i) {
      const Voxel vox{random_probe_center(g, pose.t, i), percept::kVoxelSideM};
      const std::int64_t got =
          percept::lidar_voxel_measurement(lidar, pose, body, vox);
      const std::int64_t want = oracles::lidar_count(lidar, pose, body, vox);
      if (got != want) {
        return {false, fmt("lidar scene %d voxel (%.3f,%.3f,%.3f): %lld vs "
                           "oracle %lld",
                           scene, vox.center.x(), vox.center.y(),
                           vox.center.z(), static_cast<long long>(got),
                           static_cast<long long>(want))};
      }
      ++checks;
    }
  }

  for (int scene = 0; scene < 120; ++scene) {
    const CameraModel cam = testutil::random_camera(g);
    const SensorPose pose = testutil::random_pose(g);
    const VehicleBody body = testutil::random_body(g);
    for (int i = 0; i < 40; ++i) {
      const Voxel vox{random_probe_center(g, pose.t, i), percept::kVoxelSideM};
      const std::int64_t got =
          percept::camera_voxel_measurement(cam, pose, body, vox);
      const std::int64_t want = oracles::camera_count(cam, pose, body, vox);
      if (got != want) {
        return {false, fmt("camera scene %d voxel (%.3f,%.3f,%.3f): %lld vs "
                           "oracle %lld",
                           scene, vox.center.x(), vox.center.y(),
                           vox.center.z(), static_cast<long long>(got),
                           static_cast<long long>(want))};
      }
      ++checks;
    }
  }
  return {true, fmt("240 randomized scenes, %lld exact count matches", checks)};
}

// ---------------------------------------------------------------------------
// Monotonicity: more sensing never raises the total.

SensorEntry random_entry(std::mt19937_64& g, int group) {
  SensorEntry entry{CameraModel{}, testutil::random_pose(g), group};
  if (testutil::irand(g, 0, 1) == 0) {
    entry.spec = testutil::random_lidar(g);
  } else {
    entry.spec = testutil::random_camera(g);
  }
  return entry;
}

Outcome monotonicity_suite() {
  std::mt19937_64 g(9002);
  int cases = 0;
  int strict = 0;

  // Adding a sensor in a new fusion group.
  for (int trial = 0; trial < 10; ++trial) {
    const PerceptionSpace space = testutil::random_space(g, 3, 8);
    const PriorField field(space, {}, {});
    Configuration base;
    const int n = testutil::irand(g, 1, 2);
    for (int s = 0; s < n; ++s) base.sensors.push_back(random_entry(g, s));
    base.body = testutil::random_body(g);
    const double h0 = percept::evaluate(base, field, space).total_entropy;

    Configuration more = base;
    more.sensors.push_back(random_entry(g, n));
    const double h1 = percept::evaluate(more, field, space).total_entropy;
    if (h1 > h0) {
      return {false, fmt("adding a sensor raised entropy: %.12f -> %.12f "
                         "(trial %d)",
                         h0, h1, trial)};
    }
    ++cases;
    if (h1 < h0) ++strict;
  }

  // Adding LiDAR channels to an existing sensor.
  for (int trial = 0; trial < 8; ++trial) {
    const PerceptionSpace space = testutil::random_space(g, 3, 8);
    const PriorField field(space, {}, {});
    const LidarModel lidar = testutil::random_lidar(g);
    const SensorPose pose = testutil::random_pose(g);

    Configuration base;
    base.sensors.push_back(SensorEntry{lidar, pose, 0});
    const double h0 = percept::evaluate(base, field, space).total_entropy;

    std::vector<double> channels = lidar.channels();
    const int extra = testutil::irand(g, 1, 3);
    for (int i = 0; i < extra; ++i) {
      channels.push_back(testutil::urand(g, 0.15, percept::kPi - 0.15));
    }
    Configuration more;
    more.sensors.push_back(SensorEntry{
        LidarModel(channels, lidar.azimuth_step(), lidar.max_range()), pose,
        0});
    const double h1 = percept::evaluate(more, field, space).total_entropy;
    if (h1 > h0) {
      return {false, fmt("adding channels raised entropy: %.12f -> %.12f "
                         "(trial %d)",
                         h0, h1, trial)};
    }
    ++cases;
    if (h1 < h0) ++strict;
  }

  // Doubling camera resolution, with every voxel footprint interior to the
  // image and several pixels wide so the finer grid must cover more centers.
  for (int trial = 0; trial < 6; ++trial) {
    PerceptionSpace space;
    space.x_min = 5.0;
    space.x_max = 15.0;
    space.y_min = -1.5;
    space.y_max = 1.5;
    space.z_min = 0.0;
    space.z_max = 2.0;
    space.sample_interval = 0.5;
    const PriorField field(space, {}, {});

    SensorPose pose;
    pose.t = Vec3{0.0, 0.0, 1.0};
    pose.roll = testutil::urand(g, -0.05, 0.05);
    pose.pitch = testutil::urand(g, -0.05, 0.05);
    pose.yaw = testutil::urand(g, -0.05, 0.05);

    Configuration base;
    base.sensors.push_back(
        SensorEntry{CameraModel{deg_to_rad(53.0), 1200, 900, 40.0}, pose, 0});
    const double h0 = percept::evaluate(base, field, space).total_entropy;

    Configuration fine;
    fine.sensors.push_back(
        SensorEntry{CameraModel{deg_to_rad(53.0), 2400, 1800, 40.0}, pose, 0});
    const double h1 = percept::evaluate(fine, field, space).total_entropy;
    if (h1 > h0) {
      return {false, fmt("doubling resolution raised entropy: %.12f -> %.12f "
                         "(trial %d)",
                         h0, h1, trial)};
    }
    ++cases;
    if (h1 < h0) ++strict;
  }

  // Removing vehicle-body boxes that occlude the space without overlapping
  // any grid sample.
  for (int trial = 0; trial < 8; ++trial) {
    PerceptionSpace space;
    space.x_min = 2.0;
    space.x_max = 8.0;
    space.y_min = -2.0;
    space.y_max = 2.0;
    space.z_min = 0.0;
    space.z_max = 2.0;
    space.sample_interval = 0.5;
    const PriorField field(space, {}, {});

    std::vector<double> channels;
    for (int c = 0; c < 8; ++c) channels.push_back(deg_to_rad(60.0 + 10.0 * c));
    SensorPose lidar_pose;
    lidar_pose.t = Vec3{0.0, testutil::urand(g, -0.5, 0.5),
                        testutil::urand(g, 0.8, 1.4)};
    SensorPose cam_pose;
    cam_pose.t = Vec3{0.0, testutil::urand(g, -0.5, 0.5),
                      testutil::urand(g, 0.8, 1.4)};

    Configuration with_body;
    with_body.sensors.push_back(SensorEntry{
        LidarModel(channels, deg_to_rad(5.0), 30.0), lidar_pose, 0});
    with_body.sensors.push_back(
        SensorEntry{CameraModel{deg_to_rad(90.0), 320, 240, 30.0}, cam_pose,
                    1});
    const int boxes = testutil::irand(g, 1, 2);
    for (int b = 0; b < boxes; ++b) {
      const double y0 = testutil::urand(g, -1.5, 0.5);
      const double z0 = testutil::urand(g, 0.0, 1.0);
      with_body.body.boxes.push_back(
          Aabb{Vec3{0.3, y0, z0},
               Vec3{1.8, y0 + testutil::urand(g, 0.5, 1.0),
                    z0 + testutil::urand(g, 0.5, 1.0)}});
    }
    const double h0 = percept::evaluate(with_body, field, space).total_entropy;

    Configuration bare = with_body;
    bare.body.boxes.clear();
    const double h1 = percept::evaluate(bare, field, space).total_entropy;
    if (h1 > h0) {
      return {false, fmt("removing body boxes raised entropy: %.12f -> %.12f "
                         "(trial %d)",
                         h0, h1, trial)};
    }
    ++cases;
    if (h1 < h0) ++strict;
  }

  return {true, fmt("%d comparisons held, %d strictly improved", cases,
                    strict)};
}

// ---------------------------------------------------------------------------
// Two co-located 16-channel LiDARs: a one degree pitch offset interleaves the
// scan rings and must beat the aligned pair.

Outcome lidar_pitch_interleaving() {
  const PerceptionSpace space;  // default extents, 0.5 m grid
  const PriorField field(space, {}, {});

  std::vector<double> channels;
  for (int c = 0; c < 16; ++c) channels.push_back(deg_to_rad(75.0 + 2.0 * c));
  const LidarModel model(channels, deg_to_rad(0.5), 120.0);

  SensorPose pose;
  pose.t = Vec3{0.0, 0.0, 2.0};

  Configuration aligned;
  aligned.sensors.push_back(SensorEntry{model, pose, 0});
  aligned.sensors.push_back(SensorEntry{model, pose, 0});

  Configuration offset = aligned;
  offset.sensors[1].pose.pitch = deg_to_rad(1.0);

  const double h_aligned =
      percept::evaluate(aligned, field, space).total_entropy;
  const double h_offset = percept::evaluate(offset, field, space).total_entropy;
  return {h_offset < h_aligned,
          fmt("pitch offset %.6f vs aligned %.6f", h_offset, h_aligned)};
}

// ---------------------------------------------------------------------------
// Far-weighted prior: a 60 degree camera at its optimized placement must beat
// a 120 degree camera at its optimized placement. The resolution is chosen so
// the wide camera cannot resolve voxels in the doubled far band; at full HD a
// uniform prior lets the wide camera's near-lateral coverage dominate instead.

Outcome narrow_beats_wide() {
  const PerceptionSpace space;  // default extents, 0.5 m grid
  std::vector<WeightRegion> regions(2);
  regions[0].x_min = 40.0;
  regions[0].multiplier = 2.0;
  regions[1].x_max = -40.0;
  regions[1].multiplier = 2.0;
  const PriorField field(space, {}, std::move(regions));

  const auto make_config = [](double hfov_deg) {
    Configuration config;
    SensorPose pose;
    pose.t = Vec3{1.0, 0.0, 1.6};
    config.sensors.push_back(SensorEntry{
        CameraModel{deg_to_rad(hfov_deg), 960, 540, 100.0}, pose, 0});
    return config;
  };

  percept::SearchSpace search;
  search.sensors.push_back(SensorSearch{
      Aabb{Vec3{0.0, 0.0, 1.2}, Vec3{2.0, 0.0, 2.0}}, deg_to_rad(-10.0),
      deg_to_rad(10.0)});

  percept::NeighborhoodSchedule schedule;
  schedule.n_init_trans = 1.0;
  schedule.n_final_trans = 0.05;
  schedule.n_init_rot = deg_to_rad(10.0);
  schedule.n_final_rot = deg_to_rad(1.0);
  schedule.samples_per_round = 40;
  schedule.decay = 0.5;

  const percept::OptimizeResult narrow =
      percept::optimize(make_config(60.0), search, schedule, field, space, 11);
  const percept::OptimizeResult wide =
      percept::optimize(make_config(120.0), search, schedule, field, space, 11);

  return {narrow.best_entropy < wide.best_entropy,
          fmt("60 deg %.6f vs 120 deg %.6f after %zu rounds each",
              narrow.best_entropy, wide.best_entropy,
              narrow.trace.rounds.size())};
}

// ---------------------------------------------------------------------------
// Regression recovery.

Outcome fit_recovery() {
  std::vector<ApSample> clean;
  for (int i = 0; i < 10; ++i) {
    const double x = 0.2 * i;
    clean.push_back(ApSample{std::exp(x), 0.152 * x + 0.659});
  }
  const ApCurve exact = percept::fit_ap_curve(clean);
  const double clean_err = std::max(std::abs(exact.a - 0.152),
                                    std::abs(exact.b - 0.659));

  std::mt19937_64 g(606);
  std::vector<ApSample> noisy;
  for (int i = 0; i < 50; ++i) {
    const double x = testutil::urand(g, 0.0, 2.0);
    const double noise = testutil::urand(g, -0.01, 0.01);
    noisy.push_back(ApSample{std::exp(x), 0.152 * x + 0.659 + noise});
  }
  const ApCurve rough = percept::fit_ap_curve(noisy);
  const double noisy_err = std::max(std::abs(rough.a - 0.152),
                                    std::abs(rough.b - 0.659));

  return {clean_err <= kTolFitNoiseless && noisy_err <= kTolFitNoisy,
          fmt("noiseless error %.2e (tol %.0e), noisy error %.2e (tol %.0e)",
              clean_err, kTolFitNoiseless, noisy_err, kTolFitNoisy)};
}

// ---------------------------------------------------------------------------
// Optimizer contract: monotone trace, byte-identical outputs across runs and
// thread counts, and camera aim within one degree of the closed form.

bool trace_monotone(const percept::OptimizationTrace& trace) {
  for (size_t i = 1; i < trace.rounds.size(); ++i) {
    if (trace.rounds[i].best_entropy > trace.rounds[i - 1].best_entropy) {
      return false;
    }
  }
  return true;
}

Outcome optimizer_contract() {
  // Determinism scenario: one camera, pinned translation, free pitch, one
  // weighted cell at (10.25, 0.25, 0.25).
  percept::RunConfig rc;
  rc.space = percept::SpaceConfig{8.0, 12.0, 0.0, 0.5, 0.0, 3.0, 0.5};
  percept::SensorConfig cam;
  cam.type = "camera";
  cam.hfov_deg = 60.0;
  cam.width = 640;
  cam.height = 64;
  cam.max_range_m = 40.0;
  cam.pose.t_m = {0.0, 0.25, 1.5};
  cam.fusion_group = 0;
  cam.pitch_range_deg = percept::PitchRangeConfig{-30.0, 30.0};
  rc.sensors.push_back(cam);
  rc.optimizer.samples_per_round = 80;

  const PerceptionSpace space = percept::materialize_space(rc);
  const Configuration config = percept::materialize_configuration(rc);
  const percept::SearchSpace search = percept::materialize_search(rc, config);
  const percept::NeighborhoodSchedule schedule =
      percept::materialize_schedule(rc);
  const Histogram2d spot{10.0, 0.0, 0.5, 1, 1, {1.0}};
  const PriorField field(space, {ClassPrior{"target", spot, 0.0, 0.5}}, {});

  testutil::TempDir dir;
  bool monotone = true;
  const auto run_once = [&](int threads, int tag) {
    EvaluateOptions options;
    options.threads = threads;
    const percept::OptimizeResult result = percept::optimize(
        config, search, schedule, field, space, 5, options);
    monotone = monotone && trace_monotone(result.trace);
    const std::string trace_path =
        dir.file("trace_" + std::to_string(tag) + ".jsonl");
    percept::write_trace_jsonl(result.trace, trace_path);
    return percept::run_config_to_json(
               percept::with_poses(rc, result.best_configuration))
               .dump(2) +
           "\n---\n" + testutil::read_file(trace_path);
  };
  const std::string bytes_a = run_once(1, 0);
  const std::string bytes_b = run_once(1, 1);
  const std::string bytes_c = run_once(2, 2);
  const bool deterministic = bytes_a == bytes_b && bytes_a == bytes_c;

  // Aim scenario: two weighted cells at x = 40.25, z = 0.25 and z = 4.75;
  // the vertical field of view barely spans both, so the optimum pitch sits
  // within the narrow slot around the closed-form midline.
  PerceptionSpace aim_space;
  aim_space.x_min = 0.0;
  aim_space.x_max = 45.0;
  aim_space.y_min = -2.0;
  aim_space.y_max = 2.0;
  aim_space.z_min = 0.0;
  aim_space.z_max = 5.0;
  aim_space.sample_interval = 0.5;

  const Histogram2d cell{40.0, 0.0, 0.5, 1, 1, {1.0}};
  const PriorField aim_field(
      aim_space,
      {ClassPrior{"low", cell, 0.0, 0.5}, ClassPrior{"high", cell, 4.5, 5.0}},
      {});

  Configuration aim_config;
  SensorPose aim_pose;
  aim_pose.t = Vec3{0.0, 0.0, 1.7};
  aim_pose.pitch = deg_to_rad(10.0);
  aim_config.sensors.push_back(SensorEntry{
      CameraModel{deg_to_rad(60.0), 1280, 154, 60.0}, aim_pose, 0});

  percept::SearchSpace aim_search;
  aim_search.sensors.push_back(SensorSearch{
      Aabb{Vec3{-1.0, 0.0, 1.4}, Vec3{1.0, 0.0, 2.0}}, deg_to_rad(-30.0),
      deg_to_rad(30.0)});

  percept::NeighborhoodSchedule aim_schedule;
  aim_schedule.samples_per_round = 250;

  double worst_err_deg = 0.0;
  int converged = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const percept::OptimizeResult result = percept::optimize(
        aim_config, aim_search, aim_schedule, aim_field, aim_space, seed);
    monotone = monotone && trace_monotone(result.trace);
    const SensorPose& best = result.best_configuration.sensors[0].pose;
    const double rho = std::hypot(40.25 - best.t.x(), 0.25 - best.t.y());
    const double midline = 0.5 * (std::atan2(best.t.z() - 0.25, rho) -
                                  std::atan2(4.75 - best.t.z(), rho));
    const double err = std::abs(best.pitch - midline);
    worst_err_deg = std::max(worst_err_deg, percept::rad_to_deg(err));
    if (err <= kTolAimRad && result.best_entropy < 6.0) ++converged;
  }

  const bool pass = monotone && deterministic && converged == 5;
  return {pass, fmt("monotone=%s deterministic=%s aim %d/5 seeds within "
                    "tolerance, worst error %.3f deg",
                    monotone ? "yes" : "no", deterministic ? "yes" : "no",
                    converged, worst_err_deg)};
}

// ---------------------------------------------------------------------------
// Full-scale evaluation speed: 2 LiDARs + 2 cameras over 512,000 samples on
// one core.

Outcome full_scale_speed() {
  const PerceptionSpace space;  // default extents, 0.5 m grid
  const PriorField field(space, {}, {});

  std::vector<double> channels;
  for (int c = 0; c < 16; ++c) channels.push_back(deg_to_rad(75.0 + 2.0 * c));
  const LidarModel lidar(channels, deg_to_rad(0.9), 120.0);

  Configuration config;
  SensorPose pose;
  pose.t = Vec3{0.5, 0.0, 2.0};
  config.sensors.push_back(SensorEntry{lidar, pose, 0});
  pose.t = Vec3{-0.5, 0.0, 2.0};
  config.sensors.push_back(SensorEntry{lidar, pose, 0});

  pose.t = Vec3{1.5, 0.0, 1.4};
  pose.yaw = 0.0;
  config.sensors.push_back(SensorEntry{
      CameraModel{deg_to_rad(60.0), 1920, 1080, 100.0}, pose, 1});
  pose.t = Vec3{-1.5, 0.0, 1.4};
  pose.yaw = percept::kPi;
  config.sensors.push_back(SensorEntry{
      CameraModel{deg_to_rad(100.0), 1920, 1080, 100.0}, pose, 2});

  EvaluateOptions options;
  options.threads = 1;
  const auto t0 = std::chrono::steady_clock::now();
  const percept::EntropyReport report =
      percept::evaluate(config, field, space, options);
  const double eval_ms = ms_since(t0);

  const bool grid_ok = report.grid.nx == 320 && report.grid.ny == 160 &&
                       report.grid.nz == 10;
  return {grid_ok && eval_ms < kBudgetFullScaleEvalMs,
          fmt("512000 samples in %.0f ms on one core (budget %.0f ms), "
              "total entropy %.4f",
              eval_ms, kBudgetFullScaleEvalMs, report.total_entropy)};
}

// ---------------------------------------------------------------------------

struct Criterion {
  const char* name;
  double budget_ms;
  std::function<Outcome()> fn;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"closed-form entropy values", kBudgetClosedFormMs, closed_form_values},
      {"counts equal exhaustive oracles", kBudgetOracleMs, oracle_equivalence},
      {"entropy monotone under added sensing", kBudgetMonotonicityMs,
       monotonicity_suite},
      {"interleaved lidar pitch beats aligned pair", kBudgetLidarPairMs,
       lidar_pitch_interleaving},
      {"narrow camera beats wide on far-weighted prior", kBudgetFarVsWideMs,
       narrow_beats_wide},
      {"ap curve fit recovery", kBudgetFitMs, fit_recovery},
      {"optimizer determinism and camera aim", kBudgetOptimizerMs,
       optimizer_contract},
      {"full-scale single evaluation speed", kBudgetFullScaleWallMs,
       full_scale_speed},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double ms = ms_since(t0);
    const bool in_budget = ms <= c.budget_ms;
    const bool pass = outcome.pass && in_budget;
    if (!pass) ++failures;
    std::printf("%s - %s (%s; %.0f ms%s)\n", pass ? "PASS" : "FAIL", c.name,
                outcome.detail.c_str(), ms,
                in_budget ? "" : ", over budget");
    std::fflush(stdout);
  }

  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
