// Command-line front end: evaluate / optimize / fit-curve / export-heatmap.
//
// Exit codes: 0 success, 1 malformed or invalid configuration (the message
// names the offending key or field), 2 I/O failure.

#include "percept/percept.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

namespace {

std::string parent_dir(const std::string& path) {
  return std::filesystem::path(path).parent_path().string();
}

// The prior silently omits classes whose histogram file is missing (falling
// back to uniform when none remain); surface that on stderr.
void warn_missing_histograms(const percept::RunConfig& rc,
                             const std::string& base_dir) {
  for (const percept::ClassConfig& c : rc.prior_classes) {
    std::filesystem::path p(c.histogram_csv);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    if (!std::filesystem::exists(p)) {
      std::fprintf(stderr,
                   "warning: histogram for class \"%s\" not found at %s; "
                   "class omitted\n",
                   c.name.c_str(), p.string().c_str());
    }
  }
}

percept::PriorField load_prior_field(const percept::RunConfig& rc,
                                     const std::string& config_path) {
  const std::string base = parent_dir(config_path);
  warn_missing_histograms(rc, base);
  return percept::materialize_prior(rc, base);
}

int run_evaluate(const std::string& config_path, const std::string& out_path,
                 const std::string& heatmap_path, int threads) {
  const percept::RunConfig rc = percept::load_run_config(config_path);
  const percept::PerceptionSpace space = percept::materialize_space(rc);
  const percept::Configuration config =
      percept::materialize_configuration(rc);
  const percept::PriorField field = load_prior_field(rc, config_path);

  percept::EvaluateOptions options;
  options.threads = threads;
  options.retain_per_voxel = !heatmap_path.empty();
  const percept::EntropyReport report =
      percept::evaluate(config, field, space, options);

  percept::write_report_json(report, out_path);
  if (!heatmap_path.empty()) {
    percept::export_heatmap(report, field, heatmap_path);
  }
  std::printf("%.6f\n", report.total_entropy);
  return 0;
}

int run_optimize(const std::string& config_path, std::uint64_t seed,
                 const std::string& out_path, std::string trace_path,
                 int threads) {
  const percept::RunConfig rc = percept::load_run_config(config_path);
  const percept::PerceptionSpace space = percept::materialize_space(rc);
  const percept::Configuration config =
      percept::materialize_configuration(rc);
  const percept::PriorField field = load_prior_field(rc, config_path);
  const percept::SearchSpace search = percept::materialize_search(rc, config);
  const percept::NeighborhoodSchedule schedule =
      percept::materialize_schedule(rc);

  percept::EvaluateOptions options;
  options.threads = threads;
  const percept::OptimizeResult result = percept::optimize(
      config, search, schedule, field, space, seed, options);

  // Round-trip the optimized poses through JSON text before hashing so the
  // recorded hash matches a re-parse of the written file exactly.
  const percept::RunConfig best_rc =
      percept::with_poses(rc, result.best_configuration);
  nlohmann::json best_json = percept::run_config_to_json(best_rc);
  const percept::RunConfig reparsed =
      percept::parse_run_config(nlohmann::json::parse(best_json.dump()));
  best_json["config_hash"] =
      percept::config_hash_hex(percept::materialize_configuration(reparsed));

  std::ofstream out(out_path);
  if (!out) {
    throw std::runtime_error("Optimize: cannot open " + out_path +
                             " for writing");
  }
  out << best_json.dump(2) << '\n';
  out.flush();
  if (!out) {
    throw std::runtime_error("Optimize: write to " + out_path + " failed");
  }

  if (trace_path.empty()) trace_path = out_path + ".trace.jsonl";
  percept::write_trace_jsonl(result.trace, trace_path);

  std::printf("initial_entropy %.6f\n", result.initial_entropy);
  std::printf("final_entropy %.6f\n", result.best_entropy);
  return 0;
}

int run_fit_curve(const std::string& samples_path,
                  const std::string& out_path) {
  const std::vector<percept::ApSample> samples =
      percept::load_ap_samples(samples_path);
  const percept::ApCurve curve = percept::fit_ap_curve(samples);
  percept::write_curve_json(curve, out_path);
  std::printf("a %.6f\nb %.6f\n", curve.a, curve.b);
  return 0;
}

int run_export_heatmap(const std::string& config_path,
                       const std::string& out_path, int threads) {
  const percept::RunConfig rc = percept::load_run_config(config_path);
  const percept::PerceptionSpace space = percept::materialize_space(rc);
  const percept::Configuration config =
      percept::materialize_configuration(rc);
  const percept::PriorField field = load_prior_field(rc, config_path);

  percept::EvaluateOptions options;
  options.threads = threads;
  options.retain_per_voxel = true;
  const percept::EntropyReport report =
      percept::evaluate(config, field, space, options);
  percept::export_heatmap(report, field, out_path);
  std::printf("%.6f\n", report.total_entropy);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perception-entropy evaluation and placement search for "
               "LiDAR + camera sensor configurations"};
  app.require_subcommand(1);

  std::string config_path, out_path, heatmap_path, trace_path, samples_path;
  std::uint64_t seed = 0;
  int threads = 1;

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Compute the perception entropy of a configuration");
  evaluate->add_option("--config", config_path, "Scenario JSON")->required();
  evaluate->add_option("--out", out_path, "Report JSON output")->required();
  evaluate->add_option("--heatmap", heatmap_path,
                       "Optional top-down entropy CSV output");
  evaluate->add_option("--threads", threads, "Evaluation threads");

  CLI::App* optimize = app.add_subcommand(
      "optimize", "Search for the entropy-minimizing placement");
  optimize->add_option("--config", config_path, "Scenario JSON")->required();
  optimize->add_option("--out", out_path, "Best-configuration JSON output")
      ->required();
  optimize->add_option("--seed", seed, "Random seed");
  optimize->add_option("--trace", trace_path,
                       "Trace JSONL output (default: <out>.trace.jsonl)");
  optimize->add_option("--threads", threads, "Evaluation threads");

  CLI::App* fit = app.add_subcommand(
      "fit-curve", "Fit the AP curve from measurement/AP samples");
  fit->add_option("--samples", samples_path, "Sample CSV (m_norm,ap)")
      ->required();
  fit->add_option("--out", out_path, "Curve JSON output")->required();

  CLI::App* heatmap = app.add_subcommand(
      "export-heatmap", "Evaluate and write the top-down entropy CSV");
  heatmap->add_option("--config", config_path, "Scenario JSON")->required();
  heatmap->add_option("--out", out_path, "Heatmap CSV output")->required();
  heatmap->add_option("--threads", threads, "Evaluation threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(evaluate)) {
      return run_evaluate(config_path, out_path, heatmap_path, threads);
    }
    if (app.got_subcommand(optimize)) {
      return run_optimize(config_path, seed, out_path, trace_path, threads);
    }
    if (app.got_subcommand(fit)) {
      return run_fit_curve(samples_path, out_path);
    }
    return run_export_heatmap(config_path, out_path, threads);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
