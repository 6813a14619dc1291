// SPDX-License-Identifier: Apache-2.0
//
// verify: batch checks of the Douglas-metric characterizing equations on
// catalog or user-configured general (alpha,beta)-metrics.
//
// Exit codes: 0 all checks passed, 1 check failure, 2 configuration
// error, 3 sampling exhaustion.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "finsler/errors.hpp"
#include "finsler/suites.hpp"

namespace {

int run(int argc, char** argv) {
  CLI::App app{
      "Numerical verification of Douglas general (alpha,beta)-metrics"};
  app.name("verify");

  std::string suite = "all";
  std::string metric;
  std::string config_path;
  std::string report_path;
  std::string format;
  std::string kernel;
  std::vector<std::string> tol_overrides;
  int samples = -1;
  int dimension = -1;
  int threads = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;

  app.add_option("--suite", suite,
                 "Suite: pde02, positivity, condition03, spray-consistency, "
                 "douglas, generator-vs-closed, all");
  app.add_option("--metric", metric,
                 "Metric selector, e.g. catalog:ex72+ex63c0");
  app.add_option("--config", config_path,
                 "JSON config file; explicit flags override its fields");
  app.add_option("--samples", samples, "Sample count per suite");
  app.add_option_function<std::uint64_t>(
         "--seed",
         [&](const std::uint64_t& v) {
           seed = v;
           seed_set = true;
         },
         "PRNG seed (xoshiro256++)")
      ->expected(1);
  app.add_option("--dim", dimension, "Dimension (>= 2; 2 warns)");
  app.add_option("--threads", threads,
                 "Worker threads (default 1 for bit-stable runs)");
  app.add_option("--tol", tol_overrides,
                 "Per-suite tolerance override, suite=value; repeatable");
  app.add_option("--report", report_path, "Write the report to this path");
  app.add_option("--format", format, "Report format: json or text");
  app.add_option("--kernel", kernel,
                 "Convolution kernel: auto, scalar, avx2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  finsler::suites::RunConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw finsler::ConfigError("cannot open config file '" +
                                        config_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    cfg = finsler::suites::parse_config_text(ss.str());
  } else if (metric.empty()) {
    throw finsler::ConfigError("either --metric or --config is required");
  }

  // explicit flags win over config-file fields
  if (!metric.empty()) {
    cfg.metric = metric;
    cfg.metric_inline = nlohmann::json();
  }
  if (app.count("--suite") || config_path.empty()) cfg.suite = suite;
  if (samples >= 0) cfg.samples = samples;
  if (seed_set) cfg.seed = seed;
  if (dimension >= 0) cfg.dimension = dimension;
  if (threads >= 0) cfg.threads = threads;
  if (!format.empty()) cfg.format = format;
  if (!report_path.empty()) cfg.report_path = report_path;
  if (!kernel.empty()) cfg.kernel = kernel;
  for (const auto& ov : tol_overrides) {
    const auto pos = ov.find('=');
    if (pos == std::string::npos)
      throw finsler::ConfigError("--tol expects suite=value, got '" + ov +
                                 "'");
    cfg.tolerances[ov.substr(0, pos)] = std::stod(ov.substr(pos + 1));
  }
  if (cfg.samples < 1) throw finsler::ConfigError("samples must be >= 1");
  if (cfg.dimension < 2) throw finsler::ConfigError("dimension must be >= 2");
  if (cfg.dimension == 2)
    std::cerr << "warning: dimension 2 makes Douglas equivalent to "
                 "projectively flat; the characterization targets n >= 3\n";

  const auto report = finsler::suites::run_suite(cfg);
  const std::string rendered =
      finsler::suites::emit_report(report, cfg.format);
  if (cfg.report_path.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream out(cfg.report_path, std::ios::binary);
    if (!out) throw finsler::ConfigError("cannot write report to '" +
                                         cfg.report_path + "'");
    out << rendered;
    std::cout << (report.all_passed ? "pass" : "fail") << " -> "
              << cfg.report_path << "\n";
  }
  return report.all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const finsler::SamplingExhausted& e) {
    std::cerr << "sampling exhausted: " << e.what() << "\n";
    return 3;
  } catch (const finsler::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const finsler::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
