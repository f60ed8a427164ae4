#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdepth/sdepth.hpp"

namespace {

int exit_code_for(const sdepth::Error& e) {
  switch (e.category()) {
    case sdepth::ErrorCategory::validation:
      return 2;
    case sdepth::ErrorCategory::numeric:
      return 3;
    case sdepth::ErrorCategory::io:
      return 4;
  }
  return 1;
}

const char* category_name(const sdepth::Error& e) {
  switch (e.category()) {
    case sdepth::ErrorCategory::validation:
      return "validation";
    case sdepth::ErrorCategory::numeric:
      return "numeric";
    case sdepth::ErrorCategory::io:
      return "io";
  }
  return "error";
}

std::vector<sdepth::Method> parse_methods(const std::string& csv) {
  std::vector<sdepth::Method> methods;
  std::string current;
  std::stringstream ss(csv);
  while (std::getline(ss, current, ',')) {
    if (!current.empty()) {
      methods.push_back(sdepth::parse_method(current));
    }
  }
  if (methods.empty()) {
    throw sdepth::ValidationError("--methods must list at least one method");
  }
  return methods;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scatter halfspace depth of a matrix-location pair w.r.t. a dataset"};
  app.require_subcommand(1);

  // --- compute ---
  auto* compute = app.add_subcommand("compute", "compute the depth of (sigma, mu) for a dataset");
  std::string data_path;
  std::string mu_spec = "zero";
  std::string sigma_spec = "identity";
  std::string method_name = "exact";
  std::optional<long long> N;
  std::optional<std::uint64_t> seed;
  double eps = 1e-14;
  int threads = 1;
  bool as_json = false;
  compute->add_option("--data", data_path, "dataset file, one point per row")->required();
  compute->add_option("--mu", mu_spec,
                      "location: 'zero', 'mean', inline like '0.5,1', or a file path");
  compute->add_option("--sigma", sigma_spec,
                      "scatter: 'identity', inline like '2,1;1,2', or a file path");
  compute->add_option("--method", method_name,
                      "exact | exact2d | rdirections | rpoints | oracle");
  compute->add_option("--N", N, "number of random draws (approximate methods)");
  compute->add_option("--seed", seed, "random seed (approximate methods)");
  compute->add_option("--eps", eps, "strict-count tolerance");
  compute->add_option("--threads", threads, "worker threads for the exact engine");
  compute->add_flag("--json", as_json, "emit a single JSON object instead of plain text");

  // --- bench ---
  auto* bench_cmd = app.add_subcommand("bench", "benchmark methods over dimension/size grids");
  std::string dims_csv = "2,3";
  std::string sizes_csv = "32,64";
  int trials = 20;
  std::string methods_csv = "exact";
  double budget = 60.0;
  std::uint64_t bench_seed = 1;
  long long bench_N = 10000;
  double bench_eps = 1e-14;
  bool parallel_trials = false;
  std::string out_path;
  bench_cmd->add_option("--dims", dims_csv, "comma-separated dimensions");
  bench_cmd->add_option("--sizes", sizes_csv, "comma-separated sample sizes");
  bench_cmd->add_option("--trials", trials, "trials per cell");
  bench_cmd->add_option("--methods", methods_csv, "comma-separated methods");
  bench_cmd->add_option("--budget", budget, "per-cell time budget in seconds");
  bench_cmd->add_option("--seed", bench_seed, "master seed for dataset generation");
  bench_cmd->add_option("--N", bench_N, "draws per approximate run");
  bench_cmd->add_option("--eps", bench_eps, "strict-count tolerance");
  bench_cmd->add_flag("--parallel-trials", parallel_trials,
                      "run trials concurrently (timings flagged as contended)");
  bench_cmd->add_option("--out", out_path, "write the CSV table to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (compute->parsed()) {
      sdepth::RunConfig cfg;
      cfg.data_path = data_path;
      cfg.mu_spec = mu_spec;
      cfg.sigma_spec = sigma_spec;
      cfg.method = sdepth::parse_method(method_name);
      cfg.N = N;
      cfg.seed = seed;
      cfg.eps = eps;
      cfg.threads = threads;
      cfg.output = as_json ? sdepth::OutputFormat::json : sdepth::OutputFormat::plain;
      const sdepth::RunOutput out = sdepth::run(cfg);
      std::cout << sdepth::format_run(out, cfg.output);
    } else {
      sdepth::BenchSpec spec;
      spec.dims.clear();
      spec.sizes.clear();
      {
        std::string tok;
        std::stringstream ss(dims_csv);
        while (std::getline(ss, tok, ',')) {
          if (!tok.empty()) {
            spec.dims.push_back(std::stoi(tok));
          }
        }
        std::stringstream ss2(sizes_csv);
        while (std::getline(ss2, tok, ',')) {
          if (!tok.empty()) {
            spec.sizes.push_back(std::stoi(tok));
          }
        }
      }
      spec.trials = trials;
      spec.methods = parse_methods(methods_csv);
      spec.time_budget_s = budget;
      spec.seed = bench_seed;
      spec.N = bench_N;
      spec.eps = bench_eps;
      spec.parallel_trials = parallel_trials;
      const sdepth::BenchTable table = sdepth::bench(spec);
      std::cout << sdepth::bench_text(table);
      if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) {
          throw sdepth::IoError("cannot open '" + out_path + "' for writing");
        }
        out << sdepth::bench_csv(table);
        if (!out) {
          throw sdepth::IoError("failed writing '" + out_path + "'");
        }
      }
    }
  } catch (const sdepth::Error& e) {
    std::cerr << "error (" << category_name(e) << "): " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error (validation): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
