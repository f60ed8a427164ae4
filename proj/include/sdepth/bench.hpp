#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sdepth/core.hpp"
#include "sdepth/io.hpp"
#include "sdepth/rng.hpp"

namespace sdepth {

// ===== Benchmark harness =====
//
// For every (dimension, sample size) pair the harness draws `trials`
// standard-Gaussian datasets from a seeded generator — identical across
// methods and across runs with the same seed — and scores the depth of
// (identity, origin) with each requested method. Per cell it reports wall
// time mean/sd, the exact-match fraction and mean relative difference of the
// approximations against the exact engine (skipping trials whose exact depth
// is zero, with the skip count reported), and censors any cell whose
// cumulative time exceeds the budget.

struct BenchSpec {
  std::vector<int> dims{2, 3};
  std::vector<int> sizes{32, 64};
  int trials = 20;
  std::vector<Method> methods{Method::exact};
  double time_budget_s = 60.0;
  std::uint64_t seed = 1;
  long long N = 10000;
  double eps = 1e-14;
  // When set, the trials of each cell run on multiple threads; timings are
  // then contended and flagged as such.
  bool parallel_trials = false;
};

struct BenchCell {
  int d = 0;
  int n = 0;
  Method method = Method::exact;
  int trials_done = 0;
  bool censored = false;
  bool contended = false;
  double mean_time_s = 0.0;
  double sd_time_s = 0.0;
  double mean_depth = 0.0;
  // Relative-difference statistics against the exact engine; only valid for
  // approximate methods when the exact column completed the same trials.
  bool rel_valid = false;
  double rel_diff_mean = 0.0;
  double match_fraction = 0.0;
  int zero_exact_skips = 0;
  int rel_trials = 0;
  std::vector<int> depths;
  std::vector<double> times_s;
};

struct BenchTable {
  BenchSpec spec;
  std::vector<BenchCell> cells;
};

namespace bench_detail {

inline DepthResult score(Method method, const std::vector<Vector>& data, const BenchSpec& spec,
                         std::uint64_t trial_seed) {
  const Eigen::Index d = data.front().size();
  const Vector mu = Vector::Zero(d);
  const Matrix sigma = Matrix::Identity(d, d);
  switch (method) {
    case Method::exact: {
      ExactNDOptions opt;
      opt.eps = spec.eps;
      return exact_depth_nd(data, mu, sigma, opt);
    }
    case Method::exact2d:
      return exact_depth_2d(data, mu, sigma);
    case Method::rdirections:
    case Method::rpoints: {
      ApproxConfig cfg;
      cfg.N = spec.N;
      cfg.seed = derive_seed(trial_seed, 1000 + static_cast<std::uint64_t>(method));
      cfg.eps = spec.eps;
      return method == Method::rdirections ? approx_rdirections(data, mu, sigma, cfg)
                                           : approx_rpoints(data, mu, sigma, cfg);
    }
    case Method::oracle: {
      const std::vector<Vector> y = standardize(data, mu, sigma);
      const OracleReport rep = enumerate_all_tangents(y, spec.eps);
      DepthResult res;
      res.depth = rep.depth;
      res.evaluations = rep.directions_scored;
      return res;
    }
  }
  throw ValidationError("unknown method");
}

inline void finalize_stats(BenchCell& cell) {
  cell.trials_done = static_cast<int>(cell.depths.size());
  if (cell.trials_done == 0) {
    return;
  }
  double sum_t = 0.0;
  double sum_d = 0.0;
  for (int t = 0; t < cell.trials_done; ++t) {
    sum_t += cell.times_s[static_cast<std::size_t>(t)];
    sum_d += cell.depths[static_cast<std::size_t>(t)];
  }
  cell.mean_time_s = sum_t / cell.trials_done;
  cell.mean_depth = sum_d / cell.trials_done;
  double ss = 0.0;
  for (int t = 0; t < cell.trials_done; ++t) {
    const double dev = cell.times_s[static_cast<std::size_t>(t)] - cell.mean_time_s;
    ss += dev * dev;
  }
  cell.sd_time_s = cell.trials_done > 1 ? std::sqrt(ss / (cell.trials_done - 1)) : 0.0;
}

}  // namespace bench_detail

inline void validate_bench_spec(const BenchSpec& spec) {
  if (spec.dims.empty() || spec.sizes.empty() || spec.methods.empty()) {
    throw ValidationError("bench needs at least one dimension, size, and method");
  }
  for (const int d : spec.dims) {
    if (d < 2) {
      throw ValidationError("bench dimensions must be at least 2");
    }
    if (d != 2) {
      for (const Method m : spec.methods) {
        if (m == Method::exact2d) {
          throw ValidationError("method exact2d requires all bench dimensions to be 2");
        }
      }
    }
  }
  for (const int n : spec.sizes) {
    if (n < 1) {
      throw ValidationError("bench sizes must be at least 1");
    }
  }
  if (spec.trials < 1) {
    throw ValidationError("bench trials must be at least 1");
  }
  if (spec.time_budget_s <= 0.0) {
    throw ValidationError("bench budget must be positive");
  }
  if (spec.N < 1) {
    throw ValidationError("bench N must be at least 1");
  }
  if (spec.eps <= 0.0) {
    throw ValidationError("eps must be positive");
  }
}

inline BenchTable bench(const BenchSpec& spec) {
  validate_bench_spec(spec);
  BenchTable table;
  table.spec = spec;
  for (const int d : spec.dims) {
    for (const int n : spec.sizes) {
      std::vector<BenchCell> cells_here;
      for (const Method method : spec.methods) {
        BenchCell cell;
        cell.d = d;
        cell.n = n;
        cell.method = method;
        cell.contended = spec.parallel_trials;
        cell.depths.assign(static_cast<std::size_t>(spec.trials), -1);
        cell.times_s.assign(static_cast<std::size_t>(spec.trials), 0.0);

        std::atomic<double> cumulative{0.0};
        std::atomic<bool> censored{false};
        std::atomic<int> next_trial{0};
        std::atomic<int> done_upto{0};
        std::mutex done_mutex;
        std::vector<bool> done(static_cast<std::size_t>(spec.trials), false);

        const auto worker = [&]() {
          while (true) {
            if (censored.load()) {
              break;
            }
            const int t = next_trial.fetch_add(1);
            if (t >= spec.trials) {
              break;
            }
            const std::uint64_t trial_seed =
                derive_seed(spec.seed, static_cast<std::uint64_t>(d),
                            static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t));
            const std::vector<Vector> data = standard_gaussian_dataset(n, d, trial_seed);
            const auto t0 = std::chrono::steady_clock::now();
            const DepthResult res = bench_detail::score(method, data, spec, trial_seed);
            const auto t1 = std::chrono::steady_clock::now();
            const double dt = std::chrono::duration<double>(t1 - t0).count();
            cell.depths[static_cast<std::size_t>(t)] = res.depth;
            cell.times_s[static_cast<std::size_t>(t)] = dt;
            {
              std::lock_guard<std::mutex> lock(done_mutex);
              done[static_cast<std::size_t>(t)] = true;
              int upto = done_upto.load();
              while (upto < spec.trials && done[static_cast<std::size_t>(upto)]) {
                ++upto;
              }
              done_upto.store(upto);
            }
            double cum = cumulative.load();
            while (!cumulative.compare_exchange_weak(cum, cum + dt)) {
            }
            if (cumulative.load() > spec.time_budget_s && done_upto.load() < spec.trials) {
              censored.store(true);
              break;
            }
          }
        };

        if (spec.parallel_trials) {
          const unsigned hw = std::max(2u, std::thread::hardware_concurrency());
          const int nthreads = std::min<int>(static_cast<int>(hw), spec.trials);
          std::vector<std::thread> pool;
          pool.reserve(static_cast<std::size_t>(nthreads));
          for (int w = 0; w < nthreads; ++w) {
            pool.emplace_back(worker);
          }
          for (std::thread& th : pool) {
            th.join();
          }
        } else {
          worker();
        }

        cell.censored = censored.load();
        // Keep the prefix of consecutively completed trials so the depth
        // columns stay deterministic even when censoring strikes mid-cell.
        const int keep = done_upto.load();
        cell.depths.resize(static_cast<std::size_t>(keep));
        cell.times_s.resize(static_cast<std::size_t>(keep));
        bench_detail::finalize_stats(cell);
        cells_here.push_back(std::move(cell));
      }

      // Relative-difference statistics of approximations against the exact
      // engine over the trials both columns completed.
      const BenchCell* exact_cell = nullptr;
      for (const BenchCell& c : cells_here) {
        if (c.method == Method::exact) {
          exact_cell = &c;
          break;
        }
      }
      for (BenchCell& c : cells_here) {
        if (!is_approx(c.method) || exact_cell == nullptr) {
          continue;
        }
        const int common = std::min(c.trials_done, exact_cell->trials_done);
        double rel_sum = 0.0;
        int matches = 0;
        int used = 0;
        int skips = 0;
        for (int t = 0; t < common; ++t) {
          const int de = exact_cell->depths[static_cast<std::size_t>(t)];
          const int da = c.depths[static_cast<std::size_t>(t)];
          if (da == de) {
            ++matches;
          }
          if (de == 0) {
            ++skips;
            continue;
          }
          rel_sum += static_cast<double>(da - de) / static_cast<double>(de);
          ++used;
        }
        c.zero_exact_skips = skips;
        c.rel_trials = used;
        if (common > 0) {
          c.match_fraction = static_cast<double>(matches) / common;
        }
        if (used > 0) {
          c.rel_valid = true;
          c.rel_diff_mean = rel_sum / used;
        }
      }
      for (BenchCell& c : cells_here) {
        table.cells.push_back(std::move(c));
      }
    }
  }
  return table;
}

// ===== Rendering =====

namespace bench_detail {

inline std::string fixed(double v, int prec) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

inline const BenchCell* find_cell(const BenchTable& table, int d, int n, Method m) {
  for (const BenchCell& c : table.cells) {
    if (c.d == d && c.n == n && c.method == m) {
      return &c;
    }
  }
  return nullptr;
}

}  // namespace bench_detail

inline std::string bench_text(const BenchTable& table) {
  const BenchSpec& spec = table.spec;
  std::ostringstream os;
  os << "scatter halfspace depth benchmark  trials=" << spec.trials << "  N=" << spec.N
     << "  seed=" << spec.seed << "  budget=" << bench_detail::fixed(spec.time_budget_s, 0) << "s";
  if (spec.parallel_trials) {
    os << "  [parallel trials: timings contended]";
  }
  os << "\n\n";

  const int w = 22;
  os << "wall time, seconds: mean (sd); censored cells shown as —\n";
  os << std::left << std::setw(14) << "method" << std::setw(8) << "n";
  for (const int d : spec.dims) {
    os << std::setw(w) << ("d=" + std::to_string(d));
  }
  os << "\n";
  for (const Method m : spec.methods) {
    for (const int n : spec.sizes) {
      os << std::left << std::setw(14) << to_string(m) << std::setw(8) << n;
      for (const int d : spec.dims) {
        const BenchCell* c = bench_detail::find_cell(table, d, n, m);
        std::string entry = "—";
        if (c != nullptr && !c->censored) {
          entry = bench_detail::fixed(c->mean_time_s, 6) + " (" +
                  bench_detail::fixed(c->sd_time_s, 6) + ")";
        }
        os << std::setw(w) << entry;
      }
      os << "\n";
    }
  }

  bool any_approx = false;
  for (const Method m : spec.methods) {
    any_approx = any_approx || is_approx(m);
  }
  if (any_approx) {
    os << "\naccuracy vs exact: mean rel diff / match fraction [zero-exact trials skipped]\n";
    os << std::left << std::setw(14) << "method" << std::setw(8) << "n";
    for (const int d : spec.dims) {
      os << std::setw(w) << ("d=" + std::to_string(d));
    }
    os << "\n";
    for (const Method m : spec.methods) {
      if (!is_approx(m)) {
        continue;
      }
      for (const int n : spec.sizes) {
        os << std::left << std::setw(14) << to_string(m) << std::setw(8) << n;
        for (const int d : spec.dims) {
          const BenchCell* c = bench_detail::find_cell(table, d, n, m);
          std::string entry = "—";
          if (c != nullptr && !c->censored) {
            if (c->rel_valid) {
              entry = bench_detail::fixed(c->rel_diff_mean, 4) + " / " +
                      bench_detail::fixed(c->match_fraction, 2) + " [" +
                      std::to_string(c->zero_exact_skips) + "]";
            } else {
              entry = "n/a";
            }
          }
          os << std::setw(w) << entry;
        }
        os << "\n";
      }
    }
  }
  return os.str();
}

inline std::string bench_csv(const BenchTable& table) {
  std::ostringstream os;
  os << "d,n,method,trials_done,censored,contended,mean_time_s,sd_time_s,mean_depth,"
        "rel_diff_mean,match_fraction,zero_exact_skips,depths\n";
  os << std::setprecision(9);
  for (const BenchCell& c : table.cells) {
    os << c.d << "," << c.n << "," << to_string(c.method) << "," << c.trials_done << ","
       << (c.censored ? 1 : 0) << "," << (c.contended ? 1 : 0) << "," << c.mean_time_s << ","
       << c.sd_time_s << "," << c.mean_depth << ",";
    if (c.rel_valid) {
      os << c.rel_diff_mean;
    }
    os << ",";
    if (is_approx(c.method)) {
      os << c.match_fraction;
    }
    os << "," << c.zero_exact_skips << ",";
    for (std::size_t t = 0; t < c.depths.size(); ++t) {
      os << (t ? ";" : "") << c.depths[t];
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace sdepth
