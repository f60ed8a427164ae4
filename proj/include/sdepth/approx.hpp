#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include "sdepth/core.hpp"
#include "sdepth/exactnd.hpp"
#include "sdepth/linalg.hpp"
#include "sdepth/rng.hpp"

namespace sdepth {

// ===== Randomized approximations =====
//
// Both methods evaluate the depth objective on a random candidate set, so the
// result never falls below the exact depth. rdirections scores uniformly
// random directions with non-strict counts; rpoints scores random signed
// (d-1)-tuples through the exact tangent machinery.

struct ApproxConfig {
  long long N = 0;
  std::uint64_t seed = 0;
  double eps = 1e-14;
  int threads = 1;
};

// Uniform direction on the unit sphere: normalized Gaussian vector. Redraws
// on the (measure-zero) event of a vanishing draw.
inline Vector sample_uniform_direction(int d, Xoshiro256pp& rng) {
  if (d < 1) {
    throw DimensionMismatchError("sample_uniform_direction: dimension must be positive");
  }
  Vector u(d);
  while (true) {
    for (int j = 0; j < d; ++j) {
      u(j) = rng.gaussian();
    }
    const double norm = u.norm();
    if (norm > 1e-300) {
      return u / norm;
    }
  }
}

namespace detail {

inline void validate_approx(const ApproxConfig& cfg) {
  if (cfg.N < 1) {
    throw ValidationError("approximation: N must be at least 1");
  }
  if (cfg.eps <= 0.0) {
    throw ValidationError("approximation: eps must be positive");
  }
  if (cfg.threads < 1) {
    throw ValidationError("approximation: threads must be at least 1");
  }
}

// Splits [0, N) into per-worker chunks; worker w draws from the seeded
// generator jumped w times, so results are deterministic for a fixed
// (seed, N, threads) triple and threads = 1 is the plain sequential stream.
template <typename Body>
void run_sampling(const ApproxConfig& cfg, Body&& body) {
  const int threads = cfg.threads;
  if (threads == 1) {
    Xoshiro256pp rng(cfg.seed);
    body(0, cfg.N, rng);
    return;
  }
  const long long chunk = (cfg.N + threads - 1) / threads;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    const long long lo = static_cast<long long>(w) * chunk;
    const long long hi = std::min(cfg.N, lo + chunk);
    if (lo >= hi) {
      break;
    }
    pool.emplace_back([&body, &cfg, w, lo, hi] {
      Xoshiro256pp rng(cfg.seed);
      for (int j = 0; j < w; ++j) {
        rng.long_jump();
      }
      body(w, hi - lo, rng);
    });
  }
  for (auto& th : pool) {
    th.join();
  }
}

}  // namespace detail

// Minimum over N uniform random directions of the non-strict slab counts
// min(#{|u.y| <= 1}, #{|u.y| >= 1}).
inline DepthResult approx_rdirections(const std::vector<Vector>& x, const Vector& mu,
                                      const Matrix& sigma, const ApproxConfig& cfg) {
  detail::validate_approx(cfg);
  const std::vector<Vector> y = standardize(x, mu, sigma);
  if (y.empty()) {
    throw ValidationError("approx_rdirections: dataset is empty");
  }
  const int d = static_cast<int>(mu.size());
  if (d < 2) {
    throw DimensionMismatchError("approx_rdirections: dimension must be at least 2");
  }
  const int n = static_cast<int>(y.size());

  struct Local {
    int best = std::numeric_limits<int>::max();
    std::optional<Vector> witness;
  };
  std::vector<Local> locals(static_cast<std::size_t>(cfg.threads));

  detail::run_sampling(cfg, [&](int w, long long draws, Xoshiro256pp& rng) {
    Local local;
    for (long long j = 0; j < draws; ++j) {
      const Vector u = sample_uniform_direction(d, rng);
      int c_in = 0;
      int c_out = 0;
      for (const Vector& yi : y) {
        const double a = std::abs(u.dot(yi));
        if (a <= 1.0) {
          ++c_in;
        }
        if (a >= 1.0) {
          ++c_out;
        }
      }
      const int score = std::min(c_in, c_out);
      if (score < local.best) {
        local.best = score;
        local.witness = u;
      }
    }
    locals[static_cast<std::size_t>(w)] = std::move(local);
  });

  DepthResult result;
  result.depth = n;
  result.evaluations = static_cast<std::uint64_t>(cfg.N);
  for (const Local& l : locals) {
    if (l.best < result.depth) {
      result.depth = l.best;
      result.witness = l.witness;
    }
  }
  return result;
}

// Minimum over N random signed (d-1)-tuples of outside points, each scored
// through the exact tangent evaluation (both tangent directions, strict
// counts against 1 +/- eps). Infeasible and degenerate draws contribute
// nothing but still advance the stream.
inline DepthResult approx_rpoints(const std::vector<Vector>& x, const Vector& mu,
                                  const Matrix& sigma, const ApproxConfig& cfg) {
  detail::validate_approx(cfg);
  const StandardizedSample s = make_standardized_sample(x, mu, sigma);
  const int d = s.d;
  if (d < 2) {
    throw DimensionMismatchError("approx_rpoints: dimension must be at least 2");
  }
  if (s.y.empty()) {
    throw ValidationError("approx_rpoints: dataset is empty");
  }
  const int n = static_cast<int>(s.y.size());
  const int m = static_cast<int>(s.outside_idx.size());
  if (m <= d - 1) {
    return DepthResult{0, std::nullopt, 0};
  }
  const int k = d - 1;

  struct Local {
    int best = std::numeric_limits<int>::max();
    std::optional<Vector> witness;
    std::uint64_t evals = 0;
  };
  std::vector<Local> locals(static_cast<std::size_t>(cfg.threads));

  detail::run_sampling(cfg, [&](int w, long long draws, Xoshiro256pp& rng) {
    detail::TupleWorker worker(s, cfg.eps);
    Local local;
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (long long j = 0; j < draws; ++j) {
      // Distinct indices by rejection, then sorted: the draw is a uniform
      // k-subset; the sign word applies to the sorted order with the first
      // sign fixed positive.
      for (int a = 0; a < k; ++a) {
        while (true) {
          const int cand = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(m)));
          bool fresh = true;
          for (int b = 0; b < a; ++b) {
            if (idx[b] == cand) {
              fresh = false;
              break;
            }
          }
          if (fresh) {
            idx[a] = cand;
            break;
          }
        }
      }
      std::sort(idx.begin(), idx.end());
      const unsigned signbits =
          k >= 2 ? static_cast<unsigned>(rng.next() & ((1u << (k - 1)) - 1)) : 0u;

      worker.prepare_combo(idx.data(), k);
      const auto outcome = worker.evaluate(idx.data(), signbits, k, true,
                                           std::numeric_limits<int>::max());
      if (outcome != detail::TupleOutcome::scored) {
        continue;
      }
      local.evals += 2;
      const int score = std::min(worker.score1(), worker.score2());
      if (score < local.best) {
        local.best = score;
        local.witness = (worker.score1() <= worker.score2()) ? worker.u1() : worker.u2();
      }
    }
    locals[static_cast<std::size_t>(w)] = std::move(local);
  });

  DepthResult result;
  result.depth = n;
  for (const Local& l : locals) {
    result.evaluations += l.evals;
    if (l.best < result.depth) {
      result.depth = l.best;
      result.witness = l.witness;
    }
  }
  return result;
}

}  // namespace sdepth
