#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "sdepth/core.hpp"
#include "sdepth/linalg.hpp"
#include "sdepth/visited_store.hpp"

namespace sdepth {

// ===== Exact depth in general dimension =====
//
// Candidate directions are the tangent directions of hyperplanes touching the
// unit sphere and passing through signed outside points. (d-1)-point tuples
// pin down exactly two tangent directions; smaller tuples leave slack that is
// closed with orthonormal completion vectors, and any single resulting
// direction suffices. Scoring a direction never undershoots the depth, so
// enumerating extra candidates is safe; correctness only requires that every
// maximal tuple is reached, which the visited-subset pruning preserves.

struct ExactNDOptions {
  double eps = 1e-14;
  bool dedupe = true;
  int threads = 1;
};

// Per-direction outcome of one tuple evaluation. counts cover the whole
// sample: outside points are compared strictly against 1 +/- eps and points
// with ||y|| <= 1 are folded into p_in in bulk (they lie inside every slab).
struct TupleBatchResult {
  bool feasible = false;
  double w_norm = 0.0;
  Eigen::Vector2d w{0.0, 0.0};
  std::vector<Eigen::Vector2d> directions;
  std::vector<SlabCounts> counts;
  std::vector<Vector> lifted;
};

namespace detail {

// ||w|| within this slack below 1 is treated as touching the sphere and still
// scored; strictly further inside is infeasible (the circles do not meet).
constexpr double kBoundarySlack = 1e-12;

// Relative tolerance for recognizing coincident or antipodal signed points,
// which the tuple enumeration excludes by definition.
constexpr double kPairTol = 1e-12;

enum class TupleOutcome { scored, infeasible, degenerate };

// Scratch state for evaluating signed tuples against one standardized sample.
// All buffers are preallocated; evaluation allocates nothing.
class TupleWorker {
 public:
  TupleWorker(const StandardizedSample& s, double eps)
      : d_(s.d),
        m_(static_cast<int>(s.outside_idx.size())),
        inside_(s.inside_count),
        eps_(eps),
        ws_(s.d),
        yout_(s.d, std::max(m_, 1)),
        inf_norm_(std::max(m_, 1)),
        z_(s.d, std::max(s.d - 1, 1)),
        tmp_(s.d),
        u1_(s.d),
        u2_(s.d),
        pair_eq_{},
        pair_anti_{} {
    for (int j = 0; j < m_; ++j) {
      yout_.col(j) = s.y[s.outside_idx[j]];
      inf_norm_(j) = yout_.col(j).cwiseAbs().maxCoeff();
    }
    const int max_pairs = (d_ - 1) * (d_ - 2) / 2;
    pair_eq_.resize(std::max(max_pairs, 1));
    pair_anti_.resize(std::max(max_pairs, 1));
  }

  int outside_count() const { return m_; }

  // Precomputes coincidence/antipodality flags for all index pairs of the
  // combination; they do not depend on the sign assignment.
  void prepare_combo(const int* idx, int k) {
    int p = 0;
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b, ++p) {
        const double scale = kPairTol * std::max({1.0, inf_norm_(idx[a]), inf_norm_(idx[b])});
        pair_eq_[p] = (yout_.col(idx[a]) - yout_.col(idx[b])).cwiseAbs().maxCoeff() <= scale;
        pair_anti_[p] = (yout_.col(idx[a]) + yout_.col(idx[b])).cwiseAbs().maxCoeff() <= scale;
      }
    }
  }

  // Evaluates the signed tuple (idx, signbits) of size k. Bit j-1 of signbits
  // set means s_j = -1 (s_0 is always +1). Scores both tangent directions
  // when both_dirs, otherwise one. Counting aborts once neither side can
  // drop below abort_at; completed reports whether counts ran to the end.
  TupleOutcome evaluate(const int* idx, unsigned signbits, int k, bool both_dirs, int abort_at) {
    int p = 0;
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b, ++p) {
        const bool same_sign = (sign_of(signbits, a) == sign_of(signbits, b));
        if ((pair_eq_[p] && same_sign) || (pair_anti_[p] && !same_sign)) {
          return TupleOutcome::degenerate;
        }
      }
    }
    for (int j = 0; j < k; ++j) {
      z_.col(j) = sign_of(signbits, j) * yout_.col(idx[j]);
    }

    ws_.reset();
    bool deficient = false;
    for (int j = 1; j < k; ++j) {
      tmp_ = z_.col(j) - z_.col(0);
      if (!ws_.push(tmp_)) {
        deficient = true;
      }
    }
    // Residual of z_0 against the difference span = distance from the origin
    // to the tuple's affine hull; the circles intersect iff it reaches 1.
    const double dist = ws_.residual_norm(z_.col(0));
    if (dist < 1.0 - kBoundarySlack) {
      return TupleOutcome::infeasible;
    }
    if (deficient) {
      // Affinely dependent points whose hull avoids the open unit ball lie
      // together on some tangent hyperplane: a general-position violation.
      throw RankDeficientError(
          "exact_depth_nd: affinely dependent outside points on a tangent hyperplane");
    }
    ws_.push_residual(dist);
    ws_.complete();
    // Basis layout: [difference span | q_z | complement...]. alpha1 = q_z and
    // alpha2 = the last complement column; the columns between them are the
    // implicit completion vectors for k < d-1.
    const auto alpha1 = ws_.col(k - 1);
    const auto alpha2 = ws_.col(d_ - 1);
    const auto [v1, v2] = tangent_pair(Eigen::Vector2d(dist, 0.0));

    u1_.noalias() = v1.x() * alpha1;
    u1_.noalias() += v1.y() * alpha2;
    dirs_ = 1;
    if (both_dirs) {
      u2_.noalias() = v2.x() * alpha1;
      u2_.noalias() += v2.y() * alpha2;
      dirs_ = 2;
    }
    w_norm_ = dist;

    const double lo = 1.0 - eps_;
    const double hi = 1.0 + eps_;
    int in1 = inside_, out1 = 0, in2 = inside_, out2 = 0;
    completed_ = true;
    for (int i = 0; i < m_; ++i) {
      const double a1 = std::abs(u1_.dot(yout_.col(i)));
      if (a1 < lo) {
        ++in1;
      } else if (a1 > hi) {
        ++out1;
      }
      if (both_dirs) {
        const double a2 = std::abs(u2_.dot(yout_.col(i)));
        if (a2 < lo) {
          ++in2;
        } else if (a2 > hi) {
          ++out2;
        }
      }
      if (std::min(in1, out1) >= abort_at && (!both_dirs || std::min(in2, out2) >= abort_at)) {
        completed_ = false;
        break;
      }
    }
    score1_ = std::min(in1, out1);
    score2_ = both_dirs ? std::min(in2, out2) : score1_;
    counts1_ = SlabCounts{in1, out1};
    counts2_ = SlabCounts{in2, out2};
    return TupleOutcome::scored;
  }

  static double sign_of(unsigned signbits, int j) {
    return (j > 0 && (signbits & (1u << (j - 1)))) ? -1.0 : 1.0;
  }

  bool completed() const { return completed_; }
  int dirs() const { return dirs_; }
  int score1() const { return score1_; }
  int score2() const { return score2_; }
  SlabCounts counts1() const { return counts1_; }
  SlabCounts counts2() const { return counts2_; }
  double w_norm() const { return w_norm_; }
  const Vector& u1() const { return u1_; }
  const Vector& u2() const { return u2_; }

 private:
  int d_;
  int m_;
  int inside_;
  double eps_;
  OrthoWorkspace ws_;
  Matrix yout_;
  Vector inf_norm_;
  Matrix z_;
  Vector tmp_;
  Vector u1_, u2_;
  std::vector<char> pair_eq_, pair_anti_;
  bool completed_ = true;
  int dirs_ = 0;
  int score1_ = 0, score2_ = 0;
  SlabCounts counts1_{}, counts2_{};
  double w_norm_ = 0.0;
};

// Lexicographic combination cursor over k-subsets of {0, ..., m-1}.
struct CombinationCursor {
  std::vector<int> idx;
  bool valid;

  CombinationCursor(int m, int k) : idx(static_cast<std::size_t>(k)), valid(k >= 1 && k <= m) {
    for (int j = 0; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = j;
    }
    m_ = m;
  }

  bool advance() {
    const int k = static_cast<int>(idx.size());
    for (int j = k - 1; j >= 0; --j) {
      if (idx[j] < m_ - k + j) {
        ++idx[j];
        for (int t = j + 1; t < k; ++t) {
          idx[t] = idx[t - 1] + 1;
        }
        return true;
      }
    }
    valid = false;
    return false;
  }

 private:
  int m_ = 0;
};

inline std::vector<int> tuple_codes(const int* idx, unsigned signbits, int k, int m) {
  std::vector<int> codes(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    codes[j] = idx[j] + ((TupleWorker::sign_of(signbits, j) < 0) ? m : 0);
  }
  return codes;
}

}  // namespace detail

// Evaluates one signed tuple of size k with explicit completion vectors
// (d-1-k of them, orthonormal, orthogonal to the signed points). Returns the
// projected offset w, the tangent directions in the projection plane, their
// lifts to R^d, and strict slab counts per direction: both directions for
// k = d-1, a single one otherwise.
inline TupleBatchResult evaluate_tuple(const StandardizedSample& s,
                                       const std::vector<SignedIndex>& signed_pts,
                                       const std::vector<Vector>& completion, double eps) {
  const int d = s.d;
  const int k = static_cast<int>(signed_pts.size());
  const int m = static_cast<int>(s.outside_idx.size());
  if (k < 1 || k > d - 1) {
    throw ValidationError("evaluate_tuple: tuple size must be between 1 and d-1");
  }
  if (static_cast<int>(completion.size()) != d - 1 - k) {
    throw ValidationError("evaluate_tuple: expected " + std::to_string(d - 1 - k) +
                          " completion vectors");
  }
  if (eps <= 0.0) {
    throw ValidationError("evaluate_tuple: eps must be positive");
  }
  std::vector<Vector> z;
  z.reserve(static_cast<std::size_t>(k));
  for (const SignedIndex& si : signed_pts) {
    if (si.index < 0 || si.index >= m) {
      throw ValidationError("evaluate_tuple: signed index out of range");
    }
    z.push_back(static_cast<double>(si.sign >= 0 ? 1 : -1) * s.y[s.outside_idx[si.index]]);
  }

  OrthoWorkspace ws(d);
  bool deficient = false;
  for (int j = 1; j < k; ++j) {
    if (!ws.push(z[j] - z[0])) {
      deficient = true;
    }
  }
  for (const Vector& c : completion) {
    if (c.size() != d) {
      throw DimensionMismatchError("evaluate_tuple: completion dimension mismatch");
    }
    if (!ws.push(c)) {
      throw ValidationError("evaluate_tuple: completion vectors are not independent");
    }
  }
  const double dist = ws.residual_norm(z[0]);
  TupleBatchResult res;
  res.w_norm = dist;
  if (dist < 1.0 - detail::kBoundarySlack) {
    return res;
  }
  if (deficient) {
    throw RankDeficientError(
        "evaluate_tuple: affinely dependent signed points on a tangent hyperplane");
  }
  ws.push_residual(dist);
  ws.complete();
  const Vector alpha1 = ws.col(d - 2);
  const Vector alpha2 = ws.col(d - 1);

  res.feasible = true;
  res.w = Eigen::Vector2d(dist, 0.0);
  const auto [v1, v2] = detail::tangent_pair(res.w);
  const bool both = (k == d - 1);
  res.directions.push_back(v1);
  if (both) {
    res.directions.push_back(v2);
  }
  const double lo = 1.0 - eps;
  const double hi = 1.0 + eps;
  for (const Eigen::Vector2d& v : res.directions) {
    Vector u = v.x() * alpha1 + v.y() * alpha2;
    SlabCounts c;
    c.p_in = s.inside_count;
    for (const int i : s.outside_idx) {
      const double a = std::abs(u.dot(s.y[i]));
      if (a < lo) {
        ++c.p_in;
      } else if (a > hi) {
        ++c.p_out;
      }
    }
    res.counts.push_back(c);
    res.lifted.push_back(std::move(u));
  }
  return res;
}

// Marks every non-empty subset (size <= d-2) of the signed tuple as visited.
inline void mark_visited(VisitedStore& store, const std::vector<SignedIndex>& signed_pts, int m) {
  std::vector<int> codes;
  codes.reserve(signed_pts.size());
  for (const SignedIndex& si : signed_pts) {
    codes.push_back(signed_code(si, m));
  }
  store.mark(codes);
}

// Exact depth of a standardized sample. Enumerates all (d-1)-tuples of
// outside points with sign patterns (first sign fixed positive), then sweeps
// tuple sizes d-2 down to 1 for candidates not subsumed by a feasible larger
// tuple. Terminates as soon as the running depth hits zero.
inline DepthResult exact_depth_nd_standardized(const StandardizedSample& s,
                                               const ExactNDOptions& opt = {}) {
  const int d = s.d;
  const int n = static_cast<int>(s.y.size());
  const int m = static_cast<int>(s.outside_idx.size());
  if (d < 2) {
    throw DimensionMismatchError("exact_depth_nd: dimension must be at least 2");
  }
  if (n == 0) {
    throw ValidationError("exact_depth_nd: dataset is empty");
  }
  if (opt.eps <= 0.0) {
    throw ValidationError("exact_depth_nd: eps must be positive");
  }
  if (opt.threads < 1) {
    throw ValidationError("exact_depth_nd: threads must be at least 1");
  }
  if (m <= d - 1) {
    // Some hyperplane contains the origin and every outside point; its
    // direction leaves no point strictly outside the slab.
    return DepthResult{0, std::nullopt, 0};
  }

  VisitedStore store(m, d);
  std::mutex store_mutex;
  std::atomic<int> g_best{n};
  std::atomic<bool> g_stop{false};
  const int k5 = d - 1;
  const unsigned nsign5 = 1u << (k5 - 1);

  struct WorkerResult {
    int best = std::numeric_limits<int>::max();
    std::optional<Vector> witness;
    std::uint64_t evals = 0;
  };

  const int threads = std::max(1, std::min(opt.threads, m));
  std::vector<WorkerResult> results(static_cast<std::size_t>(threads));

  auto step5_body = [&](int tid) {
    detail::TupleWorker worker(s, opt.eps);
    WorkerResult local;
    local.best = n;
    detail::CombinationCursor cur(m, k5);
    for (int skip = 0; skip < tid && cur.valid; ++skip) {
      cur.advance();
    }
    while (cur.valid) {
      worker.prepare_combo(cur.idx.data(), k5);
      for (unsigned bits = 0; bits < nsign5; ++bits) {
        if (g_stop.load(std::memory_order_relaxed)) {
          results[static_cast<std::size_t>(tid)] = std::move(local);
          return;
        }
        const int abort_at = std::min(local.best, g_best.load(std::memory_order_relaxed));
        const auto outcome = worker.evaluate(cur.idx.data(), bits, k5, true, abort_at);
        if (outcome != detail::TupleOutcome::scored) {
          continue;
        }
        local.evals += 2;
        if (opt.dedupe && d > 2) {
          const std::vector<int> codes = detail::tuple_codes(cur.idx.data(), bits, k5, m);
          if (threads > 1) {
            const std::lock_guard<std::mutex> lock(store_mutex);
            store.mark(codes);
          } else {
            store.mark(codes);
          }
        }
        if (worker.completed()) {
          const int score = std::min(worker.score1(), worker.score2());
          if (score < local.best) {
            local.best = score;
            local.witness = (worker.score1() <= worker.score2()) ? worker.u1() : worker.u2();
            int expect = g_best.load(std::memory_order_relaxed);
            while (score < expect &&
                   !g_best.compare_exchange_weak(expect, score, std::memory_order_relaxed)) {
            }
            if (score == 0) {
              g_stop.store(true, std::memory_order_relaxed);
            }
          }
        }
      }
      for (int skip = 0; skip < threads && cur.valid; ++skip) {
        cur.advance();
      }
    }
    results[static_cast<std::size_t>(tid)] = std::move(local);
  };

  if (threads == 1) {
    step5_body(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back(step5_body, t);
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  int best = n;
  std::optional<Vector> witness;
  std::uint64_t evals = 0;
  for (const WorkerResult& r : results) {
    evals += r.evals;
    if (r.best < best) {
      best = r.best;
      witness = r.witness;
    }
  }

  // Step 6: smaller tuples, skipping anything subsumed by a feasible
  // superset. Runs sequentially; the candidate space left over is small.
  if (best > 0) {
    detail::TupleWorker worker(s, opt.eps);
    for (int k = d - 2; k >= 1 && best > 0; --k) {
      detail::CombinationCursor cur(m, k);
      const unsigned nsign = 1u << (k - 1);
      while (cur.valid && best > 0) {
        worker.prepare_combo(cur.idx.data(), k);
        for (unsigned bits = 0; bits < nsign && best > 0; ++bits) {
          const std::vector<int> codes = detail::tuple_codes(cur.idx.data(), bits, k, m);
          if (opt.dedupe && store.is_visited(codes)) {
            continue;
          }
          const auto outcome = worker.evaluate(cur.idx.data(), bits, k, false, best);
          if (outcome != detail::TupleOutcome::scored) {
            continue;
          }
          evals += 1;
          if (opt.dedupe) {
            store.mark(codes);
          }
          if (worker.completed() && worker.score1() < best) {
            best = worker.score1();
            witness = worker.u1();
          }
        }
        cur.advance();
      }
    }
  }

  DepthResult result;
  result.depth = best;
  result.witness = witness;
  result.evaluations = evals;
  return result;
}

// Exact depth of (sigma, mu) with respect to x, any d >= 2.
inline DepthResult exact_depth_nd(const std::vector<Vector>& x, const Vector& mu,
                                  const Matrix& sigma, const ExactNDOptions& opt = {}) {
  return exact_depth_nd_standardized(make_standardized_sample(x, mu, sigma), opt);
}

}  // namespace sdepth
