#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "sdepth/exact2d.hpp"
#include "sdepth/exactnd.hpp"
#include "sdepth/oracle.hpp"
#include "sdepth/rng.hpp"

namespace sdepth {
namespace {

std::vector<Vector> axes_dataset(int d, double scale) {
  std::vector<Vector> x;
  for (int j = 0; j < d; ++j) {
    Vector v = Vector::Zero(d);
    v(j) = scale;
    x.push_back(v);
    x.push_back(-v);
  }
  return x;
}

// Reference mirror of the store semantics: canonical multiset of
// (index, sign) pairs with a global sign flip when the first entry is
// negative, kept in an ordinary set-of-vectors.
class NaiveStore {
 public:
  NaiveStore(int m, int dim) : m_(m), limit_(dim - 2) {}

  void mark(const std::vector<int>& codes) {
    if (limit_ <= 0) {
      return;
    }
    const int k = static_cast<int>(codes.size());
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
      if (__builtin_popcount(mask) > limit_) {
        continue;
      }
      std::vector<int> subset;
      for (int j = 0; j < k; ++j) {
        if (mask & (1u << j)) {
          subset.push_back(codes[j]);
        }
      }
      keys_.insert(canon(subset));
    }
  }

  bool is_visited(const std::vector<int>& codes) const {
    if (codes.empty() || limit_ <= 0 || static_cast<int>(codes.size()) > limit_) {
      return false;
    }
    return keys_.count(canon(codes)) != 0;
  }

 private:
  std::vector<std::pair<int, int>> canon(const std::vector<int>& codes) const {
    std::vector<std::pair<int, int>> v;
    v.reserve(codes.size());
    for (const int c : codes) {
      v.emplace_back(c < m_ ? c : c - m_, c < m_ ? 0 : 1);
    }
    std::sort(v.begin(), v.end());
    if (v.front().second == 1) {
      for (auto& [idx, neg] : v) {
        neg ^= 1;
      }
      std::sort(v.begin(), v.end());
    }
    return v;
  }

  int m_;
  int limit_;
  std::set<std::vector<std::pair<int, int>>> keys_;
};

TEST(VisitedStore, MarksSubsetClosureUnderSignCanonicalization) {
  // m = 5 outside points, d = 4 so subsets up to size 2 are stored. Codes:
  // index i is circle i, index i+5 its anti-circle.
  VisitedStore store(5, 4);
  store.mark({1, 7});
  EXPECT_TRUE(store.is_visited({1}));
  EXPECT_TRUE(store.is_visited({2}));  // {7} flips to {2}.
  EXPECT_TRUE(store.is_visited({7}));
  EXPECT_TRUE(store.is_visited({1, 7}));
  EXPECT_TRUE(store.is_visited({6, 2}));  // global sign flip of {1, 7}.
  EXPECT_FALSE(store.is_visited({1, 2}));
  EXPECT_FALSE(store.is_visited({3}));
  EXPECT_FALSE(store.is_visited({}));
}

TEST(VisitedStore, SizeLimitExcludesLargeQueries) {
  VisitedStore store(6, 4);  // limit 2
  store.mark({0, 1});
  EXPECT_FALSE(store.is_visited({0, 1, 2}));
  VisitedStore flat(6, 3);  // limit 1
  flat.mark({0, 1});
  EXPECT_TRUE(flat.is_visited({0}));
  EXPECT_FALSE(flat.is_visited({0, 1}));
}

TEST(VisitedStore, MatchesNaiveMirrorOnRandomWorkloads) {
  Xoshiro256pp rng(4100);
  for (int rep = 0; rep < 30; ++rep) {
    const int m = 3 + static_cast<int>(rng.uniform_below(6));
    const int dim = 3 + static_cast<int>(rng.uniform_below(4));
    VisitedStore store(m, dim);
    NaiveStore naive(m, dim);
    for (int op = 0; op < 200; ++op) {
      const int size = 1 + static_cast<int>(rng.uniform_below(
                               static_cast<std::uint64_t>(std::min(dim - 1, m))));
      std::vector<int> idx;
      while (static_cast<int>(idx.size()) < size) {
        const int cand = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(m)));
        if (std::find(idx.begin(), idx.end(), cand) == idx.end()) {
          idx.push_back(cand);
        }
      }
      std::vector<int> codes;
      codes.reserve(idx.size());
      for (const int i : idx) {
        codes.push_back(rng.uniform_below(2) ? i + m : i);
      }
      if (rng.uniform_below(2)) {
        store.mark(codes);
        naive.mark(codes);
      } else if (static_cast<int>(codes.size()) <= dim - 2) {
        EXPECT_EQ(store.is_visited(codes), naive.is_visited(codes));
      }
    }
  }
}

TEST(VisitedStore, WideCodesFallBackToVectorKeys) {
  VisitedStore store(100000, 6);  // 18 bits x 4 slots > 64: unpackable
  store.mark({99999, 100000 + 12345});
  EXPECT_TRUE(store.is_visited({99999}));
  EXPECT_TRUE(store.is_visited({12345}));
  EXPECT_TRUE(store.is_visited({99999, 100000 + 12345}));
  EXPECT_FALSE(store.is_visited({99998}));
}

TEST(EvaluateTuple, TwoAxisPointsInThreeDimensions) {
  // Signed points 2e1 and 2e2: the tangent directions are
  // (1/2, 1/2, +-1/sqrt(2)) and the affine hull sits at distance sqrt(2).
  const std::vector<Vector> x = {(Vector(3) << 2, 0, 0).finished(),
                                 (Vector(3) << 0, 2, 0).finished(),
                                 (Vector(3) << 0, 0, 0.5).finished(),
                                 (Vector(3) << 0, 0, 10).finished()};
  const StandardizedSample s =
      make_standardized_sample(x, Vector::Zero(3), Matrix::Identity(3, 3));
  ASSERT_EQ(s.outside_idx.size(), 3u);
  ASSERT_EQ(s.inside_count, 1);

  const TupleBatchResult res =
      evaluate_tuple(s, {SignedIndex{0, 1}, SignedIndex{1, 1}}, {}, 1e-14);
  ASSERT_TRUE(res.feasible);
  EXPECT_NEAR(res.w_norm, std::sqrt(2.0), 1e-12);
  ASSERT_EQ(res.directions.size(), 2u);
  ASSERT_EQ(res.lifted.size(), 2u);
  for (const Vector& u : res.lifted) {
    EXPECT_NEAR(u.norm(), 1.0, 1e-12);
    EXPECT_NEAR(u.dot(x[0]), 1.0, 1e-12);
    EXPECT_NEAR(u.dot(x[1]), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(u(0)), 0.5, 1e-12);
    EXPECT_NEAR(std::abs(u(1)), 0.5, 1e-12);
    EXPECT_NEAR(std::abs(u(2)), 1.0 / std::sqrt(2.0), 1e-12);
  }
  EXPECT_LT(res.lifted[0](2) * res.lifted[1](2), 0.0);
  // Tuple points sit on the slab boundary (excluded); the inside point and
  // the far point land strictly inside and outside.
  for (const SlabCounts& c : res.counts) {
    EXPECT_EQ(c.p_in, 1);
    EXPECT_EQ(c.p_out, 1);
  }
}

TEST(EvaluateTuple, HullCrossingTheBallIsInfeasible) {
  const std::vector<Vector> x = {(Vector(3) << 3, 0, 0).finished(),
                                 (Vector(3) << -3, 0.1, 0).finished()};
  const StandardizedSample s =
      make_standardized_sample(x, Vector::Zero(3), Matrix::Identity(3, 3));
  const TupleBatchResult res =
      evaluate_tuple(s, {SignedIndex{0, 1}, SignedIndex{1, 1}}, {}, 1e-14);
  EXPECT_FALSE(res.feasible);
  EXPECT_LT(res.w_norm, 1.0);
  EXPECT_TRUE(res.directions.empty());
}

TEST(EvaluateTuple, CollinearPointsOnTangentHyperplaneThrow) {
  const std::vector<Vector> x = {(Vector(4) << 2, 2, 0, 0).finished(),
                                 (Vector(4) << 3, 2, 0, 0).finished(),
                                 (Vector(4) << 4, 2, 0, 0).finished()};
  const StandardizedSample s =
      make_standardized_sample(x, Vector::Zero(4), Matrix::Identity(4, 4));
  EXPECT_THROW(
      evaluate_tuple(s, {SignedIndex{0, 1}, SignedIndex{1, 1}, SignedIndex{2, 1}}, {}, 1e-14),
      RankDeficientError);
}

TEST(EvaluateTuple, CollinearPointsThroughTheBallAreInfeasible) {
  const std::vector<Vector> x = {(Vector(4) << 2, 0, 0, 0).finished(),
                                 (Vector(4) << 3, 0, 0, 0).finished(),
                                 (Vector(4) << 4, 0, 0, 0).finished()};
  const StandardizedSample s =
      make_standardized_sample(x, Vector::Zero(4), Matrix::Identity(4, 4));
  const TupleBatchResult res = evaluate_tuple(
      s, {SignedIndex{0, 1}, SignedIndex{1, 1}, SignedIndex{2, 1}}, {}, 1e-14);
  EXPECT_FALSE(res.feasible);
}

TEST(EvaluateTuple, SinglePointInTwoDimensions) {
  const std::vector<Vector> x = {(Vector(2) << 2, 0).finished()};
  const StandardizedSample s =
      make_standardized_sample(x, Vector::Zero(2), Matrix::Identity(2, 2));
  const TupleBatchResult res = evaluate_tuple(s, {SignedIndex{0, 1}}, {}, 1e-14);
  ASSERT_TRUE(res.feasible);
  EXPECT_NEAR(res.w_norm, 2.0, 1e-14);
  ASSERT_EQ(res.lifted.size(), 2u);
  EXPECT_NEAR(res.lifted[0](0), 0.5, 1e-12);
  EXPECT_NEAR(std::abs(res.lifted[0](1)), std::sqrt(3.0) / 2.0, 1e-12);
}

TEST(EvaluateTuple, SubMaximalTupleUsesCompletionAndOneDirection) {
  const std::vector<Vector> x = {(Vector(3) << 2, 0, 0).finished(),
                                 (Vector(3) << 0, 2, 0).finished()};
  const StandardizedSample s =
      make_standardized_sample(x, Vector::Zero(3), Matrix::Identity(3, 3));
  // k = 1 in d = 3 needs one completion vector; pick e2.
  const TupleBatchResult res = evaluate_tuple(
      s, {SignedIndex{0, 1}}, {(Vector(3) << 0, 1, 0).finished()}, 1e-14);
  ASSERT_TRUE(res.feasible);
  EXPECT_NEAR(res.w_norm, 2.0, 1e-12);
  ASSERT_EQ(res.directions.size(), 1u);
  // The lifted direction is orthogonal to the completion and tangent at z.
  EXPECT_NEAR(res.lifted[0](1), 0.0, 1e-12);
  EXPECT_NEAR(res.lifted[0].dot(x[0]), 1.0, 1e-12);
}

TEST(EvaluateTuple, ValidatesArguments) {
  const std::vector<Vector> x = {(Vector(3) << 2, 0, 0).finished()};
  const StandardizedSample s =
      make_standardized_sample(x, Vector::Zero(3), Matrix::Identity(3, 3));
  EXPECT_THROW(evaluate_tuple(s, {}, {}, 1e-14), ValidationError);
  EXPECT_THROW(evaluate_tuple(s, {SignedIndex{0, 1}}, {}, 1e-14), ValidationError);
  EXPECT_THROW(evaluate_tuple(s, {SignedIndex{5, 1}},
                              {(Vector(3) << 0, 1, 0).finished()}, 1e-14),
               ValidationError);
  EXPECT_THROW(evaluate_tuple(s, {SignedIndex{0, 1}},
                              {(Vector(3) << 0, 1, 0).finished()}, 0.0),
               ValidationError);
}

TEST(ExactND, FewOutsidePointsShortCircuitToZero) {
  for (int d = 2; d <= 5; ++d) {
    std::vector<Vector> x;
    for (int j = 0; j < d - 1; ++j) {
      Vector v = Vector::Zero(d);
      v(j) = 5.0;
      x.push_back(v);
    }
    x.push_back(Vector::Zero(d));  // one inside point
    const DepthResult res = exact_depth_nd(x, Vector::Zero(d), Matrix::Identity(d, d));
    EXPECT_EQ(res.depth, 0) << "d=" << d;
    EXPECT_EQ(res.evaluations, 0u);
    EXPECT_FALSE(res.witness.has_value());
  }
}

TEST(ExactND, MatchesPlanarEngineInTwoDimensions) {
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 8 + 4 * (rep % 8);
    const std::vector<Vector> x = standard_gaussian_dataset(n, 2, 4200 + rep);
    const DepthResult planar = exact_depth_2d(x, Vector::Zero(2), Matrix::Identity(2, 2));
    const DepthResult general = exact_depth_nd(x, Vector::Zero(2), Matrix::Identity(2, 2));
    EXPECT_EQ(planar.depth, general.depth) << "rep=" << rep << " n=" << n;
  }
}

TEST(ExactND, MatchesOracleInThreeDimensions) {
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 8 + rep % 6;
    const std::vector<Vector> x = standard_gaussian_dataset(n, 3, 4300 + rep);
    const DepthResult fast = exact_depth_nd(x, Vector::Zero(3), Matrix::Identity(3, 3));
    const OracleReport slow = enumerate_all_tangents(x);
    EXPECT_EQ(fast.depth, slow.depth) << "rep=" << rep << " n=" << n;
  }
}

TEST(ExactND, AxesDatasetWithDuplicatesHandlesDegeneracies) {
  // Duplicated and antipodal outside points: the enumeration must skip the
  // degenerate sign combinations rather than fail, and still agree with the
  // brute-force reference.
  std::vector<Vector> x = axes_dataset(3, 2.0);
  x.push_back(x[0]);  // duplicate of 2e1
  const DepthResult fast = exact_depth_nd(x, Vector::Zero(3), Matrix::Identity(3, 3));
  const OracleReport slow = enumerate_all_tangents(x);
  EXPECT_EQ(fast.depth, slow.depth);
}

TEST(ExactND, DedupeOnAndOffAgree) {
  for (int rep = 0; rep < 15; ++rep) {
    const int d = 3 + rep % 2;
    const std::vector<Vector> x = standard_gaussian_dataset(12, d, 4400 + rep);
    ExactNDOptions on;
    ExactNDOptions off;
    off.dedupe = false;
    const DepthResult a = exact_depth_nd(x, Vector::Zero(d), Matrix::Identity(d, d), on);
    const DepthResult b = exact_depth_nd(x, Vector::Zero(d), Matrix::Identity(d, d), off);
    EXPECT_EQ(a.depth, b.depth) << "d=" << d << " rep=" << rep;
    EXPECT_GE(b.evaluations, a.evaluations);
  }
}

TEST(ExactND, MultithreadedRunsMatchSequential) {
  for (int rep = 0; rep < 6; ++rep) {
    const int d = 3 + rep % 2;
    const std::vector<Vector> x = standard_gaussian_dataset(20, d, 4500 + rep);
    ExactNDOptions seq;
    ExactNDOptions par;
    par.threads = 4;
    const DepthResult a = exact_depth_nd(x, Vector::Zero(d), Matrix::Identity(d, d), seq);
    const DepthResult b = exact_depth_nd(x, Vector::Zero(d), Matrix::Identity(d, d), par);
    EXPECT_EQ(a.depth, b.depth) << "d=" << d << " rep=" << rep;
  }
}

TEST(ExactND, WitnessAttainsTheReportedDepth) {
  const double eps = 1e-14;
  for (int rep = 0; rep < 10; ++rep) {
    const int d = 3;
    const std::vector<Vector> x = standard_gaussian_dataset(16, d, 4600 + rep);
    const DepthResult res = exact_depth_nd(x, Vector::Zero(d), Matrix::Identity(d, d));
    if (res.depth == 0) {
      continue;
    }
    ASSERT_TRUE(res.witness.has_value());
    const Vector& u = *res.witness;
    EXPECT_NEAR(u.norm(), 1.0, 1e-10);
    int lo = 0;
    int hi = 0;
    for (const Vector& xi : x) {
      const double a = std::abs(u.dot(xi));
      lo += a < 1.0 - eps;
      hi += a > 1.0 + eps;
    }
    EXPECT_EQ(std::min(lo, hi), res.depth) << "rep=" << rep;
  }
}

TEST(ExactND, ExtremeScaleMatricesGiveZeroDepth) {
  for (int rep = 0; rep < 5; ++rep) {
    for (int d = 2; d <= 3; ++d) {
      const std::vector<Vector> x = standard_gaussian_dataset(12, d, 4700 + rep);
      double max_sq = 0.0;
      for (const Vector& xi : x) {
        max_sq = std::max(max_sq, xi.squaredNorm());
      }
      const DepthResult tiny =
          exact_depth_nd(x, Vector::Zero(d), 1e-6 * Matrix::Identity(d, d));
      EXPECT_EQ(tiny.depth, 0);
      const DepthResult huge =
          exact_depth_nd(x, Vector::Zero(d), 4.0 * max_sq * Matrix::Identity(d, d));
      EXPECT_EQ(huge.depth, 0);
    }
  }
}

TEST(ExactND, PermutationInvariance) {
  std::vector<Vector> x = standard_gaussian_dataset(14, 3, 4800);
  const DepthResult base = exact_depth_nd(x, Vector::Zero(3), Matrix::Identity(3, 3));
  std::reverse(x.begin(), x.end());
  const DepthResult rev = exact_depth_nd(x, Vector::Zero(3), Matrix::Identity(3, 3));
  EXPECT_EQ(base.depth, rev.depth);
}

TEST(ExactND, RejectsBadOptions) {
  const std::vector<Vector> x = standard_gaussian_dataset(8, 3, 4900);
  ExactNDOptions bad_eps;
  bad_eps.eps = 0.0;
  EXPECT_THROW(exact_depth_nd(x, Vector::Zero(3), Matrix::Identity(3, 3), bad_eps),
               ValidationError);
  ExactNDOptions bad_threads;
  bad_threads.threads = 0;
  EXPECT_THROW(exact_depth_nd(x, Vector::Zero(3), Matrix::Identity(3, 3), bad_threads),
               ValidationError);
  EXPECT_THROW(exact_depth_nd({}, Vector::Zero(3), Matrix::Identity(3, 3)), ValidationError);
}

}  // namespace
}  // namespace sdepth
