#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sdepth/core.hpp"

namespace sdepth {

// ===== Reference oracle =====
//
// Unpruned enumerator kept deliberately independent of the exact engines: it
// scores every signed k-subset for every k in {1, ..., d-1}, always both
// tangent directions, counts all points without the inside-point shortcut,
// and derives its bases from Eigen QR factorizations rather than the engines'
// Gram-Schmidt workspace. Slow on purpose; used for cross-validation.

struct OracleReport {
  int depth = 0;
  std::uint64_t directions_scored = 0;
  std::vector<std::uint64_t> per_k_feasible;
};

namespace oracle_detail {

constexpr double kBoundarySlack = 1e-12;
constexpr double kPairTol = 1e-12;

inline bool next_subset(std::vector<int>& idx, int m) {
  const int k = static_cast<int>(idx.size());
  for (int j = k - 1; j >= 0; --j) {
    if (idx[j] < m - k + j) {
      ++idx[j];
      for (int t = j + 1; t < k; ++t) {
        idx[t] = idx[t - 1] + 1;
      }
      return true;
    }
  }
  return false;
}

inline bool degenerate_pair(const Vector& a, const Vector& b) {
  const double scale = kPairTol * std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() <= scale || (a + b).cwiseAbs().maxCoeff() <= scale;
}

}  // namespace oracle_detail

inline OracleReport enumerate_all_tangents(const std::vector<Vector>& y, double eps = 1e-14) {
  if (y.empty()) {
    throw ValidationError("enumerate_all_tangents: dataset is empty");
  }
  if (eps <= 0.0) {
    throw ValidationError("enumerate_all_tangents: eps must be positive");
  }
  const int d = static_cast<int>(y.front().size());
  if (d < 2) {
    throw DimensionMismatchError("enumerate_all_tangents: dimension must be at least 2");
  }
  const int n = static_cast<int>(y.size());

  std::vector<int> outside;
  for (int i = 0; i < n; ++i) {
    if (y[i].squaredNorm() > 1.0) {
      outside.push_back(i);
    }
  }
  const int m = static_cast<int>(outside.size());

  OracleReport report;
  report.per_k_feasible.assign(static_cast<std::size_t>(d - 1), 0);
  if (m <= d - 1) {
    report.depth = 0;
    return report;
  }

  int depth = n;
  for (int k = 1; k <= d - 1; ++k) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      idx[j] = j;
    }
    const unsigned nsign = 1u << (k - 1);
    bool more = true;
    while (more) {
      for (unsigned bits = 0; bits < nsign; ++bits) {
        std::vector<Vector> z(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) {
          const double sign = (j > 0 && (bits & (1u << (j - 1)))) ? -1.0 : 1.0;
          z[j] = sign * y[outside[idx[j]]];
        }
        bool degenerate = false;
        for (int a = 0; a < k && !degenerate; ++a) {
          for (int b = a + 1; b < k; ++b) {
            if (oracle_detail::degenerate_pair(z[a], z[b])) {
              degenerate = true;
              break;
            }
          }
        }
        if (degenerate) {
          continue;
        }

        Matrix zmat(d, k);
        for (int j = 0; j < k; ++j) {
          zmat.col(j) = z[j];
        }
        Eigen::ColPivHouseholderQR<Matrix> qr_span(zmat);
        qr_span.setThreshold(1e-10);
        const int rank = static_cast<int>(qr_span.rank());

        if (rank < k) {
          // Linearly dependent signed points: feasible only if the affine
          // hull stays clear of the open unit ball, which dependence rules
          // out unless general position fails.
          Matrix diffs(d, k - 1);
          for (int j = 1; j < k; ++j) {
            diffs.col(j - 1) = z[j] - z[0];
          }
          Eigen::ColPivHouseholderQR<Matrix> qr_diffs(diffs);
          qr_diffs.setThreshold(1e-10);
          const Vector beta = qr_diffs.solve(-z[0]);
          const double dist = (z[0] + diffs * beta).norm();
          if (dist < 1.0 - oracle_detail::kBoundarySlack) {
            continue;
          }
          throw RankDeficientError(
              "enumerate_all_tangents: dependent points on a tangent hyperplane");
        }

        // Orthonormal complement of the signed points, from the full Q
        // factor: last d - k columns.
        const Matrix q_span = qr_span.householderQ();
        // Plane generators: k-1 affine differences plus the first d-1-k
        // complement columns; the tangent search happens orthogonal to them.
        Matrix gen(d, d - 2);
        for (int j = 1; j < k; ++j) {
          gen.col(j - 1) = z[j] - z[0];
        }
        for (int j = 0; j < d - 1 - k; ++j) {
          gen.col(k - 1 + j) = q_span.col(k + j);
        }
        Eigen::HouseholderQR<Matrix> qr_gen(gen);
        const Matrix q_gen = qr_gen.householderQ();
        const Vector alpha1 = q_gen.col(d - 2);
        const Vector alpha2 = q_gen.col(d - 1);

        const Eigen::Vector2d w(alpha1.dot(z[0]), alpha2.dot(z[0]));
        const double w_norm = w.norm();
        if (w_norm < 1.0 - oracle_detail::kBoundarySlack) {
          continue;
        }
        ++report.per_k_feasible[static_cast<std::size_t>(k - 1)];

        // Tangent directions by angle: solutions of cos(t - t0) = 1/||w||
        // on the circle, written against the (alpha1, alpha2) plane.
        const double t0 = std::atan2(w.y(), w.x());
        const double dt = std::acos(std::min(1.0, 1.0 / w_norm));
        for (const double t : {t0 + dt, t0 - dt}) {
          const Vector u = std::cos(t) * alpha1 + std::sin(t) * alpha2;
          int p_in = 0;
          int p_out = 0;
          for (const Vector& yi : y) {
            const double a = std::abs(u.dot(yi));
            if (a < 1.0 - eps) {
              ++p_in;
            } else if (a > 1.0 + eps) {
              ++p_out;
            }
          }
          ++report.directions_scored;
          depth = std::min(depth, std::min(p_in, p_out));
        }
      }
      more = oracle_detail::next_subset(idx, m);
    }
  }
  report.depth = depth;
  return report;
}

// Upper bound on the 2-D depth from a uniform scan of `resolution` angles
// over [0, pi), with non-strict counts on both sides. Converges to the exact
// value as the resolution grows.
inline int grid_lower_scan_2d(const std::vector<Vector>& y, int resolution) {
  if (y.empty()) {
    throw ValidationError("grid_lower_scan_2d: dataset is empty");
  }
  if (y.front().size() != 2) {
    throw DimensionMismatchError("grid_lower_scan_2d: dimension must be 2");
  }
  if (resolution < 1) {
    throw ValidationError("grid_lower_scan_2d: resolution must be at least 1");
  }
  constexpr double kPi = 3.141592653589793238462643383280;
  int best = static_cast<int>(y.size());
  for (int r = 0; r < resolution; ++r) {
    const double phi = kPi * r / resolution;
    const double vx = std::cos(phi);
    const double vy = std::sin(phi);
    int c_in = 0;
    int c_out = 0;
    for (const Vector& yi : y) {
      const double a = std::abs(vx * yi(0) + vy * yi(1));
      if (a <= 1.0) {
        ++c_in;
      }
      if (a >= 1.0) {
        ++c_out;
      }
    }
    best = std::min(best, std::min(c_in, c_out));
  }
  return best;
}

}  // namespace sdepth
