#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sdepth/core.hpp"
#include "sdepth/linalg.hpp"

namespace sdepth {

// ===== Exact depth in dimension 2 =====
//
// Standardized points with ||y|| > 1 each contribute a circle of contact
// directions {u : u.y = 1, ||u|| = 1}. These directions cut the unit circle
// into arcs on which the slab counts are constant, and the depth is attained
// on an arc boundary; evaluating strict counts at arc midpoints reproduces
// the boundary value without any epsilon.

// Strict counts for a unit direction v over all points: the slab boundary
// |v.y| = 1 belongs to neither side.
inline SlabCounts count_slab_strict(const std::vector<Vector>& y, const Vector& v) {
  SlabCounts c;
  for (const Vector& yi : y) {
    const double a = std::abs(v.dot(yi));
    if (a < 1.0) {
      ++c.p_in;
    } else if (a > 1.0) {
      ++c.p_out;
    }
  }
  return c;
}

// Contact-direction angles of all outside points, folded into [0, pi) (v and
// -v define the same slab), deduplicated within 1e-12, sorted ascending.
inline std::vector<double> circle_angles_2d(const StandardizedSample& s) {
  constexpr double kPi = 3.141592653589793238462643383280;
  constexpr double kDedupe = 1e-12;
  std::vector<double> angles;
  angles.reserve(2 * s.outside_idx.size());
  for (const int i : s.outside_idx) {
    const Eigen::Vector2d w(s.y[i](0), s.y[i](1));
    const auto [v1, v2] = detail::tangent_pair(w);
    for (const Eigen::Vector2d& v : {v1, v2}) {
      double a = std::atan2(v.y(), v.x());
      if (a < 0.0) {
        a += kPi;
      }
      if (a >= kPi) {
        a -= kPi;
      }
      angles.push_back(a);
    }
  }
  std::sort(angles.begin(), angles.end());
  std::vector<double> unique;
  unique.reserve(angles.size());
  for (const double a : angles) {
    if (unique.empty() || a - unique.back() > kDedupe) {
      unique.push_back(a);
    }
  }
  // Folding can split one direction across both ends of [0, pi).
  while (unique.size() > 1 && unique.front() + kPi - unique.back() <= kDedupe) {
    unique.pop_back();
  }
  return unique;
}

inline DepthResult exact_depth_2d(const std::vector<Vector>& x, const Vector& mu,
                                  const Matrix& sigma) {
  if (mu.size() != 2) {
    throw DimensionMismatchError("exact_depth_2d: dimension must be 2");
  }
  if (x.empty()) {
    throw ValidationError("exact_depth_2d: dataset is empty");
  }
  constexpr double kPi = 3.141592653589793238462643383280;
  const StandardizedSample s = make_standardized_sample(x, mu, sigma);
  const int m = static_cast<int>(s.outside_idx.size());
  if (m <= 1) {
    // A hyperplane through the origin and the lone outside point leaves no
    // point strictly outside its slab.
    return DepthResult{0, std::nullopt, 0};
  }

  const std::vector<double> angles = circle_angles_2d(s);
  std::vector<double> midpoints;
  if (angles.size() == 1) {
    // Degenerate single distinct angle: evaluate both arcs it bounds.
    midpoints = {angles[0] / 2.0, (angles[0] + kPi) / 2.0};
  } else {
    midpoints.reserve(angles.size());
    for (std::size_t j = 0; j + 1 < angles.size(); ++j) {
      midpoints.push_back((angles[j] + angles[j + 1]) / 2.0);
    }
    double wrap = (angles.back() + angles.front() + kPi) / 2.0;
    if (wrap >= kPi) {
      wrap -= kPi;
    }
    midpoints.push_back(wrap);
  }

  const int n = static_cast<int>(s.y.size());
  int best = n;
  std::optional<Vector> witness;
  std::uint64_t evaluated = 0;
  for (const double phi : midpoints) {
    const Eigen::Vector2d v(std::cos(phi), std::sin(phi));
    int p_in = s.inside_count;
    int p_out = 0;
    for (const int i : s.outside_idx) {
      const double a = std::abs(v.x() * s.y[i](0) + v.y() * s.y[i](1));
      if (a < 1.0) {
        ++p_in;
      } else if (a > 1.0) {
        ++p_out;
      }
      if (p_in >= best && p_out >= best) {
        break;
      }
    }
    ++evaluated;
    const int score = std::min(p_in, p_out);
    if (score < best) {
      best = score;
      Vector w(2);
      w << v.x(), v.y();
      witness = w;
      if (best == 0) {
        break;
      }
    }
  }
  DepthResult result;
  result.depth = best;
  result.witness = witness;
  result.evaluations = evaluated;
  return result;
}

}  // namespace sdepth
