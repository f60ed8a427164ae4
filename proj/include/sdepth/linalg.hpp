#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sdepth/core.hpp"

namespace sdepth {

// ===== Symmetric inverse square root and standardization =====

// Unique symmetric positive-definite R with R * sigma * R = I, computed from
// the eigendecomposition sigma = Q diag(lambda) Q^T as Q diag(lambda^-1/2) Q^T.
//
// tol >= 0 is applied literally: asymmetry max|s_ij - s_ji| > tol raises
// NotSymmetric, any eigenvalue <= tol raises NotPositiveDefinite. tol < 0
// (the default) selects an asymmetry bound of 1e-10 * max(1, max|s_ij|) and
// an eigenvalue floor of 1e-12 * lambda_max.
inline Matrix sym_inv_sqrt(const Matrix& sigma, double tol = -1.0) {
  if (sigma.rows() == 0 || sigma.rows() != sigma.cols()) {
    throw DimensionMismatchError("sym_inv_sqrt: sigma must be square and non-empty");
  }
  const double max_abs = sigma.cwiseAbs().maxCoeff();
  const double sym_tol = tol >= 0.0 ? tol : 1e-10 * std::max(1.0, max_abs);
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (asym > sym_tol) {
    throw NotSymmetricError("sym_inv_sqrt: sigma is not symmetric (max asymmetry " +
                            std::to_string(asym) + ")");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sigma + sigma.transpose()));
  if (es.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("sym_inv_sqrt: eigendecomposition failed");
  }
  const Vector& lambda = es.eigenvalues();
  const double lambda_max = lambda.maxCoeff();
  const double floor = tol >= 0.0 ? tol : 1e-12 * std::max(lambda_max, 0.0);
  if (lambda.minCoeff() <= floor) {
    throw NotPositiveDefiniteError("sym_inv_sqrt: sigma is not positive definite (min eigenvalue " +
                                   std::to_string(lambda.minCoeff()) + ")");
  }
  const Vector inv_sqrt = lambda.array().rsqrt();
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

// y_i = sym_inv_sqrt(sigma) * (x_i - mu).
inline std::vector<Vector> standardize(const std::vector<Vector>& x, const Vector& mu,
                                       const Matrix& sigma) {
  const Eigen::Index d = mu.size();
  if (sigma.rows() != d || sigma.cols() != d) {
    throw DimensionMismatchError("standardize: sigma shape does not match mu");
  }
  const Matrix r = sym_inv_sqrt(sigma);
  std::vector<Vector> y;
  y.reserve(x.size());
  for (const Vector& xi : x) {
    if (xi.size() != d) {
      throw DimensionMismatchError("standardize: data point dimension does not match mu");
    }
    y.push_back(r * (xi - mu));
  }
  return y;
}

inline StandardizedSample make_standardized_sample(const std::vector<Vector>& x, const Vector& mu,
                                                   const Matrix& sigma) {
  StandardizedSample s;
  s.d = static_cast<int>(mu.size());
  s.y = standardize(x, mu, sigma);
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    if (s.y[i].squaredNorm() > 1.0) {
      s.outside_idx.push_back(static_cast<int>(i));
    } else {
      ++s.inside_count;
    }
  }
  return s;
}

// ===== Orthonormal basis construction =====
//
// Incremental modified Gram-Schmidt with one re-orthogonalization pass.
// push() appends a generator if it is independent of the current basis;
// complete() extends to a full orthonormal basis of R^d using standard basis
// vectors picked by largest residual (ties broken by lowest index), which
// fixes the pivot order deterministically.
class OrthoWorkspace {
 public:
  explicit OrthoWorkspace(int d, double rank_tol = 1e-10)
      : d_(d), rank_tol_(rank_tol), q_(d, d), v_(d) {}

  void reset() { count_ = 0; }
  int count() const { return count_; }
  int dim() const { return d_; }

  // Appends the orthonormalized residual of g; returns false (no append)
  // when g is dependent on the current basis within rank_tol * ||g||.
  bool push(const Eigen::Ref<const Vector>& g) {
    const double norm_in = g.norm();
    v_ = g;
    subtract_projections();
    subtract_projections();
    const double r = v_.norm();
    if (r <= rank_tol_ * norm_in) {
      return false;
    }
    q_.col(count_++) = v_ / r;
    return true;
  }

  // Norm of the residual of g against the current basis (the distance from g
  // to the span). Leaves the residual in place so push_residual() can commit
  // it without recomputation.
  double residual_norm(const Eigen::Ref<const Vector>& g) {
    v_ = g;
    subtract_projections();
    subtract_projections();
    return v_.norm();
  }

  // Commits the residual computed by the last residual_norm() call.
  void push_residual(double norm) { q_.col(count_++) = v_ / norm; }

  void complete() {
    while (count_ < d_) {
      int pivot = 0;
      double best = -1.0;
      for (int i = 0; i < d_; ++i) {
        double projected = 0.0;
        for (int j = 0; j < count_; ++j) {
          projected += q_(i, j) * q_(i, j);
        }
        const double residual = 1.0 - projected;
        if (residual > best + 1e-15) {
          best = residual;
          pivot = i;
        }
      }
      v_.setZero();
      v_(pivot) = 1.0;
      subtract_projections();
      subtract_projections();
      q_.col(count_++) = v_ / v_.norm();
    }
  }

  // Basis columns; valid up to count().
  const Matrix& q() const { return q_; }
  Eigen::Ref<const Vector> col(int j) const { return q_.col(j); }

 private:
  void subtract_projections() {
    for (int j = 0; j < count_; ++j) {
      v_.noalias() -= (q_.col(j).dot(v_)) * q_.col(j);
    }
  }

  int d_;
  double rank_tol_;
  Matrix q_;
  Vector v_;
  int count_ = 0;
};

// Orthonormal basis of the orthogonal complement of span(generators), as the
// columns of a d x (d - rank) matrix in deterministic pivot order. Raises
// RankDeficient when the generators do not have the expected rank
// (expected_rank < 0 skips the check).
inline Matrix orth_complement_full(const std::vector<Vector>& generators, int d,
                                   int expected_rank = -1) {
  if (d < 1) {
    throw DimensionMismatchError("orth_complement_full: dimension must be positive");
  }
  OrthoWorkspace ws(d);
  for (const Vector& g : generators) {
    if (g.size() != d) {
      throw DimensionMismatchError("orth_complement_full: generator dimension mismatch");
    }
    ws.push(g);
  }
  const int rank = ws.count();
  if (expected_rank >= 0 && rank != expected_rank) {
    throw RankDeficientError("orth_complement_full: generators have rank " +
                             std::to_string(rank) + ", expected " +
                             std::to_string(expected_rank));
  }
  ws.complete();
  return ws.q().rightCols(d - rank);
}

// Orthonormal pair spanning the orthogonal complement of the given
// (d-2)-dimensional span. Raises RankDeficient when the generators do not
// span exactly d-2 dimensions.
inline OrthoBasis2D orth_complement_basis(const std::vector<Vector>& generators, int d) {
  if (d < 2) {
    throw DimensionMismatchError("orth_complement_basis: dimension must be at least 2");
  }
  const Matrix c = orth_complement_full(generators, d, d - 2);
  return OrthoBasis2D{c.col(0), c.col(1)};
}

// Coordinates of each point in the plane spanned by the basis pair.
inline std::vector<Eigen::Vector2d> project2d(const std::vector<Vector>& points,
                                              const OrthoBasis2D& basis) {
  std::vector<Eigen::Vector2d> w;
  w.reserve(points.size());
  for (const Vector& p : points) {
    if (p.size() != basis.alpha1.size()) {
      throw DimensionMismatchError("project2d: point dimension does not match basis");
    }
    w.emplace_back(basis.alpha1.dot(p), basis.alpha2.dot(p));
  }
  return w;
}

namespace detail {

// Unit solutions v of v.w = 1 for ||w|| >= 1, with the discriminant clamped
// at zero so callers may pass w within slack below the unit circle. The two
// solutions are reflections of each other across the line through 0 and w;
// they coincide at ||w|| = 1.
inline std::pair<Eigen::Vector2d, Eigen::Vector2d> tangent_pair(const Eigen::Vector2d& w) {
  const double n2 = w.squaredNorm();
  const double disc = std::max(0.0, 1.0 - 1.0 / n2);
  const double root = std::sqrt(disc) / std::sqrt(n2);
  const Eigen::Vector2d base = w / n2;
  const Eigen::Vector2d perp(-w.y(), w.x());
  return {base + root * perp, base - root * perp};
}

}  // namespace detail

// The two unit directions v with v.w = 1: the contact directions of the
// circle determined by w. Raises InsideBall when ||w|| < 1 beyond slack.
inline std::pair<Eigen::Vector2d, Eigen::Vector2d> tangent_directions_2d(const Eigen::Vector2d& w,
                                                                         double slack = 0.0) {
  const double n2 = w.squaredNorm();
  const double limit = (1.0 - slack) * (1.0 - slack);
  if (n2 < limit) {
    throw InsideBallError("tangent_directions_2d: ||w|| = " + std::to_string(std::sqrt(n2)) +
                          " < 1, no tangent direction exists");
  }
  return detail::tangent_pair(w);
}

}  // namespace sdepth
