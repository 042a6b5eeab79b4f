#pragma once

// Normal-equations factorization and the universal tangent direction (UTD).
//
// For a strictly interior u = (x, s, y) and any right-hand side d the UTD is
// the unique solution of
//
//   X ds + S dx = d,   A dx = 0,   ds + A^T dy = 0.
//
// Eliminating dx and ds gives  Sigma dy = -A S^{-1} d  with
// Sigma = A X S^{-1} A^T, so one Cholesky factor per iterate serves every
// right-hand side.

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "ptf/errors.hpp"
#include "ptf/lp_core.hpp"

namespace ptf {

struct KernelOptions {
  /// Pivots must exceed pivot_rel_tol * max(diag(Sigma)).
  double pivot_rel_tol = 1e-13;
  /// Diagnostic only: adds 1e-12 * trace(Sigma) / m to the diagonal.
  bool ridge = false;
};

/// Lower-triangular Cholesky factor with a relative pivot threshold.
/// Throws FactorizationError carrying the (0-based) failing pivot index.
inline Matrix cholesky_lower(const Matrix& sym, double pivot_rel_tol) {
  const Eigen::Index k = sym.rows();
  const double max_diag = k > 0 ? sym.diagonal().maxCoeff() : 0.0;
  const double threshold = pivot_rel_tol * max_diag;
  if (!(max_diag > 0.0) || !std::isfinite(max_diag))
    throw FactorizationError("normal matrix has no positive diagonal", 0);
  Matrix l = Matrix::Zero(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double pivot = sym(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > threshold) || !std::isfinite(pivot))
      throw FactorizationError("Cholesky pivot " + std::to_string(j) + " below tolerance (" +
                                   std::to_string(pivot) + " <= " + std::to_string(threshold) +
                                   "): rank-deficient A or extreme scaling",
                               static_cast<int>(j));
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    const Eigen::Index rem = k - j - 1;
    if (rem > 0) {
      l.col(j).tail(rem) =
          (sym.col(j).tail(rem) - l.block(j + 1, 0, rem, j) * l.row(j).head(j).transpose()) /
          ljj;
    }
  }
  return l;
}

/// B diag(w) B^T accumulated on the lower triangle, then mirrored so the
/// result is exactly symmetric.
inline Matrix weighted_gram(const Eigen::Ref<const Matrix>& b, const Vector& weights) {
  const Matrix scaled = b * weights.cwiseSqrt().asDiagonal();
  Matrix g = Matrix::Zero(b.rows(), b.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
  Matrix full = g.selfadjointView<Eigen::Lower>();
  return full;
}

/// Scalings X, S and the factor of Sigma = A X S^{-1} A^T at one iterate.
/// Immutable; holds a reference to the instance's A, which must outlive it.
class ScalingState {
 public:
  ScalingState(const LpInstance& inst, Vector x, Vector s, Matrix sigma, Matrix chol)
      : a_(inst.A()),
        x_(std::move(x)),
        s_(std::move(s)),
        sigma_(std::move(sigma)),
        chol_(std::move(chol)) {}

  const Matrix& A() const noexcept { return a_.get(); }
  const Vector& x() const noexcept { return x_; }
  const Vector& s() const noexcept { return s_; }
  const Matrix& sigma() const noexcept { return sigma_; }
  const Matrix& chol() const noexcept { return chol_; }

  /// Solves Sigma * out = rhs with the stored factor.
  Vector sigma_solve(const Vector& rhs) const {
    const auto l = chol_.triangularView<Eigen::Lower>();
    Vector t = l.solve(rhs);
    return l.transpose().solve(t);
  }

 private:
  std::reference_wrapper<const Matrix> a_;
  Vector x_;
  Vector s_;
  Matrix sigma_;
  Matrix chol_;
};

struct Direction {
  Vector dx;
  Vector ds;
  Vector dy;
};

inline ScalingState factorize(const LpInstance& inst, const PrimalDualPoint& u,
                              const KernelOptions& opts = {}) {
  check_dimensions(inst, u);
  if (!(u.x.minCoeff() > 0.0) || !(u.s.minCoeff() > 0.0))
    throw DomainError("factorize: x and s must be strictly positive");
  Matrix sigma = weighted_gram(inst.A(), u.x.cwiseQuotient(u.s));
  if (opts.ridge) sigma.diagonal().array() += 1e-12 * sigma.trace() / inst.m();
  Matrix chol = cholesky_lower(sigma, opts.pivot_rel_tol);
  return ScalingState(inst, u.x, u.s, std::move(sigma), std::move(chol));
}

inline Direction solve_utd(const ScalingState& st, const Vector& d) {
  if (d.size() != st.x().size()) throw StructuralError("solve_utd: rhs has wrong length");
  const Vector d_over_s = d.cwiseQuotient(st.s());
  Direction dir;
  dir.dy = -st.sigma_solve(st.A() * d_over_s);
  dir.ds = -(st.A().transpose() * dir.dy);
  dir.dx = (d - st.x().cwiseProduct(dir.ds)).cwiseQuotient(st.s());
  return dir;
}

}  // namespace ptf
