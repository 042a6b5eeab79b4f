#pragma once

// Finite termination: guess the optimal basis from the ordering of an
// indicator vector, solve the basis system, and accept the candidate only if
// it verifies as an exact optimal primal-dual pair.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ptf/errors.hpp"
#include "ptf/lp_core.hpp"
#include "ptf/newton_kernel.hpp"

namespace ptf {

enum class Indicator { primal_x, dual_inv_s, ratio_xs };

inline std::string_view to_string(Indicator k) {
  switch (k) {
    case Indicator::primal_x: return "primal_x";
    case Indicator::dual_inv_s: return "dual_inv_s";
    case Indicator::ratio_xs: return "ratio_xs";
  }
  return "?";
}

inline std::optional<Indicator> parse_indicator(std::string_view name) {
  for (auto k : {Indicator::primal_x, Indicator::dual_inv_s, Indicator::ratio_xs})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

enum class ActivationPolicy { always, awake_tests };

struct BasisCandidate {
  Indicator indicator = Indicator::ratio_xs;
  std::vector<int> basis;  // 0-based, sorted; reports add 1
  Vector x_star;
  Vector s_star;
  Vector y_star;
  bool accepted = false;
  bool used_fallback = false;  // Sigma route failed, direct LU used instead
  std::string reason;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double min_x = 0.0;
  double min_s = 0.0;
};

/// x, s^{-1} or x / s.
inline Vector indicator_vector(const PrimalDualPoint& u, Indicator kind) {
  switch (kind) {
    case Indicator::primal_x: return u.x;
    case Indicator::dual_inv_s: return u.s.cwiseInverse();
    case Indicator::ratio_xs: return u.x.cwiseQuotient(u.s);
  }
  return {};
}

/// Indices of the m largest components; ties go to the smaller index.
inline std::vector<int> trial_basis(const Vector& a, int m) {
  const auto n = static_cast<int>(a.size());
  if (m < 0 || m > n) throw StructuralError("trial_basis: m out of range");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return a[i] > a[j]; });
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline std::vector<int> complement(const std::vector<int>& basis, int n) {
  std::vector<char> in(n, 0);
  for (int i : basis) in[i] = 1;
  std::vector<int> out;
  out.reserve(n - basis.size());
  for (int i = 0; i < n; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

namespace detail {

inline Matrix basis_columns(const LpInstance& inst, const std::vector<int>& basis) {
  Matrix ab(inst.m(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) ab.col(j) = inst.A().col(basis[j]);
  return ab;
}

inline Vector gather(const Vector& v, const std::vector<int>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out[j] = v[idx[j]];
  return out;
}

inline void check_basis(const LpInstance& inst, const std::vector<int>& basis) {
  if (static_cast<int>(basis.size()) != inst.m())
    throw StructuralError("basis must contain exactly m indices");
  for (int i : basis)
    if (i < 0 || i >= inst.n()) throw StructuralError("basis index out of range");
}

// Completes x*, s* from x*_B and y*, then applies the sign and verification
// rules. A real number t counts as nonnegative when t >= -eps/100.
inline void complete_and_verify(const LpInstance& inst, const std::vector<int>& basis,
                                const Vector& x_basic, Vector y, double eps,
                                BasisCandidate& cand) {
  const int n = inst.n();
  cand.x_star = Vector::Zero(n);
  for (std::size_t j = 0; j < basis.size(); ++j) cand.x_star[basis[j]] = x_basic[j];
  cand.s_star = inst.c() - inst.A().transpose() * y;
  for (int i : basis) cand.s_star[i] = 0.0;
  cand.y_star = std::move(y);

  cand.primal_residual = (inst.A() * cand.x_star - inst.b()).lpNorm<Eigen::Infinity>();
  cand.dual_residual =
      (cand.s_star + inst.A().transpose() * cand.y_star - inst.c()).lpNorm<Eigen::Infinity>();
  cand.gap = std::abs(inst.c().dot(cand.x_star) - inst.b().dot(cand.y_star));
  cand.min_x = cand.x_star.minCoeff();
  cand.min_s = cand.s_star.minCoeff();

  const double neg_tol = -eps / 100.0;
  const double pscale = 1.0 + inst.b().lpNorm<Eigen::Infinity>();
  const double dscale = 1.0 + inst.c().lpNorm<Eigen::Infinity>();
  const double gscale = 1.0 + std::abs(inst.c().dot(cand.x_star));
  if (!cand.x_star.allFinite() || !cand.s_star.allFinite() || !cand.y_star.allFinite()) {
    cand.reason = "non-finite candidate";
  } else if (cand.min_x < neg_tol) {
    cand.reason = "negative primal component";
  } else if (cand.min_s < neg_tol) {
    cand.reason = "negative dual slack";
  } else if (cand.primal_residual > 1e-8 * pscale) {
    cand.reason = "primal residual too large";
  } else if (cand.dual_residual > 1e-8 * dscale) {
    cand.reason = "dual residual too large";
  } else if (cand.gap > 1e-8 * gscale) {
    cand.reason = "duality gap too large";
  } else {
    cand.accepted = true;
    cand.reason = "verified";
  }
}

}  // namespace detail

/// Direct route: x*_B = A_B^{-1} b, y* = A_B^{-T} c_B via LU with partial
/// pivoting. Singular A_B (|u_ii| < 1e-12 * max|A_B|) is rejected.
inline BasisCandidate candidate_point(const LpInstance& inst, const std::vector<int>& basis,
                                      double eps = 1e-8) {
  detail::check_basis(inst, basis);
  BasisCandidate cand;
  cand.basis = basis;
  const Matrix ab = detail::basis_columns(inst, basis);
  const double scale = ab.cwiseAbs().maxCoeff();
  Eigen::PartialPivLU<Matrix> lu(ab);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(scale > 0.0) || !(min_pivot >= 1e-12 * scale)) {
    cand.reason = "singular basis matrix";
    cand.x_star = Vector::Zero(inst.n());
    cand.s_star = Vector::Zero(inst.n());
    cand.y_star = Vector::Zero(inst.m());
    return cand;
  }
  const Vector x_basic = lu.solve(inst.b());
  Vector y = lu.transpose().solve(detail::gather(inst.c(), basis));
  detail::complete_and_verify(inst, basis, x_basic, std::move(y), eps, cand);
  return cand;
}

/// Symmetric route through Sigma_B = A_B X_B S_B^{-1} A_B^T:
///   x*_B = X_B S_B^{-1} A_B^T Sigma_B^{-1} b,  y* = Sigma_B^{-1} A_B X_B S_B^{-1} c_B.
/// Falls back to candidate_point when Sigma_B cannot be factored.
inline BasisCandidate candidate_point_via_sigma(const LpInstance& inst,
                                                const PrimalDualPoint& u,
                                                const std::vector<int>& basis,
                                                double eps = 1e-8,
                                                double pivot_rel_tol = 1e-13) {
  detail::check_basis(inst, basis);
  const Matrix ab = detail::basis_columns(inst, basis);
  const Vector d = detail::gather(u.x, basis).cwiseQuotient(detail::gather(u.s, basis));
  Matrix l;
  try {
    l = cholesky_lower(weighted_gram(ab, d), pivot_rel_tol);
  } catch (const FactorizationError&) {
    BasisCandidate cand = candidate_point(inst, basis, eps);
    cand.used_fallback = true;
    return cand;
  }
  const auto lower = std::as_const(l).triangularView<Eigen::Lower>();
  auto sigma_solve = [&](const Vector& rhs) -> Vector {
    Vector t = lower.solve(rhs);
    return lower.transpose().solve(t);
  };
  const Vector x_basic = d.cwiseProduct(ab.transpose() * sigma_solve(inst.b()));
  Vector y = sigma_solve(ab * d.cwiseProduct(detail::gather(inst.c(), basis)));
  BasisCandidate cand;
  cand.basis = basis;
  detail::complete_and_verify(inst, basis, x_basic, std::move(y), eps, cand);
  return cand;
}

struct ActivationResult {
  bool awake_x = false;   // sum_{B_x} x >= m^2 sum_{N_x} x
  bool awake_s = false;   // sum_{N_1/s} s >= (n-m)^2 sum_{B_1/s} s
  bool awake_xs = false;  // sum_{B_x/s} x/s >= m^3 sum_{N_x/s} x/s
  double beta_xs = 0.0;   // (1/m^3) sum_B (x/s) / sum_N (x/s); +inf if off-basis sum is 0

  bool any() const { return awake_x || awake_s || awake_xs; }
  bool holds(Indicator k) const {
    switch (k) {
      case Indicator::primal_x: return awake_x;
      case Indicator::dual_inv_s: return awake_s;
      case Indicator::ratio_xs: return beta_xs >= 1.0;
    }
    return false;
  }
};

inline ActivationResult activation_tests(const PrimalDualPoint& u, int m) {
  const auto n = static_cast<int>(u.x.size());
  const double md = m;
  const double nm = n - m;
  auto split_sums = [&](const Vector& values, const std::vector<int>& basis) {
    double on = 0.0;
    for (int i : basis) on += values[i];
    return std::pair{on, values.sum() - on};
  };
  ActivationResult res;
  {
    const auto [on, off] = split_sums(u.x, trial_basis(u.x, m));
    res.awake_x = on >= md * md * off;
  }
  {
    const auto [on, off] = split_sums(u.s, trial_basis(u.s.cwiseInverse(), m));
    res.awake_s = off >= nm * nm * on;
  }
  {
    const Vector ratio = u.x.cwiseQuotient(u.s);
    const auto basis = trial_basis(ratio, m);
    double on = 0.0;
    for (int i : basis) on += ratio[i];
    double off = 0.0;
    for (int i : complement(basis, n)) off += ratio[i];
    res.awake_xs = on >= md * md * md * off;
    res.beta_xs = off > 0.0 ? on / (md * md * md * off) : std::numeric_limits<double>::infinity();
  }
  return res;
}

/// Tries the indicators in the given order (ratio_xs uses the Sigma route) and
/// returns the first candidate that verifies. Under awake_tests an indicator
/// is only tried when its activation inequality holds.
inline std::optional<BasisCandidate> try_finite_termination(
    const LpInstance& inst, const PrimalDualPoint& u, double eps, ActivationPolicy policy,
    std::span<const Indicator> order = {}) {
  static constexpr Indicator kDefaultOrder[] = {Indicator::ratio_xs, Indicator::primal_x,
                                                Indicator::dual_inv_s};
  if (order.empty()) order = kDefaultOrder;
  std::optional<ActivationResult> act;
  if (policy == ActivationPolicy::awake_tests) act = activation_tests(u, inst.m());
  for (Indicator k : order) {
    if (act && !act->holds(k)) continue;
    const auto basis = trial_basis(indicator_vector(u, k), inst.m());
    BasisCandidate cand = k == Indicator::ratio_xs ? candidate_point_via_sigma(inst, u, basis, eps)
                                                   : candidate_point(inst, basis, eps);
    cand.indicator = k;
    if (cand.accepted) return cand;
  }
  return std::nullopt;
}

}  // namespace ptf
