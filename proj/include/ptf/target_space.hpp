#pragma once

// Parabolic target space: control variables w = (v0, v) with v0 > |v|^2,
// residuals r(z), the proximity measures chi_k / delta, the barrier F and the
// functional proximity Psi = F - phi(w).

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "ptf/errors.hpp"
#include "ptf/lp_core.hpp"

namespace ptf {

/// Target point w = (v0, v) in the parabolic set F_p.
struct TargetPoint {
  double v0 = 0.0;
  Vector v;

  bool in_parabolic_set() const { return std::isfinite(v0) && v0 > v.squaredNorm(); }

  /// Greedy update w <- (1 - alpha) w.
  TargetPoint scaled(double factor) const { return {factor * v0, factor * v}; }
};

/// z = (u, w).
struct FullState {
  PrimalDualPoint u;
  TargetPoint w;
};

struct ProximitySnapshot {
  double rho = 0.0;
  Vector r;  // length n+1, r[0] = v0 - <s,x>
  double chi0 = 0.0;
  double chi1 = 0.0;
  double chi2 = 0.0;
  double delta = 0.0;
  double psi = 0.0;
  double mu_star = 0.0;
};

/// rho(w) = (v0 - |v|^2) / (n+1).
inline double rho(const TargetPoint& w, int n) {
  return (w.v0 - w.v.squaredNorm()) / (n + 1);
}
inline double rho(const TargetPoint& w) { return rho(w, static_cast<int>(w.v.size())); }

/// mu*(w) = v0^2 / (v0 - |v|^2) >= v0.
inline double mu_star(const TargetPoint& w) {
  return w.v0 * w.v0 / (w.v0 - w.v.squaredNorm());
}

/// phi(w) = -(n+1) ln rho(w), the minimum of F(., w).
inline double phi(const TargetPoint& w) {
  const auto n = static_cast<int>(w.v.size());
  return -(n + 1) * std::log(rho(w, n));
}

/// omega_*(tau) = -tau - ln(1 - tau) on [0, 1).
inline double omega_star(double tau) {
  if (!(tau >= 0.0) || !(tau < 1.0))
    throw DomainError("omega_star: argument must lie in [0, 1)");
  return -tau - std::log1p(-tau);
}

/// w_*(u): sigma = min x_i s_i, v0 = <s,x> + sigma, v_i = sqrt(x_i s_i - sigma).
/// u is then exactly the target center of w_*(u).
inline TargetPoint starting_target(const PrimalDualPoint& u) {
  if (!(u.x.minCoeff() > 0.0) || !(u.s.minCoeff() > 0.0))
    throw DomainError("starting_target: u must be strictly interior");
  const Vector xs = u.x.cwiseProduct(u.s);
  const double sigma = xs.minCoeff();
  TargetPoint w;
  w.v0 = xs.sum() + sigma;
  w.v = (xs.array() - sigma).max(0.0).sqrt().matrix();
  return w;
}

/// Slack below zero that is absorbed as roundoff.
inline double residual_tolerance(const TargetPoint& w) { return 1e-12 * (1.0 + w.v0); }

/// r(z) in R^{n+1}: r[0] = v0 - <s,x>, r[i] = x_i s_i - v_i^2.
/// Components in [-tol, 0) are clamped to 0; anything lower throws.
inline Vector residuals(const FullState& z) {
  const auto n = z.u.x.size();
  if (z.u.s.size() != n || z.w.v.size() != n)
    throw StructuralError("residuals: dimension mismatch");
  Vector r(n + 1);
  r[0] = z.w.v0 - z.u.s.dot(z.u.x);
  r.tail(n) = z.u.x.cwiseProduct(z.u.s) - z.w.v.cwiseAbs2();
  const double tol = residual_tolerance(z.w);
  for (Eigen::Index i = 0; i <= n; ++i) {
    if (r[i] < 0.0) {
      if (r[i] < -tol || !std::isfinite(r[i]))
        throw OutsideFeasibleSetError("residual component " + std::to_string(i) +
                                      " is negative: " + std::to_string(r[i]));
      r[i] = 0.0;
    }
  }
  return r;
}

inline Vector residuals(const LpInstance& /*inst*/, const FullState& z) { return residuals(z); }

/// Psi from the explicit sum -sum ln(r_i / rho). Infinite when some r_i = 0.
inline double psi_from_residuals(const Vector& r, double rho_w) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0.0)) return std::numeric_limits<double>::infinity();
    acc -= std::log(r[i] / rho_w);
  }
  return acc;
}

/// chi_k, delta and Psi at z. Requires r(z) > 0 componentwise.
inline ProximitySnapshot proximity_from_residuals(const Vector& r, const TargetPoint& w) {
  ProximitySnapshot p;
  const auto n = static_cast<int>(w.v.size());
  p.rho = rho(w, n);
  p.r = r;
  p.mu_star = mu_star(w);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0.0))
      throw DomainError("proximity: residual component " + std::to_string(i) +
                        " is on the boundary of F");
    const double rel = (r[i] - p.rho) / p.rho;
    const double ratio = p.rho / r[i];
    s0 += rel * rel;
    s1 += rel * rel * ratio;
    s2 += rel * rel * ratio * ratio;
  }
  p.chi0 = std::sqrt(s0);
  p.chi1 = std::sqrt(s1);
  p.chi2 = std::sqrt(s2);
  p.delta = p.chi2 > 0.0 ? s1 / p.chi2 : 0.0;
  p.psi = psi_from_residuals(r, p.rho);
  return p;
}

inline ProximitySnapshot proximity(const FullState& z) {
  return proximity_from_residuals(residuals(z), z.w);
}

/// F(z) = -sum ln(x_i s_i - v_i^2) - ln(v0 - <c,x> + <b,y>).
inline double barrier_F(const LpInstance& inst, const FullState& z) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < z.u.x.size(); ++i) {
    const double arg = z.u.x[i] * z.u.s[i] - z.w.v[i] * z.w.v[i];
    if (!(arg > 0.0)) throw DomainError("barrier_F: point outside the interior of F");
    acc -= std::log(arg);
  }
  const double arg0 = z.w.v0 - inst.c().dot(z.u.x) + inst.b().dot(z.u.y);
  if (!(arg0 > 0.0)) throw DomainError("barrier_F: gap exceeds v0");
  return acc - std::log(arg0);
}

/// Residual sandwich (1-beta) rho <= r_i <= rho / (1-beta).
inline bool centered_sandwich_holds(const ProximitySnapshot& p, double beta,
                                    double rel_slack = 1e-9) {
  const double lo = (1.0 - beta) * p.rho * (1.0 - rel_slack);
  const double hi = p.rho / (1.0 - beta) * (1.0 + rel_slack);
  return (p.r.array() >= lo).all() && (p.r.array() <= hi).all();
}

}  // namespace ptf
