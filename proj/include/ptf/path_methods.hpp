#pragma once

// Parabolic target-following path methods.
//
//   tptfm   tangential predictor along d_a = (|v|^2/(n+1) - rho) e - 2 v^2
//   acptfm  auto-correcting predictor along d~ = d_a + d_c
//   ptfm2   second-order predictor u + a d~ + a^2 d^, d^ = v^2 - |v|^2/(n+1) e - dx~ ds~
//
// All three share one loop: factor Sigma once per pass, then either a
// predictor step (delta <= beta_k) that solves psi(alpha) = A_psi and shrinks
// the target w <- (1 - alpha) w, or a corrector step at fixed w that
// minimizes the barrier along the UTD for d_c = rho e - r.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ptf/errors.hpp"
#include "ptf/finite_term.hpp"
#include "ptf/lp_core.hpp"
#include "ptf/newton_kernel.hpp"
#include "ptf/target_space.hpp"

namespace ptf {

enum class Method { tptfm, acptfm, ptfm2 };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::tptfm: return "tptfm";
    case Method::acptfm: return "acptfm";
    case Method::ptfm2: return "ptfm2";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view name) {
  for (auto m : {Method::tptfm, Method::acptfm, Method::ptfm2})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

enum class BetaPolicy { constant, proportional };

struct MethodConfig {
  Method method = Method::ptfm2;
  /// Radius r in (0, 1); A_psi = omega_*(r), beta = r / (2 + r).
  double r = 6.0 / 7.0;
  /// TPTFM only: beta_k = 0.99 beta, or min(0.99 beta, beta_scale * v0_k / v0_0).
  BetaPolicy beta_policy = BetaPolicy::constant;
  double beta_scale = 1.0;
  double eps = 1e-8;
  int max_outer = 500;
  double ls_rel_tol = 1e-3;
  double corrector_rel_tol = 1e-4;
  bool finite_termination = false;
  ActivationPolicy activation_policy = ActivationPolicy::awake_tests;
  std::vector<Indicator> ft_indicators = {Indicator::ratio_xs, Indicator::primal_x,
                                          Indicator::dual_inv_s};
  /// Finite termination is never attempted before this outer iteration.
  int ft_first_iteration = 3;
  /// Evaluate the direct-vs-closed-form and zero-sum checks at every predictor.
  bool debug_checks = false;
  KernelOptions kernel;

  double A_psi() const { return omega_star(r); }
  double beta() const { return r / (2.0 + r); }

  void validate() const {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("MethodConfig: r must lie in (0, 1)");
    if (!(eps > 0.0)) throw DomainError("MethodConfig: eps must be positive");
    if (max_outer < 1) throw DomainError("MethodConfig: max_outer must be >= 1");
    if (!(ls_rel_tol > 0.0 && ls_rel_tol < 1.0))
      throw DomainError("MethodConfig: ls_rel_tol must lie in (0, 1)");
    if (!(beta_scale > 0.0)) throw DomainError("MethodConfig: beta_scale must be positive");
  }
};

/// Acceptance level beta_k for the current target.
inline constexpr double kBetaFloor = 1e-6;

inline double acceptance_level(const MethodConfig& cfg, double v0, double v0_initial) {
  const double beta = cfg.beta();
  if (cfg.method != Method::tptfm) return beta;
  const double cap = 0.99 * beta;
  if (cfg.beta_policy == BetaPolicy::constant) return cap;
  // delta is only computable to a few ulps of rho, so the level is floored.
  return std::max(kBetaFloor, std::min(cap, cfg.beta_scale * v0 / v0_initial));
}

// ---------------------------------------------------------------------------
// Right-hand sides
// ---------------------------------------------------------------------------

/// d_c = rho e - r_check.
inline Vector rhs_corrector(const FullState& z) {
  const Vector r = residuals(z);
  return Vector::Constant(z.u.x.size(), rho(z.w)) - r.tail(r.size() - 1);
}

/// d_a = (|v|^2/(n+1) - rho) e - 2 v^2.
inline Vector rhs_predictor_tptfm(const FullState& z) {
  const auto n = z.w.v.size();
  const double vv = z.w.v.squaredNorm();
  return Vector::Constant(n, vv / (n + 1) - rho(z.w)) - 2.0 * z.w.v.cwiseAbs2();
}

/// d~ = |v|^2/(n+1) e - v^2 - x s.
inline Vector rhs_predictor_acptfm(const FullState& z) {
  const auto n = z.w.v.size();
  const double vv = z.w.v.squaredNorm();
  return Vector::Constant(n, vv / (n + 1)) - z.w.v.cwiseAbs2() - z.u.x.cwiseProduct(z.u.s);
}

/// d^ = v^2 - |v|^2/(n+1) e - dx~ ds~.
inline Vector rhs_predictor2_hat(const FullState& z, const Direction& tilde) {
  const auto n = z.w.v.size();
  const double vv = z.w.v.squaredNorm();
  return z.w.v.cwiseAbs2() - Vector::Constant(n, vv / (n + 1)) - tilde.dx.cwiseProduct(tilde.ds);
}

// ---------------------------------------------------------------------------
// Closed-form proximity along a predictor ray
// ---------------------------------------------------------------------------

/// Method vector V(alpha) = t(alpha) base + a^2 quad + a^3 cubic + a^4 quartic,
/// with t = 1 for tptfm and t = 1 - alpha otherwise. The shifted residuals are
/// r(alpha) = rho(w(alpha)) e + V(alpha).
struct PredictorCoeffs {
  Vector base;     // r(z) - rho(w) e
  bool base_decays = true;
  Vector quad;     // alpha^2
  Vector cubic;    // alpha^3
  Vector quartic;  // alpha^4
  double rho0 = 0.0;
  double v0 = 0.0;
  double v_norm_sq = 0.0;

  int n() const { return static_cast<int>(base.size()) - 1; }

  double rho_at(double alpha) const {
    const double t = 1.0 - alpha;
    return (t * v0 - t * t * v_norm_sq) / (n() + 1);
  }

  /// Size of the terms entering <e, V(alpha)>; scale for roundoff checks.
  double magnitude_at(double alpha) const {
    const double a2 = alpha * alpha;
    return std::abs(base_decays ? 1.0 - alpha : 1.0) * base.lpNorm<1>() +
           a2 * (quad.lpNorm<1>() + v_norm_sq) + a2 * alpha * cubic.lpNorm<1>() +
           a2 * a2 * quartic.lpNorm<1>() + (n() + 1) * std::abs(rho_at(alpha));
  }

  Vector vector_at(double alpha) const {
    const double a2 = alpha * alpha;
    return (base_decays ? 1.0 - alpha : 1.0) * base + a2 * quad + (a2 * alpha) * cubic +
           (a2 * a2) * quartic;
  }
};

/// Psi at the shifted state: -sum ln(1 + V_i(alpha) / rho(w(alpha))).
/// Returns +inf when some log argument is not positive.
inline double psi_along(const PredictorCoeffs& c, double alpha) {
  const double rho_a = c.rho_at(alpha);
  if (!(rho_a > 0.0)) return std::numeric_limits<double>::infinity();
  const double t = c.base_decays ? 1.0 - alpha : 1.0;
  const double a2 = alpha * alpha;
  const double a3 = a2 * alpha;
  const double a4 = a2 * a2;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < c.base.size(); ++i) {
    const double vi = t * c.base[i] + a2 * c.quad[i] + a3 * c.cubic[i] + a4 * c.quartic[i];
    const double arg = 1.0 + vi / rho_a;
    if (!(arg > 0.0)) return std::numeric_limits<double>::infinity();
    acc -= std::log(arg);
  }
  return acc;
}

/// Directions of one predictor step; `second` is set for ptfm2 only.
struct PredictorPlan {
  Method method = Method::ptfm2;
  Direction first;
  std::optional<Direction> second;
  PredictorCoeffs coeffs;
};

/// u + alpha first (+ alpha^2 second).
inline PrimalDualPoint point_along(const PrimalDualPoint& u, const PredictorPlan& p,
                                   double alpha) {
  PrimalDualPoint out{u.x + alpha * p.first.dx, u.s + alpha * p.first.ds,
                      u.y + alpha * p.first.dy};
  if (p.second) {
    const double a2 = alpha * alpha;
    out.x += a2 * p.second->dx;
    out.s += a2 * p.second->ds;
    out.y += a2 * p.second->dy;
  }
  return out;
}

/// Coefficients of the method vector for directions already computed at z.
inline PredictorCoeffs predictor_coeffs(const FullState& z, Method method,
                                        const Direction& first,
                                        const Direction* second = nullptr) {
  const Vector r = residuals(z);
  const auto n = z.u.x.size();
  PredictorCoeffs c;
  c.rho0 = rho(z.w);
  c.v0 = z.w.v0;
  c.v_norm_sq = z.w.v.squaredNorm();
  c.base = r.array() - c.rho0;
  c.base_decays = method != Method::tptfm;
  c.quad = Vector::Zero(n + 1);
  c.cubic = Vector::Zero(n + 1);
  c.quartic = Vector::Zero(n + 1);
  const double vv_share = c.v_norm_sq / (n + 1);
  if (method == Method::ptfm2) {
    if (!second) throw StructuralError("predictor_coeffs: ptfm2 needs the second direction");
    c.cubic.tail(n) = second->dx.cwiseProduct(first.ds) + second->ds.cwiseProduct(first.dx);
    c.quartic.tail(n) = second->dx.cwiseProduct(second->ds);
  } else {
    c.quad[0] = vv_share;
    c.quad.tail(n) =
        (first.dx.cwiseProduct(first.ds) - z.w.v.cwiseAbs2()).array() + vv_share;
  }
  return c;
}

/// Builds the method's right-hand sides, solves them against the shared
/// factor and returns directions plus the closed-form coefficients.
inline PredictorPlan plan_predictor(const FullState& z, const ScalingState& st, Method method) {
  PredictorPlan p;
  p.method = method;
  switch (method) {
    case Method::tptfm:
      p.first = solve_utd(st, rhs_predictor_tptfm(z));
      break;
    case Method::acptfm:
      p.first = solve_utd(st, rhs_predictor_acptfm(z));
      break;
    case Method::ptfm2:
      p.first = solve_utd(st, rhs_predictor_acptfm(z));
      p.second = solve_utd(st, rhs_predictor2_hat(z, p.first));
      break;
  }
  p.coeffs = predictor_coeffs(z, method, p.first, p.second ? &*p.second : nullptr);
  return p;
}

/// Psi evaluated directly at (u + alpha first (+ alpha^2 second), (1 - alpha) w),
/// with the shifted point formed in long double so that the result is not
/// dominated by cancellation in x + alpha dx near alpha = 1.
inline double psi_on_ray_direct(const FullState& z, const PredictorPlan& p, double alpha) {
  using ld = long double;
  const auto n = z.u.x.size();
  const ld a = alpha;
  const ld t = 1.0L - a;
  auto shifted = [&](const Vector& v, const Vector& dv, const Vector* d2, Eigen::Index i) {
    ld out = static_cast<ld>(v[i]) + a * static_cast<ld>(dv[i]);
    if (d2) out += a * a * static_cast<ld>((*d2)[i]);
    return out;
  };
  const Vector* sx = p.second ? &p.second->dx : nullptr;
  const Vector* ss = p.second ? &p.second->ds : nullptr;
  ld vv = 0.0L, xs_sum = 0.0L;
  std::vector<ld> r(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ld xi = shifted(z.u.x, p.first.dx, sx, i);
    const ld si = shifted(z.u.s, p.first.ds, ss, i);
    const ld vi = t * static_cast<ld>(z.w.v[i]);
    vv += vi * vi;
    xs_sum += xi * si;
    r[i + 1] = xi * si - vi * vi;
  }
  const ld v0 = t * static_cast<ld>(z.w.v0);
  r[0] = v0 - xs_sum;
  const ld rho_a = (v0 - vv) / static_cast<ld>(n + 1);
  ld acc = 0.0L;
  for (const ld ri : r) {
    if (!(ri > 0.0L) || !(rho_a > 0.0L)) return std::numeric_limits<double>::infinity();
    acc -= std::log(ri / rho_a);
  }
  return static_cast<double>(acc);
}

// ---------------------------------------------------------------------------
// Theoretical contraction constants (monitor only)
// ---------------------------------------------------------------------------

/// gamma with mu*(w+) <= mu*(w) / (1 + gamma) per predictor step.
///   acptfm (and tptfm):  1 / (1 + sqrt(n~_r / r)),  n~_r = (n+1)/2 + n_r
///   ptfm2:  k1 / (sqrt(n-_r) k2 + k1),  n-_r = max(n^_r, n_r)
/// with n_r = 25/6 + n / (1 - beta), n^_r = sqrt(16/27 (n+1) + n_r^2 / 2),
/// k1 = (r/2 sqrt(1-beta))^{1/3}, k2 = 1 + (r / (2 (1-beta)))^{1/3} / 6.
inline double gamma_monitor(int n, double r, Method method) {
  if (n < 1) throw DomainError("gamma_monitor: n must be >= 1");
  const double beta = r / (2.0 + r);
  const double n_r = 25.0 / 6.0 + n / (1.0 - beta);
  if (method != Method::ptfm2) {
    const double nt_r = (n + 1) / 2.0 + n_r;
    return 1.0 / (1.0 + std::sqrt(nt_r / r));
  }
  const double nh_r = std::sqrt(16.0 / 27.0 * (n + 1) + 0.5 * n_r * n_r);
  const double nb_r = std::max(nh_r, n_r);
  const double k1 = std::cbrt(r / 2.0 * std::sqrt(1.0 - beta));
  const double k2 = 1.0 + std::cbrt(r / (2.0 * (1.0 - beta))) / 6.0;
  return k1 / (std::sqrt(nb_r) * k2 + k1);
}

// ---------------------------------------------------------------------------
// Predictor step search
// ---------------------------------------------------------------------------

inline constexpr double kAlphaCap = 1.0 - 1e-12;
inline constexpr double kAlphaFloor = 1e-14;

/// Feasibility predicate for predictor_search: x and s stay positive at alpha.
inline std::function<bool(double)> stays_interior(const PrimalDualPoint& u,
                                                  const PredictorPlan& plan) {
  return [&u, &plan](double a) {
    const PrimalDualPoint p = point_along(u, plan, a);
    return p.x.minCoeff() > 0.0 && p.s.minCoeff() > 0.0;
  };
}

/// Stricter predicate used by the solver: the shifted state is interior and
/// its proximity, evaluated from the actual point, stays within A_psi. Near
/// alpha = 1 the solve error makes this differ from the closed form.
inline std::function<bool(double)> stays_admissible(const FullState& z, const PredictorPlan& plan,
                                                    double A_psi) {
  return [&z, &plan, A_psi](double a) {
    const FullState next{point_along(z.u, plan, a), z.w.scaled(1.0 - a)};
    if (!(next.u.x.minCoeff() > 0.0 && next.u.s.minCoeff() > 0.0)) return false;
    try {
      return proximity(next).psi <= A_psi;
    } catch (const Error&) {
      return false;
    }
  };
}

/// Largest alpha (up to the bracket located by expansion) with
/// psi(alpha) <= A_psi and feasible(alpha). The search works on the odds
/// alpha / (1 - alpha): geometric expansion by 2 from `start`, then
/// bisection in log-odds until the bracket is narrower than ls_rel_tol
/// relative to both alpha and 1 - alpha. Throws StallError when no step
/// above 1e-14 is admissible.
inline double predictor_search(const PredictorCoeffs& c, double A_psi, double ls_rel_tol,
                               double start = 0.25,
                               const std::function<bool(double)>& feasible = {}) {
  auto ok = [&](double a) {
    if (!(psi_along(c, a) <= A_psi)) return false;
    return !feasible || feasible(a);
  };
  auto odds = [](double a) { return a / (1.0 - a); };
  auto from_odds = [](double o) { return o / (1.0 + o); };

  double a = std::clamp(start, 1e-6, 0.5);
  double lo, hi;
  if (ok(a)) {
    lo = a;
    for (;;) {
      double next = from_odds(2.0 * odds(lo));
      if (next >= kAlphaCap) {
        if (ok(kAlphaCap)) return kAlphaCap;
        hi = kAlphaCap;
        break;
      }
      if (!ok(next)) {
        hi = next;
        break;
      }
      lo = next;
    }
  } else {
    hi = a;
    for (;;) {
      const double next = from_odds(0.5 * odds(hi));
      if (next < kAlphaFloor) throw StallError("predictor search: no admissible step");
      if (ok(next)) {
        lo = next;
        break;
      }
      hi = next;
    }
  }
  while (hi - lo > ls_rel_tol * std::min(lo, 1.0 - lo)) {
    const double mid = from_odds(std::sqrt(odds(lo) * odds(hi)));
    if (mid <= lo || mid >= hi) break;
    if (ok(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

// ---------------------------------------------------------------------------
// Corrector step
// ---------------------------------------------------------------------------

struct CorrectorResult {
  PrimalDualPoint u;
  double alpha = 0.0;
  bool no_op = false;
  double f_before = 0.0;
  double f_after = 0.0;
};

namespace detail {

// Barrier restricted to the line u + alpha D at fixed w:
//   f(alpha) = -sum_i ln(q_i(alpha)),  q_i = a_i + b_i alpha + c_i alpha^2.
struct BarrierLine {
  Vector a, b, c;

  double value(double t) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double q = a[i] + t * (b[i] + t * c[i]);
      if (!(q > 0.0)) return std::numeric_limits<double>::infinity();
      acc -= std::log(q);
    }
    return acc;
  }

  std::pair<double, double> derivatives(double t) const {
    double d1 = 0.0, d2 = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double q = a[i] + t * (b[i] + t * c[i]);
      const double dq = b[i] + 2.0 * t * c[i];
      d1 -= dq / q;
      d2 += (dq * dq) / (q * q) - 2.0 * c[i] / q;
    }
    return {d1, d2};
  }
};

// Smallest positive root of a + b t + c t^2 (a > 0), or +inf.
inline double first_positive_root(double a, double b, double c) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (c == 0.0) return b < 0.0 ? -a / b : inf;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return inf;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(sq, b));
  double best = inf;
  for (double root : {q / c, q != 0.0 ? a / q : inf})
    if (root > 0.0 && root < best) best = root;
  return best;
}

inline double max_positive_step(const Vector& v, const Vector& dv) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) best = std::min(best, -v[i] / dv[i]);
  return best;
}

}  // namespace detail

/// Approximate minimizer of F(u + alpha D(d_c), w) over the feasible segment:
/// golden-section to relative width corrector_rel_tol, then one Newton polish.
inline CorrectorResult corrector_step(const FullState& z, const ScalingState& st,
                                      double rel_tol = 1e-4) {
  CorrectorResult res;
  res.u = z.u;
  const Vector dc = rhs_corrector(z);
  const Direction dir = solve_utd(st, dc);
  const Vector r = residuals(z);
  const auto n = z.u.x.size();

  detail::BarrierLine line;
  line.a = r;
  line.b.resize(n + 1);
  line.c.resize(n + 1);
  line.b[0] = -(z.u.s.dot(dir.dx) + z.u.x.dot(dir.ds));
  line.c[0] = -dir.dx.dot(dir.ds);
  line.b.tail(n) = z.u.x.cwiseProduct(dir.ds) + z.u.s.cwiseProduct(dir.dx);
  line.c.tail(n) = dir.dx.cwiseProduct(dir.ds);
  res.f_before = line.value(0.0);

  const double dscale = dc.lpNorm<Eigen::Infinity>();
  if (dscale == 0.0 || dscale <= 1e-15 * r.lpNorm<Eigen::Infinity>()) {
    res.no_op = true;
    res.f_after = res.f_before;
    return res;
  }

  double seg = std::min(detail::max_positive_step(z.u.x, dir.dx),
                        detail::max_positive_step(z.u.s, dir.ds));
  for (Eigen::Index i = 0; i <= n; ++i)
    seg = std::min(seg, detail::first_positive_root(line.a[i], line.b[i], line.c[i]));

  // Upper end of the search interval: just inside the segment, or a point
  // past the minimizer when the segment is unbounded.
  double hi;
  if (std::isfinite(seg)) {
    hi = seg * (1.0 - 1e-12);
  } else {
    hi = 1.0;
    while (line.derivatives(hi).first < 0.0 && hi < 1e12) hi *= 2.0;
  }
  if (line.derivatives(0.0).first >= 0.0) {
    res.no_op = true;
    res.f_after = res.f_before;
    return res;
  }

  constexpr double kInvPhi = 0.6180339887498949;
  double lo = 0.0;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = line.value(x1);
  double f2 = line.value(x2);
  while (hi - lo > rel_tol * std::max(0.5 * (lo + hi), 1e-300)) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = line.value(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = line.value(x2);
    }
  }
  double alpha = f1 <= f2 ? x1 : x2;
  double f_alpha = std::min(f1, f2);

  const auto [d1, d2] = line.derivatives(alpha);
  if (d2 > 0.0) {
    const double polished = alpha - d1 / d2;
    const double limit = std::isfinite(seg) ? seg * (1.0 - 1e-12) : polished;
    if (polished > 0.0 && polished <= limit) {
      const double fp = line.value(polished);
      if (fp < f_alpha) {
        alpha = polished;
        f_alpha = fp;
      }
    }
  }
  if (!(f_alpha < res.f_before)) {
    res.no_op = true;
    res.f_after = res.f_before;
    return res;
  }
  res.alpha = alpha;
  res.f_after = f_alpha;
  res.u = PrimalDualPoint{z.u.x + alpha * dir.dx, z.u.s + alpha * dir.ds,
                          z.u.y + alpha * dir.dy};
  return res;
}

/// Convenience overload that factors at z.
inline CorrectorResult corrector_step(const LpInstance& inst, const FullState& z,
                                      double rel_tol = 1e-4) {
  return corrector_step(z, factorize(inst, z.u), rel_tol);
}

// ---------------------------------------------------------------------------
// Solve loop
// ---------------------------------------------------------------------------

enum class StepKind { predictor, corrector };

inline std::string_view to_string(StepKind k) {
  return k == StepKind::predictor ? "predictor" : "corrector";
}

struct IterationRecord {
  int k = 0;
  StepKind kind = StepKind::predictor;
  double alpha = 0.0;
  double beta_k = 0.0;
  double v0_after = 0.0;
  double gap_after = 0.0;
  double delta_after = 0.0;
  double psi_after = 0.0;
  /// Closed-form psi(alpha) at the accepted step (predictor only).
  double psi_closed_form = std::numeric_limits<double>::quiet_NaN();
  double mu_star_after = 0.0;
  /// min_i r_i / rho and max_i r_i / rho after the step.
  double r_min_over_rho = 0.0;
  double r_max_over_rho = 0.0;
  bool in_parabolic_set = true;
  double wall_time_s = 0.0;
};

enum class Termination { eps_reached, finite_term_success, max_iter, numerical_failure };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::eps_reached: return "eps_reached";
    case Termination::finite_term_success: return "finite_term_success";
    case Termination::max_iter: return "max_iter";
    case Termination::numerical_failure: return "numerical_failure";
  }
  return "?";
}

struct SolveReport {
  Method method = Method::ptfm2;
  std::vector<IterationRecord> records;
  int predictor_count = 0;
  int corrector_count = 0;
  /// Predictor branches whose psi(0) exceeded A_psi and fell through to a corrector.
  int fallthrough_count = 0;
  int ft_attempts = 0;
  Termination termination = Termination::max_iter;
  std::string failure_reason;
  double final_gap = 0.0;
  double final_v0 = 0.0;
  PrimalDualPoint final_point;
  TargetPoint final_target;
  std::optional<BasisCandidate> exact;
  std::vector<std::string> warnings;
  double wall_time_s = 0.0;

  bool success() const {
    return termination == Termination::eps_reached ||
           termination == Termination::finite_term_success;
  }
};

namespace detail {

inline IterationRecord make_record(int k, StepKind kind, double alpha, double beta_k,
                                   const FullState& z, const ProximitySnapshot& p) {
  IterationRecord rec;
  rec.k = k;
  rec.kind = kind;
  rec.alpha = alpha;
  rec.beta_k = beta_k;
  rec.v0_after = z.w.v0;
  rec.gap_after = z.u.s.dot(z.u.x);
  rec.delta_after = p.delta;
  rec.psi_after = p.psi;
  rec.mu_star_after = p.mu_star;
  rec.r_min_over_rho = p.r.minCoeff() / p.rho;
  rec.r_max_over_rho = p.r.maxCoeff() / p.rho;
  rec.in_parabolic_set = z.w.in_parabolic_set();
  return rec;
}

}  // namespace detail

/// Runs the configured method from a strictly feasible u0.
inline SolveReport run(const LpInstance& inst, const PrimalDualPoint& u0,
                       const MethodConfig& cfg = {}) {
  using clock = std::chrono::steady_clock;
  cfg.validate();
  const auto t_start = clock::now();
  auto seconds_since = [](clock::time_point t0) {
    return std::chrono::duration<double>(clock::now() - t0).count();
  };

  SolveReport rep;
  rep.method = cfg.method;
  const int n = inst.n();
  const double A_psi = cfg.A_psi();
  const double beta = cfg.beta();
  const double gamma = gamma_monitor(n, cfg.r, cfg.method);
  const auto check = check_feasibility(inst, u0);
  if (!check.pass) throw InfeasiblePointError("run: starting point is not strictly feasible");

  FullState z{u0, starting_target(u0)};
  const double v0_initial = z.w.v0;
  bool ft_latched = false;
  auto warn = [&](std::string msg) {
    if (rep.warnings.size() < 200) rep.warnings.push_back(std::move(msg));
  };

  auto finish = [&](Termination t) {
    rep.termination = t;
    rep.final_point = z.u;
    rep.final_target = z.w;
    rep.final_v0 = z.w.v0;
    rep.final_gap = z.u.s.dot(z.u.x);
    rep.wall_time_s = seconds_since(t_start);
  };

  for (int k = 0; k < cfg.max_outer; ++k) {
    const auto t_iter = clock::now();
    ProximitySnapshot prox;
    try {
      prox = proximity(z);
    } catch (const DomainError& e) {
      rep.failure_reason = e.what();
      finish(Termination::numerical_failure);
      return rep;
    }
    const double beta_k = acceptance_level(cfg, z.w.v0, v0_initial);
    if (z.w.v0 <= cfg.eps && prox.delta <= beta_k) {
      finish(Termination::eps_reached);
      return rep;
    }

    std::optional<ScalingState> st;
    try {
      st.emplace(factorize(inst, z.u, cfg.kernel));
    } catch (const Error& e) {
      rep.failure_reason = e.what();
      finish(Termination::numerical_failure);
      return rep;
    }

    bool do_predictor = prox.delta <= beta_k;
    if (do_predictor && prox.psi > A_psi) {
      ++rep.fallthrough_count;
      do_predictor = false;
    }

    if (do_predictor) {
      if (prox.chi1 > beta_k / std::sqrt(1.0 - beta_k) * (1.0 + 1e-9) ||
          prox.chi0 > beta_k / (1.0 - beta_k) * (1.0 + 1e-9))
        warn("k=" + std::to_string(k) + ": chi bounds exceeded at a centered state");

      if (cfg.finite_termination && k >= cfg.ft_first_iteration) {
        if (!ft_latched && activation_tests(z.u, inst.m()).any()) ft_latched = true;
        const bool attempt =
            cfg.activation_policy == ActivationPolicy::always || ft_latched;
        if (attempt) {
          ++rep.ft_attempts;
          auto cand = try_finite_termination(inst, z.u, cfg.eps, ActivationPolicy::always,
                                             cfg.ft_indicators);
          if (cand) {
            rep.exact = std::move(cand);
            finish(Termination::finite_term_success);
            return rep;
          }
        }
      }

      PredictorPlan plan;
      double alpha = 0.0;
      try {
        plan = plan_predictor(z, *st, cfg.method);
        alpha = predictor_search(plan.coeffs, A_psi, cfg.ls_rel_tol, gamma,
                                 stays_admissible(z, plan, A_psi));
      } catch (const Error& e) {
        rep.failure_reason = e.what();
        finish(Termination::numerical_failure);
        return rep;
      }

      // Both consistency checks rely on the UTD equations holding exactly; near
      // alpha = 1 the solve residual is amplified by 1 / (1 - alpha) and the
      // comparison says nothing about the formulas, so it is skipped there.
      const bool check_here = cfg.debug_checks && 1.0 - alpha >= 1e-3;
      if (check_here) {
        for (double a : {0.25 * alpha, 0.5 * alpha, alpha}) {
          const double sum = plan.coeffs.vector_at(a).sum();
          if (std::abs(sum) > 1e-8 * plan.coeffs.magnitude_at(a))
            warn("k=" + std::to_string(k) + ": <e, V(alpha)> = " + std::to_string(sum) +
                 " is not zero");
        }
      }

      const double mu_before = prox.mu_star;
      FullState next{point_along(z.u, plan, alpha), z.w.scaled(1.0 - alpha)};
      ProximitySnapshot after;
      try {
        after = proximity(next);
      } catch (const DomainError& e) {
        rep.failure_reason = std::string("predictor left F: ") + e.what();
        finish(Termination::numerical_failure);
        return rep;
      }
      const FullState z_prev = std::exchange(z, std::move(next));
      ++rep.predictor_count;
      auto rec = detail::make_record(k, StepKind::predictor, alpha, beta_k, z, after);
      rec.psi_closed_form = psi_along(plan.coeffs, alpha);
      rec.wall_time_s = seconds_since(t_iter);
      if (check_here) {
        const double direct = psi_on_ray_direct(z_prev, plan, alpha);
        if (std::abs(rec.psi_closed_form - direct) > 1e-8 * std::max(1.0, direct)) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "k=%d: closed-form psi %.12g, direct %.12g (1-alpha=%.3g)",
                        k, rec.psi_closed_form, direct, 1.0 - alpha);
          warn(buf);
        }
      }
      if (after.psi > A_psi + 1e-6)
        warn("k=" + std::to_string(k) + ": psi after predictor exceeds A_psi");
      if (cfg.method != Method::tptfm && after.mu_star > mu_before / (1.0 + gamma))
        warn("k=" + std::to_string(k) + ": mu* contraction below theoretical rate");
      rep.records.push_back(rec);
    } else {
      CorrectorResult cr;
      try {
        cr = corrector_step(z, *st, cfg.corrector_rel_tol);
      } catch (const Error& e) {
        rep.failure_reason = e.what();
        finish(Termination::numerical_failure);
        return rep;
      }
      if (cr.no_op) {
        // The barrier cannot decrease along d_c: no further progress possible.
        rep.failure_reason = "corrector made no progress";
        finish(Termination::numerical_failure);
        return rep;
      }
      FullState next{std::move(cr.u), z.w};
      ProximitySnapshot after;
      try {
        after = proximity(next);
      } catch (const DomainError& e) {
        rep.failure_reason = std::string("corrector left F: ") + e.what();
        finish(Termination::numerical_failure);
        return rep;
      }
      if (after.delta > prox.delta)
        warn("k=" + std::to_string(k) + ": delta increased across a corrector");
      if (after.delta <= beta_k && !centered_sandwich_holds(after, beta_k))
        warn("k=" + std::to_string(k) + ": residual sandwich violated after corrector");
      z = std::move(next);
      ++rep.corrector_count;
      auto rec = detail::make_record(k, StepKind::corrector, cr.alpha, beta_k, z, after);
      rec.wall_time_s = seconds_since(t_iter);
      rep.records.push_back(rec);
    }
  }
  finish(Termination::max_iter);
  return rep;
}

}  // namespace ptf
