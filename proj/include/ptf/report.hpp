#pragma once

// JSON form of SolveReport. See README for the schema.

#include <cmath>
#include <string>

#include <json.hpp>

#include "ptf/path_methods.hpp"

namespace ptf {

namespace detail {

// Non-finite numbers become null so the output stays valid JSON.
inline nlohmann::json json_real(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

inline nlohmann::json json_array(const Vector& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(json_real(v[i]));
  return arr;
}

}  // namespace detail

inline nlohmann::json to_json(const IterationRecord& r, bool with_timing = true) {
  nlohmann::json j = {
      {"k", r.k},
      {"kind", std::string(to_string(r.kind))},
      {"alpha", detail::json_real(r.alpha)},
      {"beta_k", detail::json_real(r.beta_k)},
      {"v0", detail::json_real(r.v0_after)},
      {"gap", detail::json_real(r.gap_after)},
      {"delta", detail::json_real(r.delta_after)},
      {"psi", detail::json_real(r.psi_after)},
      {"mu_star", detail::json_real(r.mu_star_after)},
      {"r_min_over_rho", detail::json_real(r.r_min_over_rho)},
      {"r_max_over_rho", detail::json_real(r.r_max_over_rho)},
  };
  if (r.kind == StepKind::predictor) j["psi_closed_form"] = detail::json_real(r.psi_closed_form);
  if (with_timing) j["wall_time_s"] = r.wall_time_s;
  return j;
}

inline nlohmann::json to_json(const BasisCandidate& c) {
  auto basis = nlohmann::json::array();
  for (int i : c.basis) basis.push_back(i + 1);
  return {
      {"indicator", std::string(to_string(c.indicator))},
      {"basis", basis},
      {"accepted", c.accepted},
      {"used_fallback", c.used_fallback},
      {"reason", c.reason},
      {"x", detail::json_array(c.x_star)},
      {"s", detail::json_array(c.s_star)},
      {"y", detail::json_array(c.y_star)},
      {"primal_residual", detail::json_real(c.primal_residual)},
      {"dual_residual", detail::json_real(c.dual_residual)},
      {"gap", detail::json_real(c.gap)},
  };
}

inline nlohmann::json to_json(const SolveReport& rep, bool with_timing = true) {
  auto records = nlohmann::json::array();
  for (const auto& r : rep.records) records.push_back(to_json(r, with_timing));
  nlohmann::json j = {
      {"method", std::string(to_string(rep.method))},
      {"termination", std::string(to_string(rep.termination))},
      {"predictor_count", rep.predictor_count},
      {"corrector_count", rep.corrector_count},
      {"fallthrough_count", rep.fallthrough_count},
      {"ft_attempts", rep.ft_attempts},
      {"final_gap", detail::json_real(rep.final_gap)},
      {"final_v0", detail::json_real(rep.final_v0)},
      {"warnings", rep.warnings},
      {"records", records},
      {"exact", rep.exact ? to_json(*rep.exact) : nlohmann::json(nullptr)},
  };
  if (!rep.failure_reason.empty()) j["failure_reason"] = rep.failure_reason;
  if (with_timing) j["wall_time_s"] = rep.wall_time_s;
  return j;
}

}  // namespace ptf
