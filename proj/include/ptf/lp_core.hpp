#pragma once

// Standard-form primal-dual LP data, strictly feasible points and the JSON
// problem file format.
//
//   min <c,x>  s.t. Ax = b, x >= 0      max <b,y>  s.t. s + A^T y = c, s >= 0

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ptf/errors.hpp"

namespace ptf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kDefaultFeasTol = 1e-9;

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw StructuralError(msg);
}

}  // namespace detail

/// Dense LP instance. Immutable after construction.
class LpInstance {
 public:
  LpInstance(Matrix a, Vector b, Vector c)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    detail::require(a_.rows() >= 1, "LpInstance: m must be >= 1");
    detail::require(a_.cols() > a_.rows(), "LpInstance: n must exceed m (got m=" +
                                               std::to_string(a_.rows()) + ", n=" +
                                               std::to_string(a_.cols()) + ")");
    detail::require(b_.size() == a_.rows(), "LpInstance: b has wrong length");
    detail::require(c_.size() == a_.cols(), "LpInstance: c has wrong length");
    if (!a_.allFinite() || !b_.allFinite() || !c_.allFinite())
      throw NonFiniteError("LpInstance: non-finite entry in A, b or c");
  }

  int m() const noexcept { return static_cast<int>(a_.rows()); }
  int n() const noexcept { return static_cast<int>(a_.cols()); }
  const Matrix& A() const noexcept { return a_; }
  const Vector& b() const noexcept { return b_; }
  const Vector& c() const noexcept { return c_; }

 private:
  Matrix a_;
  Vector b_;
  Vector c_;
};

/// Primal-dual triple u = (x, s, y).
struct PrimalDualPoint {
  Vector x;
  Vector s;
  Vector y;
};

/// Returns <s, x>, which equals <c,x> - <b,y> on the feasible set.
inline double duality_gap(const LpInstance& /*inst*/, const PrimalDualPoint& u) {
  return u.s.dot(u.x);
}

/// <c,x> - <b,y>; the objective-form of the gap.
inline double objective_gap(const LpInstance& inst, const PrimalDualPoint& u) {
  return inst.c().dot(u.x) - inst.b().dot(u.y);
}

struct FeasibilityReport {
  double primal_residual = 0.0;  // ||Ax - b||_inf
  double dual_residual = 0.0;    // ||s + A^T y - c||_inf
  double min_x = 0.0;
  double min_s = 0.0;
  bool pass = false;
};

inline void check_dimensions(const LpInstance& inst, const PrimalDualPoint& u) {
  if (u.x.size() != inst.n() || u.s.size() != inst.n() || u.y.size() != inst.m())
    throw StructuralError("point dimensions do not match instance (n=" +
                          std::to_string(inst.n()) + ", m=" + std::to_string(inst.m()) +
                          ")");
}

inline FeasibilityReport check_feasibility(const LpInstance& inst, const PrimalDualPoint& u,
                                           double tol = kDefaultFeasTol) {
  check_dimensions(inst, u);
  FeasibilityReport rep;
  rep.primal_residual = (inst.A() * u.x - inst.b()).lpNorm<Eigen::Infinity>();
  rep.dual_residual =
      (u.s + inst.A().transpose() * u.y - inst.c()).lpNorm<Eigen::Infinity>();
  rep.min_x = u.x.minCoeff();
  rep.min_s = u.s.minCoeff();
  const double pscale = 1.0 + inst.b().lpNorm<Eigen::Infinity>();
  const double dscale = 1.0 + inst.c().lpNorm<Eigen::Infinity>();
  rep.pass = rep.primal_residual <= tol * pscale && rep.dual_residual <= tol * dscale &&
             rep.min_x > 0.0 && rep.min_s > 0.0 && u.x.allFinite() && u.s.allFinite() &&
             u.y.allFinite();
  return rep;
}

// ---------------------------------------------------------------------------
// JSON problem file
//
//   { "m": M, "n": N, "A": [row-major, M*N], "b": [M], "c": [N],
//     "x0": [N], "s0": [N], "y0": [M] }          (x0/s0/y0 optional, all or none)
//
// Numbers are written with 17 significant digits so doubles round-trip exactly.
// On input, bare NaN / Infinity tokens and null are read as non-finite values
// and rejected with NonFiniteError.
// ---------------------------------------------------------------------------

struct LoadedProblem {
  LpInstance instance;
  std::optional<PrimalDualPoint> start;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_array(std::ostream& os, const double* data, Eigen::Index len) {
  os << '[';
  for (Eigen::Index i = 0; i < len; ++i) {
    if (i) os << ',';
    os << format_double(data[i]);
  }
  os << ']';
}

// Quote bare NaN / Infinity / -Infinity tokens outside strings so that the
// strict JSON parser accepts them and they can be reported as non-finite.
inline std::string quote_nonfinite_tokens(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_string) {
      out.push_back(ch);
      if (ch == '\\' && i + 1 < text.size()) {
        out.push_back(text[++i]);
      } else if (ch == '"') {
        in_string = false;
      }
      continue;
    }
    if (ch == '"') {
      in_string = true;
      out.push_back(ch);
      continue;
    }
    for (std::string_view tok : {"-Infinity", "Infinity", "NaN"}) {
      if (text.substr(i, tok.size()) == tok) {
        out.push_back('"');
        out.append(tok);
        out.push_back('"');
        i += tok.size() - 1;
        goto next;
      }
    }
    out.push_back(ch);
  next:;
  }
  return out;
}

inline double json_number(const nlohmann::json& v, const char* field) {
  if (v.is_number()) {
    const double d = v.get<double>();
    if (!std::isfinite(d))
      throw NonFiniteError(std::string("non-finite entry in \"") + field + "\"");
    return d;
  }
  if (v.is_null() || v.is_string())
    throw NonFiniteError(std::string("non-finite entry in \"") + field + "\"");
  throw ParseError(std::string("expected number in \"") + field + "\"");
}

inline Vector json_vector(const nlohmann::json& doc, const char* field,
                          Eigen::Index expected) {
  if (!doc.contains(field)) throw ParseError(std::string("missing field \"") + field + "\"");
  const auto& arr = doc.at(field);
  if (!arr.is_array()) throw ParseError(std::string("field \"") + field + "\" is not an array");
  if (static_cast<Eigen::Index>(arr.size()) != expected)
    throw StructuralError(std::string("field \"") + field + "\" has length " +
                          std::to_string(arr.size()) + ", expected " +
                          std::to_string(expected));
  Vector out(expected);
  for (Eigen::Index i = 0; i < expected; ++i) out[i] = json_number(arr[i], field);
  return out;
}

inline int json_dim(const nlohmann::json& doc, const char* field) {
  if (!doc.contains(field) || !doc.at(field).is_number_integer())
    throw ParseError(std::string("field \"") + field + "\" must be an integer");
  const auto v = doc.at(field).get<long long>();
  if (v < 1 || v > (1LL << 20))
    throw StructuralError(std::string("field \"") + field + "\" out of range");
  return static_cast<int>(v);
}

}  // namespace detail

inline void save_instance(std::ostream& os, const LpInstance& inst,
                          const PrimalDualPoint* start = nullptr) {
  const int m = inst.m();
  const int n = inst.n();
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajor a = inst.A();
  os << "{\"m\":" << m << ",\"n\":" << n << ",\"A\":";
  detail::write_array(os, a.data(), a.size());
  os << ",\"b\":";
  detail::write_array(os, inst.b().data(), m);
  os << ",\"c\":";
  detail::write_array(os, inst.c().data(), n);
  if (start) {
    check_dimensions(inst, *start);
    os << ",\"x0\":";
    detail::write_array(os, start->x.data(), n);
    os << ",\"s0\":";
    detail::write_array(os, start->s.data(), n);
    os << ",\"y0\":";
    detail::write_array(os, start->y.data(), m);
  }
  os << "}\n";
}

inline std::string instance_to_json(const LpInstance& inst,
                                    const PrimalDualPoint* start = nullptr) {
  std::ostringstream os;
  save_instance(os, inst, start);
  return os.str();
}

inline LoadedProblem parse_instance(std::string_view text, double feas_tol = kDefaultFeasTol) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(detail::quote_nonfinite_tokens(text));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed problem file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("problem file must be a JSON object");
  const int m = detail::json_dim(doc, "m");
  const int n = detail::json_dim(doc, "n");
  if (n <= m)
    throw StructuralError("problem file: n must exceed m (got m=" + std::to_string(m) +
                          ", n=" + std::to_string(n) + ")");
  const Vector flat = detail::json_vector(doc, "A", static_cast<Eigen::Index>(m) * n);
  Matrix a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = flat[static_cast<Eigen::Index>(i) * n + j];
  LoadedProblem out{LpInstance(std::move(a), detail::json_vector(doc, "b", m),
                               detail::json_vector(doc, "c", n)),
                    std::nullopt};
  const int present = doc.contains("x0") + doc.contains("s0") + doc.contains("y0");
  if (present != 0 && present != 3)
    throw ParseError("starting point requires all of x0, s0, y0");
  if (present == 3) {
    PrimalDualPoint u{detail::json_vector(doc, "x0", n), detail::json_vector(doc, "s0", n),
                      detail::json_vector(doc, "y0", m)};
    const auto rep = check_feasibility(out.instance, u, feas_tol);
    if (!rep.pass)
      throw InfeasiblePointError(
          "supplied starting point is not strictly feasible (primal residual " +
          detail::format_double(rep.primal_residual) + ", dual residual " +
          detail::format_double(rep.dual_residual) + ", min x " +
          detail::format_double(rep.min_x) + ", min s " + detail::format_double(rep.min_s) +
          ")");
    out.start = std::move(u);
  }
  return out;
}

inline LoadedProblem load_instance(std::istream& is, double feas_tol = kDefaultFeasTol) {
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_instance(buf.str(), feas_tol);
}

inline LoadedProblem load_instance(const std::string& path, double feas_tol = kDefaultFeasTol) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open problem file: " + path);
  return load_instance(in, feas_tol);
}

}  // namespace ptf
