#pragma once

#include <cstdint>
#include <random>

#include "ptf/ptf.hpp"

namespace ptf::test {

// R1: min x1 + 2 x2  s.t. x1 + x2 = 2, x >= 0.
inline LpInstance r1() {
  Matrix a(1, 2);
  a << 1.0, 1.0;
  Vector b(1), c(2);
  b << 2.0;
  c << 1.0, 2.0;
  return LpInstance(a, b, c);
}

inline PrimalDualPoint r1_start() {
  Vector x(2), s(2), y(1);
  x << 1.0, 1.0;
  s << 1.0, 2.0;
  y << 0.0;
  return {x, s, y};
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out[i++] = d;
  return out;
}

// State after `passes` outer iterations of `method` from the generator start.
inline FullState advanced_state(const GeneratedProblem& p, Method method, int passes) {
  MethodConfig cfg;
  cfg.method = method;
  cfg.max_outer = passes;
  const auto rep = run(p.instance, p.start, cfg);
  return {rep.final_point, rep.final_target};
}

}  // namespace ptf::test
