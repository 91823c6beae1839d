#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "sockkt/cones.hpp"
#include "sockkt/problem.hpp"

namespace fixtures {

using sockkt::Problem;
using sockkt::Vec;

inline std::shared_ptr<const Problem> make(std::string name, std::vector<std::string> vars,
                                           std::vector<std::string> objectives,
                                           std::vector<std::string> constraints) {
  return std::make_shared<const Problem>(std::move(name), std::move(vars), std::move(objectives),
                                         std::move(constraints));
}

inline const std::vector<std::string> kXY = {"x1", "x2"};

// min x2 s.t. x1^3 <= 0
inline std::shared_ptr<const Problem> cubic() { return make("cubic", kXY, {"x2"}, {"x1^3"}); }
// min x1^2 + x2 s.t. x1^2 - x2 <= 0
inline std::shared_ptr<const Problem> parabola() {
  return make("parabola", kXY, {"x1^2 + x2"}, {"x1^2 - x2"});
}
// min x2 s.t. x1^2 - x2 <= 0
inline std::shared_ptr<const Problem> d1() { return make("d1", kXY, {"x2"}, {"x1^2 - x2"}); }
// min x2 - x1^2 s.t. -x2 <= 0
inline std::shared_ptr<const Problem> d2() { return make("d2", kXY, {"x2 - x1^2"}, {"-x2"}); }
// min -x1 s.t. x1 <= 0
inline std::shared_ptr<const Problem> halfspace() {
  return make("halfspace", {"x1"}, {"-x1"}, {"x1"});
}
// min x1 + x2 over the union of the two nonnegative half-axes
inline std::shared_ptr<const Problem> axes() {
  return make("axes", kXY, {"x1 + x2"}, {"-x1", "-x2", "x1*x2"});
}
// interior minimizer of a disc-constrained quadratic
inline std::shared_ptr<const Problem> interior() {
  return make("interior", kXY, {"(x1 - 1)^2 + x2^2"}, {"x1^2 + x2^2 - 4"});
}
// bi-objective problem with an inactive constraint
inline std::shared_ptr<const Problem> vector2() {
  return make("vector", kXY, {"x1^2 + x2", "x1^2 - x2"}, {"-x1 - 1"});
}
// C^1 but not C^2 constraint
inline std::shared_ptr<const Problem> spow_c1() {
  return make("spow", kXY, {"x1^2 + x2"}, {"spow(x1, 1.5) - x2"});
}

struct Case {
  std::shared_ptr<const Problem> problem;
  Vec x;
};

// Every fixture at its candidate point.
inline std::vector<Case> all() {
  return {{cubic(), {0, 0}},      {parabola(), {0, 0}}, {d1(), {0, 0}},
          {d2(), {0, 0}},         {halfspace(), {0}},   {axes(), {0, 0}},
          {interior(), {1, 0}},   {vector2(), {0, 0}},  {spow_c1(), {0, 0}}};
}

inline bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

}  // namespace fixtures
