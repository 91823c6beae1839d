#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "sockkt/vec.hpp"

namespace sockkt {

enum class LPSense { minimize, maximize };
enum class LPRelation { le, eq, ge };
enum class LPBound { free, nonneg };

struct LPRow {
  Vec coeffs;
  LPRelation rel = LPRelation::le;
  double rhs = 0.0;
};

struct LinearProgram {
  LPSense sense = LPSense::minimize;
  Vec objective;
  std::vector<LPRow> rows;
  std::vector<LPBound> bounds;

  LinearProgram() = default;
  explicit LinearProgram(std::size_t num_vars, LPSense s = LPSense::minimize,
                         LPBound bound = LPBound::nonneg)
      : sense(s), objective(num_vars, 0.0), bounds(num_vars, bound) {}

  std::size_t num_vars() const { return objective.size(); }
  void add_row(Vec coeffs, LPRelation rel, double rhs);
  /// Throws std::invalid_argument on ragged rows or non-finite data.
  void validate() const;
};

enum class LPStatus { optimal, infeasible, unbounded };

const char* to_string(LPStatus s);

struct LPOutcome {
  LPStatus status = LPStatus::infeasible;
  double value = 0.0;  // objective at `solution`, in the program's own sense
  Vec solution;        // optimal only
  Vec ray;             // unbounded only: feasible direction improving the objective
  std::size_t pivots = 0;
};

struct LPOptions {
  double tol = 1e-9;
  double pivot_tol = 1e-11;
  std::size_t max_pivots = 100000;
  std::ostream* trace = nullptr;  // one line per pivot when set
};

/// Two-phase dense tableau simplex with Bland's rule. Throws LpError on
/// numerical breakdown.
LPOutcome solve(const LinearProgram& lp, const LPOptions& opts = {});

/// Textbook dual, built so that its optimal value equals the primal's.
LinearProgram dual_of(const LinearProgram& lp);

/// Homogeneous system with strict rows  S w < 0, weak rows  W w <= 0 and
/// optionally some components w_v > 0.
struct StrictSystem {
  std::size_t num_vars = 0;
  Mat strict_rows;
  Mat weak_rows;
  std::vector<std::size_t> strict_vars;
};

struct StrictSolution {
  bool solvable = false;
  Vec witness;  // satisfies every strict row/variable with margin 1
  double sigma = 0.0;
  std::size_t pivots = 0;
};

/// Decides the system through  max sigma  s.t.  S w + sigma <= 0,
/// W w <= 0,  w_v >= sigma,  sigma <= 1, w free. By homogeneity the optimum
/// is 0 or 1; anything strictly between raises LpError.
StrictSolution strict_system_solvable(const StrictSystem& sys, const LPOptions& opts = {});

}  // namespace sockkt
