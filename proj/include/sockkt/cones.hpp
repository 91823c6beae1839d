#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sockkt/deriv.hpp"
#include "sockkt/lp.hpp"
#include "sockkt/problem.hpp"
#include "sockkt/tolerances.hpp"
#include "sockkt/vec.hpp"

namespace sockkt {

/// Snapshot of a problem at a candidate point x.
struct PointContext {
  std::shared_ptr<const Problem> problem;
  Vec x;
  Vec f_values;
  Vec g_values;
  std::vector<std::size_t> active;  // I(x), ascending constraint indices
  Mat grad_f;                       // n x s
  Mat grad_g_active;                // |I| x s, row k belongs to active[k]
  bool feasible = false;
  Tolerances tol;

  std::size_t dimension() const { return x.size(); }
  std::size_t num_objectives() const { return grad_f.size(); }
};

/// Values, active set, and gradients at x. Gradients of inactive
/// constraints are not evaluated.
PointContext point_context(std::shared_ptr<const Problem> problem, Vec x,
                           const Tolerances& tol = {});

/// A direction d at a point: criticality, the index sets J(x,d) and K(x,d),
/// and second-order directional derivatives of every objective and every
/// active constraint (best effort; failures are recorded in the status).
struct DirectionAnalysis {
  Vec d;
  bool critical = false;
  Vec f_slopes;                     // grad f_j(x) d
  Vec g_slopes;                     // grad g_i(x) d, aligned with ctx.active
  std::vector<std::size_t> J;       // objective indices
  std::vector<std::size_t> K;       // constraint indices, subset of ctx.active
  std::vector<SecondDirDeriv> f_dd;  // one per objective
  std::vector<SecondDirDeriv> g_dd;  // aligned with ctx.active
  StepGrid grid;

  /// Position of constraint `i` within ctx.active.
  std::size_t active_slot(const PointContext& ctx, std::size_t i) const;
  const SecondDirDeriv& g_dd_of(const PointContext& ctx, std::size_t i) const {
    return g_dd[active_slot(ctx, i)];
  }
};

DirectionAnalysis analyze_direction(const PointContext& ctx, Vec d, const StepGrid& grid = {});

/// grad f_j d <= crit_tol for all j and grad g_i d <= crit_tol on I(x).
bool is_critical(const PointContext& ctx, const Vec& d);

/// Up to n distinct unit critical directions: coordinate directions, vertices
/// of the critical cone cut by [-1,1]^s under random objectives (these sit on
/// faces, so J and K are usually nonempty), then Gaussian samples. Prefix
/// stable in n.
std::vector<Vec> sample_critical_directions(const PointContext& ctx, std::size_t n,
                                            std::uint64_t seed, const LPOptions& lp = {});

enum class Membership { yes, no, inconclusive };

const char* to_string(Membership m);

/// max over the tested constraints at one grid step.
struct GridValue {
  double t = 0.0;
  std::size_t index = 0;
  double value = 0.0;
};

struct MembershipWitness {
  std::optional<std::size_t> index;  // offending constraint
  std::optional<double> t;
  std::optional<double> value;
  Vec vector;
  std::vector<GridValue> trace;
  std::string note;
};

struct ConeMembership {
  Membership member = Membership::inconclusive;
  MembershipWitness witness;

  bool yes() const { return member == Membership::yes; }
  bool no() const { return member == Membership::no; }
};

/// z in B(x,d):  grad g_i(x) z + g_i''(x,d) <= b_tol for all i in K.
ConeMembership in_B(const PointContext& ctx, const DirectionAnalysis& da, const Vec& z);

/// z in A(x,d):  g_i(x + t d + t^2/2 z) <= 0 on the fine end of the grid for
/// all i in K. Zero-tolerance sign test; the verdict is read off the last
/// three grid steps (all nonpositive: yes, all positive: no).
ConeMembership in_A(const PointContext& ctx, const DirectionAnalysis& da, const Vec& z,
                    const StepGrid& grid = {});

/// d in L(x):  grad g_i(x) d <= crit_tol for all i in I(x).
ConeMembership in_linearizing_cone(const PointContext& ctx, const Vec& d);

/// d in Z(x):  x + t d feasible for all constraints on the fine end of the grid.
ConeMembership in_feasible_direction_cone(const PointContext& ctx, const Vec& d,
                                          const StepGrid& grid = {});

/// d in F:  grad f_j(x) d < -crit_tol for every objective.
ConeMembership in_descent_cone(const PointContext& ctx, const Vec& d);

struct TangentBudget {
  int steps = 20;
  double t0 = 0.1;
  double rho = 0.5;
  int search_evals = 200;
  /// Search radius at step t is min(0.5, radius_scale * cbrt(t)).
  double radius_scale = 1.0;

  void validate() const;
};

/// Best-effort test of d in T(S, x). For each grid step t_k a derivative-free
/// search looks for u_k within a shrinking ball around d minimizing
/// max_i g_i(x + t_k u_k)^+. Seeded; identical seeds give identical verdicts.
ConeMembership tangent_probe(const PointContext& ctx, const Vec& d, const TangentBudget& budget,
                             std::uint64_t seed);

/// d in cone(sampled_T), decided by the LP  alpha >= 0, sum alpha_k u_k = d.
/// Relative to the sample; an empty sample spans only {0}.
ConeMembership in_pseudotangent(const std::vector<Vec>& sampled_T, const Vec& d,
                                const LPOptions& opts = {});

}  // namespace sockkt
