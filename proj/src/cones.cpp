#include "sockkt/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "sockkt/error.hpp"
#include "sockkt/random.hpp"

namespace sockkt {

namespace {

constexpr std::size_t kTail = 3;

void check_dim(const PointContext& ctx, const Vec& v, const char* what) {
  if (v.size() != ctx.dimension())
    throw std::invalid_argument(std::string(what) + ": expected a vector of length " +
                                std::to_string(ctx.dimension()));
}

// Verdict from the fine end of a grid trace: yes if the last kTail values are
// all <= 0, no if they are all > 0.
ConeMembership tail_verdict(std::vector<GridValue> trace) {
  ConeMembership m;
  std::size_t n = trace.size();
  std::size_t k = std::min(kTail, n);
  bool all_nonpos = n > 0, all_pos = n > 0;
  for (std::size_t i = n - k; i < n; ++i) {
    if (trace[i].value > 0.0)
      all_nonpos = false;
    else
      all_pos = false;
  }
  if (all_nonpos) {
    m.member = Membership::yes;
  } else if (all_pos) {
    m.member = Membership::no;
    m.witness.index = trace.back().index;
    m.witness.t = trace.back().t;
    m.witness.value = trace.back().value;
  } else {
    m.member = Membership::inconclusive;
    m.witness.note = "sign of the constraint values is not stable on the grid tail";
  }
  m.witness.trace = std::move(trace);
  return m;
}

}  // namespace

PointContext point_context(std::shared_ptr<const Problem> problem, Vec x, const Tolerances& tol) {
  if (!problem) throw std::invalid_argument("point_context: null problem");
  if (x.size() != problem->dimension())
    throw std::invalid_argument("point_context: point has length " + std::to_string(x.size()) +
                                ", problem dimension is " + std::to_string(problem->dimension()));
  PointContext ctx;
  ctx.problem = problem;
  ctx.x = std::move(x);
  ctx.tol = tol;
  ctx.feasible = true;
  for (std::size_t j = 0; j < problem->num_objectives(); ++j) {
    ctx.f_values.push_back(problem->objective(j).eval(ctx.x));
    ctx.grad_f.push_back(eval_gradient(problem->objective_gradient(j), ctx.x));
  }
  for (std::size_t i = 0; i < problem->num_constraints(); ++i) {
    double g = problem->constraint(i).eval(ctx.x);
    ctx.g_values.push_back(g);
    if (g > tol.feas_tol) ctx.feasible = false;
    if (std::fabs(g) <= tol.active_tol) {
      ctx.active.push_back(i);
      ctx.grad_g_active.push_back(eval_gradient(problem->constraint_gradient(i), ctx.x));
    }
  }
  return ctx;
}

std::size_t DirectionAnalysis::active_slot(const PointContext& ctx, std::size_t i) const {
  auto it = std::find(ctx.active.begin(), ctx.active.end(), i);
  if (it == ctx.active.end())
    throw std::out_of_range("constraint g" + std::to_string(i + 1) + " is not active");
  return static_cast<std::size_t>(it - ctx.active.begin());
}

DirectionAnalysis analyze_direction(const PointContext& ctx, Vec d, const StepGrid& grid) {
  check_dim(ctx, d, "analyze_direction");
  const Problem& p = *ctx.problem;
  const double tol = ctx.tol.crit_tol;
  DirectionAnalysis da;
  da.d = std::move(d);
  da.grid = grid;
  da.critical = true;

  auto second = [&](const Expr& h, const Gradient& g) {
    try {
      return second_dir_deriv(h, g, ctx.x, da.d, grid);
    } catch (const EvalError& e) {
      SecondDirDeriv r;
      r.status = DerivStatus::inconclusive;
      r.note = std::string("evaluation failed: ") + e.what();
      return r;
    }
  };

  for (std::size_t j = 0; j < ctx.num_objectives(); ++j) {
    double s = dot(ctx.grad_f[j], da.d);
    da.f_slopes.push_back(s);
    if (s > tol) da.critical = false;
    if (std::fabs(s) <= tol) da.J.push_back(j);
    da.f_dd.push_back(second(p.objective(j), p.objective_gradient(j)));
  }
  for (std::size_t k = 0; k < ctx.active.size(); ++k) {
    std::size_t i = ctx.active[k];
    double s = dot(ctx.grad_g_active[k], da.d);
    da.g_slopes.push_back(s);
    if (s > tol) da.critical = false;
    if (std::fabs(s) <= tol) da.K.push_back(i);
    da.g_dd.push_back(second(p.constraint(i), p.constraint_gradient(i)));
  }
  return da;
}

bool is_critical(const PointContext& ctx, const Vec& d) {
  check_dim(ctx, d, "is_critical");
  for (const auto& g : ctx.grad_f)
    if (dot(g, d) > ctx.tol.crit_tol) return false;
  for (const auto& g : ctx.grad_g_active)
    if (dot(g, d) > ctx.tol.crit_tol) return false;
  return true;
}

std::vector<Vec> sample_critical_directions(const PointContext& ctx, std::size_t n,
                                            std::uint64_t seed, const LPOptions& lp_opts) {
  const std::size_t s = ctx.dimension();
  std::vector<Vec> out;
  auto offer = [&](const Vec& v) {
    double len = norm(v);
    if (out.size() >= n || len <= 1e-12) return;
    Vec u = scaled(v, 1.0 / len);
    if (!is_critical(ctx, u)) return;
    for (const auto& o : out)
      if (norm(axpy(o, -1.0, u)) <= 1e-9) return;
    out.push_back(std::move(u));
  };

  for (std::size_t k = 0; k < s; ++k) {
    Vec e(s, 0.0);
    e[k] = 1.0;
    offer(e);
    e[k] = -1.0;
    offer(e);
  }

  std::vector<Vec> rows = ctx.grad_f;
  rows.insert(rows.end(), ctx.grad_g_active.begin(), ctx.grad_g_active.end());
  Rng vr(derive_seed(seed, 1));
  for (std::size_t v = 0; v < 2 * (s + rows.size()) && out.size() < n; ++v) {
    LinearProgram lp(s, LPSense::maximize, LPBound::free);
    lp.objective = random_gaussian(vr, s);
    for (const auto& r : rows) lp.add_row(r, LPRelation::le, 0.0);
    for (std::size_t k = 0; k < s; ++k) {
      Vec e(s, 0.0);
      e[k] = 1.0;
      lp.add_row(e, LPRelation::le, 1.0);
      lp.add_row(e, LPRelation::ge, -1.0);
    }
    LPOutcome o = solve(lp, lp_opts);
    if (o.status == LPStatus::optimal) offer(o.solution);
  }

  Rng gr(derive_seed(seed, 2));
  const std::size_t attempts = std::max<std::size_t>(1000, 200 * n);
  for (std::size_t a = 0; a < attempts && out.size() < n; ++a) offer(random_unit(gr, s));
  return out;
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::yes: return "yes";
    case Membership::no: return "no";
    case Membership::inconclusive: return "inconclusive";
  }
  return "?";
}

ConeMembership in_B(const PointContext& ctx, const DirectionAnalysis& da, const Vec& z) {
  check_dim(ctx, z, "in_B");
  ConeMembership m;
  m.member = Membership::yes;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i : da.K) {
    std::size_t slot = da.active_slot(ctx, i);
    const auto& dd = da.g_dd[slot];
    if (!dd.converged()) {
      m.member = Membership::inconclusive;
      m.witness.index = i;
      m.witness.note = std::string("g") + std::to_string(i + 1) + "'' is " + to_string(dd.status);
      return m;
    }
    double v = dot(ctx.grad_g_active[slot], z) + *dd.value;
    // g'' is only known up to its tail spread.
    if (v > ctx.tol.b_tol + dd.spread && v > worst) {
      worst = v;
      m.member = Membership::no;
      m.witness.index = i;
      m.witness.value = v;
    }
  }
  return m;
}

ConeMembership in_A(const PointContext& ctx, const DirectionAnalysis& da, const Vec& z,
                    const StepGrid& grid) {
  check_dim(ctx, z, "in_A");
  grid.validate();
  if (da.K.empty()) return {Membership::yes, {}};
  const Problem& p = *ctx.problem;
  CurveProbe curve{ctx.x, da.d, z};
  std::vector<GridValue> trace;
  try {
    for (int k = 0; k < grid.steps; ++k) {
      double t = grid.t(k);
      Vec y = curve.at(t);
      GridValue gv{t, da.K.front(), -std::numeric_limits<double>::infinity()};
      for (std::size_t i : da.K) {
        double v = p.constraint(i).eval(y);
        if (v > gv.value) gv = {t, i, v};
      }
      trace.push_back(gv);
    }
  } catch (const EvalError& e) {
    ConeMembership m;
    m.witness.note = std::string("evaluation failed: ") + e.what();
    m.witness.trace = std::move(trace);
    return m;
  }
  return tail_verdict(std::move(trace));
}

ConeMembership in_linearizing_cone(const PointContext& ctx, const Vec& d) {
  check_dim(ctx, d, "in_linearizing_cone");
  ConeMembership m;
  m.member = Membership::yes;
  double worst = ctx.tol.crit_tol;
  for (std::size_t k = 0; k < ctx.active.size(); ++k) {
    double v = dot(ctx.grad_g_active[k], d);
    if (v > worst) {
      worst = v;
      m.member = Membership::no;
      m.witness.index = ctx.active[k];
      m.witness.value = v;
    }
  }
  return m;
}

ConeMembership in_feasible_direction_cone(const PointContext& ctx, const Vec& d,
                                          const StepGrid& grid) {
  check_dim(ctx, d, "in_feasible_direction_cone");
  grid.validate();
  const Problem& p = *ctx.problem;
  if (p.num_constraints() == 0) return {Membership::yes, {}};
  if (is_zero(d)) {
    ConeMembership m;
    m.member = ctx.feasible ? Membership::yes : Membership::no;
    if (!ctx.feasible) m.witness.note = "base point is infeasible";
    return m;
  }
  std::vector<GridValue> trace;
  try {
    for (int k = 0; k < grid.steps; ++k) {
      double t = grid.t(k);
      Vec y = axpy(ctx.x, t, d);
      GridValue gv{t, 0, -std::numeric_limits<double>::infinity()};
      for (std::size_t i = 0; i < p.num_constraints(); ++i) {
        double v = p.constraint(i).eval(y);
        if (v > gv.value) gv = {t, i, v};
      }
      trace.push_back(gv);
    }
  } catch (const EvalError& e) {
    ConeMembership m;
    m.witness.note = std::string("evaluation failed: ") + e.what();
    m.witness.trace = std::move(trace);
    return m;
  }
  return tail_verdict(std::move(trace));
}

ConeMembership in_descent_cone(const PointContext& ctx, const Vec& d) {
  check_dim(ctx, d, "in_descent_cone");
  ConeMembership m;
  m.member = Membership::yes;
  for (std::size_t j = 0; j < ctx.num_objectives(); ++j) {
    double v = dot(ctx.grad_f[j], d);
    if (v >= -ctx.tol.crit_tol) {
      m.member = Membership::no;
      m.witness.index = j;
      m.witness.value = v;
      return m;
    }
  }
  return m;
}

void TangentBudget::validate() const {
  if (steps < 3) throw std::invalid_argument("tangent budget: at least 3 steps required");
  if (!(t0 > 0.0) || !(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("tangent budget: need t0 > 0 and rho in (0,1)");
  if (search_evals < 1) throw std::invalid_argument("tangent budget: search_evals must be >= 1");
  if (!(radius_scale > 0.0)) throw std::invalid_argument("tangent budget: radius_scale must be > 0");
}

ConeMembership tangent_probe(const PointContext& ctx, const Vec& d, const TangentBudget& budget,
                             std::uint64_t seed) {
  check_dim(ctx, d, "tangent_probe");
  budget.validate();
  const Problem& p = *ctx.problem;
  const std::size_t s = ctx.dimension();
  if (p.num_constraints() == 0) return {Membership::yes, {}};
  Rng rng(seed);

  std::vector<GridValue> trace;  // value = best infeasibility found at t
  Vec last_u = d;
  for (int k = 0; k < budget.steps; ++k) {
    const double t = budget.t0 * std::pow(budget.rho, k);
    // Shrinks slower than sqrt(t) so that C^1 boundaries like t^1.5 stay reachable.
    const double radius = std::min(0.5, budget.radius_scale * std::cbrt(t));
    int evals = 0;
    auto infeas = [&](const Vec& u) {
      ++evals;
      try {
        return std::max(0.0, p.max_constraint(axpy(ctx.x, t, u)));
      } catch (const EvalError&) {
        return std::numeric_limits<double>::infinity();
      }
    };

    Vec best = d;
    double best_val = infeas(best);
    const int random_evals = budget.search_evals / 2;
    while (best_val > 0.0 && evals < random_evals) {
      Vec cand = axpy(d, radius, random_in_ball(rng, s));
      double v = infeas(cand);
      if (v < best_val) best_val = v, best = std::move(cand);
    }
    // Compass refinement around the best point, staying inside the ball.
    double step = radius / 2.0;
    while (best_val > 0.0 && evals < budget.search_evals && step > radius * 1e-6) {
      bool improved = false;
      for (std::size_t c = 0; c < s && evals < budget.search_evals && best_val > 0.0; ++c) {
        for (double sign : {1.0, -1.0}) {
          Vec cand = best;
          cand[c] += sign * step;
          Vec off = axpy(cand, -1.0, d);
          if (norm(off) > radius) continue;
          double v = infeas(cand);
          if (v < best_val) {
            best_val = v;
            best = std::move(cand);
            improved = true;
            break;
          }
        }
      }
      if (!improved) step /= 2.0;
    }
    trace.push_back({t, 0, best_val});
    last_u = best;
  }

  ConeMembership m = tail_verdict(trace);
  m.witness.vector = last_u;
  if (m.member == Membership::no)
    m.witness.note = "every searched u near d is infeasible on the grid tail";
  return m;
}

ConeMembership in_pseudotangent(const std::vector<Vec>& sampled_T, const Vec& d,
                                const LPOptions& opts) {
  ConeMembership m;
  if (sampled_T.empty()) {
    m.member = is_zero(d) ? Membership::yes : Membership::no;
    m.witness.note = "empty tangent sample";
    return m;
  }
  const std::size_t s = d.size();
  LinearProgram lp(sampled_T.size(), LPSense::minimize, LPBound::nonneg);
  for (std::size_t i = 0; i < s; ++i) {
    Vec row(sampled_T.size());
    for (std::size_t k = 0; k < sampled_T.size(); ++k) {
      if (sampled_T[k].size() != s) throw std::invalid_argument("in_pseudotangent: ragged sample");
      row[k] = sampled_T[k][i];
    }
    lp.add_row(std::move(row), LPRelation::eq, d[i]);
  }
  LPOutcome o = solve(lp, opts);
  if (o.status == LPStatus::optimal) {
    m.member = Membership::yes;
    m.witness.vector = o.solution;  // conic weights
  } else {
    m.member = Membership::no;
    m.witness.vector = d;
    std::ostringstream os;
    os << "not a conic combination of " << sampled_T.size() << " sampled tangent directions";
    m.witness.note = os.str();
  }
  return m;
}

}  // namespace sockkt
