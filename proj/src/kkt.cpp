#include "sockkt/kkt.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sockkt/error.hpp"

namespace sockkt {

namespace {

std::string f_label(std::size_t j) { return "f" + std::to_string(j + 1); }
std::string g_label(std::size_t i) { return "g" + std::to_string(i + 1); }

void require_critical(const DirectionAnalysis& da, const char* who) {
  if (!da.critical) throw std::invalid_argument(std::string(who) + ": direction is not critical");
}

// Second derivatives of every objective and every active constraint.
struct Curvatures {
  Vec f;
  Vec g;  // aligned with ctx.active
};

Curvatures all_curvatures(const PointContext& ctx, const DirectionAnalysis& da) {
  Curvatures c;
  std::vector<std::string> missing;
  for (std::size_t j = 0; j < da.f_dd.size(); ++j) {
    if (da.f_dd[j].converged())
      c.f.push_back(*da.f_dd[j].value);
    else
      missing.push_back(f_label(j) + " (" + to_string(da.f_dd[j].status) + ")");
  }
  for (std::size_t k = 0; k < da.g_dd.size(); ++k) {
    if (da.g_dd[k].converged())
      c.g.push_back(*da.g_dd[k].value);
    else
      missing.push_back(g_label(ctx.active[k]) + " (" + to_string(da.g_dd[k].status) + ")");
  }
  if (!missing.empty()) {
    std::string msg = "second-order directional derivative unavailable for";
    for (std::size_t k = 0; k < missing.size(); ++k) msg += (k ? ", " : " ") + missing[k];
    throw MissingDerivativeError(msg);
  }
  return c;
}

Vec with_last(const Vec& a, double last) {
  Vec r = a;
  r.push_back(last);
  return r;
}

}  // namespace

const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::primal_z: return "primal_z";
    case ViolationKind::curvature_system: return "curvature_system";
    case ViolationKind::first_order_system: return "first_order_system";
  }
  return "?";
}

const char* to_string(PrimalStatus s) {
  switch (s) {
    case PrimalStatus::holds: return "holds";
    case PrimalStatus::violated: return "violated";
    case PrimalStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::certified: return "CERTIFIED";
    case Verdict::refuted: return "REFUTED";
    case Verdict::undecided: return "UNDECIDED";
  }
  return "?";
}

bool ViolationCertificate::verifies(double tol, double margin) const {
  for (const auto& r : rows) {
    if (!std::isfinite(r.value)) return false;
    if (r.strict ? r.value > -margin : r.value > tol) return false;
  }
  return true;
}

PrimalResult primal_condition(const PointContext& ctx, const DirectionAnalysis& da,
                              const LPOptions& opts) {
  require_critical(da, "primal_condition");
  PrimalResult res;
  const std::size_t s = ctx.dimension();

  for (std::size_t j : da.J) {
    if (!da.f_dd[j].converged()) {
      res.note = f_label(j) + "'' is " + to_string(da.f_dd[j].status);
      return res;
    }
  }
  for (std::size_t i : da.K) {
    const auto& dd = da.g_dd_of(ctx, i);
    if (!dd.converged()) {
      res.note = g_label(i) + "'' is " + to_string(dd.status);
      return res;
    }
  }
  if (da.J.empty()) {
    res.note = "J(x,d) is empty: the system has no strict inequality";
    return res;
  }

  auto certificate = [&](const Vec& z) {
    ViolationCertificate c;
    c.kind = ViolationKind::primal_z;
    c.witness = z;
    for (std::size_t j : da.J)
      c.rows.push_back({f_label(j), true, dot(ctx.grad_f[j], z) + *da.f_dd[j].value});
    for (std::size_t i : da.K) {
      std::size_t slot = da.active_slot(ctx, i);
      c.rows.push_back({g_label(i), false, dot(ctx.grad_g_active[slot], z) + *da.g_dd[slot].value});
    }
    return c;
  };

  ViolationCertificate zero = certificate(Vec(s, 0.0));
  if (zero.verifies(ctx.tol.cert_tol, ctx.tol.cert_margin)) {
    res.status = PrimalStatus::violated;
    res.violation = std::move(zero);
    return res;
  }

  // Homogenize the affine system with tau > 0 and read z = w / tau.
  StrictSystem sys;
  sys.num_vars = s + 1;
  for (std::size_t j : da.J) sys.strict_rows.push_back(with_last(ctx.grad_f[j], *da.f_dd[j].value));
  for (std::size_t i : da.K) {
    std::size_t slot = da.active_slot(ctx, i);
    sys.weak_rows.push_back(with_last(ctx.grad_g_active[slot], *da.g_dd[slot].value));
  }
  sys.strict_vars = {s};
  LPOptions o = opts;
  o.tol = ctx.tol.lp_tol;
  StrictSolution sol = strict_system_solvable(sys, o);
  if (!sol.solvable) {
    res.status = PrimalStatus::holds;
    return res;
  }
  const double tau = sol.witness[s];
  Vec z(sol.witness.begin(), sol.witness.begin() + static_cast<std::ptrdiff_t>(s));
  for (double& zi : z) zi /= tau;
  ViolationCertificate c = certificate(z);
  if (!c.verifies(ctx.tol.cert_tol, ctx.tol.cert_margin)) {
    res.note = "LP witness fails the certificate margins";
    res.violation = std::move(c);
    return res;
  }
  res.status = PrimalStatus::violated;
  res.violation = std::move(c);
  return res;
}

SystemResult curvature_system_solvable(const PointContext& ctx, const DirectionAnalysis& da,
                                       const LPOptions& opts) {
  require_critical(da, "curvature_system_solvable");
  Curvatures c = all_curvatures(ctx, da);
  const std::size_t s = ctx.dimension();
  StrictSystem sys;
  sys.num_vars = s + 1;
  for (std::size_t j = 0; j < ctx.num_objectives(); ++j)
    sys.strict_rows.push_back(with_last(ctx.grad_f[j], c.f[j]));
  for (std::size_t k = 0; k < ctx.active.size(); ++k)
    sys.weak_rows.push_back(with_last(ctx.grad_g_active[k], c.g[k]));
  sys.strict_vars = {s};
  LPOptions o = opts;
  o.tol = ctx.tol.lp_tol;
  StrictSolution sol = strict_system_solvable(sys, o);
  SystemResult r;
  r.solvable = sol.solvable;
  if (sol.solvable) {
    ViolationCertificate cert;
    cert.kind = ViolationKind::curvature_system;
    const double v = sol.witness[s];
    cert.witness.assign(sol.witness.begin(), sol.witness.begin() + static_cast<std::ptrdiff_t>(s));
    cert.v = v;
    for (std::size_t j = 0; j < ctx.num_objectives(); ++j)
      cert.rows.push_back({f_label(j), true, dot(ctx.grad_f[j], cert.witness) + v * c.f[j]});
    for (std::size_t k = 0; k < ctx.active.size(); ++k)
      cert.rows.push_back(
          {g_label(ctx.active[k]), false, dot(ctx.grad_g_active[k], cert.witness) + v * c.g[k]});
    cert.rows.push_back({"v", true, -v});
    r.witness = std::move(cert);
  }
  return r;
}

SystemResult first_order_system_solvable(const PointContext& ctx, const LPOptions& opts) {
  StrictSystem sys;
  sys.num_vars = ctx.dimension();
  sys.strict_rows = ctx.grad_f;
  sys.weak_rows = ctx.grad_g_active;
  LPOptions o = opts;
  o.tol = ctx.tol.lp_tol;
  StrictSolution sol = strict_system_solvable(sys, o);
  SystemResult r;
  r.solvable = sol.solvable;
  if (sol.solvable) {
    ViolationCertificate cert;
    cert.kind = ViolationKind::first_order_system;
    cert.witness = sol.witness;
    for (std::size_t j = 0; j < ctx.num_objectives(); ++j)
      cert.rows.push_back({f_label(j), true, dot(ctx.grad_f[j], cert.witness)});
    for (std::size_t k = 0; k < ctx.active.size(); ++k)
      cert.rows.push_back({g_label(ctx.active[k]), false, dot(ctx.grad_g_active[k], cert.witness)});
    r.witness = std::move(cert);
  }
  return r;
}

std::optional<MultiplierCertificate> find_multipliers(const PointContext& ctx,
                                                      const DirectionAnalysis& da,
                                                      const LPOptions& opts) {
  require_critical(da, "find_multipliers");
  Curvatures c = all_curvatures(ctx, da);
  const std::size_t s = ctx.dimension();
  const std::size_t n = ctx.num_objectives();
  const std::size_t a = ctx.active.size();

  LinearProgram lp(n + a, LPSense::minimize, LPBound::nonneg);
  for (std::size_t k = 0; k < s; ++k) {
    Vec row(n + a);
    for (std::size_t j = 0; j < n; ++j) row[j] = ctx.grad_f[j][k];
    for (std::size_t q = 0; q < a; ++q) row[n + q] = ctx.grad_g_active[q][k];
    lp.add_row(std::move(row), LPRelation::eq, 0.0);
  }
  Vec curv(n + a);
  for (std::size_t j = 0; j < n; ++j) curv[j] = c.f[j];
  for (std::size_t q = 0; q < a; ++q) curv[n + q] = c.g[q];
  lp.add_row(curv, LPRelation::ge, 0.0);
  Vec norm_row(n + a, 0.0);
  for (std::size_t j = 0; j < n; ++j) norm_row[j] = 1.0;
  lp.add_row(std::move(norm_row), LPRelation::eq, 1.0);

  LPOptions o = opts;
  o.tol = ctx.tol.lp_tol;
  LPOutcome out = solve(lp, o);
  if (out.status != LPStatus::optimal) return std::nullopt;

  MultiplierCertificate m;
  m.lambda.assign(out.solution.begin(), out.solution.begin() + static_cast<std::ptrdiff_t>(n));
  m.mu.assign(ctx.problem->num_constraints(), 0.0);
  for (std::size_t q = 0; q < a; ++q) m.mu[ctx.active[q]] = out.solution[n + q];

  Vec grad_l(s, 0.0);
  for (std::size_t j = 0; j < n; ++j) grad_l = axpy(grad_l, m.lambda[j], ctx.grad_f[j]);
  for (std::size_t q = 0; q < a; ++q) grad_l = axpy(grad_l, out.solution[n + q], ctx.grad_g_active[q]);
  m.stationarity_residual = norm(grad_l);
  m.curvature = dot(curv, out.solution);
  for (std::size_t i = 0; i < m.mu.size(); ++i)
    m.complementarity = std::max(m.complementarity, std::fabs(m.mu[i] * ctx.g_values[i]));

  if (m.stationarity_residual > ctx.tol.cert_tol || m.curvature < -ctx.tol.cert_tol) {
    std::ostringstream os;
    os << "multiplier LP solution fails verification (residual " << m.stationarity_residual
       << ", curvature " << m.curvature << ")";
    throw LpError(os.str());
  }
  return m;
}

LinearProgram descent_pair_lp(const PointContext& ctx, const DirectionAnalysis& da) {
  Curvatures c = all_curvatures(ctx, da);
  const std::size_t s = ctx.dimension();
  LinearProgram lp(s + 1, LPSense::maximize, LPBound::free);
  lp.bounds[s] = LPBound::nonneg;
  for (std::size_t j = 0; j < ctx.num_objectives(); ++j)
    lp.add_row(with_last(ctx.grad_f[j], c.f[j]), LPRelation::le, -1.0);
  for (std::size_t k = 0; k < ctx.active.size(); ++k)
    lp.add_row(with_last(ctx.grad_g_active[k], c.g[k]), LPRelation::le, 0.0);
  return lp;
}

LinearProgram multiplier_cone_lp(const PointContext& ctx, const DirectionAnalysis& da) {
  Curvatures c = all_curvatures(ctx, da);
  const std::size_t s = ctx.dimension();
  const std::size_t n = ctx.num_objectives();
  const std::size_t a = ctx.active.size();
  LinearProgram lp(n + a, LPSense::minimize, LPBound::nonneg);
  for (std::size_t j = 0; j < n; ++j) lp.objective[j] = -1.0;
  for (std::size_t k = 0; k < s; ++k) {
    Vec row(n + a);
    for (std::size_t j = 0; j < n; ++j) row[j] = ctx.grad_f[j][k];
    for (std::size_t q = 0; q < a; ++q) row[n + q] = ctx.grad_g_active[q][k];
    lp.add_row(std::move(row), LPRelation::eq, 0.0);
  }
  Vec curv(n + a);
  for (std::size_t j = 0; j < n; ++j) curv[j] = c.f[j];
  for (std::size_t q = 0; q < a; ++q) curv[n + q] = c.g[q];
  lp.add_row(std::move(curv), LPRelation::ge, 0.0);
  return lp;
}

DirectionVerdict certify_direction(const PointContext& ctx, const DirectionAnalysis& da,
                                   const CQReport* cq, const LPOptions& opts) {
  require_critical(da, "certify_direction");
  DirectionVerdict out;
  out.primal = primal_condition(ctx, da, opts);
  if (out.primal.status == PrimalStatus::inconclusive)
    out.reasons.push_back("primal condition inconclusive: " + out.primal.note);

  try {
    out.curvature_system = curvature_system_solvable(ctx, da, opts);
    out.multipliers = find_multipliers(ctx, da, opts);
  } catch (const MissingDerivativeError& e) {
    out.reasons.push_back(e.what());
  }
  out.first_order_system = first_order_system_solvable(ctx, opts);

  if (out.multipliers) {
    out.verdict = Verdict::certified;
    out.reasons.clear();
    return out;
  }

  // Which CQ entries are clean: present and without a failure witness.
  auto clean = [&](const char* name, std::string& why) {
    const CQEntry* e = cq ? cq->find(name) : nullptr;
    if (!e) {
      why = std::string(name) + " not checked";
      return false;
    }
    if (e->fails()) {
      why = std::string(name) + " fails";
      if (!e->detail.empty()) why += ": " + e->detail;
      return false;
    }
    return true;
  };

  std::optional<ViolationCertificate> second_order;
  if (out.primal.status == PrimalStatus::violated)
    second_order = out.primal.violation;
  else if (out.curvature_system && out.curvature_system->solvable)
    second_order = out.curvature_system->witness;

  if (second_order) {
    std::string why;
    if (clean(cq_names::so_zangwill, why)) {
      out.verdict = Verdict::refuted;
      out.violation = std::move(second_order);
      return out;
    }
    out.reasons.push_back(std::string("second-order violation found but ") + why);
  }

  if (out.first_order_system->solvable) {
    std::string why_a, why_g;
    bool ok = clean(cq_names::abadie, why_a);
    if (!ok && ctx.num_objectives() == 1) ok = clean(cq_names::guignard, why_g);
    if (ok) {
      out.verdict = Verdict::refuted;
      out.violation = out.first_order_system->witness;
      return out;
    }
    std::string why = why_a;
    if (!why_g.empty()) why += "; " + why_g;
    out.reasons.push_back("first-order violation found but " + why);
  }

  if (out.reasons.empty())
    out.reasons.push_back("no multipliers and no violation certificate");
  out.verdict = Verdict::undecided;
  return out;
}

}  // namespace sockkt
