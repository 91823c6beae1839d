#include "sockkt/report.hpp"

#include <cmath>
#include <string>

namespace sockkt::report {

namespace {

// Non-finite values would become invalid JSON; they are written as null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <typename T>
Json opt(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, double>)
    return num(*v);
  else
    return Json(*v);
}

std::string label(char prefix, std::size_t i) { return prefix + std::to_string(i + 1); }

}  // namespace

Json vec(const Vec& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

Json labels(char prefix, const std::vector<std::size_t>& indices) {
  Json a = Json::array();
  for (std::size_t i : indices) a.push_back(label(prefix, i));
  return a;
}

Json problem(const Problem& p) {
  Json j;
  j["name"] = p.name();
  j["variables"] = p.variables();
  j["objectives"] = p.objective_text();
  j["constraints"] = p.constraint_text();
  return j;
}

Json tolerances(const Tolerances& t) {
  Json j;
  j["active_tol"] = t.active_tol;
  j["feas_tol"] = t.feas_tol;
  j["crit_tol"] = t.crit_tol;
  j["b_tol"] = t.b_tol;
  j["cert_tol"] = t.cert_tol;
  j["cert_margin"] = t.cert_margin;
  j["lp_tol"] = t.lp_tol;
  return j;
}

Json grid(const StepGrid& g) {
  Json j;
  j["t0"] = g.t0;
  j["rho"] = g.rho;
  j["steps"] = g.steps;
  j["tol_rel"] = g.tol_rel;
  j["richardson"] = g.richardson;
  return j;
}

Json tangent_budget(const TangentBudget& b) {
  Json j;
  j["steps"] = b.steps;
  j["t0"] = b.t0;
  j["rho"] = b.rho;
  j["search_evals"] = b.search_evals;
  j["radius_scale"] = b.radius_scale;
  return j;
}

Json derivative(const SecondDirDeriv& d, bool with_trace) {
  Json j;
  j["status"] = to_string(d.status);
  j["value"] = opt(d.value);
  if (d.converged()) j["spread"] = num(d.spread);
  if (!d.note.empty()) j["note"] = d.note;
  if (with_trace) {
    Json tr = Json::array();
    for (const auto& s : d.trace) tr.push_back(Json{{"t", num(s.t)}, {"q", num(s.q)}, {"noisy", s.noisy}});
    j["trace"] = std::move(tr);
  }
  return j;
}

Json membership(const ConeMembership& m) {
  Json j;
  j["member"] = to_string(m.member);
  const auto& w = m.witness;
  if (w.index) j["constraint"] = label('g', *w.index);
  if (w.t) j["t"] = num(*w.t);
  if (w.value) j["value"] = num(*w.value);
  if (!w.vector.empty()) j["vector"] = vec(w.vector);
  if (!w.trace.empty()) {
    Json tr = Json::array();
    for (const auto& g : w.trace)
      tr.push_back(Json{{"t", num(g.t)}, {"constraint", label('g', g.index)}, {"value", num(g.value)}});
    j["trace"] = std::move(tr);
  }
  if (!w.note.empty()) j["note"] = w.note;
  return j;
}

Json point(const PointContext& ctx) {
  Json j;
  j["x"] = vec(ctx.x);
  j["feasible"] = ctx.feasible;
  j["f_values"] = vec(ctx.f_values);
  j["g_values"] = vec(ctx.g_values);
  j["active"] = labels('g', ctx.active);
  Json gf = Json::array();
  for (const auto& g : ctx.grad_f) gf.push_back(vec(g));
  j["grad_f"] = std::move(gf);
  Json gg = Json::object();
  for (std::size_t k = 0; k < ctx.active.size(); ++k)
    gg[label('g', ctx.active[k])] = vec(ctx.grad_g_active[k]);
  j["grad_g_active"] = std::move(gg);
  return j;
}

Json direction(const PointContext& ctx, const DirectionAnalysis& da) {
  Json j;
  j["d"] = vec(da.d);
  j["critical"] = da.critical;
  j["J"] = labels('f', da.J);
  j["K"] = labels('g', da.K);
  Json fs = Json::object();
  for (std::size_t k = 0; k < da.f_dd.size(); ++k) {
    Json e = derivative(da.f_dd[k]);
    e["slope"] = num(da.f_slopes[k]);
    fs[label('f', k)] = std::move(e);
  }
  j["objectives"] = std::move(fs);
  Json gs = Json::object();
  for (std::size_t k = 0; k < da.g_dd.size(); ++k) {
    Json e = derivative(da.g_dd[k]);
    e["slope"] = num(da.g_slopes[k]);
    gs[label('g', ctx.active[k])] = std::move(e);
  }
  j["active_constraints"] = std::move(gs);
  return j;
}

Json cq_entry(const CQEntry& e) {
  Json j;
  j["name"] = e.name;
  j["verdict"] = to_string(e.verdict);
  j["witness"] = e.witness ? vec(*e.witness) : Json(nullptr);
  j["detail"] = e.detail;
  j["samples"] = e.samples;
  j["seed"] = e.seed;
  j["near_misses"] = e.near_misses;
  j["doubled"] = e.doubled;
  if (e.sanity_violations) j["sanity_violations"] = e.sanity_violations;
  return j;
}

Json multipliers(const MultiplierCertificate& m) {
  Json j;
  j["lambda"] = vec(m.lambda);
  j["mu"] = vec(m.mu);
  j["stationarity_residual"] = num(m.stationarity_residual);
  j["curvature"] = num(m.curvature);
  j["complementarity"] = num(m.complementarity);
  return j;
}

Json violation(const ViolationCertificate& v) {
  Json j;
  j["kind"] = to_string(v.kind);
  j["witness"] = vec(v.witness);
  if (v.v) j["v"] = num(*v.v);
  Json rows = Json::array();
  for (const auto& r : v.rows)
    rows.push_back(Json{{"row", r.label}, {"strict", r.strict}, {"value", num(r.value)}});
  j["rows"] = std::move(rows);
  return j;
}

Json primal(const PrimalResult& r) {
  Json j;
  j["status"] = to_string(r.status);
  if (r.violation) j["violation"] = violation(*r.violation);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json system(const SystemResult& r) {
  Json j;
  j["solvable"] = r.solvable;
  if (r.witness) j["witness"] = violation(*r.witness);
  return j;
}

Json verdict(const DirectionVerdict& v) {
  Json j;
  j["verdict"] = to_string(v.verdict);
  j["reasons"] = v.reasons;
  j["primal_condition"] = primal(v.primal);
  j["curvature_system"] = v.curvature_system ? system(*v.curvature_system) : Json(nullptr);
  j["first_order_system"] = v.first_order_system ? system(*v.first_order_system) : Json(nullptr);
  j["multipliers"] = v.multipliers ? multipliers(*v.multipliers) : Json(nullptr);
  j["violation"] = v.violation ? violation(*v.violation) : Json(nullptr);
  return j;
}

Json convexity(const ConvexityVerdict& v) {
  Json j;
  j["property"] = v.property;
  j["verdict"] = to_string(v.verdict);
  j["y"] = v.y ? vec(*v.y) : Json(nullptr);
  j["h_x"] = opt(v.h_x);
  j["h_y"] = opt(v.h_y);
  j["gradient_term"] = opt(v.gradient_term);
  j["second"] = opt(v.second);
  if (!v.curve.empty()) {
    Json c = Json::array();
    for (const auto& [t, dphi] : v.curve) c.push_back(Json{{"t", num(t)}, {"dphi", num(dphi)}});
    j["curve"] = std::move(c);
  }
  j["delta"] = opt(v.delta);
  j["detail"] = v.detail;
  j["samples"] = v.samples;
  j["excluded"] = v.excluded;
  j["seed"] = v.seed;
  return j;
}

}  // namespace sockkt::report
