#include "sockkt/cq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "sockkt/error.hpp"
#include "sockkt/random.hpp"

namespace sockkt {

namespace {

// Stream tags for derive_seed, so that the sample streams of different
// checks never overlap.
constexpr std::uint64_t kLpVertexStream = 1;
constexpr std::uint64_t kGaussianStream = 2;
constexpr std::uint64_t kJitterStream = 3;
constexpr std::uint64_t kTangentStream = 4;
constexpr std::uint64_t kBSampleStream = 5;

void require_feasible(const PointContext& ctx, const char* who) {
  if (!ctx.feasible) throw std::invalid_argument(std::string(who) + ": point is infeasible");
}

std::string vec_text(const Vec& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

bool near_duplicate(const std::vector<Vec>& pool, const Vec& v) {
  for (const auto& p : pool)
    if (norm(axpy(p, -1.0, v)) <= 1e-9 * std::max(1.0, norm(v))) return true;
  return false;
}

bool in_L(const PointContext& ctx, const Vec& d) { return in_linearizing_cone(ctx, d).yes(); }

Vec unit(const Vec& v) { return scaled(v, 1.0 / norm(v)); }

// Direction pointing into the interior of L: minus the sum of normalized
// nonzero active gradients. Zero when no active gradient is nonzero.
Vec interior_pull(const PointContext& ctx) {
  Vec p(ctx.dimension(), 0.0);
  for (const auto& g : ctx.grad_g_active) {
    double n = norm(g);
    if (n > 0.0) p = axpy(p, -1.0 / n, g);
  }
  return p;
}

// Neighbours of a unit direction d inside L: q random perturbations of size
// eta plus one step toward the interior of L.
std::vector<Vec> direction_jitter(const PointContext& ctx, const Vec& d, const CQOptions& opts,
                                  Rng& rng) {
  std::vector<Vec> out;
  const std::size_t s = ctx.dimension();
  for (int tries = 0; tries < 4 * opts.jitter_count &&
                      static_cast<int>(out.size()) < opts.jitter_count;
       ++tries) {
    Vec c = axpy(d, opts.jitter_radius, random_unit(rng, s));
    if (norm(c) > 0.0 && in_L(ctx, unit(c))) out.push_back(unit(c));
  }
  Vec pull = interior_pull(ctx);
  if (norm(pull) > 0.0) {
    Vec c = axpy(d, opts.jitter_radius / norm(pull), pull);
    if (norm(c) > 0.0) out.push_back(unit(c));
  }
  return out;
}

template <typename Run>
CQEntry with_doubling(const char* name, const CQOptions& opts, Run run) {
  if (opts.samples == 0) throw std::invalid_argument(std::string(name) + ": samples must be >= 1");
  CQEntry e = run(opts.samples);
  if (!e.fails() && e.near_misses > 0) {
    e = run(2 * opts.samples);
    e.doubled = true;
  }
  e.name = name;
  e.seed = opts.seed;
  return e;
}

}  // namespace

const char* to_string(CQVerdict v) {
  switch (v) {
    case CQVerdict::no_counterexample: return "no_counterexample";
    case CQVerdict::fails: return "fails";
  }
  return "?";
}

const CQEntry* CQReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

std::vector<Vec> sample_linearizing_directions(const PointContext& ctx, std::size_t n,
                                               std::uint64_t seed, const LPOptions& lp_opts) {
  const std::size_t s = ctx.dimension();
  std::vector<Vec> out;
  auto offer = [&](const Vec& v) {
    if (out.size() >= n || norm(v) <= 1e-12) return;
    Vec u = unit(v);
    if (in_L(ctx, u) && !near_duplicate(out, u)) out.push_back(std::move(u));
  };

  for (std::size_t k = 0; k < s; ++k) {
    Vec e(s, 0.0);
    e[k] = 1.0;
    offer(e);
    e[k] = -1.0;
    offer(e);
  }
  for (const auto& g : ctx.grad_g_active) offer(scaled(g, -1.0));

  // Vertices of L intersected with the box [-1,1]^s under random objectives.
  if (!ctx.active.empty()) {
    Rng rng(derive_seed(seed, kLpVertexStream));
    const std::size_t vertices = s + ctx.active.size();
    for (std::size_t v = 0; v < vertices && out.size() < n; ++v) {
      LinearProgram lp(s, LPSense::maximize, LPBound::free);
      lp.objective = random_gaussian(rng, s);
      for (const auto& g : ctx.grad_g_active) lp.add_row(g, LPRelation::le, 0.0);
      for (std::size_t k = 0; k < s; ++k) {
        Vec e(s, 0.0);
        e[k] = 1.0;
        lp.add_row(e, LPRelation::le, 1.0);
        lp.add_row(e, LPRelation::ge, -1.0);
      }
      LPOutcome o = solve(lp, lp_opts);
      if (o.status == LPStatus::optimal) offer(o.solution);
    }
  }

  Rng rng(derive_seed(seed, kGaussianStream));
  const std::size_t attempts = std::max<std::size_t>(1000, 200 * n);
  for (std::size_t a = 0; a < attempts && out.size() < n; ++a) offer(random_unit(rng, s));
  return out;
}

CQEntry check_zangwill(const PointContext& ctx, const CQOptions& opts) {
  require_feasible(ctx, "check_zangwill");
  return with_doubling(cq_names::zangwill, opts, [&](std::size_t n) {
    CQEntry e;
    if (ctx.active.empty()) {
      e.detail = "no active constraints: Z(x) = L(x) = R^s";
      return e;
    }
    std::vector<Vec> dirs = sample_linearizing_directions(ctx, n, opts.seed, opts.lp);
    e.samples = dirs.size();
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const Vec& d = dirs[k];
      ConeMembership m = in_feasible_direction_cone(ctx, d, opts.grid);
      if (m.yes()) continue;
      Rng rng(derive_seed(derive_seed(opts.seed, kJitterStream), k));
      bool rescued = false;
      for (const Vec& j : direction_jitter(ctx, d, opts, rng)) {
        if (in_feasible_direction_cone(ctx, j, opts.grid).yes()) {
          rescued = true;
          break;
        }
      }
      if (!rescued && m.no()) {
        e.verdict = CQVerdict::fails;
        e.witness = d;
        std::ostringstream os;
        os << "d = " << vec_text(d) << " lies in L(x) but x + t d is infeasible at t = "
           << *m.witness.t << " (g" << *m.witness.index + 1 << " = " << *m.witness.value
           << "), and so is every jittered neighbour";
        e.detail = os.str();
        return e;
      }
      ++e.near_misses;
    }
    return e;
  });
}

CQEntry check_so_zangwill(const PointContext& ctx, const DirectionAnalysis& da,
                          const CQOptions& opts) {
  require_feasible(ctx, "check_so_zangwill");
  if (!da.critical) throw std::invalid_argument("check_so_zangwill: direction is not critical");
  const std::size_t s = ctx.dimension();

  // B(x,d) = { z : a_i z + c_i <= 0, i in K }.
  Mat rows;
  Vec rhs, slack;
  for (std::size_t i : da.K) {
    const auto& dd = da.g_dd_of(ctx, i);
    if (!dd.converged())
      throw MissingDerivativeError("check_so_zangwill: g" + std::to_string(i + 1) + "'' is " +
                                   to_string(dd.status));
    rows.push_back(ctx.grad_g_active[da.active_slot(ctx, i)]);
    rhs.push_back(*dd.value);
    slack.push_back(ctx.tol.b_tol + dd.spread);
  }

  return with_doubling(cq_names::so_zangwill, opts, [&](std::size_t n) {
    CQEntry e;
    if (da.K.empty()) {
      e.detail = "K(x,d) is empty: A(x,d) = B(x,d) = R^s";
      return e;
    }

    // A point of B, interior when B has one: max sigma s.t. a_i z + c_i + sigma <= 0
    // over rows with a_i != 0, inside a box. Rows with a_i = 0 are constant.
    std::vector<std::size_t> live;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (norm(rows[r]) > 0.0)
        live.push_back(r);
      else if (rhs[r] > slack[r]) {
        e.detail = "B(x,d) is empty";
        return e;
      }
    }
    Vec z0(s, 0.0);
    if (!live.empty()) {
      const double box = 1e3 * std::max(1.0, norm_inf(rhs));
      LinearProgram lp(s + 1, LPSense::maximize, LPBound::free);
      lp.objective[s] = 1.0;
      for (std::size_t r : live) {
        Vec c = rows[r];
        c.push_back(1.0);
        lp.add_row(std::move(c), LPRelation::le, -rhs[r]);
      }
      for (std::size_t k = 0; k < s; ++k) {
        Vec c(s + 1, 0.0);
        c[k] = 1.0;
        lp.add_row(c, LPRelation::le, box);
        lp.add_row(c, LPRelation::ge, -box);
      }
      Vec cap(s + 1, 0.0);
      cap[s] = 1.0;
      lp.add_row(std::move(cap), LPRelation::le, 1.0);
      LPOutcome o = solve(lp, opts.lp);
      if (o.status != LPStatus::optimal) {
        e.detail = "B(x,d) is empty";
        return e;
      }
      z0.assign(o.solution.begin(), o.solution.begin() + static_cast<std::ptrdiff_t>(s));
    }

    auto in_b = [&](const Vec& z) { return in_B(ctx, da, z).yes(); };

    std::vector<Vec> cands;
    auto offer = [&](const Vec& z) {
      if (cands.size() < n && in_b(z) && !near_duplicate(cands, z)) cands.push_back(z);
    };
    for (std::size_t k = 0; k < s; ++k) {
      Vec u(s, 0.0);
      u[k] = 1.0;
      offer(u);
      u[k] = -1.0;
      offer(u);
    }
    offer(z0);
    for (std::size_t r : live) {
      double a2 = dot(rows[r], rows[r]);
      offer(axpy(z0, -(dot(rows[r], z0) + rhs[r]) / a2, rows[r]));
    }
    Rng rng(derive_seed(opts.seed, kBSampleStream));
    const double scale = std::max(1.0, norm(z0));
    for (std::size_t a = 0; a < 200 * n && cands.size() < n; ++a) {
      Vec dir = random_unit(rng, s);
      if (a % 2 == 0) {
        // Boundary point along a ray from z0.
        double tmax = std::numeric_limits<double>::infinity();
        for (std::size_t r : live) {
          double ar = dot(rows[r], dir);
          if (ar > 0.0) tmax = std::min(tmax, -(dot(rows[r], z0) + rhs[r]) / ar);
        }
        if (std::isfinite(tmax) && tmax >= 0.0) offer(axpy(z0, tmax, dir));
      } else {
        offer(axpy(z0, scale * std::fabs(normal(rng)), dir));
      }
    }

    e.samples = cands.size();
    for (std::size_t k = 0; k < cands.size(); ++k) {
      const Vec& z = cands[k];
      ConeMembership m = in_A(ctx, da, z, da.grid);
      if (m.yes()) continue;
      Rng jr(derive_seed(derive_seed(opts.seed, kJitterStream), k));
      const double eta = opts.jitter_radius * std::max(1.0, norm(z));
      std::vector<Vec> jit;
      for (int tries = 0; tries < 4 * opts.jitter_count &&
                          static_cast<int>(jit.size()) < opts.jitter_count;
           ++tries) {
        Vec c = axpy(z, eta, random_unit(jr, s));
        if (in_b(c)) jit.push_back(std::move(c));
      }
      Vec to_z0 = axpy(z0, -1.0, z);
      if (norm(to_z0) > 0.0) jit.push_back(axpy(z, eta / norm(to_z0), to_z0));
      bool rescued = false;
      for (const Vec& j : jit) {
        if (in_A(ctx, da, j, da.grid).yes()) {
          rescued = true;
          break;
        }
      }
      if (!rescued && m.no()) {
        e.verdict = CQVerdict::fails;
        e.witness = z;
        std::ostringstream os;
        os << "z = " << vec_text(z) << " lies in B(x,d) but g" << *m.witness.index + 1
           << "(x + t d + t^2/2 z) = " << *m.witness.value << " > 0 at t = " << *m.witness.t
           << ", and so for every jittered neighbour";
        e.detail = os.str();
        return e;
      }
      ++e.near_misses;
    }
    return e;
  });
}

std::vector<TangentSample> sample_tangent_cone(const PointContext& ctx, std::size_t n,
                                               const CQOptions& opts) {
  std::vector<TangentSample> out;
  std::vector<Vec> dirs = sample_linearizing_directions(ctx, n, opts.seed, opts.lp);
  const std::uint64_t base = derive_seed(opts.seed, kTangentStream);
  for (std::size_t k = 0; k < dirs.size(); ++k)
    out.push_back({dirs[k], tangent_probe(ctx, dirs[k], opts.tangent, derive_seed(base, k))});
  return out;
}

CQEntry check_abadie(const PointContext& ctx, const CQOptions& opts) {
  require_feasible(ctx, "check_abadie");
  return with_doubling(cq_names::abadie, opts, [&](std::size_t n) {
    CQEntry e;
    if (ctx.active.empty()) {
      e.detail = "no active constraints: T(S,x) = L(x) = R^s";
      return e;
    }
    std::vector<TangentSample> ts = sample_tangent_cone(ctx, n, opts);
    e.samples = ts.size();

    // T is contained in L: directions strictly outside L must not be accepted.
    const std::uint64_t base = derive_seed(opts.seed, kTangentStream);
    for (std::size_t k = 0; k < ctx.grad_g_active.size(); ++k) {
      const Vec& g = ctx.grad_g_active[k];
      if (norm(g) == 0.0) continue;
      if (tangent_probe(ctx, unit(g), opts.tangent, derive_seed(base, ~std::uint64_t{0} - k)).yes())
        ++e.sanity_violations;
    }

    for (const auto& t : ts) {
      if (t.probe.yes()) continue;
      if (t.probe.no()) {
        e.verdict = CQVerdict::fails;
        e.witness = t.d;
        std::ostringstream os;
        os << "d = " << vec_text(t.d) << " lies in L(x) but the tangent probe finds x + t u "
           << "infeasible for every searched u near d (infeasibility " << *t.probe.witness.value
           << " at t = " << *t.probe.witness.t << ")";
        e.detail = os.str();
        return e;
      }
      ++e.near_misses;
    }
    return e;
  });
}

CQEntry check_guignard(const PointContext& ctx, const CQOptions& opts) {
  require_feasible(ctx, "check_guignard");
  auto accepted = [](const std::vector<TangentSample>& ts) {
    std::vector<Vec> T;
    for (const auto& t : ts)
      if (t.probe.yes()) T.push_back(t.d);
    return T;
  };
  return with_doubling(cq_names::guignard, opts, [&](std::size_t n) {
    CQEntry e;
    if (ctx.active.empty()) {
      e.detail = "no active constraints: PT(S,x) = L(x) = R^s";
      return e;
    }
    std::vector<TangentSample> ts = sample_tangent_cone(ctx, n, opts);
    e.samples = ts.size();
    std::vector<Vec> T = accepted(ts);

    // Candidates: directions of L the probe places outside T.
    std::vector<Vec> cands;
    for (const auto& t : ts) {
      if (t.probe.yes()) continue;
      if (!t.probe.no()) {
        ++e.near_misses;
        continue;
      }
      if (!in_pseudotangent(T, t.d, opts.lp).yes()) cands.push_back(t.d);
    }
    if (cands.empty()) return e;

    // A witness must survive a doubled tangent sample.
    std::vector<Vec> T2 = accepted(sample_tangent_cone(ctx, 2 * n, opts));
    for (const Vec& d : cands) {
      if (in_pseudotangent(T2, d, opts.lp).yes()) {
        ++e.near_misses;
        continue;
      }
      e.verdict = CQVerdict::fails;
      e.witness = d;
      std::ostringstream os;
      os << "d = " << vec_text(d) << " lies in L(x) but is not a conic combination of the "
         << T2.size() << " accepted tangent directions";
      e.detail = os.str();
      return e;
    }
    return e;
  });
}

}  // namespace sockkt
