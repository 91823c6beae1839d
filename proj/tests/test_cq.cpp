#include <doctest.h>

#include <cmath>

#include "sockkt/cq.hpp"
#include "sockkt/error.hpp"
#include "sockkt/gencvx.hpp"
#include "sockkt/random.hpp"
#include "support.hpp"

using namespace sockkt;

namespace {

PointContext at(std::shared_ptr<const Problem> p, Vec x) { return point_context(std::move(p), std::move(x)); }

CQOptions seeded(std::uint64_t seed) {
  CQOptions o;
  o.seed = seed;
  return o;
}

// Critical directions of a fixture: zero, coordinate axes and a few random
// ones projected onto the null space of the active gradients.
std::vector<Vec> critical_directions(const PointContext& ctx, Rng& rng) {
  const std::size_t s = ctx.dimension();
  std::vector<Vec> out{Vec(s, 0.0)};
  std::vector<Vec> raw;
  for (std::size_t k = 0; k < s; ++k) {
    Vec e(s, 0.0);
    e[k] = 1.0;
    raw.push_back(e);
    e[k] = -1.0;
    raw.push_back(e);
  }
  for (int k = 0; k < 4; ++k) raw.push_back(random_unit(rng, s));
  for (const auto& d : raw) {
    auto da = analyze_direction(ctx, d);
    if (da.critical) out.push_back(d);
  }
  return out;
}

}  // namespace

TEST_SUITE("cq") {

TEST_CASE("zangwill examples") {
  auto half = at(fixtures::halfspace(), {0});
  CHECK(!check_zangwill(half).fails());

  auto cu = at(fixtures::cubic(), {0, 0});
  auto e = check_zangwill(cu);
  REQUIRE(e.fails());
  CHECK(*e.witness == Vec{1, 0});
  CHECK(e.name == cq_names::zangwill);

  auto in = at(fixtures::interior(), {1, 0});
  CHECK(!check_zangwill(in).fails());

  CHECK_THROWS_AS(check_zangwill(at(fixtures::parabola(), {1, 0})), std::invalid_argument);
}

TEST_CASE("second-order zangwill examples") {
  auto cu = at(fixtures::cubic(), {0, 0});
  auto e = check_so_zangwill(cu, analyze_direction(cu, {1, 0}));
  REQUIRE(e.fails());
  CHECK(*e.witness == Vec{1, 0});

  auto p2 = at(fixtures::parabola(), {0, 0});
  auto e2 = check_so_zangwill(p2, analyze_direction(p2, {0, 0}));
  CHECK(!e2.fails());
  CHECK(e2.samples > 0);

  auto d1 = at(fixtures::d1(), {0, 0});
  CHECK(!check_so_zangwill(d1, analyze_direction(d1, {1, 0})).fails());

  CHECK_THROWS_AS(check_so_zangwill(d1, analyze_direction(d1, {0, 1})), std::invalid_argument);
}

TEST_CASE("abadie examples") {
  CHECK(!check_abadie(at(fixtures::parabola(), {0, 0})).fails());
  auto e = check_abadie(at(fixtures::cubic(), {0, 0}));
  REQUIRE(e.fails());
  CHECK(*e.witness == Vec{1, 0});
  CHECK(!check_abadie(at(fixtures::interior(), {1, 0})).fails());
  CHECK(check_abadie(at(fixtures::axes(), {0, 0})).fails());
}

TEST_CASE("guignard examples") {
  auto axes = at(fixtures::axes(), {0, 0});
  CHECK(!check_guignard(axes).fails());
  auto e = check_guignard(at(fixtures::cubic(), {0, 0}));
  REQUIRE(e.fails());
  CHECK(*e.witness == Vec{1, 0});
  CHECK(!check_guignard(at(fixtures::interior(), {1, 0})).fails());
}

TEST_CASE("sampled directions lie in the linearizing cone and are prefix stable") {
  for (const auto& c : fixtures::all()) {
    auto ctx = point_context(c.problem, c.x);
    if (!ctx.feasible) continue;
    auto small = sample_linearizing_directions(ctx, 8, 5, {});
    auto big = sample_linearizing_directions(ctx, 16, 5, {});
    REQUIRE(big.size() >= small.size());
    for (std::size_t k = 0; k < small.size(); ++k) CHECK(small[k] == big[k]);
    for (const auto& d : big) {
      CHECK(in_linearizing_cone(ctx, d).yes());
      CHECK(std::fabs(norm(d) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("property: abadie clean implies guignard clean") {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    for (const auto& c : fixtures::all()) {
      auto ctx = point_context(c.problem, c.x);
      auto a = check_abadie(ctx, seeded(seed));
      auto g = check_guignard(ctx, seeded(seed));
      INFO(c.problem->name(), " seed ", seed);
      if (!a.fails()) CHECK(!g.fails());
      // Zangwill clean implies Abadie clean too (cl Z in T in L).
      if (!check_zangwill(ctx, seeded(seed)).fails()) CHECK(!a.fails());
    }
  }
}

TEST_CASE("property: witnesses replay") {
  Rng rng(7);
  for (const auto& c : fixtures::all()) {
    auto ctx = point_context(c.problem, c.x);
    auto opts = seeded(11);

    auto z = check_zangwill(ctx, opts);
    if (z.fails()) {
      CHECK(in_linearizing_cone(ctx, *z.witness).yes());
      CHECK(in_feasible_direction_cone(ctx, *z.witness, opts.grid).no());
      auto again = check_zangwill(ctx, opts);
      CHECK(*again.witness == *z.witness);
    }

    auto a = check_abadie(ctx, opts);
    if (a.fails()) {
      CHECK(in_linearizing_cone(ctx, *a.witness).yes());
      CHECK(check_abadie(ctx, opts).witness == a.witness);
    }

    auto g = check_guignard(ctx, opts);
    if (g.fails()) {
      CHECK(in_linearizing_cone(ctx, *g.witness).yes());
      auto tangent = sample_tangent_cone(ctx, opts.samples, opts);
      std::vector<Vec> accepted;
      for (const auto& t : tangent)
        if (t.probe.yes()) accepted.push_back(t.d);
      CHECK(in_pseudotangent(accepted, *g.witness, opts.lp).no());
      CHECK(check_guignard(ctx, opts).witness == g.witness);
    }

    for (const auto& d : critical_directions(ctx, rng)) {
      auto da = analyze_direction(ctx, d);
      CQEntry so;
      try {
        so = check_so_zangwill(ctx, da, opts);
      } catch (const MissingDerivativeError&) {
        continue;
      }
      if (!so.fails()) continue;
      CHECK(in_B(ctx, da, *so.witness).yes());
      CHECK(in_A(ctx, da, *so.witness, da.grid).no());
      CHECK(check_so_zangwill(ctx, da, opts).witness == so.witness);
    }
  }
}

TEST_CASE("property: curves that pass the pseudoconcavity probe give a clean second-order zangwill") {
  Rng rng(21);
  int linked = 0;
  for (const auto& c : fixtures::all()) {
    auto ctx = point_context(c.problem, c.x);
    const Problem& p = *c.problem;
    for (const auto& d : critical_directions(ctx, rng)) {
      auto da = analyze_direction(ctx, d);
      if (da.K.empty()) continue;
      bool smooth = true;
      for (std::size_t i : da.K) smooth = smooth && da.g_dd_of(ctx, i).converged();
      if (!smooth) continue;
      bool all_pass = true;
      for (int k = 0; k < 40 && all_pass; ++k) {
        Vec z = scaled(random_gaussian(rng, ctx.dimension()), 2.0);
        if (k < 2 * static_cast<int>(ctx.dimension())) {
          z.assign(ctx.dimension(), 0.0);
          z[static_cast<std::size_t>(k) / 2] = k % 2 ? -1.0 : 1.0;
        }
        for (std::size_t i : da.K) {
          auto v = probe_solpc_right({ctx.x, d, z}, p.constraint(i), p.constraint_gradient(i));
          if (v.verdict != ConvexityOutcome::no_counterexample) all_pass = false;
        }
      }
      if (!all_pass) continue;
      INFO(p.name());
      CHECK(!check_so_zangwill(ctx, da).fails());
      ++linked;
    }
  }
  CHECK(linked >= 5);
}

}  // TEST_SUITE
