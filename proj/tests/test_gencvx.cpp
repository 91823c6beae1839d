#include <doctest.h>

#include <cmath>

#include "sockkt/gencvx.hpp"
#include "sockkt/random.hpp"
#include "support.hpp"

using namespace sockkt;

namespace {

const std::vector<std::string> kX = {"x1"};

struct Fn {
  Expr h;
  Gradient grad;
};

Fn fn(const char* text, const std::vector<std::string>& vars = kX) {
  Expr h = parse(text, vars);
  Gradient g = gradient(h, vars.size());
  return {std::move(h), std::move(g)};
}

// Direct re-evaluation of a point-pair witness.
void replay(const Fn& f, const Vec& x, const ConvexityVerdict& v, bool second_order,
            const ConvexityOptions& opts) {
  REQUIRE(v.y);
  const Vec& y = *v.y;
  double hx = f.h.eval(x), hy = f.h.eval(y);
  CHECK(hy == *v.h_y);
  CHECK(hy < hx - opts.margin);
  Vec dir = axpy(y, -1.0, x);
  double term = dot(eval_gradient(f.grad, x), dir);
  CHECK(term == *v.gradient_term);
  if (!second_order) {
    CHECK(term >= -opts.grad_tol);
    return;
  }
  if (term > opts.grad_tol) return;
  CHECK(std::fabs(term) <= opts.grad_tol);
  auto dd = second_dir_deriv(f.h, f.grad, x, dir, opts.grid);
  REQUIRE(dd.converged());
  CHECK(*dd.value == *v.second);
  CHECK(*dd.value >= -opts.grid.tol_rel * std::max(1.0, std::fabs(*dd.value)));
}

}  // namespace

TEST_SUITE("gencvx") {

TEST_CASE("pseudoconvex examples") {
  auto sq = fn("x1^2");
  CHECK(!probe_pseudoconvex(sq.h, sq.grad, {1}, Box::symmetric(1, 2)).fails());

  auto neg = fn("-x1^2");
  ConvexityOptions o;
  auto v = probe_pseudoconvex(neg.h, neg.grad, {0}, Box::symmetric(1), o);
  REQUIRE(v.fails());
  // First sample is x + half_width/2 e1.
  CHECK((*v.y)[0] == 0.5);
  CHECK(*v.h_y == -0.25);
  CHECK(*v.gradient_term == 0.0);
  replay(neg, {0}, v, false, o);

  auto c = fn("3");
  auto vc = probe_pseudoconvex(c.h, c.grad, {0.2}, Box::symmetric(1));
  CHECK(!vc.fails());
  CHECK(vc.samples == 256);
}

TEST_CASE("second-order pseudoconvex examples") {
  ConvexityOptions o;
  auto cube = fn("x1^3");
  auto v = probe_so_pseudoconvex(cube.h, cube.grad, {0}, Box::symmetric(1), o);
  REQUIRE(v.fails());
  CHECK((*v.y)[0] < 0.0);
  replay(cube, {0}, v, true, o);

  auto lin = fn("x1");
  CHECK(!probe_so_pseudoconvex(lin.h, lin.grad, {0}, Box::symmetric(1)).fails());

  auto quart = fn("-x1^4");
  auto vq = probe_so_pseudoconvex(quart.h, quart.grad, {0}, Box::symmetric(1), o);
  REQUIRE(vq.fails());
  CHECK((*vq.y)[0] != 0.0);
  CHECK(std::fabs(*vq.second) <= 1e-8);
  replay(quart, {0}, vq, true, o);
}

TEST_CASE("local pseudoconcavity examples") {
  auto cube = fn("x1^3", fixtures::kXY);
  auto v = probe_solpc_right({{0, 0}, {1, 0}, {0, 0}}, cube.h, cube.grad);
  REQUIRE(v.fails());
  CHECK(*v.gradient_term == 0.0);
  CHECK(std::fabs(*v.second) <= 1e-8);
  REQUIRE(v.delta);
  for (const auto& [t, dphi] : v.curve)
    if (t <= *v.delta) CHECK(dphi > 0.0);

  auto para = fn("x1^2 - x2", fixtures::kXY);
  CHECK(!probe_solpc_right({{0, 0}, {0, 0}, {0, 1}}, para.h, para.grad).fails());

  auto dec = fn("-x1", fixtures::kXY);
  CHECK(!probe_solpc_right({{0, 0}, {1, 0}, {0, 3}}, dec.h, dec.grad).fails());
  CHECK(!probe_solpc_right({{0, 0}, {1, 0}, {0, -2}}, dec.h, dec.grad).fails());

  // Positive tail with a positive curvature passes.
  CHECK(!probe_solpc_right({{0, 0}, {1, 0}, {0, 0}}, para.h, para.grad).fails());

  // spow: phi'' diverges, the probe cannot decide
  auto sp = fn("spow(x1, 1.5)", fixtures::kXY);
  auto vs = probe_solpc_right({{0, 0}, {1, 0}, {0, 0}}, sp.h, sp.grad);
  CHECK(vs.verdict == ConvexityOutcome::inconclusive);
}

TEST_CASE("samples are prefix stable and inside the box") {
  Box b{{-1, 0}, {2, 3}};
  auto small = convexity_samples({0.5, 2.9}, b, 10, 4);
  auto big = convexity_samples({0.5, 2.9}, b, 40, 4);
  REQUIRE(small.size() == 10);
  for (std::size_t k = 0; k < small.size(); ++k) CHECK(small[k] == big[k]);
  for (const auto& y : big)
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(y[i] >= b.lo[i]);
      CHECK(y[i] <= b.hi[i]);
    }
  CHECK_THROWS_AS((Box{{1}, {0}}.validate(1)), std::invalid_argument);
}

TEST_CASE("property: pseudoconvex implies second-order pseudoconvex") {
  // Corpus: fixture functions plus a few classic pseudoconvex ones.
  std::vector<std::pair<Fn, Vec>> corpus;
  for (const auto& c : fixtures::all()) {
    const Problem& p = *c.problem;
    for (std::size_t j = 0; j < p.num_objectives(); ++j)
      corpus.push_back({{p.objective(j), p.objective_gradient(j)}, c.x});
    for (std::size_t i = 0; i < p.num_constraints(); ++i)
      corpus.push_back({{p.constraint(i), p.constraint_gradient(i)}, c.x});
  }
  for (const char* text : {"x1 + x1^3", "exp(x1) + x2^2", "x1 / (x2^2 + 1) + x1^2", "x1^2 + x2^2"})
    corpus.push_back({fn(text, fixtures::kXY), {0.3, -0.2}});

  int pseudo = 0, so_fail = 0;
  for (std::uint64_t seed : {1u, 2u}) {
    for (const auto& [f, x] : corpus) {
      ConvexityOptions o;
      o.seed = seed;
      o.samples = 128;
      Box box = Box::symmetric(x.size());
      auto a = probe_pseudoconvex(f.h, f.grad, x, box, o);
      auto b = probe_so_pseudoconvex(f.h, f.grad, x, box, o);
      INFO(f.h.to_string(std::vector<std::string>{"x1", "x2"}));
      if (!a.fails()) {
        ++pseudo;
        CHECK(!b.fails());
      } else {
        replay(f, x, a, false, o);
      }
      if (b.fails()) {
        ++so_fail;
        replay(f, x, b, true, o);
      }
    }
  }
  CHECK(pseudo > 10);
  CHECK(so_fail > 0);
}

TEST_CASE("property: curve witnesses replay") {
  Rng rng(5);
  int fails = 0;
  for (const auto& c : fixtures::all()) {
    const Problem& p = *c.problem;
    const std::size_t s = p.dimension();
    for (std::size_t i = 0; i < p.num_constraints(); ++i) {
      for (int k = 0; k < 10; ++k) {
        Vec d = k == 0 ? Vec(s, 0.0) : random_unit(rng, s);
        Vec z = random_gaussian(rng, s);
        CurveProbe probe{c.x, d, z};
        auto v = probe_solpc_right(probe, p.constraint(i), p.constraint_gradient(i));
        auto again = probe_solpc_right(probe, p.constraint(i), p.constraint_gradient(i));
        CHECK(v.verdict == again.verdict);
        if (!v.fails()) continue;
        ++fails;
        double phi0 = p.constraint(i).eval(c.x);
        REQUIRE(v.delta);
        for (const auto& [t, dphi] : v.curve) {
          CHECK(p.constraint(i).eval(probe.at(t)) - phi0 == dphi);
          if (t <= *v.delta) CHECK(dphi > 0.0);
        }
        double slope = dot(eval_gradient(p.constraint_gradient(i), c.x), d);
        CHECK(slope == *v.gradient_term);
      }
    }
  }
  CHECK(fails > 0);
}

}  // TEST_SUITE
