#include <doctest.h>

#include <cmath>
#include <vector>

#include "polynomial.hpp"
#include "sockkt/deriv.hpp"
#include "sockkt/random.hpp"
#include "support.hpp"

using namespace sockkt;

namespace {

const std::vector<std::string> kXY = {"x1", "x2"};

SecondDirDeriv dd(const char* text, Vec x, Vec u, StepGrid grid = {}) {
  Expr h = parse(text, kXY);
  return second_dir_deriv(h, gradient(h, 2), x, u, grid);
}

SecondDirDeriv curve(const char* text, Vec x, Vec d, Vec z, StepGrid grid = {}) {
  Expr h = parse(text, kXY);
  return curve_second_deriv({x, d, z}, h, gradient(h, 2), grid);
}

}  // namespace

TEST_SUITE("deriv") {

TEST_CASE("second directional derivative examples") {
  auto cube = dd("x1^3", {0, 0}, {1, 0});
  REQUIRE(cube.converged());
  CHECK(std::fabs(*cube.value) <= 1e-8);

  auto sq = dd("x1^2", {0, 0}, {1, 0});
  REQUIRE(sq.converged());
  CHECK(*sq.value == 2.0);
  for (const auto& s : sq.trace) CHECK(s.q == 2.0);

  auto sp = dd("spow(x1, 1.5)", {0, 0}, {1, 0});
  CHECK(sp.status == DerivStatus::diverged);
  CHECK(!sp.value);
  // q_k = 2 t^-1/2 exactly
  for (const auto& s : sp.trace) CHECK(s.q == doctest::Approx(2.0 / std::sqrt(s.t)).epsilon(1e-9));
}

TEST_CASE("curve second derivative examples") {
  auto a = curve("x1^2", {0, 0}, {1, 0}, {0, 0});
  REQUIRE(a.converged());
  CHECK(*a.value == doctest::Approx(2.0).epsilon(1e-12));

  // (t + t^2/2)^3
  auto b = curve("x1^3", {0, 0}, {1, 0}, {1, 0});
  REQUIRE(b.converged());
  CHECK(std::fabs(*b.value) <= 1e-8);

  // 0.25 t^4
  auto c = curve("x1^2 - x2", {0, 0}, {0, 0}, {1, 0});
  REQUIRE(c.converged());
  CHECK(std::fabs(*c.value) <= 1e-8);
}

TEST_CASE("negative divergence and oscillation") {
  auto neg = dd("-spow(x1, 1.5)", {0, 0}, {1, 0});
  CHECK(neg.status == DerivStatus::diverged);
  CHECK(neg.note.find("-infinity") != std::string::npos);

  // q(t) = 2 sin(1/t) does not settle
  StepGrid grid;
  auto osc = second_order_limit([](double t) { return t * t * std::sin(1.0 / t); }, 0.0, 0.0, grid);
  CHECK(osc.status != DerivStatus::converged);
  CHECK(!osc.value);
}

TEST_CASE("status invariants hold on the trace") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    auto p = testpoly::random_polynomial(rng, 2, 4, 4);
    Expr h = parse(p.text(), kXY);
    Vec x = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
    if (trial % 2 == 0) x = {0, 0};
    Vec u = random_unit(rng, 2);
    StepGrid grid;
    auto r = second_dir_deriv(h, gradient(h, 2), x, u, grid);
    if (r.converged()) {
      std::vector<double> usable;
      for (const auto& s : r.trace)
        if (!s.noisy) usable.push_back(s.q);
      if (usable.size() < 3)
        for (std::size_t k = 0; k < 3; ++k) usable.push_back(r.trace[k].q);
      std::size_t n = usable.size();
      double bound = grid.tol_rel * std::max(1.0, std::fabs(*r.value));
      CHECK(std::fabs(usable[n - 1] - usable[n - 2]) < bound);
      CHECK(std::fabs(usable[n - 1] - usable[n - 3]) < bound);
      CHECK(std::fabs(usable[n - 2] - usable[n - 3]) < bound);
      CHECK(std::fabs(*r.value - p.second(x, u)) <= 1e-5 * std::max(1.0, std::fabs(*r.value)));
    }
  }
}

TEST_CASE("richardson reaches polynomial oracle within 1e-8") {
  Rng rng(11);
  StepGrid grid;
  grid.richardson = true;
  for (int trial = 0; trial < 50; ++trial) {
    auto p = testpoly::random_polynomial(rng, 2, 4, 5);
    Expr h = parse(p.text(), kXY);
    Vec x = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
    Vec u = random_unit(rng, 2);
    auto r = second_dir_deriv(h, gradient(h, 2), x, u, grid);
    INFO(p.text());
    REQUIRE(r.converged());
    double exact = p.second(x, u);
    CHECK(std::fabs(*r.value - exact) <= 1e-8 * std::max(1.0, std::fabs(exact)));
  }
}

TEST_CASE("richardson does not mask divergence") {
  StepGrid grid;
  grid.richardson = true;
  CHECK(dd("spow(x1, 1.5)", {0, 0}, {1, 0}, grid).status == DerivStatus::diverged);
}

TEST_CASE("property: mean-value identity along curves") {
  Rng rng(3);
  int compared = 0;
  for (int trial = 0; trial < 400 && compared < 50; ++trial) {
    auto cases = fixtures::all();
    auto& c = cases[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(cases.size()) - 1))];
    const Problem& p = *c.problem;
    const std::size_t s = p.dimension();
    for (std::size_t i = 0; i < p.num_constraints(); ++i) {
      const Expr& g = p.constraint(i);
      const Gradient& gg = p.constraint_gradient(i);
      Vec grad = eval_gradient(gg, c.x);
      // direction in the null space of grad g
      Vec d = random_unit(rng, s);
      double gn = dot(grad, grad);
      if (gn > 0) d = axpy(d, -dot(grad, d) / gn, grad);
      if (std::fabs(dot(grad, d)) > 1e-12) continue;
      auto h2 = second_dir_deriv(g, gg, c.x, d, {});
      if (!h2.converged()) continue;
      Vec z = scaled(random_gaussian(rng, s), 2.0);
      auto phi = curve_second_deriv({c.x, d, z}, g, gg, {});
      if (!phi.converged()) continue;
      CHECK(std::fabs(*phi.value - (dot(grad, z) + *h2.value)) <= 1e-5);
      ++compared;
    }
  }
  CHECK(compared >= 50);
}

TEST_CASE("property: positive homogeneity of degree two") {
  Rng rng(8);
  int compared = 0;
  for (const auto& c : fixtures::all()) {
    const Problem& p = *c.problem;
    for (std::size_t i = 0; i < p.num_constraints(); ++i) {
      for (int trial = 0; trial < 10; ++trial) {
        Vec u = random_unit(rng, p.dimension());
        auto base = second_dir_deriv(p.constraint(i), p.constraint_gradient(i), c.x, u, {});
        if (!base.converged()) continue;
        for (double k : {2.0, 0.5}) {
          auto sc = second_dir_deriv(p.constraint(i), p.constraint_gradient(i), c.x, scaled(u, k), {});
          REQUIRE(sc.converged());
          CHECK(std::fabs(*sc.value - k * k * *base.value) <=
                1e-6 * std::max(1.0, std::fabs(k * k * *base.value)));
          ++compared;
        }
      }
    }
  }
  CHECK(compared > 20);
}

TEST_CASE("grid validation") {
  StepGrid g;
  g.rho = 1.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = {};
  g.steps = 2;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = {};
  g.t0 = -1;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

}  // TEST_SUITE
