#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sockkt/error.hpp"
#include "sockkt/lp.hpp"
#include "sockkt/random.hpp"

using namespace sockkt;

namespace {

double row_value(const LPRow& r, const Vec& x) { return dot(r.coeffs, x); }

void check_feasible(const LinearProgram& lp, const Vec& x, double tol) {
  REQUIRE(x.size() == lp.num_vars());
  for (const auto& r : lp.rows) {
    double v = row_value(r, x);
    switch (r.rel) {
      case LPRelation::le: CHECK(v <= r.rhs + tol); break;
      case LPRelation::ge: CHECK(v >= r.rhs - tol); break;
      case LPRelation::eq: CHECK(std::fabs(v - r.rhs) <= tol); break;
    }
  }
  for (std::size_t j = 0; j < x.size(); ++j)
    if (lp.bounds[j] == LPBound::nonneg) CHECK(x[j] >= -tol);
}

LinearProgram random_lp(Rng& rng) {
  std::size_t n = static_cast<std::size_t>(uniform_int(rng, 1, 4));
  std::size_t m = static_cast<std::size_t>(uniform_int(rng, 1, 4));
  LinearProgram lp(n, uniform01(rng) < 0.5 ? LPSense::minimize : LPSense::maximize);
  for (auto& b : lp.bounds) b = uniform01(rng) < 0.3 ? LPBound::free : LPBound::nonneg;
  for (auto& c : lp.objective) c = static_cast<double>(uniform_int(rng, -3, 3));
  for (std::size_t i = 0; i < m; ++i) {
    Vec a(n);
    for (auto& v : a) v = static_cast<double>(uniform_int(rng, -3, 3));
    auto rel = static_cast<LPRelation>(uniform_int(rng, 0, 2));
    lp.add_row(std::move(a), rel, static_cast<double>(uniform_int(rng, -4, 4)));
  }
  // A box keeps most instances bounded.
  for (std::size_t j = 0; j < n; ++j) {
    Vec e(n, 0.0);
    e[j] = 1.0;
    lp.add_row(e, LPRelation::le, 5.0);
    lp.add_row(e, LPRelation::ge, -5.0);
  }
  return lp;
}

}  // namespace

TEST_SUITE("lp") {

TEST_CASE("solve examples") {
  {
    // max 0 s.t. u <= -1, u free
    LinearProgram lp(1, LPSense::maximize, LPBound::free);
    lp.add_row({1.0}, LPRelation::le, -1.0);
    auto o = solve(lp);
    CHECK(o.status == LPStatus::optimal);
    CHECK(o.value == 0.0);
    check_feasible(lp, o.solution, 1e-9);
  }
  {
    LinearProgram lp(1, LPSense::maximize, LPBound::free);
    lp.add_row({1.0}, LPRelation::le, -1.0);
    lp.add_row({-1.0}, LPRelation::le, 0.0);
    CHECK(solve(lp).status == LPStatus::infeasible);
  }
  {
    // min -lambda, lambda >= 0
    LinearProgram lp(1, LPSense::minimize, LPBound::nonneg);
    lp.objective = {-1.0};
    auto o = solve(lp);
    REQUIRE(o.status == LPStatus::unbounded);
    REQUIRE(o.ray.size() == 1);
    CHECK(o.ray[0] > 0.0);
  }
}

TEST_CASE("textbook problem") {
  // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
  LinearProgram lp(2, LPSense::maximize);
  lp.objective = {3, 5};
  lp.add_row({1, 0}, LPRelation::le, 4);
  lp.add_row({0, 2}, LPRelation::le, 12);
  lp.add_row({3, 2}, LPRelation::le, 18);
  auto o = solve(lp);
  REQUIRE(o.status == LPStatus::optimal);
  CHECK(o.value == doctest::Approx(36));
  CHECK(o.solution[0] == doctest::Approx(2));
  CHECK(o.solution[1] == doctest::Approx(6));

  auto d = solve(dual_of(lp));
  REQUIRE(d.status == LPStatus::optimal);
  CHECK(d.value == doctest::Approx(36));
}

TEST_CASE("degenerate and redundant rows") {
  LinearProgram lp(2, LPSense::minimize);
  lp.objective = {1, 1};
  lp.add_row({1, 1}, LPRelation::eq, 1);
  lp.add_row({2, 2}, LPRelation::eq, 2);
  lp.add_row({1, -1}, LPRelation::eq, 0);
  lp.add_row({1, 0}, LPRelation::ge, 0);
  auto o = solve(lp);
  REQUIRE(o.status == LPStatus::optimal);
  CHECK(o.value == doctest::Approx(1));
  check_feasible(lp, o.solution, 1e-9);
}

TEST_CASE("pivot trace and validation") {
  LinearProgram lp(2, LPSense::maximize);
  lp.objective = {1, 1};
  lp.add_row({1, 2}, LPRelation::le, 4);
  lp.add_row({3, 1}, LPRelation::le, 6);
  std::ostringstream trace;
  LPOptions opts;
  opts.trace = &trace;
  auto o = solve(lp, opts);
  CHECK(o.pivots > 0);
  CHECK(!trace.str().empty());

  LinearProgram bad(2);
  bad.add_row({1.0}, LPRelation::le, 0.0);
  CHECK_THROWS_AS(solve(bad), std::invalid_argument);
  LinearProgram nan(1);
  nan.add_row({std::nan("")}, LPRelation::le, 0.0);
  CHECK_THROWS_AS(solve(nan), std::invalid_argument);
}

TEST_CASE("strict system examples") {
  {
    // grad f = (0,1) strict, grad g = (0,-1) weak
    StrictSystem s{2, {{0, 1}}, {{0, -1}}, {}};
    CHECK(!strict_system_solvable(s).solvable);
  }
  {
    StrictSystem s{1, {{1}}, {}, {}};
    auto r = strict_system_solvable(s);
    REQUIRE(r.solvable);
    CHECK(r.witness[0] == doctest::Approx(-1.0));
  }
  {
    // (0,1).u - 2v < 0, (0,-1).u <= 0, v > 0 on (u1, u2, v)
    StrictSystem s{3, {{0, 1, -2}}, {{0, -1, 0}}, {2}};
    auto r = strict_system_solvable(s);
    REQUIRE(r.solvable);
    CHECK(r.witness[1] - 2 * r.witness[2] <= -1 + 1e-9);
    CHECK(-r.witness[1] <= 1e-9);
    CHECK(r.witness[2] >= 1 - 1e-9);
  }
  CHECK_THROWS_AS(strict_system_solvable(StrictSystem{2, {}, {{1, 0}}, {}}), std::invalid_argument);
}

TEST_CASE("property: primal and dual optimal values agree") {
  Rng rng(41);
  int optimal = 0;
  for (int trial = 0; trial < 400; ++trial) {
    LinearProgram lp = random_lp(rng);
    auto o = solve(lp);
    if (o.status == LPStatus::optimal) {
      check_feasible(lp, o.solution, 1e-9);
      CHECK(dot(lp.objective, o.solution) == doctest::Approx(o.value).epsilon(1e-12));
      auto d = solve(dual_of(lp));
      REQUIRE(d.status == LPStatus::optimal);
      CHECK(std::fabs(d.value - o.value) <= 1e-8);
      ++optimal;
    } else if (o.status == LPStatus::infeasible) {
      CHECK(solve(dual_of(lp)).status != LPStatus::optimal);
    }
  }
  CHECK(optimal > 100);
}

TEST_CASE("property: unbounded rays improve and stay feasible") {
  Rng rng(4);
  int seen = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::size_t n = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    LinearProgram lp(n, LPSense::minimize);
    for (auto& c : lp.objective) c = static_cast<double>(uniform_int(rng, -2, 2));
    for (int i = 0; i < 2; ++i) {
      Vec a(n);
      for (auto& v : a) v = static_cast<double>(uniform_int(rng, -2, 2));
      lp.add_row(std::move(a), LPRelation::le, 3.0);
    }
    auto o = solve(lp);
    if (o.status != LPStatus::unbounded) continue;
    ++seen;
    CHECK(dot(lp.objective, o.ray) < 0.0);
    for (const auto& r : lp.rows) CHECK(dot(r.coeffs, o.ray) <= 1e-9);
    for (double v : o.ray) CHECK(v >= -1e-9);
  }
  CHECK(seen > 20);
}

TEST_CASE("property: strict systems are scale invariant") {
  Rng rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    StrictSystem s;
    s.num_vars = 3;
    int ns = static_cast<int>(uniform_int(rng, 1, 3));
    int nw = static_cast<int>(uniform_int(rng, 0, 3));
    auto row = [&] {
      Vec r(3);
      for (auto& v : r) v = static_cast<double>(uniform_int(rng, -3, 3));
      return r;
    };
    for (int i = 0; i < ns; ++i) s.strict_rows.push_back(row());
    for (int i = 0; i < nw; ++i) s.weak_rows.push_back(row());
    StrictSystem t = s;
    for (auto& r : t.strict_rows) r = scaled(r, 3.0);
    for (auto& r : t.weak_rows) r = scaled(r, 3.0);
    CHECK(strict_system_solvable(s).solvable == strict_system_solvable(t).solvable);
  }
}

TEST_CASE("property: strict systems agree with a sphere falsification oracle") {
  Rng rng(500);
  int oracle_hits = 0;
  for (int trial = 0; trial < 500; ++trial) {
    StrictSystem s;
    s.num_vars = 3;
    for (int i = 0; i < 3; ++i) {
      Vec r(3);
      for (auto& v : r) v = static_cast<double>(uniform_int(rng, -3, 3));
      if (i == 0 || uniform01(rng) < 0.5)
        s.strict_rows.push_back(std::move(r));
      else
        s.weak_rows.push_back(std::move(r));
    }
    auto res = strict_system_solvable(s);
    if (res.solvable) {
      for (const auto& r : s.strict_rows) CHECK(dot(r, res.witness) <= -1 + 1e-9);
      for (const auto& r : s.weak_rows) CHECK(dot(r, res.witness) <= 1e-9);
    }
    // Longitude/latitude grid on the sphere.
    bool found = false;
    for (int a = 0; a < 60 && !found; ++a) {
      for (int b = 1; b < 30 && !found; ++b) {
        double th = 2 * M_PI * a / 60, ph = M_PI * b / 30;
        Vec w = {std::sin(ph) * std::cos(th), std::sin(ph) * std::sin(th), std::cos(ph)};
        bool ok = true;
        for (const auto& r : s.strict_rows) ok = ok && dot(r, w) < 0;
        for (const auto& r : s.weak_rows) ok = ok && dot(r, w) <= 0;
        found = ok;
      }
    }
    if (found) {
      ++oracle_hits;
      CHECK(res.solvable);
    }
  }
  CHECK(oracle_hits > 100);
}

}  // TEST_SUITE
