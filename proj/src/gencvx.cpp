#include "sockkt/gencvx.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sockkt/error.hpp"
#include "sockkt/random.hpp"

namespace sockkt {

namespace {

std::string vec_text(const Vec& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

void check_point(const Expr& h, const Gradient& grad, const Vec& x, const Box& box) {
  if (grad.size() != x.size())
    throw std::invalid_argument("convexity probe: gradient length differs from point length");
  if (h.min_dimension() > x.size())
    throw std::invalid_argument("convexity probe: expression uses more variables than the point");
  box.validate(x.size());
}

}  // namespace

const char* to_string(ConvexityOutcome v) {
  switch (v) {
    case ConvexityOutcome::no_counterexample: return "no_counterexample";
    case ConvexityOutcome::fails: return "fails";
    case ConvexityOutcome::inconclusive: return "inconclusive";
  }
  return "?";
}

Box Box::symmetric(std::size_t dim, double half_width) {
  return {Vec(dim, -half_width), Vec(dim, half_width)};
}

void Box::validate(std::size_t dim) const {
  if (lo.size() != dim || hi.size() != dim)
    throw std::invalid_argument("box: bounds must have length " + std::to_string(dim));
  for (std::size_t k = 0; k < dim; ++k)
    if (!(std::isfinite(lo[k]) && std::isfinite(hi[k]) && lo[k] <= hi[k]))
      throw std::invalid_argument("box: need finite bounds with lo <= hi");
}

std::vector<Vec> convexity_samples(const Vec& x, const Box& box, std::size_t n, std::uint64_t seed) {
  box.validate(x.size());
  const std::size_t s = x.size();
  std::vector<Vec> out;
  for (std::size_t k = 0; k < s && out.size() < n; ++k) {
    for (double sign : {1.0, -1.0}) {
      if (out.size() >= n) break;
      Vec y = x;
      y[k] = std::clamp(x[k] + sign * 0.25 * (box.hi[k] - box.lo[k]), box.lo[k], box.hi[k]);
      if (y != x) out.push_back(std::move(y));
    }
  }
  Rng rng(seed);
  while (out.size() < n) {
    Vec y(s);
    for (std::size_t k = 0; k < s; ++k) y[k] = uniform(rng, box.lo[k], box.hi[k]);
    out.push_back(std::move(y));
  }
  return out;
}

ConvexityVerdict probe_pseudoconvex(const Expr& h, const Gradient& grad, const Vec& x,
                                    const Box& box, const ConvexityOptions& opts) {
  check_point(h, grad, x, box);
  ConvexityVerdict v;
  v.property = "pseudoconvex";
  v.seed = opts.seed;
  const double hx = h.eval(x);
  const Vec gx = eval_gradient(grad, x);
  v.h_x = hx;
  for (const Vec& y : convexity_samples(x, box, opts.samples, opts.seed)) {
    ++v.samples;
    double hy;
    try {
      hy = h.eval(y);
    } catch (const EvalError&) {
      ++v.excluded;
      continue;
    }
    if (!(hy < hx - opts.margin)) continue;
    double gt = dot(gx, axpy(y, -1.0, x));
    if (gt >= -opts.grad_tol) {
      v.verdict = ConvexityOutcome::fails;
      v.y = y;
      v.h_y = hy;
      v.gradient_term = gt;
      std::ostringstream os;
      os << "h(y) = " << hy << " < h(x) = " << hx << " at y = " << vec_text(y)
         << " but grad h(x)(y - x) = " << gt << " is not negative";
      v.detail = os.str();
      return v;
    }
  }
  return v;
}

ConvexityVerdict probe_so_pseudoconvex(const Expr& h, const Gradient& grad, const Vec& x,
                                       const Box& box, const ConvexityOptions& opts) {
  check_point(h, grad, x, box);
  ConvexityVerdict v;
  v.property = "second_order_pseudoconvex";
  v.seed = opts.seed;
  const double hx = h.eval(x);
  const Vec gx = eval_gradient(grad, x);
  v.h_x = hx;
  for (const Vec& y : convexity_samples(x, box, opts.samples, opts.seed)) {
    ++v.samples;
    double hy;
    try {
      hy = h.eval(y);
    } catch (const EvalError&) {
      ++v.excluded;
      continue;
    }
    if (!(hy < hx - opts.margin)) continue;
    const Vec u = axpy(y, -1.0, x);
    const double gt = dot(gx, u);
    std::ostringstream os;
    if (gt > opts.grad_tol) {
      os << "h(y) = " << hy << " < h(x) = " << hx << " at y = " << vec_text(y)
         << " but grad h(x)(y - x) = " << gt << " > 0";
    } else if (std::fabs(gt) <= opts.grad_tol) {
      SecondDirDeriv dd;
      try {
        dd = second_dir_deriv(h, grad, x, u, opts.grid);
      } catch (const EvalError&) {
        ++v.excluded;
        continue;
      }
      if (!dd.converged()) {
        ++v.excluded;
        continue;
      }
      const double s2 = *dd.value;
      if (s2 < -opts.grid.tol_rel * std::max(1.0, std::fabs(s2))) continue;
      v.second = s2;
      os << "h(y) = " << hy << " < h(x) = " << hx << " at y = " << vec_text(y)
         << " with grad h(x)(y - x) = " << gt << " but h''(x, y - x) = " << s2
         << " is not negative";
    } else {
      continue;
    }
    v.verdict = ConvexityOutcome::fails;
    v.y = y;
    v.h_y = hy;
    v.gradient_term = gt;
    v.detail = os.str();
    return v;
  }
  return v;
}

ConvexityVerdict probe_solpc_right(const CurveProbe& probe, const Expr& g, const Gradient& grad,
                                   const StepGrid& grid, double grad_tol) {
  probe.validate(grad.size());
  grid.validate();
  ConvexityVerdict v;
  v.property = "second_order_locally_pseudoconcave_right";
  const double phi0 = g.eval(probe.base);
  const double slope = dot(eval_gradient(grad, probe.base), probe.direction);
  v.h_x = phi0;
  v.gradient_term = slope;

  for (int k = 0; k < grid.steps; ++k) {
    double t = grid.t(k);
    v.curve.emplace_back(t, g.eval(probe.at(t)) - phi0);
  }
  v.samples = v.curve.size();

  // Largest delta (smallest k0) with phi(t) > phi(0) on every grid t <= delta;
  // the tail must cover at least three steps.
  std::size_t k0 = v.curve.size();
  while (k0 > 0 && v.curve[k0 - 1].second > 0.0) --k0;
  if (v.curve.size() - k0 < 3) {
    v.detail = "phi(t) > phi(0) does not hold on the grid tail; the premise is empty";
    return v;
  }
  v.delta = v.curve[k0].first;

  std::ostringstream os;
  os << "phi(t) > phi(0) for every grid t <= " << *v.delta;
  if (slope < -grad_tol) {
    v.verdict = ConvexityOutcome::fails;
    os << " but phi'(0) = " << slope << " < 0";
    v.detail = os.str();
    return v;
  }
  if (slope > grad_tol) {
    v.detail = os.str() + " and phi'(0) > 0";
    return v;
  }
  SecondDirDeriv dd = curve_second_deriv(probe, g, grad, grid);
  if (!dd.converged()) {
    v.verdict = ConvexityOutcome::inconclusive;
    os << ", phi'(0) = 0, and phi''(0,1) is " << to_string(dd.status);
    v.detail = os.str();
    return v;
  }
  v.second = *dd.value;
  if (*dd.value > grid.tol_rel * std::max(1.0, std::fabs(*dd.value))) {
    os << ", phi'(0) = 0 and phi''(0,1) = " << *dd.value << " > 0";
    v.detail = os.str();
    return v;
  }
  v.verdict = ConvexityOutcome::fails;
  os << ", phi'(0) = 0 but phi''(0,1) = " << *dd.value << " is not positive";
  v.detail = os.str();
  return v;
}

}  // namespace sockkt
