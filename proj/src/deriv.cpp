#include "sockkt/deriv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sockkt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kDivergenceLevel = 1e8;
// Extension of the grid while a tail looks divergent stops here; t^2 stays
// well inside the normal range.
constexpr double kMinStep = 1e-140;
constexpr std::size_t kMaxExtension = 480;
constexpr int kMaxRichardsonOrder = 6;

bool strictly_growing(std::span<const QuotientSample> tail, double min_ratio) {
  for (std::size_t i = 1; i < tail.size(); ++i)
    if (!(std::fabs(tail[i].q) > min_ratio * std::fabs(tail[i - 1].q))) return false;
  return true;
}

std::span<const QuotientSample> usable_prefix(const std::vector<QuotientSample>& all) {
  std::size_t n = 0;
  while (n < all.size() && !all[n].noisy) ++n;
  // Too noisy to judge the tail: fall back to the coarsest steps.
  if (n < 3) n = std::min<std::size_t>(3, all.size());
  return std::span<const QuotientSample>(all.data(), n);
}

void classify_plain(SecondDirDeriv& out, double tol_rel) {
  auto usable = usable_prefix(out.trace);
  const std::size_t n = usable.size();
  if (n < 3) {
    out.status = DerivStatus::inconclusive;
    out.note = "fewer than three grid steps";
    return;
  }

  double value = usable[n - 1].q;
  double bound = tol_rel * std::max(1.0, std::fabs(value));
  double d01 = std::fabs(usable[n - 1].q - usable[n - 2].q);
  double d02 = std::fabs(usable[n - 1].q - usable[n - 3].q);
  double d12 = std::fabs(usable[n - 2].q - usable[n - 3].q);
  if (d01 < bound && d02 < bound && d12 < bound) {
    out.status = DerivStatus::converged;
    out.spread = std::max({d01, d02, d12});
    // Indistinguishable from zero at this grid resolution.
    out.value = std::fabs(value) <= out.spread ? 0.0 : value;
    return;
  }

  if (n >= 5 && strictly_growing(usable.subspan(n - 5), 1.0) &&
      std::fabs(value) > kDivergenceLevel) {
    out.status = DerivStatus::diverged;
    out.note = value > 0 ? "quotient grows to +infinity" : "quotient grows to -infinity";
    return;
  }

  if (n >= 4) {
    std::size_t w = std::min<std::size_t>(6, n);
    auto tail = usable.subspan(n - w);
    int sign_changes = 0;
    for (std::size_t i = 1; i < w; ++i)
      if ((tail[i].q > 0) != (tail[i - 1].q > 0) && tail[i].q != 0.0 && tail[i - 1].q != 0.0)
        ++sign_changes;
    double late = std::max(std::fabs(tail[w - 1].q), std::fabs(tail[w - 2].q));
    double early = 0.0;
    for (std::size_t i = 0; i + 2 < w; ++i) early = std::max(early, std::fabs(tail[i].q));
    if (sign_changes >= 2 && late >= 0.5 * early) {
      out.status = DerivStatus::oscillating;
      out.note = "quotient changes sign without shrinking";
      return;
    }
  }

  out.status = DerivStatus::inconclusive;
  std::ostringstream os;
  os << "tail spread " << std::max({d01, d02, d12}) << " exceeds " << bound;
  out.note = os.str();
}

// Ridders' scheme: a Neville tableau eliminating t, t^2, ... terms, stopped
// once the error estimate grows by a factor of two.
bool classify_richardson(SecondDirDeriv& out, const StepGrid& grid) {
  const auto& tr = out.trace;
  if (tr.size() < 3) return false;
  std::vector<std::vector<double>> a(tr.size());
  double best = 0.0;
  double err = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < tr.size(); ++k) {
    std::size_t order = std::min<std::size_t>(k, kMaxRichardsonOrder);
    a[k].resize(order + 1);
    a[k][0] = tr[k].q;
    double fac = 1.0;
    for (std::size_t j = 1; j <= order; ++j) {
      fac *= grid.rho;
      a[k][j] = (a[k][j - 1] - fac * a[k - 1][j - 1]) / (1.0 - fac);
      double e = std::max(std::fabs(a[k][j] - a[k][j - 1]), std::fabs(a[k][j] - a[k - 1][j - 1]));
      if (e <= err) {
        err = e;
        best = a[k][j];
      }
    }
    if (k >= 1 && std::fabs(a[k][order] - a[k - 1][a[k - 1].size() - 1]) >= 2.0 * err) break;
  }
  if (!std::isfinite(err) || err > grid.tol_rel * std::max(1.0, std::fabs(best))) return false;
  out.status = DerivStatus::converged;
  out.value = std::fabs(best) <= err ? 0.0 : best;
  out.spread = err;
  std::ostringstream os;
  os << "richardson error estimate " << err;
  out.note = os.str();
  return true;
}

}  // namespace

double StepGrid::t(int k) const { return t0 * std::pow(rho, k); }

void StepGrid::validate() const {
  if (!(t0 > 0.0) || !std::isfinite(t0)) throw std::invalid_argument("step grid: t0 must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("step grid: rho must be in (0,1)");
  if (steps < 3) throw std::invalid_argument("step grid: at least 3 steps required");
  if (!(tol_rel > 0.0)) throw std::invalid_argument("step grid: tol_rel must be > 0");
}

const char* to_string(DerivStatus s) {
  switch (s) {
    case DerivStatus::converged: return "converged";
    case DerivStatus::diverged: return "diverged";
    case DerivStatus::oscillating: return "oscillating";
    case DerivStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

SecondDirDeriv second_order_limit(const std::function<double(double)>& phi, double phi0,
                                  double slope, const StepGrid& grid) {
  grid.validate();
  SecondDirDeriv out;
  auto step = [&](double t) {
    double v = phi(t);
    double num = v - phi0 - t * slope;
    double scale = std::max({std::fabs(phi0), std::fabs(v), std::fabs(t * slope)});
    double q = 2.0 * num / (t * t);
    // A few ulps of each term, amplified by 2/t^2.
    double rounding = 16.0 * kEps * scale / (t * t);
    bool noisy = rounding > 0.1 * grid.tol_rel * std::max(1.0, std::fabs(q));
    out.trace.push_back({t, q, noisy});
  };

  for (int k = 0; k < grid.steps; ++k) step(grid.t(k));

  // A tail that keeps growing geometrically is followed further down so that
  // a genuine blow-up is distinguished from slow convergence.
  std::size_t extended = 0;
  for (;;) {
    const auto& tr = out.trace;
    std::size_t n = tr.size();
    if (n < 5 || extended >= kMaxExtension) break;
    if (std::any_of(tr.begin(), tr.end(), [](const auto& s) { return s.noisy; })) break;
    auto tail = std::span<const QuotientSample>(tr).subspan(n - 5);
    if (!strictly_growing(tail, 1.001) || std::fabs(tr.back().q) > kDivergenceLevel) break;
    double next = tr.back().t * grid.rho;
    if (next < kMinStep) break;
    step(next);
    ++extended;
  }

  if (grid.richardson && classify_richardson(out, grid)) return out;
  classify_plain(out, grid.tol_rel);
  return out;
}

SecondDirDeriv second_dir_deriv(const Expr& h, const Gradient& grad_h,
                                std::span<const double> x, std::span<const double> u,
                                const StepGrid& grid) {
  if (x.size() != u.size() || grad_h.size() != x.size())
    throw std::invalid_argument("second_dir_deriv: dimension mismatch");
  double h0 = h.eval(x);
  double slope = dot(eval_gradient(grad_h, x), u);
  Vec y(x.size());
  auto phi = [&](double t) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] + t * u[i];
    return h.eval(y);
  };
  return second_order_limit(phi, h0, slope, grid);
}

Vec CurveProbe::at(double t) const {
  Vec y(base.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = base[i] + t * direction[i] + 0.5 * t * t * curvature[i];
  return y;
}

void CurveProbe::validate(std::size_t dimension) const {
  if (base.size() != dimension || direction.size() != dimension || curvature.size() != dimension)
    throw std::invalid_argument("curve probe: vectors must have the problem dimension");
}

SecondDirDeriv curve_second_deriv(const CurveProbe& probe, const Expr& h,
                                  const Gradient& grad_h, const StepGrid& grid) {
  probe.validate(grad_h.size());
  double h0 = h.eval(probe.base);
  double slope = dot(eval_gradient(grad_h, probe.base), probe.direction);
  auto phi = [&](double t) { return h.eval(probe.at(t)); };
  return second_order_limit(phi, h0, slope, grid);
}

}  // namespace sockkt
