#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sockkt/expr.hpp"
#include "sockkt/vec.hpp"

namespace sockkt {

/// Geometric step grid t_k = t0 * rho^k, k = 0..steps-1.
struct StepGrid {
  double t0 = 1e-2;
  double rho = 0.5;
  int steps = 24;
  double tol_rel = 1e-6;
  /// Ridders-style Richardson extrapolation of the quotient sequence. Only
  /// sound when the quotient has an expansion in integer powers of t, i.e.
  /// for smooth functions.
  bool richardson = false;

  double t(int k) const;
  void validate() const;
};

enum class DerivStatus { converged, diverged, oscillating, inconclusive };

const char* to_string(DerivStatus s);

struct QuotientSample {
  double t = 0.0;
  double q = 0.0;
  bool noisy = false;  // rounding error in q exceeds the convergence tolerance
};

/// Result of evaluating lim_{t->0+} 2 t^-2 [phi(t) - phi(0) - t phi'(0)].
///
/// converged: the last three usable quotients agree pairwise within
///   tol_rel * max(1, |value|) (or, with richardson, the extrapolation error
///   estimate is within that bound).
/// diverged: |q| strictly increases over the last five usable steps and
///   exceeds 1e8.
/// oscillating: q changes sign in the tail without shrinking.
struct SecondDirDeriv {
  std::optional<double> value;
  /// Uncertainty of a converged value: the tail spread, or the extrapolation
  /// error estimate. Zero otherwise. A value within its spread of zero is
  /// reported as exactly 0.
  double spread = 0.0;
  DerivStatus status = DerivStatus::inconclusive;
  std::vector<QuotientSample> trace;
  std::string note;

  bool converged() const { return status == DerivStatus::converged; }
};

/// Core limit evaluation shared by every second-order quantity: phi is a
/// one-variable function, phi0 = phi(0), slope = phi'(0).
SecondDirDeriv second_order_limit(const std::function<double(double)>& phi, double phi0,
                                  double slope, const StepGrid& grid);

/// h''(x, u) = lim 2 t^-2 [h(x + t u) - h(x) - t grad h(x) u].
SecondDirDeriv second_dir_deriv(const Expr& h, const Gradient& grad_h,
                                std::span<const double> x, std::span<const double> u,
                                const StepGrid& grid);

/// The curve phi(t) = h(base + t d + t^2/2 z).
struct CurveProbe {
  Vec base;
  Vec direction;
  Vec curvature;

  Vec at(double t) const;
  void validate(std::size_t dimension) const;
};

/// phi''(0, 1) for the curve, with phi'(0) = grad h(base) d.
SecondDirDeriv curve_second_deriv(const CurveProbe& probe, const Expr& h,
                                  const Gradient& grad_h, const StepGrid& grid);

}  // namespace sockkt
