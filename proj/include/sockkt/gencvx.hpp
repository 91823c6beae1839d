#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sockkt/deriv.hpp"
#include "sockkt/expr.hpp"
#include "sockkt/vec.hpp"

namespace sockkt {

enum class ConvexityOutcome { no_counterexample, fails, inconclusive };

const char* to_string(ConvexityOutcome v);

/// Axis-aligned sample region.
struct Box {
  Vec lo;
  Vec hi;

  static Box symmetric(std::size_t dim, double half_width = 1.0);
  void validate(std::size_t dim) const;
};

struct ConvexityOptions {
  std::size_t samples = 256;
  std::uint64_t seed = 0;
  double margin = 1e-8;    // h(y) < h(x) - margin
  double grad_tol = 1e-9;  // |grad h(x)(y - x)| <= grad_tol counts as zero
  StepGrid grid;
};

/// Outcome of a falsification probe. For the point-pair probes the witness
/// is y with the values that break the implication; for the curve probe it
/// is the grid evidence of phi(t) > phi(0) plus the failed derivative test.
struct ConvexityVerdict {
  std::string property;
  ConvexityOutcome verdict = ConvexityOutcome::no_counterexample;
  std::optional<Vec> y;
  std::optional<double> h_x;
  std::optional<double> h_y;
  std::optional<double> gradient_term;  // grad h(x)(y - x), or phi'(0)
  std::optional<double> second;         // h''(x, y - x), or phi''(0,1)
  std::vector<std::pair<double, double>> curve;  // (t, phi(t) - phi(0)) on the grid
  std::optional<double> delta;                   // largest grid t of the positive tail
  std::string detail;
  std::size_t samples = 0;
  std::size_t excluded = 0;  // samples skipped for an inconclusive h''
  std::uint64_t seed = 0;

  bool fails() const { return verdict == ConvexityOutcome::fails; }
};

/// Sample points of a probe: x +- half_width/2 e_k (clipped to the box),
/// then uniform points of the box. Prefix-stable in n.
std::vector<Vec> convexity_samples(const Vec& x, const Box& box, std::size_t n, std::uint64_t seed);

/// h(y) < h(x) implies grad h(x)(y - x) < 0. Witness: y with
/// h(y) < h(x) - margin and grad h(x)(y - x) >= -grad_tol.
ConvexityVerdict probe_pseudoconvex(const Expr& h, const Gradient& grad, const Vec& x,
                                    const Box& box, const ConvexityOptions& opts = {});

/// h(y) < h(x) implies grad h(x)(y - x) <= 0, and with a zero gradient term
/// h''(x, y - x) < 0. Witness: y with h(y) < h(x) - margin and either a
/// gradient term > grad_tol, or a zero gradient term with a converged
/// h''(x, y - x) >= -tol_rel max(1, |h''|).
ConvexityVerdict probe_so_pseudoconvex(const Expr& h, const Gradient& grad, const Vec& x,
                                       const Box& box, const ConvexityOptions& opts = {});

/// phi(t) = g(base + t d + t^2/2 z) second-order locally pseudoconcave at
/// t = 0 on the right: a positive tail phi(t) > phi(0) on the grid forces
/// phi'(0) >= 0, and phi''(0,1) > 0 when phi'(0) = 0.
ConvexityVerdict probe_solpc_right(const CurveProbe& probe, const Expr& g, const Gradient& grad,
                                   const StepGrid& grid = {}, double grad_tol = 1e-9);

}  // namespace sockkt
