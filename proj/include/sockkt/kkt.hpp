#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sockkt/cones.hpp"
#include "sockkt/cq.hpp"
#include "sockkt/lp.hpp"

namespace sockkt {

/// Nonnegative multipliers (lambda, mu) with sum(lambda) = 1, mu_i = 0 off
/// the active set, a stationary Lagrangian, and nonnegative second-order
/// Lagrangian curvature  L''(x,d) = sum lambda_j f_j'' + sum mu_i g_i''.
struct MultiplierCertificate {
  Vec lambda;  // n
  Vec mu;      // m
  double stationarity_residual = 0.0;
  double curvature = 0.0;
  double complementarity = 0.0;  // max_i |mu_i g_i(x)|
};

enum class ViolationKind {
  primal_z,            // z with grad f_j z + f_j'' < 0 (j in J), grad g_i z + g_i'' <= 0 (i in K)
  curvature_system,    // (u, v), v > 0: grad f_j u + v f_j'' < 0 all j, grad g_i u + v g_i'' <= 0, i in I
  first_order_system,  // u: grad f_j u < 0 all j, grad g_i u <= 0, i in I
};

const char* to_string(ViolationKind k);

struct CertificateRow {
  std::string label;  // "f1", "g2", "v"
  bool strict = false;
  double value = 0.0;
};

struct ViolationCertificate {
  ViolationKind kind = ViolationKind::primal_z;
  Vec witness;               // z or u
  std::optional<double> v;   // curvature_system only
  std::vector<CertificateRow> rows;

  /// Strict rows <= -margin and weak rows <= tol.
  bool verifies(double tol, double margin) const;
};

enum class PrimalStatus { holds, violated, inconclusive };

const char* to_string(PrimalStatus s);

struct PrimalResult {
  PrimalStatus status = PrimalStatus::inconclusive;
  std::optional<ViolationCertificate> violation;
  std::string note;
};

struct SystemResult {
  bool solvable = false;
  std::optional<ViolationCertificate> witness;
};

/// Searches for z with grad f_j z + f_j''(x,d) < 0 for j in J and
/// grad g_i z + g_i''(x,d) <= 0 for i in K. holds means no such z exists.
PrimalResult primal_condition(const PointContext& ctx, const DirectionAnalysis& da,
                              const LPOptions& opts = {});

/// (u, v) with v > 0, grad f_j u + v f_j'' < 0 for every objective and
/// grad g_i u + v g_i'' <= 0 for every active constraint. Throws
/// MissingDerivativeError when a needed second derivative did not converge.
SystemResult curvature_system_solvable(const PointContext& ctx, const DirectionAnalysis& da,
                                       const LPOptions& opts = {});

/// u with grad f_j u < 0 for every objective and grad g_i u <= 0 on I(x).
SystemResult first_order_system_solvable(const PointContext& ctx, const LPOptions& opts = {});

/// Feasibility LP for the second-order KKT multipliers. Throws
/// MissingDerivativeError when a needed second derivative did not converge.
std::optional<MultiplierCertificate> find_multipliers(const PointContext& ctx,
                                                      const DirectionAnalysis& da,
                                                      const LPOptions& opts = {});

/// Maximize 0 s.t. grad f_j u + v f_j'' <= -1, grad g_i u + v g_i'' <= 0
/// (i in I), v >= 0; variables (u free, v). Infeasible exactly when the
/// multipliers exist.
LinearProgram descent_pair_lp(const PointContext& ctx, const DirectionAnalysis& da);

/// Its dual: minimize -sum lambda over stationary, curvature-nonnegative
/// (lambda, mu) >= 0. Unbounded exactly when the multipliers exist.
LinearProgram multiplier_cone_lp(const PointContext& ctx, const DirectionAnalysis& da);

enum class Verdict { certified, refuted, undecided };

const char* to_string(Verdict v);

struct DirectionVerdict {
  Verdict verdict = Verdict::undecided;
  PrimalResult primal;
  std::optional<SystemResult> curvature_system;
  std::optional<SystemResult> first_order_system;
  std::optional<MultiplierCertificate> multipliers;
  std::optional<ViolationCertificate> violation;  // the certificate behind REFUTED
  std::vector<std::string> reasons;
};

/// Combines the primal condition, both alternative systems, and the
/// multiplier LP. REFUTED requires a violation certificate and a clean run of
/// the constraint qualifications that certificate relies on (second-order
/// Zangwill for z or (u,v); Abadie for u, Guignard when n = 1). A missing
/// CQ entry counts as not checked.
DirectionVerdict certify_direction(const PointContext& ctx, const DirectionAnalysis& da,
                                   const CQReport* cq, const LPOptions& opts = {});

}  // namespace sockkt
