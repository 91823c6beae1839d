#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sockkt/cones.hpp"

namespace sockkt {

enum class CQVerdict { no_counterexample, fails };

const char* to_string(CQVerdict v);

namespace cq_names {
inline constexpr const char* zangwill = "zangwill";
inline constexpr const char* so_zangwill = "second_order_zangwill";
inline constexpr const char* abadie = "abadie";
inline constexpr const char* guignard = "guignard";
}  // namespace cq_names

/// One-sided diagnostic: a failure carries a witness that replays through
/// the membership tests of the cones module; "no counterexample" is never a
/// proof that the qualification holds.
struct CQEntry {
  std::string name;
  CQVerdict verdict = CQVerdict::no_counterexample;
  std::optional<Vec> witness;  // d (first-order CQs) or z (second-order)
  std::string detail;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t near_misses = 0;
  bool doubled = false;
  std::size_t sanity_violations = 0;  // Abadie: probe accepted some d outside L

  bool fails() const { return verdict == CQVerdict::fails; }
};

struct CQReport {
  std::vector<CQEntry> entries;

  const CQEntry* find(const std::string& name) const;
  void add(CQEntry e) { entries.push_back(std::move(e)); }
};

struct CQOptions {
  std::size_t samples = 64;
  std::uint64_t seed = 0;
  int jitter_count = 8;
  double jitter_radius = 1e-3;
  StepGrid grid;
  TangentBudget tangent;
  LPOptions lp;
};

/// Unit directions in L(x): coordinate directions, negated active
/// gradients, LP vertices of L intersected with a box, and rejection-sampled
/// Gaussian directions, in that order. Prefix-stable: the first k samples of
/// a run with n > k samples equal a run with k samples.
std::vector<Vec> sample_linearizing_directions(const PointContext& ctx, std::size_t n,
                                               std::uint64_t seed, const LPOptions& lp = {});

/// cl(Z(x)) = L(x): a d in L whose jitter neighbourhood inside L avoids Z.
CQEntry check_zangwill(const PointContext& ctx, const CQOptions& opts = {});

/// cl(A(x,d)) = B(x,d): a z in B whose jitter neighbourhood inside B avoids A.
/// The inclusion cl(A) in B always holds for C^1 data and is not searched.
CQEntry check_so_zangwill(const PointContext& ctx, const DirectionAnalysis& da,
                          const CQOptions& opts = {});

/// L(x) = T(S,x): a d in L rejected by tangent_probe.
CQEntry check_abadie(const PointContext& ctx, const CQOptions& opts = {});

/// L(x) = cl conv T(S,x): a d in L outside the conic hull of the accepted
/// tangent samples, stable when the sample is doubled.
CQEntry check_guignard(const PointContext& ctx, const CQOptions& opts = {});

/// Tangent probes of the sampled L directions, shared by Abadie and Guignard.
struct TangentSample {
  Vec d;
  ConeMembership probe;
};
std::vector<TangentSample> sample_tangent_cone(const PointContext& ctx, std::size_t n,
                                               const CQOptions& opts);

}  // namespace sockkt
