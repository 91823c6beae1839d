#pragma once

#include <json.hpp>

#include "sockkt/cones.hpp"
#include "sockkt/cq.hpp"
#include "sockkt/deriv.hpp"
#include "sockkt/gencvx.hpp"
#include "sockkt/kkt.hpp"
#include "sockkt/problem.hpp"
#include "sockkt/tolerances.hpp"

// JSON views of the result types. Key order is fixed so that reports are
// byte-identical across runs. Function indices are written as labels f1.., g1...
namespace sockkt::report {

using Json = nlohmann::ordered_json;

Json vec(const Vec& v);
Json labels(char prefix, const std::vector<std::size_t>& indices);

Json problem(const Problem& p);
Json tolerances(const Tolerances& t);
Json grid(const StepGrid& g);
Json tangent_budget(const TangentBudget& b);

Json derivative(const SecondDirDeriv& d, bool with_trace = false);
Json membership(const ConeMembership& m);
Json point(const PointContext& ctx);
Json direction(const PointContext& ctx, const DirectionAnalysis& da);

Json cq_entry(const CQEntry& e);
Json multipliers(const MultiplierCertificate& m);
Json violation(const ViolationCertificate& v);
Json primal(const PrimalResult& r);
Json system(const SystemResult& r);
Json verdict(const DirectionVerdict& v);

Json convexity(const ConvexityVerdict& v);

}  // namespace sockkt::report
