#include "sockkt/cli.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sockkt/error.hpp"
#include "sockkt/problem_file.hpp"
#include "sockkt/report.hpp"

namespace sockkt {

namespace {

using report::Json;

struct Config {
  std::string file;
  std::optional<std::size_t> point;
  std::optional<std::size_t> direction;
  std::string d_text, z_text, function;
  std::size_t samples = 64;
  std::size_t n_dir = 32;
  std::uint64_t seed = 0;
  bool skip_cq = false;
  bool summary = false;
  bool lp_trace = false;
  double box = 1.0;
  StepGrid grid;
  TangentBudget tangent;
};

Vec parse_vector(std::string text, std::size_t dim, const char* flag) {
  for (char& c : text)
    if (c == '[' || c == ']' || c == '(' || c == ')') c = ' ';
  Vec v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InputError(std::string(flag) + ": not a number: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(x))
      throw InputError(std::string(flag) + ": not a number: '" + item + "'");
    v.push_back(x);
  }
  if (v.size() != dim)
    throw InputError(std::string(flag) + ": expected " + std::to_string(dim) + " comma-separated numbers");
  return v;
}

// Aggregate: REFUTED if any, CERTIFIED if all (and at least one), else UNDECIDED.
struct Tally {
  std::size_t total = 0, certified = 0, refuted = 0;
  void add(Verdict v) {
    ++total;
    if (v == Verdict::certified) ++certified;
    if (v == Verdict::refuted) ++refuted;
  }
  Verdict result() const {
    if (refuted) return Verdict::refuted;
    if (total && certified == total) return Verdict::certified;
    return Verdict::undecided;
  }
};

class Runner {
 public:
  Runner(const Config& cfg, std::ostream& err) : cfg_(cfg), err_(err) {
    cfg_.grid.validate();
    cfg_.tangent.validate();
    if (cfg_.samples == 0) throw InputError("--samples must be >= 1");
    file_ = load_problem_file(cfg_.file);
    if (cfg_.point && *cfg_.point >= file_.points.size())
      throw InputError("--point " + std::to_string(*cfg_.point) + ": the file has " +
                       std::to_string(file_.points.size()) + " point(s)");
    if (cfg_.direction) {
      for (std::size_t k : point_indices())
        if (*cfg_.direction >= file_.directions[k].size())
          throw InputError("--direction " + std::to_string(*cfg_.direction) + ": point " +
                           std::to_string(k) + " has " +
                           std::to_string(file_.directions[k].size()) + " direction(s)");
    }
    lp_.tol = file_.tolerances.lp_tol;
    if (cfg_.lp_trace) lp_.trace = &err_;
    cq_.samples = cfg_.samples;
    cq_.seed = cfg_.seed;
    cq_.grid = cfg_.grid;
    cq_.tangent = cfg_.tangent;
    cq_.lp = lp_;
  }

  Json header(const char* command) const {
    Json j;
    j["tool"] = "sockkt";
    j["version"] = kVersion;
    j["command"] = command;
    j["problem"] = report::problem(*file_.problem);
    Json s;
    s["seed"] = cfg_.seed;
    s["samples"] = cfg_.samples;
    s["sampled_directions"] = cfg_.n_dir;
    s["skip_cq"] = cfg_.skip_cq;
    s["point"] = cfg_.point ? Json(*cfg_.point) : Json(nullptr);
    s["direction"] = cfg_.direction ? Json(*cfg_.direction) : Json(nullptr);
    s["grid"] = report::grid(cfg_.grid);
    s["tangent"] = report::tangent_budget(cfg_.tangent);
    s["jitter"] = Json{{"count", cq_.jitter_count}, {"radius", cq_.jitter_radius}};
    s["tolerances"] = report::tolerances(file_.tolerances);
    j["settings"] = std::move(s);
    return j;
  }

  std::vector<std::size_t> point_indices() const {
    if (cfg_.point) return {*cfg_.point};
    std::vector<std::size_t> all(file_.points.size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
    return all;
  }

  PointContext context(std::size_t k) const {
    return point_context(file_.problem, file_.points[k], file_.tolerances);
  }

  // User directions (or the one selected), an explicit --d, then d = 0 and
  // sampled critical directions when `sampled` is set.
  std::vector<std::pair<Vec, std::string>> directions(const PointContext& ctx, std::size_t k,
                                                      bool sampled) const {
    std::vector<std::pair<Vec, std::string>> out;
    const auto& user = file_.directions[k];
    if (cfg_.direction) {
      out.push_back({user[*cfg_.direction], "user"});
      return out;
    }
    if (!cfg_.d_text.empty()) {
      out.push_back({parse_vector(cfg_.d_text, ctx.dimension(), "--d"), "user"});
      return out;
    }
    for (const auto& d : user) out.push_back({d, "user"});
    out.push_back({Vec(ctx.dimension(), 0.0), "zero"});
    if (sampled)
      for (auto& d : sample_critical_directions(ctx, cfg_.n_dir, cfg_.seed, lp_))
        out.push_back({std::move(d), "sampled"});
    return out;
  }

  CQReport point_cq(const PointContext& ctx, Json& out) const {
    CQReport r;
    r.add(check_zangwill(ctx, cq_));
    r.add(check_abadie(ctx, cq_));
    r.add(check_guignard(ctx, cq_));
    Json a = Json::array();
    for (const auto& e : r.entries) a.push_back(report::cq_entry(e));
    out = std::move(a);
    return r;
  }

  // Second-order Zangwill at one direction; null when g'' is missing.
  std::optional<CQEntry> so_zangwill(const PointContext& ctx, const DirectionAnalysis& da,
                                     Json& out) const {
    try {
      CQEntry e = check_so_zangwill(ctx, da, cq_);
      out = report::cq_entry(e);
      return e;
    } catch (const MissingDerivativeError& e) {
      out = Json{{"name", cq_names::so_zangwill}, {"verdict", "not_checked"}, {"detail", e.what()}};
      return std::nullopt;
    }
  }

  int check(Json& doc) {
    Json points = Json::array();
    Tally overall;
    for (std::size_t k : point_indices()) {
      PointContext ctx = context(k);
      Json pj;
      pj["index"] = k;
      pj["context"] = report::point(ctx);
      if (!ctx.feasible) {
        pj["verdict"] = to_string(Verdict::refuted);
        pj["reasons"] = Json::array({"point is infeasible"});
        pj["cq"] = Json::array();
        pj["directions"] = Json::array();
        overall.add(Verdict::refuted);
        summary_line(k, ctx, Verdict::refuted, "infeasible");
        points.push_back(std::move(pj));
        continue;
      }
      CQReport base;
      Json cq_json = Json::array();
      if (!cfg_.skip_cq) base = point_cq(ctx, cq_json);
      pj["cq"] = std::move(cq_json);

      Tally tally;
      Json dirs = Json::array();
      for (auto& [d, source] : directions(ctx, k, true)) {
        DirectionAnalysis da = analyze_direction(ctx, d, cfg_.grid);
        Json dj = report::direction(ctx, da);
        dj["source"] = source;
        if (!da.critical) {
          dj["verdict"] = "NOT_CRITICAL";
          dirs.push_back(std::move(dj));
          continue;
        }
        CQReport cq = base;
        if (!cfg_.skip_cq) {
          Json so;
          if (auto e = so_zangwill(ctx, da, so)) cq.add(*e);
          dj["second_order_zangwill"] = std::move(so);
        }
        DirectionVerdict v = certify_direction(ctx, da, cfg_.skip_cq ? nullptr : &cq, lp_);
        tally.add(v.verdict);
        dj.update(report::verdict(v));
        dirs.push_back(std::move(dj));
      }
      Verdict pv = tally.result();
      overall.add(pv);
      pj["verdict"] = to_string(pv);
      pj["tested_directions"] = tally.total;
      pj["directions"] = std::move(dirs);
      summary_line(k, ctx, pv, std::to_string(tally.certified) + "/" + std::to_string(tally.total) +
                                   " directions certified, " + std::to_string(tally.refuted) +
                                   " refuted");
      points.push_back(std::move(pj));
    }
    doc["points"] = std::move(points);
    doc["verdict"] = to_string(overall.result());
    return overall.result() == Verdict::refuted ? exit_refuted : exit_ok;
  }

  int cq(Json& doc) {
    Json points = Json::array();
    for (std::size_t k : point_indices()) {
      PointContext ctx = context(k);
      if (!ctx.feasible) throw InputError("point " + std::to_string(k) + " is infeasible");
      Json pj;
      pj["index"] = k;
      pj["context"] = report::point(ctx);
      Json cq_json;
      point_cq(ctx, cq_json);
      pj["cq"] = std::move(cq_json);
      Json dirs = Json::array();
      for (auto& [d, source] : directions(ctx, k, false)) {
        DirectionAnalysis da = analyze_direction(ctx, d, cfg_.grid);
        Json dj;
        dj["d"] = report::vec(d);
        dj["source"] = source;
        dj["critical"] = da.critical;
        if (da.critical) {
          Json so;
          so_zangwill(ctx, da, so);
          dj["second_order_zangwill"] = std::move(so);
        }
        dirs.push_back(std::move(dj));
      }
      pj["directions"] = std::move(dirs);
      if (cfg_.summary) {
        err_ << "point " << k << ":";
        for (const auto& e : pj["cq"]) err_ << ' ' << e["name"].get<std::string>() << '=' << e["verdict"].get<std::string>();
        err_ << '\n';
      }
      points.push_back(std::move(pj));
    }
    doc["points"] = std::move(points);
    return exit_ok;
  }

  int convexity(Json& doc) {
    const Problem& p = *file_.problem;
    if (cfg_.function.empty()) throw InputError("convexity: --function is required");
    auto ref = p.lookup(cfg_.function);
    const Expr& h = p.function(ref);
    const Gradient& grad = p.function_gradient(ref);
    doc["function"] = cfg_.function;
    Json points = Json::array();
    for (std::size_t k : point_indices()) {
      const Vec& x = file_.points[k];
      Json pj;
      pj["index"] = k;
      pj["x"] = report::vec(x);
      Json probes = Json::array();
      if (!cfg_.d_text.empty() || cfg_.direction) {
        Vec d = cfg_.direction ? file_.directions[k][*cfg_.direction]
                               : parse_vector(cfg_.d_text, x.size(), "--d");
        Vec z = cfg_.z_text.empty() ? Vec(x.size(), 0.0) : parse_vector(cfg_.z_text, x.size(), "--z");
        auto v = probe_solpc_right({x, d, z}, h, grad, cfg_.grid);
        Json vj = report::convexity(v);
        vj["d"] = report::vec(d);
        vj["z"] = report::vec(z);
        probes.push_back(std::move(vj));
      } else {
        ConvexityOptions o;
        o.samples = cfg_.samples;
        o.seed = cfg_.seed;
        o.grid = cfg_.grid;
        Box box = Box::symmetric(x.size(), cfg_.box);
        probes.push_back(report::convexity(probe_pseudoconvex(h, grad, x, box, o)));
        probes.push_back(report::convexity(probe_so_pseudoconvex(h, grad, x, box, o)));
      }
      if (cfg_.summary)
        for (const auto& v : probes)
          err_ << "point " << k << ' ' << v["property"].get<std::string>() << ": "
               << v["verdict"].get<std::string>() << '\n';
      pj["probes"] = std::move(probes);
      points.push_back(std::move(pj));
    }
    doc["points"] = std::move(points);
    return exit_ok;
  }

  int deriv(Json& doc) {
    const Problem& p = *file_.problem;
    std::vector<std::string> names;
    if (!cfg_.function.empty()) {
      p.lookup(cfg_.function);
      names.push_back(cfg_.function);
    } else {
      for (std::size_t j = 0; j < p.num_objectives(); ++j) names.push_back("f" + std::to_string(j + 1));
      for (std::size_t i = 0; i < p.num_constraints(); ++i) names.push_back("g" + std::to_string(i + 1));
    }
    Json points = Json::array();
    for (std::size_t k : point_indices()) {
      const Vec& x = file_.points[k];
      std::vector<Vec> ds;
      if (cfg_.direction)
        ds.push_back(file_.directions[k][*cfg_.direction]);
      else if (!cfg_.d_text.empty())
        ds.push_back(parse_vector(cfg_.d_text, x.size(), "--d"));
      else
        ds = file_.directions[k];
      if (ds.empty())
        throw InputError("deriv: point " + std::to_string(k) + " has no directions; pass --d");
      std::optional<Vec> z;
      if (!cfg_.z_text.empty()) z = parse_vector(cfg_.z_text, x.size(), "--z");

      Json pj;
      pj["index"] = k;
      pj["x"] = report::vec(x);
      Json entries = Json::array();
      for (const auto& d : ds) {
        for (const auto& name : names) {
          auto ref = p.lookup(name);
          const Expr& h = p.function(ref);
          const Gradient& g = p.function_gradient(ref);
          Json e;
          e["function"] = name;
          e["d"] = report::vec(d);
          auto dd = second_dir_deriv(h, g, x, d, cfg_.grid);
          e["second"] = report::derivative(dd, true);
          if (z) {
            e["z"] = report::vec(*z);
            e["curve"] = report::derivative(curve_second_deriv({x, d, *z}, h, g, cfg_.grid), true);
          }
          if (cfg_.summary)
            err_ << "point " << k << ' ' << name << "'': " << to_string(dd.status)
                 << (dd.value ? " " + std::to_string(*dd.value) : std::string()) << '\n';
          entries.push_back(std::move(e));
        }
      }
      pj["derivatives"] = std::move(entries);
      points.push_back(std::move(pj));
    }
    doc["points"] = std::move(points);
    return exit_ok;
  }

 private:
  void summary_line(std::size_t k, const PointContext& ctx, Verdict v, const std::string& what) const {
    if (!cfg_.summary) return;
    err_ << "point " << k << " (";
    for (std::size_t i = 0; i < ctx.x.size(); ++i) err_ << (i ? ", " : "") << ctx.x[i];
    err_ << "): " << to_string(v) << " [" << what << "]\n";
  }

  Config cfg_;
  std::ostream& err_;
  ProblemFile file_;
  LPOptions lp_;
  CQOptions cq_;
};

void add_common(CLI::App* sub, Config& cfg) {
  sub->add_option("file", cfg.file, "Problem file (JSON)")->required();
  sub->add_option("--point", cfg.point, "Only this point (0-based index into \"points\")");
  sub->add_option("--samples", cfg.samples, "Samples per diagnostic");
  sub->add_option("--seed", cfg.seed, "Random seed");
  sub->add_flag("--summary", cfg.summary, "Human-readable summary on stderr");
  sub->add_option("--t0", cfg.grid.t0, "First grid step");
  sub->add_option("--rho", cfg.grid.rho, "Grid ratio");
  sub->add_option("--steps", cfg.grid.steps, "Grid steps");
  sub->add_option("--tol-rel", cfg.grid.tol_rel, "Relative convergence tolerance");
  sub->add_flag("--richardson", cfg.grid.richardson, "Richardson extrapolation of quotients");
  sub->add_option("--tangent-steps", cfg.tangent.steps, "Tangent probe grid steps");
  sub->add_option("--tangent-search-evals", cfg.tangent.search_evals,
                  "Tangent probe evaluations per step");
  sub->add_flag("--lp-trace", cfg.lp_trace, "Print simplex pivots on stderr");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Second-order KKT conditions checker"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Config cfg;

  auto* check = app.add_subcommand("check", "Certify or refute second-order KKT conditions");
  add_common(check, cfg);
  check->add_option("--direction", cfg.direction, "Only this user direction (0-based)");
  check->add_option("--sampled-directions", cfg.n_dir, "Sampled critical directions per point");
  check->add_flag("--skip-cq", cfg.skip_cq, "Skip constraint qualification diagnostics");

  auto* cq = app.add_subcommand("cq", "Constraint qualification diagnostics");
  add_common(cq, cfg);
  cq->add_option("--direction", cfg.direction, "Only this user direction (0-based)");
  cq->add_option("--d", cfg.d_text, "Explicit direction, e.g. 1,0");

  auto* cvx = app.add_subcommand("convexity", "Generalized convexity probes");
  add_common(cvx, cfg);
  cvx->add_option("--function", cfg.function, "Function label f1.., g1..")->required();
  cvx->add_option("--direction", cfg.direction, "User direction for the curve probe");
  cvx->add_option("--d", cfg.d_text, "Curve direction");
  cvx->add_option("--z", cfg.z_text, "Curve curvature vector");
  cvx->add_option("--box", cfg.box, "Half-width of the sample box [-w,w]^s");

  auto* der = app.add_subcommand("deriv", "Second-order directional derivatives");
  add_common(der, cfg);
  der->add_option("--function", cfg.function, "Function label f1.., g1.. (default: all)");
  der->add_option("--direction", cfg.direction, "User direction (0-based)");
  der->add_option("--d", cfg.d_text, "Explicit direction");
  der->add_option("--z", cfg.z_text, "Also evaluate the curve x + t d + t^2/2 z");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_input;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    Runner runner(cfg, err);
    Json doc;
    int code = exit_ok;
    if (check->parsed()) {
      doc = runner.header("check");
      code = runner.check(doc);
    } else if (cq->parsed()) {
      doc = runner.header("cq");
      code = runner.cq(doc);
    } else if (cvx->parsed()) {
      doc = runner.header("convexity");
      code = runner.convexity(doc);
    } else {
      doc = runner.header("deriv");
      code = runner.deriv(doc);
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    doc["timing"] = Json{{"seconds", elapsed.count()}};
    out << doc.dump(2) << '\n';
    return code;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const LpError& e) {
    err << "numeric error: " << e.what() << '\n';
    return exit_numeric;
  } catch (const EvalError& e) {
    err << "numeric error: " << e.what() << '\n';
    return exit_numeric;
  } catch (const MissingDerivativeError& e) {
    err << "numeric error: " << e.what() << '\n';
    return exit_numeric;
  }
}

}  // namespace sockkt
