#include "sockkt/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sockkt/error.hpp"

namespace sockkt {

namespace {

struct Column {
  enum Kind { structural, slack, artificial } kind;
  std::size_t var = 0;  // structural only
  double sign = 1.0;    // -1 for the negative part of a free variable
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), a_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t i, std::size_t j) { return a_[i * (n_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return a_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, n_); }
  double& cost(std::size_t j) { return at(m_, j); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    double p = at(r, c);
    for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  void drop_row(std::size_t r) {
    std::vector<double> b;
    b.reserve(m_ * (n_ + 1));
    for (std::size_t i = 0; i <= m_; ++i)
      if (i != r) b.insert(b.end(), a_.begin() + i * (n_ + 1), a_.begin() + (i + 1) * (n_ + 1));
    a_.swap(b);
    basis_.erase(basis_.begin() + static_cast<long>(r));
    --m_;
  }

  bool finite() const {
    return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
  }

 private:
  std::size_t m_, n_;
  std::vector<double> a_;
  std::vector<std::size_t> basis_;
};

enum class RunResult { optimal, unbounded };

class Simplex {
 public:
  Simplex(Tableau& t, const LPOptions& opts, std::size_t& pivots)
      : t_(t), opts_(opts), pivots_(pivots) {}

  /// Minimizes the cost row over columns with allowed[j]. On unbounded,
  /// `entering` holds the column of the improving ray.
  RunResult run(const std::vector<bool>& allowed, std::size_t& entering) {
    for (;;) {
      std::size_t q = t_.cols();
      for (std::size_t j = 0; j < t_.cols(); ++j)
        if (allowed[j] && t_.cost(j) < -opts_.tol) {
          q = j;
          break;
        }
      if (q == t_.cols()) return RunResult::optimal;

      std::size_t r = t_.rows();
      double best = std::numeric_limits<double>::infinity();
      bool tiny_only = false;
      for (std::size_t i = 0; i < t_.rows(); ++i) {
        double a = t_.at(i, q);
        if (a > opts_.tol) {
          double ratio = t_.rhs(i) / a;
          if (r == t_.rows()) {
            best = ratio;
            r = i;
            continue;
          }
          double slack = 1e-12 * std::max(1.0, std::fabs(best));
          if (ratio < best - slack || (ratio <= best + slack && t_.basis()[i] < t_.basis()[r])) {
            best = std::min(best, ratio);
            r = i;
          }
        } else if (a > opts_.pivot_tol) {
          tiny_only = true;
        }
      }
      if (r == t_.rows()) {
        if (tiny_only) {
          std::ostringstream os;
          os << "simplex breakdown at pivot " << pivots_ + 1 << ": entering column " << q
             << " has only pivots below tolerance";
          throw LpError(os.str());
        }
        entering = q;
        return RunResult::unbounded;
      }
      do_pivot(r, q);
    }
  }

  void do_pivot(std::size_t r, std::size_t q) {
    double p = t_.at(r, q);
    if (std::fabs(p) < opts_.pivot_tol) {
      std::ostringstream os;
      os << "simplex breakdown at pivot " << pivots_ + 1 << ": |pivot| = " << std::fabs(p);
      throw LpError(os.str());
    }
    if (opts_.trace)
      *opts_.trace << "pivot " << pivots_ + 1 << ": row " << r << " col " << q << " value " << p
                   << '\n';
    t_.pivot(r, q);
    ++pivots_;
    for (std::size_t i = 0; i < t_.rows(); ++i)
      if (t_.rhs(i) < 0.0 && t_.rhs(i) > -opts_.tol) t_.rhs(i) = 0.0;
    if (!t_.finite()) {
      std::ostringstream os;
      os << "simplex breakdown at pivot " << pivots_ << ": non-finite tableau entry";
      throw LpError(os.str());
    }
    if (pivots_ > opts_.max_pivots) throw LpError("simplex pivot limit exceeded");
  }

 private:
  Tableau& t_;
  const LPOptions& opts_;
  std::size_t& pivots_;
};

}  // namespace

void LinearProgram::add_row(Vec coeffs, LPRelation rel, double rhs) {
  rows.push_back({std::move(coeffs), rel, rhs});
}

void LinearProgram::validate() const {
  if (bounds.size() != objective.size())
    throw std::invalid_argument("linear program: bounds and objective differ in length");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(objective.begin(), objective.end(), finite))
    throw std::invalid_argument("linear program: non-finite objective coefficient");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].coeffs.size() != objective.size())
      throw std::invalid_argument("linear program: row " + std::to_string(i) + " has wrong width");
    if (!std::all_of(rows[i].coeffs.begin(), rows[i].coeffs.end(), finite) ||
        !std::isfinite(rows[i].rhs))
      throw std::invalid_argument("linear program: non-finite data in row " + std::to_string(i));
  }
}

const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::optimal: return "optimal";
    case LPStatus::infeasible: return "infeasible";
    case LPStatus::unbounded: return "unbounded";
  }
  return "?";
}

LPOutcome solve(const LinearProgram& lp, const LPOptions& opts) {
  lp.validate();
  const std::size_t nv = lp.num_vars();

  std::vector<Column> cols;
  std::vector<std::size_t> pos_col(nv), neg_col(nv, SIZE_MAX);
  for (std::size_t j = 0; j < nv; ++j) {
    pos_col[j] = cols.size();
    cols.push_back({Column::structural, j, 1.0});
    if (lp.bounds[j] == LPBound::free) {
      neg_col[j] = cols.size();
      cols.push_back({Column::structural, j, -1.0});
    }
  }
  const std::size_t num_structural = cols.size();

  // Rows normalized to rhs >= 0.
  struct NormRow {
    Vec coeffs;
    LPRelation rel;
    double rhs;
  };
  std::vector<NormRow> rows;
  for (const auto& r : lp.rows) {
    NormRow nr{r.coeffs, r.rel, r.rhs};
    if (nr.rhs < 0.0) {
      for (double& c : nr.coeffs) c = -c;
      nr.rhs = -nr.rhs;
      if (nr.rel == LPRelation::le)
        nr.rel = LPRelation::ge;
      else if (nr.rel == LPRelation::ge)
        nr.rel = LPRelation::le;
    }
    rows.push_back(std::move(nr));
  }
  std::vector<std::size_t> slack_col(rows.size(), SIZE_MAX), art_col(rows.size(), SIZE_MAX);
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].rel != LPRelation::eq) {
      slack_col[i] = cols.size();
      cols.push_back({Column::slack});
    }
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].rel != LPRelation::le) {
      art_col[i] = cols.size();
      cols.push_back({Column::artificial});
    }

  Tableau t(rows.size(), cols.size());
  double max_rhs = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < nv; ++j) {
      t.at(i, pos_col[j]) = rows[i].coeffs[j];
      if (neg_col[j] != SIZE_MAX) t.at(i, neg_col[j]) = -rows[i].coeffs[j];
    }
    if (slack_col[i] != SIZE_MAX) t.at(i, slack_col[i]) = rows[i].rel == LPRelation::le ? 1.0 : -1.0;
    if (art_col[i] != SIZE_MAX) t.at(i, art_col[i]) = 1.0;
    t.rhs(i) = rows[i].rhs;
    max_rhs = std::max(max_rhs, rows[i].rhs);
    t.basis()[i] = rows[i].rel == LPRelation::le ? slack_col[i] : art_col[i];
  }

  LPOutcome out;
  Simplex simplex(t, opts, out.pivots);
  std::vector<bool> allowed(cols.size(), true);
  std::size_t entering = 0;

  // Phase 1: minimize the sum of artificials.
  bool any_art = std::any_of(art_col.begin(), art_col.end(), [](auto c) { return c != SIZE_MAX; });
  if (any_art) {
    for (std::size_t j = 0; j <= cols.size(); ++j) t.at(t.rows(), j) = 0.0;
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (cols[j].kind == Column::artificial) t.cost(j) = 1.0;
    for (std::size_t i = 0; i < t.rows(); ++i)
      if (cols[t.basis()[i]].kind == Column::artificial)
        for (std::size_t j = 0; j <= cols.size(); ++j) t.at(t.rows(), j) -= t.at(i, j);
    if (simplex.run(allowed, entering) != RunResult::optimal)
      throw LpError("phase 1 reported an unbounded auxiliary problem");
    double infeas = -t.at(t.rows(), cols.size());
    if (infeas > opts.tol * std::max(1.0, max_rhs)) {
      out.status = LPStatus::infeasible;
      return out;
    }
    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are redundant.
    for (std::size_t i = 0; i < t.rows();) {
      if (cols[t.basis()[i]].kind != Column::artificial) {
        ++i;
        continue;
      }
      std::size_t best = cols.size();
      double best_abs = opts.pivot_tol;
      for (std::size_t j = 0; j < cols.size(); ++j)
        if (cols[j].kind != Column::artificial && std::fabs(t.at(i, j)) > best_abs) {
          best_abs = std::fabs(t.at(i, j));
          best = j;
        }
      if (best == cols.size()) {
        t.drop_row(i);
      } else {
        simplex.do_pivot(i, best);
        ++i;
      }
    }
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (cols[j].kind == Column::artificial) allowed[j] = false;
  }

  // Phase 2.
  const double flip = lp.sense == LPSense::maximize ? -1.0 : 1.0;
  std::vector<double> c(cols.size(), 0.0);
  for (std::size_t j = 0; j < num_structural; ++j)
    c[j] = flip * cols[j].sign * lp.objective[cols[j].var];
  for (std::size_t j = 0; j <= cols.size(); ++j) t.at(t.rows(), j) = j < cols.size() ? c[j] : 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    double cb = c[t.basis()[i]];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= cols.size(); ++j) t.at(t.rows(), j) -= cb * t.at(i, j);
  }

  auto to_original = [&](const std::vector<double>& colval) {
    Vec x(nv, 0.0);
    for (std::size_t j = 0; j < num_structural; ++j) x[cols[j].var] += cols[j].sign * colval[j];
    return x;
  };

  if (simplex.run(allowed, entering) == RunResult::unbounded) {
    std::vector<double> dir(cols.size(), 0.0);
    dir[entering] = 1.0;
    for (std::size_t i = 0; i < t.rows(); ++i) dir[t.basis()[i]] = -t.at(i, entering);
    out.status = LPStatus::unbounded;
    out.ray = to_original(dir);
    return out;
  }

  std::vector<double> colval(cols.size(), 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i) colval[t.basis()[i]] = t.rhs(i);
  out.status = LPStatus::optimal;
  out.solution = to_original(colval);
  out.value = dot(lp.objective, out.solution);

  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const auto& r = lp.rows[i];
    double lhs = 0.0, scale = std::fabs(r.rhs);
    for (std::size_t j = 0; j < nv; ++j) {
      lhs += r.coeffs[j] * out.solution[j];
      scale = std::max(scale, std::fabs(r.coeffs[j] * out.solution[j]));
    }
    double viol = r.rel == LPRelation::le   ? lhs - r.rhs
                  : r.rel == LPRelation::ge ? r.rhs - lhs
                                            : std::fabs(lhs - r.rhs);
    if (viol > opts.tol * std::max(1.0, scale))
      throw LpError("simplex returned a point violating row " + std::to_string(i) + " by " +
                    std::to_string(viol));
  }
  return out;
}

LinearProgram dual_of(const LinearProgram& lp) {
  lp.validate();
  const std::size_t nv = lp.num_vars();
  const std::size_t m = lp.rows.size();
  const double flip = lp.sense == LPSense::maximize ? -1.0 : 1.0;

  // Work with  min (flip*c)^T x  and every inequality as  a x >= b.
  LinearProgram d(m, lp.sense == LPSense::maximize ? LPSense::minimize : LPSense::maximize);
  for (std::size_t i = 0; i < m; ++i) {
    double s = lp.rows[i].rel == LPRelation::le ? -1.0 : 1.0;
    d.objective[i] = flip * s * lp.rows[i].rhs;
    d.bounds[i] = lp.rows[i].rel == LPRelation::eq ? LPBound::free : LPBound::nonneg;
  }
  for (std::size_t j = 0; j < nv; ++j) {
    Vec col(m);
    for (std::size_t i = 0; i < m; ++i) {
      double s = lp.rows[i].rel == LPRelation::le ? -1.0 : 1.0;
      col[i] = s * lp.rows[i].coeffs[j];
    }
    d.add_row(std::move(col), lp.bounds[j] == LPBound::free ? LPRelation::eq : LPRelation::le,
              flip * lp.objective[j]);
  }
  // For a max primal the dual objective above is min (-b)^T y, matching
  // max c^T x = -min(-c)^T x.
  return d;
}

StrictSolution strict_system_solvable(const StrictSystem& sys, const LPOptions& opts) {
  const std::size_t n = sys.num_vars;
  if (sys.strict_rows.empty() && sys.strict_vars.empty())
    throw std::invalid_argument("strict system needs a strict row or a strict variable");

  const std::size_t sigma = n;
  LinearProgram lp(n + 1, LPSense::maximize, LPBound::free);
  lp.objective[sigma] = 1.0;
  for (const auto& r : sys.strict_rows) {
    if (r.size() != n) throw std::invalid_argument("strict system: row width mismatch");
    Vec c(r);
    c.push_back(1.0);
    lp.add_row(std::move(c), LPRelation::le, 0.0);
  }
  for (const auto& r : sys.weak_rows) {
    if (r.size() != n) throw std::invalid_argument("strict system: row width mismatch");
    Vec c(r);
    c.push_back(0.0);
    lp.add_row(std::move(c), LPRelation::le, 0.0);
  }
  for (std::size_t v : sys.strict_vars) {
    if (v >= n) throw std::invalid_argument("strict system: strict variable out of range");
    Vec c(n + 1, 0.0);
    c[v] = -1.0;
    c[sigma] = 1.0;
    lp.add_row(std::move(c), LPRelation::le, 0.0);
  }
  Vec cap(n + 1, 0.0);
  cap[sigma] = 1.0;
  lp.add_row(std::move(cap), LPRelation::le, 1.0);

  LPOutcome o = solve(lp, opts);
  if (o.status != LPStatus::optimal)
    throw LpError(std::string("strict system LP unexpectedly ") + to_string(o.status));

  StrictSolution s;
  s.sigma = o.value;
  s.pivots = o.pivots;
  if (o.value >= 1.0 - opts.tol) {
    s.solvable = true;
    s.witness.assign(o.solution.begin(), o.solution.begin() + static_cast<long>(n));
  } else if (o.value > opts.tol) {
    std::ostringstream os;
    os << "strict system optimum sigma = " << o.value << " is neither 0 nor 1";
    throw LpError(os.str());
  }
  return s;
}

}  // namespace sockkt
