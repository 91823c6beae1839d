#pragma once

namespace sockkt {

struct Tolerances {
  double active_tol = 1e-9;   // |g_i(x)| <= active_tol  =>  i in I(x)
  double feas_tol = 1e-9;     // g_i(x) <= feas_tol for all i  =>  feasible
  double crit_tol = 1e-9;     // criticality and the J / K index sets
  double b_tol = 1e-9;        // slack allowed in B(x,d) membership
  double cert_tol = 1e-8;     // multiplier residuals, weak certificate rows
  double cert_margin = 1e-8;  // strict certificate rows must be <= -margin
  double lp_tol = 1e-9;
};

}  // namespace sockkt
