#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace sockkt {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major, one Vec per row

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::fmax(m, std::fabs(v));
  return m;
}

/// a + c * b
inline Vec axpy(std::span<const double> a, double c, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("axpy: size mismatch");
  Vec out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * b[i];
  return out;
}

inline Vec scaled(std::span<const double> a, double c) {
  Vec out(a.begin(), a.end());
  for (double& v : out) v *= c;
  return out;
}

inline bool is_zero(std::span<const double> a) {
  for (double v : a)
    if (v != 0.0) return false;
  return true;
}

}  // namespace sockkt
