#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgdyn {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;          // [i][j]
using Tensor3 = std::vector<Mat>;      // [s][a1][a2]
using Tensor4 = std::vector<Tensor3>;  // [s][a1][a2][s']

// Tolerance for "is this vector a probability distribution" checks.
inline constexpr double kSimplexTol = 1e-9;
// Tolerance below which two action values count as tied.
inline constexpr double kTieTol = 1e-12;
// Tolerance for the zero-sum test max|r1 + r2| <= kZeroSumTol.
inline constexpr double kZeroSumTol = 1e-9;

inline bool is_distribution(const Vec& p, double tol = kSimplexTol) {
  double sum = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < -tol) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= tol;
}

inline Vec uniform_distribution(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_distribution: empty support");
  return Vec(n, 1.0 / static_cast<double>(n));
}

inline Vec one_hot(std::size_t n, std::size_t i) {
  Vec v(n, 0.0);
  v.at(i) = 1.0;
  return v;
}

// Smallest index whose value is within kTieTol of the maximum.
inline int argmax_with_ties(const Vec& values) {
  if (values.empty()) throw std::invalid_argument("argmax_with_ties: empty vector");
  double best = values[0];
  for (double v : values) best = std::max(best, v);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] >= best - kTieTol) return static_cast<int>(i);
  return 0;
}

inline double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline Mat make_mat(std::size_t rows, std::size_t cols, double fill = 0.0) {
  return Mat(rows, Vec(cols, fill));
}

inline Tensor3 make_tensor3(std::size_t s, std::size_t a1, std::size_t a2, double fill = 0.0) {
  return Tensor3(s, make_mat(a1, a2, fill));
}

inline Tensor4 make_tensor4(std::size_t s, std::size_t a1, std::size_t a2, std::size_t s2,
                            double fill = 0.0) {
  return Tensor4(s, make_tensor3(a1, a2, s2, fill));
}

}  // namespace sgdyn
