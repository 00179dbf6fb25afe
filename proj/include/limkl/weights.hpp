#pragma once

#include <limkl/core.hpp>

#include <cmath>

namespace limkl {
namespace detail {

// Minimizer of  sum_k D_k / w_k  over the probability simplex:
// w_k = sqrt(D_k) / sum_j sqrt(D_j). Shared by the kernel-weight and
// descriptor-weight updates; both call it with their own D vectors.
inline Vector sqrt_simplex_weights(const Vector& d) {
  if (d.size() < 1) throw validation_error("simplex update: empty D vector");
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  Vector roots(d.size());
  double total = 0.0;
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    double v = d[k];
    if (v < 0.0) {
      if (v < -1e-12 * scale) throw validation_error("simplex update: negative D entry");
      v = 0.0;
    }
    roots[k] = std::sqrt(v);
    total += roots[k];
  }
  if (total == 0.0)
    throw degenerate_direction_error("simplex update: all-zero D, direction undefined");
  return roots / total;
}

}  // namespace detail
}  // namespace limkl
