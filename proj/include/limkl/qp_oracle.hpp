#pragma once

#include <limkl/qp.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace limkl {

// Dense projected-gradient oracle for the SVM dual. Slow, independent of the
// SMO path, and meant for cross-checks on small problems (m <= 30). Gradient
// steps of 1/L are followed by an active-set polish that solves the reduced
// KKT system exactly and accepts only when the full KKT conditions certify
// optimality, so the reported objective is exact to rounding.
struct OracleOptions {
  long max_iterations = 2000000;
  int polish_interval = 200;
  bool polish = true;
  double kkt_eps = 1e-9;
};

namespace detail {

// Euclidean projection onto {0 <= a <= C, y'a = 0} by bisection on the
// multiplier of the equality constraint.
inline Vector project_box_hyperplane(const Vector& v, const IntVector& y, const Vector& box) {
  const Eigen::Index m = v.size();
  auto alpha_of = [&](double t, Vector& out) {
    double r = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      out[i] = std::clamp(v[i] - t * y[i], 0.0, box[i]);
      r += y[i] * out[i];
    }
    return r;
  };
  Vector out(m);
  double radius = box.maxCoeff() + 1.0;
  for (Eigen::Index i = 0; i < m; ++i) radius = std::max(radius, std::abs(v[i]));
  double lo = -radius, hi = radius;
  // y'a(t) is non-increasing in t
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (alpha_of(mid, out) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  alpha_of(0.5 * (lo + hi), out);
  return out;
}

// Solve the equality-constrained QP on the free set, holding active
// coordinates at their bounds. Returns false when the candidate fails any
// KKT check.
inline bool polish_active_set(const Matrix& q, const IntVector& y, const Vector& box,
                              Vector& alpha, double& bias, double kkt_eps) {
  const Eigen::Index m = alpha.size();
  std::vector<int> free_set, active;
  Vector snapped = alpha;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double tol = 1e-7 * box[i];
    if (snapped[i] <= tol) {
      snapped[i] = 0.0;
      active.push_back(static_cast<int>(i));
    } else if (snapped[i] >= box[i] - tol) {
      snapped[i] = box[i];
      active.push_back(static_cast<int>(i));
    } else {
      free_set.push_back(static_cast<int>(i));
    }
  }

  const int f = static_cast<int>(free_set.size());
  double nu = 0.0;
  Vector candidate = snapped;
  if (f > 0) {
    Matrix kkt = Matrix::Zero(f + 1, f + 1);
    Vector rhs(f + 1);
    for (int a = 0; a < f; ++a) {
      for (int b = 0; b < f; ++b) kkt(a, b) = q(free_set[a], free_set[b]);
      kkt(a, f) = y[free_set[a]];
      kkt(f, a) = y[free_set[a]];
      double r = 1.0;
      for (int idx : active) r -= q(free_set[a], idx) * snapped[idx];
      rhs[a] = r;
    }
    double fixed = 0.0;
    for (int idx : active) fixed += y[idx] * snapped[idx];
    rhs[f] = -fixed;

    Eigen::FullPivLU<Matrix> lu(kkt);
    Vector x = lu.solve(rhs);
    if (!x.allFinite()) return false;
    if ((kkt * x - rhs).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, rhs.cwiseAbs().maxCoeff()))
      return false;
    for (int a = 0; a < f; ++a) {
      const double v = x[a];
      if (v < -1e-12 * box[free_set[a]] || v > box[free_set[a]] * (1.0 + 1e-12)) return false;
      candidate[free_set[a]] = std::clamp(v, 0.0, box[free_set[a]]);
    }
    nu = x[f];
  } else {
    // all at bounds: nu must satisfy the sign conditions below; take the
    // midpoint of the admissible interval
    Vector g = q * candidate;
    g.array() -= 1.0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      // at 0: g_i + nu y_i >= 0 ; at C: g_i + nu y_i <= 0
      if (candidate[i] == 0.0) {
        if (y[i] == 1)
          lo = std::max(lo, -g[i]);
        else
          hi = std::min(hi, g[i]);
      } else {
        if (y[i] == 1)
          hi = std::min(hi, -g[i]);
        else
          lo = std::max(lo, g[i]);
      }
    }
    if (lo > hi + kkt_eps) return false;
    if (std::isinf(lo) && std::isinf(hi)) return false;
    nu = std::isinf(lo) ? hi : (std::isinf(hi) ? lo : 0.5 * (lo + hi));
  }

  Vector g = q * candidate;
  g.array() -= 1.0;
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < m; ++i) {
    const double stat = g[i] + nu * y[i];
    const double tol = 1e-7 * box[i];
    if (candidate[i] <= tol) {
      if (stat < -kkt_eps * scale) return false;
    } else if (candidate[i] >= box[i] - tol) {
      if (stat > kkt_eps * scale) return false;
    } else {
      if (std::abs(stat) > kkt_eps * scale * 10.0) return false;
    }
  }

  alpha = candidate;
  bias = -nu;
  return true;
}

}  // namespace detail

inline SvmSolution brute_force_svm(const Matrix& q, const IntVector& y, double C,
                                   const OracleOptions& opt = {}) {
  if (!(C > 0.0)) throw validation_error("brute_force_svm: C must be > 0");
  if (y.size() > 30) throw validation_error("brute_force_svm: size guard, m must be <= 30");
  const Vector box = Vector::Constant(y.size(), C);
  detail::validate_qp_inputs(q, y, box);
  const Eigen::Index m = y.size();

  Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
  const double lipschitz = std::max(es.eigenvalues().maxCoeff(), 1e-12);
  const double step = 1.0 / lipschitz;

  Vector alpha = detail::project_box_hyperplane(Vector::Zero(m), y, box);
  double bias = 0.0;
  bool certified = false;
  double prev_obj = std::numeric_limits<double>::infinity();
  long stall = 0;

  for (long it = 0; it < opt.max_iterations; ++it) {
    Vector g = q * alpha;
    g.array() -= 1.0;
    alpha = detail::project_box_hyperplane(alpha - step * g, y, box);

    if (opt.polish && (it + 1) % opt.polish_interval == 0) {
      Vector trial = alpha;
      double trial_bias = 0.0;
      if (detail::polish_active_set(q, y, box, trial, trial_bias, opt.kkt_eps)) {
        alpha = trial;
        bias = trial_bias;
        certified = true;
        break;
      }
      const double obj = 0.5 * alpha.dot(q * alpha) - alpha.sum();
      if (std::abs(prev_obj - obj) <= 1e-15 * std::max(1.0, std::abs(obj))) {
        if (++stall > 50) break;
      } else {
        stall = 0;
      }
      prev_obj = obj;
    }
  }

  SvmSolution sol;
  sol.alpha = alpha;
  sol.C = C;
  Vector g = q * alpha;
  g.array() -= 1.0;
  sol.objective = 0.5 * alpha.dot(g + Vector::Constant(m, -1.0));
  sol.bias = certified ? bias : detail::recover_bias(alpha, g, y, box);
  sol.converged = certified;
  // report the same first-order residual solve_svm uses
  double up_max = -std::numeric_limits<double>::infinity();
  double low_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < m; ++t) {
    const double f = -y[t] * g[t];
    const bool can_up = (y[t] == 1) ? (alpha[t] < box[t] - 1e-12 * C) : (alpha[t] > 1e-12 * C);
    const bool can_low = (y[t] == 1) ? (alpha[t] > 1e-12 * C) : (alpha[t] < box[t] - 1e-12 * C);
    if (can_up) up_max = std::max(up_max, f);
    if (can_low) low_min = std::min(low_min, f);
  }
  if (std::isfinite(up_max) && std::isfinite(low_min))
    sol.kkt_residual = std::max(up_max - low_min, 0.0);
  for (Eigen::Index t = 0; t < m; ++t)
    if (alpha[t] > 1e-8 * C) sol.support_indices.push_back(static_cast<int>(t));
  return sol;
}

}  // namespace limkl
