#pragma once

#include <limkl/core.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace limkl {

// Solution of  min_a  1/2 a'Qa - 1'a   s.t.  0 <= a <= C,  y'a = 0.
// Q is the label-conjugated effective kernel, so the decision value of
// training point i is  y_i * ((Qa)_i) - y_i... recovered via the gradient;
// predictions use the caller's kernel convention.
struct SvmSolution {
  Vector alpha;
  double bias = 0.0;
  double C = 0.0;
  double objective = 0.0;
  std::vector<int> support_indices;
  double kkt_residual = 0.0;
  bool converged = true;
  long pair_updates = 0;
};

namespace detail {

inline void validate_qp_inputs(const Matrix& q, const IntVector& y, const Vector& box) {
  if (q.rows() != q.cols()) throw validation_error("solve_svm: Q not square");
  if (q.rows() != y.size() || box.size() != y.size())
    throw validation_error("solve_svm: dimension mismatch");
  if (!q.allFinite()) throw validation_error("solve_svm: non-finite entries in Q");
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if (!is_symmetric(q, 1e-9)) throw validation_error("solve_svm: Q not symmetric");
  if (q.diagonal().minCoeff() < -1e-9 * scale)
    throw validation_error("solve_svm: Q has negative diagonal, not PSD");
  for (Eigen::Index i = 0; i < box.size(); ++i)
    if (!(box[i] > 0.0)) throw validation_error("solve_svm: box bound must be > 0");
  require_binary_labels(y);
}

// Clip to the box, then restore y'a = 0 by shifting mass on coordinates
// with slack. Used to sanitize warm starts.
inline void make_feasible(Vector& a, const IntVector& y, const Vector& box) {
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = std::clamp(a[i], 0.0, box[i]);
  double r = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) r += y[i] * a[i];
  for (Eigen::Index i = 0; i < a.size() && std::abs(r) > 0.0; ++i) {
    // moving a_i by d changes r by y_i * d
    const double want = -r * y[i];
    const double d = std::clamp(want, -a[i], box[i] - a[i]);
    a[i] += d;
    r += y[i] * d;
  }
  if (std::abs(r) > 1e-9) a.setZero();  // give up, cold start
}

// KKT interval for the bias and the free-vector average, from v_i = y_i g_i.
inline double recover_bias(const Vector& alpha, const Vector& g, const IntVector& y,
                           const Vector& box) {
  double free_sum = 0.0;
  int free_count = 0;
  double lb = -std::numeric_limits<double>::infinity();
  double ub = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    const double v = y[i] * g[i];
    const double tol = 1e-8 * box[i];
    const bool at_lo = alpha[i] <= tol;
    const bool at_up = alpha[i] >= box[i] - tol;
    if (!at_lo && !at_up) {
      free_sum += v;
      ++free_count;
    } else if ((at_lo && y[i] == -1) || (at_up && y[i] == 1)) {
      lb = std::max(lb, v);
    } else {
      ub = std::min(ub, v);
    }
  }
  if (free_count > 0) return free_sum / free_count;
  if (std::isinf(lb)) return std::isinf(ub) ? 0.0 : ub;
  if (std::isinf(ub)) return lb;
  return 0.5 * (lb + ub);
}

}  // namespace detail

// SMO-style solver with maximal-violating-pair selection. Per-sample box
// bounds support the boosting module's weighted problems; the scalar-C
// overload below is the common entry point.
inline SvmSolution solve_svm(const Matrix& q, const IntVector& y, const Vector& box,
                             double kkt_tol = 1e-4, const Vector* warm_start = nullptr) {
  detail::validate_qp_inputs(q, y, box);
  if (!(kkt_tol > 0.0)) throw validation_error("solve_svm: kkt_tol must be > 0");
  const Eigen::Index m = y.size();

  Vector alpha;
  Vector g(m);
  if (warm_start && warm_start->size() == m && warm_start->allFinite()) {
    alpha = *warm_start;
    detail::make_feasible(alpha, y, box);
    g.noalias() = q * alpha;
    g.array() -= 1.0;
  } else {
    alpha = Vector::Zero(m);
    g.setConstant(-1.0);
  }

  const long max_updates = std::max<long>(200000, 2000L * m);
  long updates = 0;
  double residual = 0.0;
  double stall_obj = std::numeric_limits<double>::infinity();
  int stall_count = 0;

  while (true) {
    // objective progress stalls at the floating-point floor long before an
    // absolute tolerance is reachable on badly scaled Hessians; bail out
    // cleanly instead of spinning
    if (updates > 0 && updates % 256 == 0) {
      const double obj = 0.5 * alpha.dot(g - Vector::Ones(m));
      if (stall_obj - obj <= 1e-15 * std::max(1.0, std::abs(obj))) {
        if (++stall_count >= 4) break;
      } else {
        stall_count = 0;
      }
      stall_obj = obj;
    }
    // maximal violating pair over F_t = -y_t g_t
    int i = -1, j = -1;
    double up_max = -std::numeric_limits<double>::infinity();
    double low_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < m; ++t) {
      const double f = -y[t] * g[t];
      const bool can_up = (y[t] == 1) ? (alpha[t] < box[t]) : (alpha[t] > 0.0);
      const bool can_low = (y[t] == 1) ? (alpha[t] > 0.0) : (alpha[t] < box[t]);
      if (can_up && f > up_max) {
        up_max = f;
        i = static_cast<int>(t);
      }
      if (can_low && f < low_min) {
        low_min = f;
        j = static_cast<int>(t);
      }
    }
    if (i < 0 || j < 0) {
      residual = 0.0;
      break;
    }
    residual = up_max - low_min;
    if (residual <= kkt_tol) break;
    if (updates >= max_updates)
      throw convergence_error("solve_svm: pair-update budget exhausted, residual " +
                              std::to_string(residual));

    const double s = static_cast<double>(y[i]) * y[j];
    double quad = q(i, i) + q(j, j) - 2.0 * s * q(i, j);
    if (quad <= 0.0) quad = 1e-12;
    const double kappa = y[i] * alpha[i] + y[j] * alpha[j];  // conserved

    double ai = alpha[i] - (g[i] - s * g[j]) / quad;
    ai = std::clamp(ai, 0.0, box[i]);
    double aj = y[j] * kappa - s * ai;
    if (aj < 0.0 || aj > box[j]) {
      aj = std::clamp(aj, 0.0, box[j]);
      ai = std::clamp(y[i] * kappa - s * aj, 0.0, box[i]);
    }
    const double di = ai - alpha[i];
    const double dj = aj - alpha[j];
    if (std::abs(di) + std::abs(dj) == 0.0) break;  // blocked pair, numerical floor

    alpha[i] = ai;
    alpha[j] = aj;
    g.noalias() += di * q.col(i) + dj * q.col(j);
    ++updates;
  }

  SvmSolution sol;
  sol.alpha = std::move(alpha);
  sol.C = box.maxCoeff();
  sol.kkt_residual = std::max(residual, 0.0);
  sol.converged = sol.kkt_residual <= kkt_tol;
  sol.pair_updates = updates;
  sol.objective = 0.5 * sol.alpha.dot(g + Vector::Constant(m, -1.0));
  sol.bias = detail::recover_bias(sol.alpha, g, y, box);
  for (Eigen::Index t = 0; t < m; ++t)
    if (sol.alpha[t] > 1e-8 * box[t]) sol.support_indices.push_back(static_cast<int>(t));
  return sol;
}

inline SvmSolution solve_svm(const Matrix& q, const IntVector& y, double C,
                             double kkt_tol = 1e-4, const Vector* warm_start = nullptr) {
  if (!(C > 0.0)) throw validation_error("solve_svm: C must be > 0");
  SvmSolution sol = solve_svm(q, y, Vector::Constant(y.size(), C), kkt_tol, warm_start);
  sol.C = C;
  return sol;
}

// Label-conjugated Hessian  Q_ij = y_i y_j K_ij.
inline Matrix conjugate_labels(const Matrix& kernel, const IntVector& y) {
  if (kernel.rows() != y.size() || kernel.cols() != y.size())
    throw validation_error("conjugate_labels: dimension mismatch");
  Matrix q = kernel;
  for (Eigen::Index i = 0; i < q.rows(); ++i)
    for (Eigen::Index j = 0; j < q.cols(); ++j) q(i, j) *= static_cast<double>(y[i]) * y[j];
  return q;
}

// Training-set decision values  f_i = sum_j a_j y_j K_eff(j,i) - b,
// with K_eff recovered from the conjugated Hessian.
inline Vector decision_values_from_hessian(const Matrix& q, const IntVector& y,
                                           const SvmSolution& sol) {
  Vector qa = q * sol.alpha;
  Vector f(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) f[i] = y[i] * qa[i] - sol.bias;
  return f;
}

// Decision values on arbitrary columns of a kernel slice (rows = training
// points):  f_j = sum_i a_i y_i K(i, j) - b.
inline Vector kernel_decision_values(const Matrix& k_slice, const IntVector& y_train,
                                     const Vector& alpha, double bias) {
  if (k_slice.rows() != y_train.size() || alpha.size() != y_train.size())
    throw validation_error("kernel_decision_values: dimension mismatch");
  Vector coeff(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) coeff[i] = alpha[i] * y_train[i];
  Vector f = k_slice.transpose() * coeff;
  f.array() -= bias;
  return f;
}

}  // namespace limkl
