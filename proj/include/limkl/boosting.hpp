#pragma once

#include <limkl/kernels.hpp>
#include <limkl/qp.hpp>

#include <cmath>
#include <vector>

namespace limkl {

struct BoostOptions {
  double C = 1.0;
  int max_rounds = 10;
  double svm_tol = 1e-6;
};

// Discrete AdaBoost over per-kernel SVM weak learners. Sample weights are
// folded into the SVM box as C_i = C * m * w_i instead of resampling, so fits
// are deterministic.
struct BoostModel {
  struct Round {
    int kernel = 0;
    SvmSolution svm;
    double beta = 0.0;
    double weighted_error = 0.0;
  };
  std::vector<Round> rounds;
  int max_rounds = 0;
  IntVector labels;
  std::vector<Vector> weight_trace;  // sample weights after each reweighting
  std::vector<std::string> recipes;
};

namespace detail {

inline int sign_plus(double v) { return v >= 0.0 ? 1 : -1; }

}  // namespace detail

inline BoostModel fit_boost(const GramSet& g, const BoostOptions& opt = {}) {
  g.validate();
  require_binary_labels(g.labels);
  if (opt.max_rounds < 1) throw validation_error("fit_boost: max_rounds must be >= 1");
  if (!(opt.C > 0.0)) throw validation_error("fit_boost: C must be > 0");
  const int l = g.kernel_count();
  const Eigen::Index m = g.point_count();

  std::vector<Matrix> conj(l);
  for (int k = 0; k < l; ++k) conj[k] = conjugate_labels(g.kernels[k].entries, g.labels);

  BoostModel model;
  model.labels = g.labels;
  model.max_rounds = opt.max_rounds;

  Vector weights = Vector::Constant(m, 1.0 / static_cast<double>(m));
  const double eps_min = 1.0 / (2.0 * static_cast<double>(m));

  for (int round = 0; round < opt.max_rounds; ++round) {
    Vector box(m);
    for (Eigen::Index i = 0; i < m; ++i)
      box[i] = std::max(opt.C * static_cast<double>(m) * weights[i], 1e-300);

    int best_kernel = -1;
    double best_error = std::numeric_limits<double>::infinity();
    SvmSolution best_sol;
    IntVector best_pred;
    for (int k = 0; k < l; ++k) {
      SvmSolution sol = solve_svm(conj[k], g.labels, box, opt.svm_tol);
      const Vector f = kernel_decision_values(g.kernels[k].entries, g.labels, sol.alpha, sol.bias);
      IntVector pred(m);
      double err = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        pred[i] = detail::sign_plus(f[i]);
        if (pred[i] != g.labels[i]) err += weights[i];
      }
      if (err < best_error) {
        best_error = err;
        best_kernel = k;
        best_sol = std::move(sol);
        best_pred = std::move(pred);
      }
    }

    if (best_error >= 0.5) break;  // no usable weak learner left

    const bool perfect = best_error == 0.0;
    const double eps_eff = std::max(best_error, eps_min);
    const double beta = 0.5 * std::log((1.0 - eps_eff) / eps_eff);

    BoostModel::Round r;
    r.kernel = best_kernel;
    r.svm = std::move(best_sol);
    r.beta = beta;
    r.weighted_error = best_error;
    model.rounds.push_back(std::move(r));

    if (perfect) break;  // cap applied, nothing left to reweight

    for (Eigen::Index i = 0; i < m; ++i)
      weights[i] *= std::exp(-beta * g.labels[i] * best_pred[i]);
    weights /= weights.sum();
    model.weight_trace.push_back(weights);
  }
  return model;
}

inline Vector decision_values_boost(const BoostModel& model, const std::vector<Matrix>& slices) {
  if (slices.empty()) throw validation_error("predict_boost: no slices");
  const Eigen::Index cols = slices.front().cols();
  for (const auto& s : slices) {
    if (s.rows() != model.labels.size())
      throw validation_error("predict_boost: slice rows != training points");
    if (s.cols() != cols) throw validation_error("predict_boost: inconsistent slice widths");
  }
  Vector f = Vector::Zero(cols);
  for (const auto& r : model.rounds) {
    if (r.kernel < 0 || r.kernel >= static_cast<int>(slices.size()))
      throw validation_error("predict_boost: round kernel index out of range");
    const Vector fr =
        kernel_decision_values(slices[r.kernel], model.labels, r.svm.alpha, r.svm.bias);
    for (Eigen::Index i = 0; i < cols; ++i)
      f[i] += r.beta * detail::sign_plus(fr[i]);
  }
  return f;
}

// Weighted vote sign(sum_t beta_t h_t(x)), sign(0) -> +1.
inline IntVector predict_boost(const BoostModel& model, const std::vector<Matrix>& slices) {
  const Vector f = decision_values_boost(model, slices);
  IntVector out(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) out[i] = detail::sign_plus(f[i]);
  return out;
}

}  // namespace limkl
