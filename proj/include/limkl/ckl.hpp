#pragma once

#include <limkl/linf.hpp>

#include <string>
#include <vector>

namespace limkl {

// Composite model: l-inf across descriptors (weights gamma), l-1 within each
// descriptor (weights lambda_j, optimal at a simplex vertex).
struct CklModel {
  Vector gamma;
  std::vector<Vector> inner_lambda;      // one simplex vector per descriptor
  std::vector<std::vector<int>> groups;  // descriptor -> kernel indices
  SvmSolution svm;
  std::vector<double> objective_trace;
  std::vector<Vector> gamma_trace;
  bool converged = false;
  int iterations = 0;
  bool tie_broken = false;
  IntVector labels;
  std::vector<std::string> recipes;
  std::string convention;

  int kernel_count() const {
    int l = 0;
    for (const auto& grp : groups) l += static_cast<int>(grp.size());
    return l;
  }
};

struct InnerUpdate {
  Vector lambda;  // one-hot
  double value = 0.0;
  int index = 0;
  bool tie = false;
};

// The inner l1 problem is linear over a simplex, so it is maximized at a
// vertex: pick the largest candidate. Ties go to the lowest index and are
// flagged for the model metadata.
inline InnerUpdate inner_lambda_update(const Vector& candidates) {
  if (candidates.size() < 1) throw validation_error("inner_lambda_update: empty group");
  InnerUpdate out;
  out.index = 0;
  for (Eigen::Index k = 1; k < candidates.size(); ++k)
    if (candidates[k] > candidates[out.index]) out.index = static_cast<int>(k);
  out.value = candidates[out.index];
  for (Eigen::Index k = 0; k < candidates.size(); ++k)
    if (k != static_cast<Eigen::Index>(out.index) && candidates[k] == out.value) out.tie = true;
  out.lambda = Vector::Zero(candidates.size());
  out.lambda[out.index] = 1.0;
  return out;
}

// Same closed form as the kernel-weight update; kept as its own entry point
// for the descriptor weights.
inline Vector gamma_update(const Vector& d) { return detail::sqrt_simplex_weights(d); }

inline Vector decision_values_ckl(const CklModel& model, const std::vector<Matrix>& slices) {
  detail::check_slices(slices, model.labels.size(), model.kernel_count());
  Vector coeff(model.labels.size());
  for (Eigen::Index i = 0; i < coeff.size(); ++i)
    coeff[i] = model.svm.alpha[i] * model.labels[i];
  Vector f = Vector::Zero(slices.front().cols());
  for (std::size_t j = 0; j < model.groups.size(); ++j) {
    const double gj = model.gamma[static_cast<Eigen::Index>(j)];
    if (gj <= 1e-300) continue;
    for (std::size_t t = 0; t < model.groups[j].size(); ++t) {
      const double w = model.inner_lambda[j][static_cast<Eigen::Index>(t)] / (2.0 * gj);
      if (w == 0.0) continue;
      f.noalias() += w * (slices[model.groups[j][t]].transpose() * coeff);
    }
  }
  f.array() -= model.svm.bias;
  return f;
}

inline IntVector predict_ckl(const CklModel& model, const std::vector<Matrix>& slices) {
  return detail::sign_labels(decision_values_ckl(model, slices));
}

// Alternating solver for the composite dual: SVM solve with the quadratic
// form 1/4 a' [sum_j (sum_k lambda_jk Y K_jk Y) / gamma_j] a (Hessian is half
// the bracket), then per-group argmax for lambda_j and the sqrt simplex
// update for gamma. The recorded objective is the dual value at the updated
// weights, 1/4 (sum_j sqrt(D_j))^2 - 1'a.
inline CklModel fit_ckl(const GramSet& g, const MklOptions& opt = {}) {
  g.validate();
  require_binary_labels(g.labels);
  if (!g.descriptor_of) throw validation_error("fit_ckl: GramSet has no descriptor grouping");
  if (!(opt.C > 0.0)) throw validation_error("fit_ckl: C must be > 0");
  const int l = g.kernel_count();
  const Eigen::Index m = g.point_count();

  std::vector<Matrix> conj(l);
  for (int k = 0; k < l; ++k) conj[k] = conjugate_labels(g.kernels[k].entries, g.labels);

  CklModel model;
  model.labels = g.labels;
  model.groups = g.groups();
  const int n = static_cast<int>(model.groups.size());
  model.gamma = Vector::Constant(n, 1.0 / n);
  model.inner_lambda.resize(n);
  for (int j = 0; j < n; ++j)
    model.inner_lambda[j] =
        Vector::Constant(static_cast<Eigen::Index>(model.groups[j].size()),
                         1.0 / static_cast<double>(model.groups[j].size()));
  model.convention =
      "hessian=0.5*sum_j(sum_k lambda_jk*YKY)/gamma_j;pred=sum(lambda*K/(2*gamma));"
      "trace=post-update dual value";

  Matrix hessian(m, m);
  Matrix group_kernel(m, m);
  Vector warm;
  double prev_solver_obj = 0.0;

  for (int it = 1; it <= opt.max_iter; ++it) {
    hessian.setZero();
    for (int j = 0; j < n; ++j) {
      group_kernel.setZero();
      for (std::size_t t = 0; t < model.groups[j].size(); ++t)
        group_kernel.noalias() +=
            model.inner_lambda[j][static_cast<Eigen::Index>(t)] * conj[model.groups[j][t]];
      hessian.noalias() += (1.0 / (2.0 * model.gamma[j])) * group_kernel;
    }

    const double tol = opt.svm_tol * std::max(1.0, hessian.diagonal().cwiseAbs().mean());
    SvmSolution sol =
        solve_svm(hessian, g.labels, opt.C, tol, warm.size() == m ? &warm : nullptr);
    warm = sol.alpha;
    model.svm = std::move(sol);
    model.iterations = it;

    Vector quad(l);
    for (int k = 0; k < l; ++k) quad[k] = model.svm.alpha.dot(conj[k] * model.svm.alpha);

    Vector d(n);
    std::vector<InnerUpdate> inner(n);
    for (int j = 0; j < n; ++j) {
      Vector candidates(static_cast<Eigen::Index>(model.groups[j].size()));
      for (std::size_t t = 0; t < model.groups[j].size(); ++t)
        candidates[static_cast<Eigen::Index>(t)] = quad[model.groups[j][t]];
      inner[j] = inner_lambda_update(candidates);
      d[j] = inner[j].value;
    }

    if (d.maxCoeff() <= 0.0) {
      // alpha = 0: keep previous weights
      model.objective_trace.push_back(-model.svm.alpha.sum());
      model.converged = true;
      break;
    }

    const Vector gamma_new = gamma_update(d);
    double sqrt_sum = 0.0;
    for (int j = 0; j < n; ++j) sqrt_sum += std::sqrt(std::max(d[j], 0.0));
    model.objective_trace.push_back(0.25 * sqrt_sum * sqrt_sum - model.svm.alpha.sum());
    model.gamma_trace.push_back(gamma_new);

    double weight_change = (gamma_new - model.gamma).cwiseAbs().maxCoeff();
    for (int j = 0; j < n; ++j)
      weight_change =
          std::max(weight_change, (inner[j].lambda - model.inner_lambda[j]).cwiseAbs().maxCoeff());

    bool converged = false;
    if (it >= 2 && std::abs(model.svm.objective - prev_solver_obj) <=
                       opt.obj_tol * std::max(1.0, std::abs(prev_solver_obj)))
      converged = true;
    if (weight_change < opt.weight_tol) converged = true;

    prev_solver_obj = model.svm.objective;
    model.gamma = gamma_new;
    for (int j = 0; j < n; ++j) {
      if (inner[j].tie) model.tie_broken = true;
      model.inner_lambda[j] = inner[j].lambda;
    }
    if (converged) {
      model.converged = true;
      break;
    }
  }
  return model;
}

}  // namespace limkl
