#pragma once

#include <limkl/linf.hpp>

namespace limkl {

// Plain SVM on a single precomputed kernel.
inline LinfModel fit_svm(const GramSet& g, const MklOptions& opt = {}) {
  g.validate();
  require_binary_labels(g.labels);
  if (g.kernel_count() != 1) throw validation_error("fit_svm: expects exactly one kernel");
  LinfModel model;
  model.kind = ModelKind::svm;
  model.labels = g.labels;
  model.lambda = Vector::Ones(1);
  model.convention = "hessian=YKY;pred=K";
  model.svm = solve_svm(conjugate_labels(g.kernels[0].entries, g.labels), g.labels, opt.C,
                        opt.svm_tol);
  model.objective_trace.push_back(model.svm.objective);
  model.converged = true;
  model.iterations = 1;
  return model;
}

// L2-MKL: the optimal kernel is the plain sum of the given kernels, so this
// is a single SVM solve on sum_k K_k. lambda is recorded uniform for reports.
inline LinfModel fit_l2(const GramSet& g, const MklOptions& opt = {}) {
  g.validate();
  require_binary_labels(g.labels);
  if (!(opt.C > 0.0)) throw validation_error("fit_l2: C must be > 0");
  const int l = g.kernel_count();

  Matrix sum = g.kernels[0].entries;
  for (int k = 1; k < l; ++k) sum += g.kernels[k].entries;

  LinfModel model;
  model.kind = ModelKind::l2;
  model.labels = g.labels;
  model.lambda = Vector::Constant(l, 1.0 / l);
  model.convention = "hessian=Y(sumK)Y;pred=sum(K)";
  model.svm = solve_svm(conjugate_labels(sum, g.labels), g.labels, opt.C, opt.svm_tol);
  model.objective_trace.push_back(model.svm.objective);
  model.converged = true;
  model.iterations = 1;
  return model;
}

namespace detail {

// Max-form dual value of the block l1 formulation at the current iterate:
// 1'a - 1/2 a' (sum_k lambda_k Y K_k Y) a. solve_svm minimizes the negative,
// so this is just the negated solver objective.
inline double l1_dual_value(const SvmSolution& sol) { return -sol.objective; }

}  // namespace detail

// Block l1 MKL baseline: alternates the SVM solve on sum_k lambda_k Y K_k Y
// with the multiplicative update lambda_k <- lambda_k sqrt(D_k) normalized,
// D_k = a' Y K_k Y a. Sparsity in lambda is the expected outcome. For l = 2
// a final grid polish over the 1-simplex guards against slow multiplicative
// convergence.
inline LinfModel fit_l1(const GramSet& g, const MklOptions& opt = {}) {
  g.validate();
  require_binary_labels(g.labels);
  if (!(opt.C > 0.0)) throw validation_error("fit_l1: C must be > 0");
  const int l = g.kernel_count();
  const Eigen::Index m = g.point_count();

  std::vector<Matrix> conj(l);
  for (int k = 0; k < l; ++k) conj[k] = conjugate_labels(g.kernels[k].entries, g.labels);

  LinfModel model;
  model.kind = ModelKind::l1;
  model.labels = g.labels;
  model.lambda = Vector::Constant(l, 1.0 / l);
  model.convention = "hessian=sum(lambda*YKY);pred=sum(lambda*K);trace=max-form";

  Matrix hessian(m, m);
  Vector warm;
  double prev_val = 0.0;

  auto solve_at = [&](const Vector& lambda) {
    hessian.setZero();
    for (int k = 0; k < l; ++k) {
      if (lambda[k] == 0.0) continue;
      hessian.noalias() += lambda[k] * conj[k];
    }
    const double tol = opt.svm_tol * std::max(1.0, hessian.diagonal().cwiseAbs().mean());
    return solve_svm(hessian, g.labels, opt.C, tol, warm.size() == m ? &warm : nullptr);
  };

  for (int it = 1; it <= opt.max_iter; ++it) {
    SvmSolution sol = solve_at(model.lambda);
    warm = sol.alpha;
    model.svm = std::move(sol);
    model.iterations = it;
    const double value = detail::l1_dual_value(model.svm);
    model.objective_trace.push_back(value);

    Vector scaled(l);
    for (int k = 0; k < l; ++k) {
      const double quad = std::max(model.svm.alpha.dot(conj[k] * model.svm.alpha), 0.0);
      scaled[k] = model.lambda[k] * std::sqrt(quad);
    }
    const double total = scaled.sum();
    if (total <= 0.0) {
      model.converged = true;
      break;
    }
    const Vector lambda_new = scaled / total;
    model.lambda_trace.push_back(lambda_new);

    bool converged = false;
    if (it >= 2 && std::abs(value - prev_val) <= opt.obj_tol * std::max(1.0, std::abs(prev_val)))
      converged = true;
    if ((lambda_new - model.lambda).cwiseAbs().maxCoeff() < opt.weight_tol) converged = true;

    prev_val = value;
    model.lambda = lambda_new;
    if (converged) {
      model.converged = true;
      break;
    }
  }

  // l = 2: polish against the 201-point simplex grid; adopt a grid point only
  // when it strictly improves the dual value.
  if (l == 2) {
    double best_val = detail::l1_dual_value(model.svm);
    Vector best_lambda = model.lambda;
    SvmSolution best_sol = model.svm;
    bool improved = false;
    for (int t = 0; t <= 200; ++t) {
      Vector lam(2);
      lam[0] = static_cast<double>(t) / 200.0;
      lam[1] = 1.0 - lam[0];
      SvmSolution sol = solve_at(lam);
      warm = sol.alpha;
      const double val = detail::l1_dual_value(sol);
      if (val < best_val - 1e-12 * std::max(1.0, std::abs(best_val))) {
        best_val = val;
        best_lambda = lam;
        best_sol = std::move(sol);
        improved = true;
      }
    }
    if (improved) {
      model.lambda = best_lambda;
      model.svm = std::move(best_sol);
      model.objective_trace.push_back(best_val);
    }
  }

  // make kernel selection explicit: drop weights below 1e-6 and renormalize
  bool truncated = false;
  for (Eigen::Index k = 0; k < model.lambda.size(); ++k) {
    if (model.lambda[k] != 0.0 && model.lambda[k] < 1e-6) {
      model.lambda[k] = 0.0;
      truncated = true;
    }
  }
  if (truncated) {
    model.lambda /= model.lambda.sum();
    warm = model.svm.alpha;
    model.svm = solve_at(model.lambda);
  }
  return model;
}

}  // namespace limkl
