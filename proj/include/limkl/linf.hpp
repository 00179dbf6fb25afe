#pragma once

#include <limkl/kernels.hpp>
#include <limkl/qp.hpp>
#include <limkl/weights.hpp>

#include <string>
#include <vector>

namespace limkl {

enum class ModelKind { svm, l1, l2, linf };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::svm: return "svm";
    case ModelKind::l1: return "l1";
    case ModelKind::l2: return "l2";
    case ModelKind::linf: return "linf";
  }
  return "?";
}

inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "svm") return ModelKind::svm;
  if (s == "l1") return ModelKind::l1;
  if (s == "l2") return ModelKind::l2;
  if (s == "linf") return ModelKind::linf;
  throw validation_error("unknown model kind: " + s);
}

struct MklOptions {
  double C = 1.0;
  int max_iter = 100;
  double obj_tol = 1e-5;     // relative objective change
  double weight_tol = 1e-6;  // infinity-norm weight change
  double svm_tol = 1e-6;     // inner SVM KKT tolerance
};

// Simplex-weighted kernel combination model. Covers the block l-inf solver
// and the l1/l2/plain-SVM baselines; `kind` selects the prediction-weight
// convention below.
struct LinfModel {
  ModelKind kind = ModelKind::linf;
  Vector lambda;
  SvmSolution svm;
  std::vector<double> objective_trace;
  std::vector<Vector> lambda_trace;  // weight iterate per update
  bool converged = false;
  int iterations = 0;
  IntVector labels;  // training labels (serialized as a hash only)
  std::vector<std::string> recipes;
  std::string convention;
};

// Per-kernel multiplier applied to K_k inside the decision function.
//   linf: K_k / (2 lambda_k)   (the dual's 1/2 lives inside Q(lambda))
//   l1:   lambda_k K_k
//   l2/svm: K_k
inline Vector prediction_weights(ModelKind kind, const Vector& lambda) {
  Vector w(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    switch (kind) {
      case ModelKind::linf:
        // lambda_k -> 0 forces the corresponding block to zero as well
        w[k] = lambda[k] > 1e-300 ? 1.0 / (2.0 * lambda[k]) : 0.0;
        break;
      case ModelKind::l1:
        w[k] = lambda[k];
        break;
      case ModelKind::l2:
      case ModelKind::svm:
        w[k] = 1.0;
        break;
    }
  }
  return w;
}

// Closed-form simplex update lambda_k = sqrt(D_k) / sum sqrt(D_j).
inline Vector lambda_update(const Vector& d) { return detail::sqrt_simplex_weights(d); }

namespace detail {

inline void check_slices(const std::vector<Matrix>& slices, Eigen::Index m_train, int l) {
  if (static_cast<int>(slices.size()) != l)
    throw validation_error("predict: slice count does not match kernel count");
  if (slices.empty()) throw validation_error("predict: no slices");
  const Eigen::Index cols = slices.front().cols();
  for (const auto& s : slices) {
    if (s.rows() != m_train) throw validation_error("predict: slice rows != training points");
    if (s.cols() != cols) throw validation_error("predict: inconsistent slice widths");
  }
}

inline IntVector sign_labels(const Vector& f) {
  IntVector out(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) out[i] = f[i] >= 0.0 ? 1 : -1;
  return out;
}

}  // namespace detail

inline Vector decision_values_linf(const LinfModel& model, const std::vector<Matrix>& slices) {
  detail::check_slices(slices, model.labels.size(), static_cast<int>(model.lambda.size()));
  const Vector w = prediction_weights(model.kind, model.lambda);
  Vector coeff(model.labels.size());
  for (Eigen::Index i = 0; i < coeff.size(); ++i)
    coeff[i] = model.svm.alpha[i] * model.labels[i];
  Vector f = Vector::Zero(slices.front().cols());
  for (std::size_t k = 0; k < slices.size(); ++k) {
    if (w[static_cast<Eigen::Index>(k)] == 0.0) continue;
    f.noalias() += w[static_cast<Eigen::Index>(k)] * (slices[k].transpose() * coeff);
  }
  f.array() -= model.svm.bias;
  return f;
}

// sign(f) with sign(0) -> +1
inline IntVector predict_linf(const LinfModel& model, const std::vector<Matrix>& slices) {
  return detail::sign_labels(decision_values_linf(model, slices));
}

// Alternating solver for the block l-inf dual: SVM solve with Hessian
// Q(lambda) = 1/2 sum_k Y K_k Y / lambda_k, then the closed-form simplex
// update from D_k = a' (1/2 Y K_k Y) a, until the objective settles.
inline LinfModel fit_linf(const GramSet& g, const MklOptions& opt = {}) {
  g.validate();
  require_binary_labels(g.labels);
  if (!(opt.C > 0.0)) throw validation_error("fit_linf: C must be > 0");
  const int l = g.kernel_count();
  const Eigen::Index m = g.point_count();

  std::vector<Matrix> conj(l);
  for (int k = 0; k < l; ++k) conj[k] = conjugate_labels(g.kernels[k].entries, g.labels);

  LinfModel model;
  model.kind = ModelKind::linf;
  model.labels = g.labels;
  model.lambda = Vector::Constant(l, 1.0 / l);
  model.convention = "hessian=0.5*sum(YKY/lambda);pred=sum(K/(2*lambda))";

  Matrix hessian(m, m);
  Vector warm;
  double prev_obj = 0.0;

  for (int it = 1; it <= opt.max_iter; ++it) {
    hessian.setZero();
    for (int k = 0; k < l; ++k)
      hessian.noalias() += (1.0 / (2.0 * model.lambda[k])) * conj[k];

    // vanishing weights inflate the Hessian; keep the tolerance scale-aware
    const double tol = opt.svm_tol * std::max(1.0, hessian.diagonal().cwiseAbs().mean());
    SvmSolution sol =
        solve_svm(hessian, g.labels, opt.C, tol, warm.size() == m ? &warm : nullptr);
    warm = sol.alpha;
    model.svm = std::move(sol);
    model.iterations = it;
    model.objective_trace.push_back(model.svm.objective);

    Vector quad(l);
    for (int k = 0; k < l; ++k) quad[k] = model.svm.alpha.dot(conj[k] * model.svm.alpha);

    if (quad.maxCoeff() <= 0.0) {
      // alpha = 0: any lambda is optimal, keep the previous one
      model.converged = true;
      break;
    }

    // ratio-identical to sqrt(D_k) with D_k = quad_k / 2
    const Vector lambda_new = lambda_update(quad);
    model.lambda_trace.push_back(lambda_new);

    bool converged = false;
    if (it >= 2 && std::abs(model.svm.objective - prev_obj) <=
                       opt.obj_tol * std::max(1.0, std::abs(prev_obj)))
      converged = true;
    if ((lambda_new - model.lambda).cwiseAbs().maxCoeff() < opt.weight_tol) converged = true;

    prev_obj = model.svm.objective;
    model.lambda = lambda_new;
    if (converged) {
      model.converged = true;
      break;
    }
  }
  return model;
}

}  // namespace limkl
