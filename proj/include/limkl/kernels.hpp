#pragma once

#include <limkl/core.hpp>

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace limkl {

// A symmetric kernel gram matrix plus the total diagonal ridge added by
// repair_psd over its lifetime.
struct GramMatrix {
  Matrix entries;
  double ridge_applied = 0.0;

  Eigen::Index size() const { return entries.rows(); }
};

enum class KernelKind { linear, polynomial, gaussian, from_distance };

// Convention notes (recorded in model files so results are reproducible):
//   gaussian      k(x,x') = exp(-||x-x'||^2 / (2 sigma^2))
//   polynomial    k(x,x') = (x'x + offset)^degree
//   from_distance k = exp(-d / mu), applied to a precomputed distance matrix
struct KernelRecipe {
  KernelKind kind = KernelKind::linear;
  int degree = 3;
  double offset = 1.0;
  double sigma = 1.0;
  double mu = 1.0;

  static KernelRecipe linear() { return {}; }
  static KernelRecipe polynomial(int degree, double offset) {
    KernelRecipe r;
    r.kind = KernelKind::polynomial;
    r.degree = degree;
    r.offset = offset;
    return r;
  }
  static KernelRecipe gaussian(double sigma) {
    KernelRecipe r;
    r.kind = KernelKind::gaussian;
    r.sigma = sigma;
    return r;
  }
  static KernelRecipe from_distance(double mu) {
    KernelRecipe r;
    r.kind = KernelKind::from_distance;
    r.mu = mu;
    return r;
  }

  void validate() const {
    switch (kind) {
      case KernelKind::linear:
        break;
      case KernelKind::polynomial:
        if (degree < 1) throw validation_error("polynomial degree must be >= 1");
        break;
      case KernelKind::gaussian:
        if (!(sigma > 0.0)) throw validation_error("gaussian sigma must be > 0");
        break;
      case KernelKind::from_distance:
        if (!(mu > 0.0)) throw validation_error("distance scale mu must be > 0");
        break;
    }
  }

  std::string description() const {
    std::ostringstream os;
    switch (kind) {
      case KernelKind::linear:
        os << "linear";
        break;
      case KernelKind::polynomial:
        os << "polynomial(degree=" << degree << ",offset=" << offset << ")";
        break;
      case KernelKind::gaussian:
        os << "gaussian(sigma=" << sigma << ")";
        break;
      case KernelKind::from_distance:
        os << "from_distance(mu=" << mu << ")";
        break;
    }
    return os.str();
  }
};

namespace detail {

inline double kernel_eval(const KernelRecipe& r, const Eigen::Ref<const Vector>& a,
                          const Eigen::Ref<const Vector>& b) {
  switch (r.kind) {
    case KernelKind::linear:
      return a.dot(b);
    case KernelKind::polynomial:
      return std::pow(a.dot(b) + r.offset, r.degree);
    case KernelKind::gaussian:
      return std::exp(-(a - b).squaredNorm() / (2.0 * r.sigma * r.sigma));
    case KernelKind::from_distance:
      break;
  }
  throw validation_error("from_distance recipes apply to distance matrices, not features");
}

inline double psd_zero_tol(const Matrix& a) {
  return 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff());
}

}  // namespace detail

inline double min_eigenvalue(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Gram matrix from column datapoints. features is n x m, one point per column.
// Upper triangle is evaluated and mirrored, so the result is exactly symmetric.
inline GramMatrix build_gram(const Matrix& features, const KernelRecipe& recipe) {
  recipe.validate();
  if (recipe.kind == KernelKind::from_distance)
    throw validation_error("build_gram: from_distance recipes apply to distance matrices");
  if (features.cols() < 1) throw validation_error("build_gram: need at least one datapoint");
  if (!features.allFinite()) throw validation_error("build_gram: non-finite feature values");

  const Eigen::Index m = features.cols();
  GramMatrix g;
  g.entries.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const double v = detail::kernel_eval(recipe, features.col(i), features.col(j));
      g.entries(i, j) = v;
      g.entries(j, i) = v;
    }
  }
  return g;
}

// Cross-kernel slice K(x_i, z_j) between training columns and test columns.
inline Matrix build_gram_slice(const Matrix& train_features, const Matrix& test_features,
                               const KernelRecipe& recipe) {
  recipe.validate();
  if (recipe.kind == KernelKind::from_distance)
    throw validation_error("build_gram_slice: from_distance recipes apply to distance matrices");
  if (train_features.rows() != test_features.rows())
    throw validation_error("build_gram_slice: feature dimensions differ");
  if (!train_features.allFinite() || !test_features.allFinite())
    throw validation_error("build_gram_slice: non-finite feature values");
  Matrix s(train_features.cols(), test_features.cols());
  for (Eigen::Index i = 0; i < train_features.cols(); ++i)
    for (Eigen::Index j = 0; j < test_features.cols(); ++j)
      s(i, j) = detail::kernel_eval(recipe, train_features.col(i), test_features.col(j));
  return s;
}

// Adds the smallest ridge delta in {0, eps, 2 eps, 4 eps, ...} that lifts the
// minimum eigenvalue to >= 0 (up to an entry-scale zero tolerance). The search
// is capped at 2^20 * eps.
inline GramMatrix repair_psd(const GramMatrix& g, double eps = 1e-8) {
  if (!(eps > 0.0)) throw validation_error("repair_psd: eps must be > 0");
  if (!is_symmetric(g.entries)) throw validation_error("repair_psd: matrix not symmetric");

  const double tol = detail::psd_zero_tol(g.entries);
  const double min_eig = min_eigenvalue(g.entries);
  if (min_eig >= -tol) return g;  // already PSD, delta = 0

  double delta = eps;
  for (int step = 0; step <= 20; ++step, delta *= 2.0) {
    if (min_eig + delta >= 0.0) {
      GramMatrix out;
      out.entries = g.entries + delta * Matrix::Identity(g.size(), g.size());
      out.ridge_applied = g.ridge_applied + delta;
      return out;
    }
  }
  throw irreparable_matrix_error("repair_psd: ridge cap 2^20*eps exceeded (min eigenvalue " +
                                 std::to_string(min_eig) + ")");
}

// Kernel from a precomputed distance matrix: exp(-d/mu), then PSD-repaired
// (the exponentiated matrix need not be PSD).
inline GramMatrix gram_from_distance(const Matrix& dist, double mu, double repair_eps = 1e-8) {
  if (!(mu > 0.0)) throw validation_error("gram_from_distance: mu must be > 0");
  if (dist.rows() != dist.cols()) throw validation_error("gram_from_distance: matrix not square");
  if (!dist.allFinite()) throw validation_error("gram_from_distance: non-finite distances");
  if (!is_symmetric(dist)) throw validation_error("gram_from_distance: matrix not symmetric");
  const double scale = std::max(1.0, dist.cwiseAbs().maxCoeff());
  if (dist.minCoeff() < -1e-12 * scale)
    throw validation_error("gram_from_distance: negative distances");
  if (dist.diagonal().cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw validation_error("gram_from_distance: diagonal must be zero");

  GramMatrix g;
  g.entries.resize(dist.rows(), dist.cols());
  for (Eigen::Index i = 0; i < dist.rows(); ++i) {
    for (Eigen::Index j = i; j < dist.cols(); ++j) {
      const double v = std::exp(-std::max(dist(i, j), 0.0) / mu);
      g.entries(i, j) = v;
      g.entries(j, i) = v;
    }
  }
  return repair_psd(g, repair_eps);
}

// Mean off-diagonal distance, the default scale for gram_from_distance.
inline double mean_offdiagonal(const Matrix& dist) {
  const Eigen::Index m = dist.rows();
  if (m < 2) throw validation_error("mean_offdiagonal: need at least 2 points");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      if (i != j) sum += dist(i, j);
  return sum / static_cast<double>(m * (m - 1));
}

// Opt-in normalization: divide by trace/m so the mean diagonal becomes 1.
// Returns the applied scale factor; cross-kernel slices of the same kernel
// must be divided by the same factor.
inline double trace_normalize(GramMatrix& g) {
  const double t = g.entries.trace() / static_cast<double>(g.size());
  if (!(t > 0.0)) throw validation_error("trace_normalize: nonpositive trace");
  g.entries /= t;
  g.ridge_applied /= t;
  return t;
}

// The universe every solver consumes: l gram matrices over m shared training
// points, the labels, and (for composite models) the kernel -> descriptor map.
struct GramSet {
  std::vector<GramMatrix> kernels;
  IntVector labels;
  std::optional<std::vector<int>> descriptor_of;

  Eigen::Index point_count() const { return labels.size(); }
  int kernel_count() const { return static_cast<int>(kernels.size()); }

  void validate() const {
    if (kernels.empty()) throw validation_error("GramSet: need at least one kernel");
    const Eigen::Index m = labels.size();
    if (m < 1) throw validation_error("GramSet: empty label vector");
    for (const auto& k : kernels) {
      if (k.entries.rows() != m || k.entries.cols() != m)
        throw validation_error("GramSet: kernel dimension does not match label count");
    }
    if (descriptor_of) {
      if (static_cast<int>(descriptor_of->size()) != kernel_count())
        throw validation_error("GramSet: descriptor map size != kernel count");
      int n = 0;
      for (int d : *descriptor_of) {
        if (d < 0) throw validation_error("GramSet: negative descriptor index");
        n = std::max(n, d + 1);
      }
      std::vector<int> counts(n, 0);
      for (int d : *descriptor_of) ++counts[d];
      for (int c : counts)
        if (c == 0) throw validation_error("GramSet: empty descriptor group");
    }
  }

  // Descriptor -> kernel indices, kernel order preserved within each group.
  std::vector<std::vector<int>> groups() const {
    if (!descriptor_of) throw validation_error("GramSet: no descriptor grouping");
    int n = 0;
    for (int d : *descriptor_of) n = std::max(n, d + 1);
    std::vector<std::vector<int>> out(n);
    for (int k = 0; k < kernel_count(); ++k) out[(*descriptor_of)[k]].push_back(k);
    return out;
  }
};

}  // namespace limkl
