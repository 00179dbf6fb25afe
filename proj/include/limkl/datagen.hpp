#pragma once

#include <limkl/kernels.hpp>
#include <limkl/rng.hpp>

#include <string>
#include <vector>

namespace limkl {

// Parameters of the redundancy-controlled synthetic generator. Two Gaussian
// classes in n dimensions; features are split into p disjoint groups, the
// first p kernels take one group each, the remaining l-p copy a uniformly
// chosen group, and every kernel applies its own random linear expansion
// A_k of shape (tau*n/p) x (n/p). The redundancy knob is rho = p/l.
struct SyntheticSpec {
  int l = 10;
  int m = 150;  // training points; the same number again is generated for test
  int n = 20;
  int tau = 4;
  int p = 10;
  std::uint64_t seed = 0;
  double delta = 1.5;  // class-mean separation along a random direction

  double rho() const { return static_cast<double>(p) / l; }

  void validate() const {
    if (l < 1) throw validation_error("SyntheticSpec: l must be >= 1");
    if (m < 2 || m % 2 != 0) throw validation_error("SyntheticSpec: m must be even and >= 2");
    if (n < 1) throw validation_error("SyntheticSpec: n must be >= 1");
    if (tau < 1) throw validation_error("SyntheticSpec: tau must be >= 1");
    if (p < 1 || p > l) throw validation_error("SyntheticSpec: need 1 <= p <= l");
    if (n % p != 0) throw validation_error("SyntheticSpec: p must divide n");
    if (!(delta >= 0.0)) throw validation_error("SyntheticSpec: delta must be >= 0");
  }
};

struct SyntheticInstance {
  GramSet train;                    // l kernels over the m training points
  std::vector<Matrix> test_slices;  // K_k(train, test), m x m each
  IntVector test_labels;
  std::vector<int> provenance;  // kernel -> source feature group
  SyntheticSpec spec;
  Vector mean_pos, mean_neg;
  Matrix train_features, test_features;  // raw n x m point matrices
  std::vector<Matrix> full_grams;  // 2m x 2m, train rows first; only if requested
};

// Point order is fixed: train block then test block, each ordered +1 class
// then -1 class. Streams are keyed by purpose so the layout is reproducible.
inline SyntheticInstance generate(const SyntheticSpec& spec, bool keep_full_grams = false) {
  spec.validate();
  const int m = spec.m;
  const int total = 2 * m;
  const int group_dim = spec.n / spec.p;

  SyntheticInstance inst;
  inst.spec = spec;

  Rng mean_rng = Rng::substream(spec.seed, "means");
  Vector direction(spec.n);
  for (int i = 0; i < spec.n; ++i) direction[i] = mean_rng.normal();
  const double norm = direction.norm();
  inst.mean_pos = norm > 0.0 ? Vector(spec.delta * direction / norm) : Vector::Zero(spec.n);
  inst.mean_neg = -inst.mean_pos;

  Rng point_rng = Rng::substream(spec.seed, "points");
  Matrix features(spec.n, total);
  IntVector labels(total);
  auto fill_block = [&](int offset, int count) {
    for (int c = 0; c < 2; ++c) {
      const int label = c == 0 ? 1 : -1;
      const Vector& mean = c == 0 ? inst.mean_pos : inst.mean_neg;
      for (int t = 0; t < count / 2; ++t) {
        const int col = offset + c * (count / 2) + t;
        for (int i = 0; i < spec.n; ++i) features(i, col) = mean[i] + point_rng.normal();
        labels[col] = label;
      }
    }
  };
  fill_block(0, m);
  fill_block(m, m);

  Rng assign_rng = Rng::substream(spec.seed, "assign");
  inst.provenance.resize(spec.l);
  for (int k = 0; k < spec.l; ++k)
    inst.provenance[k] =
        k < spec.p ? k : static_cast<int>(assign_rng.uniform_index(spec.p));

  inst.train.labels = labels.head(m);
  inst.test_labels = labels.tail(m);
  inst.train_features = features.leftCols(m);
  inst.test_features = features.rightCols(m);
  inst.train.kernels.reserve(spec.l);
  inst.test_slices.reserve(spec.l);

  for (int k = 0; k < spec.l; ++k) {
    Rng a_rng = Rng::substream(spec.seed, "transform", static_cast<std::uint64_t>(k));
    Matrix a(spec.tau * group_dim, group_dim);
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      for (Eigen::Index c = 0; c < a.cols(); ++c) a(r, c) = a_rng.normal();

    const Matrix z = a * features.middleRows(inst.provenance[k] * group_dim, group_dim);
    GramMatrix gram;
    gram.entries.resize(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        const double v = z.col(i).dot(z.col(j));
        gram.entries(i, j) = v;
        gram.entries(j, i) = v;
      }
    }
    inst.train.kernels.push_back(repair_psd(gram));
    inst.test_slices.push_back(z.leftCols(m).transpose() * z.rightCols(m));

    if (keep_full_grams) {
      Matrix full(total, total);
      for (int i = 0; i < total; ++i) {
        for (int j = i; j < total; ++j) {
          const double v = z.col(i).dot(z.col(j));
          full(i, j) = v;
          full(j, i) = v;
        }
      }
      inst.full_grams.push_back(std::move(full));
    }
  }
  return inst;
}

// One instance per p value, each with a seed derived from (base seed, p) so
// sweeps are reproducible point by point.
inline std::vector<SyntheticInstance> rho_sweep(const SyntheticSpec& base,
                                                const std::vector<int>& p_values) {
  std::vector<SyntheticInstance> out;
  out.reserve(p_values.size());
  for (int p : p_values) {
    SyntheticSpec spec = base;
    spec.p = p;
    spec.seed = Rng::derive_seed(base.seed, "rho_sweep", static_cast<std::uint64_t>(p));
    spec.validate();
    out.push_back(generate(spec));
  }
  return out;
}

}  // namespace limkl
