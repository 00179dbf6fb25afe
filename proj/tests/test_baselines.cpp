#include <limkl/baselines.hpp>
#include <limkl/datagen.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace limkl;

namespace {

SyntheticInstance make_instance(int l, int p, int m, int n, std::uint64_t seed,
                                bool normalize = true) {
  SyntheticSpec spec;
  spec.l = l;
  spec.p = p;
  spec.m = m;
  spec.n = n;
  spec.tau = 4;
  spec.seed = seed;
  SyntheticInstance inst = generate(spec);
  if (normalize) {
    for (int k = 0; k < l; ++k) {
      const double f = trace_normalize(inst.train.kernels[k]);
      inst.test_slices[k] /= f;
    }
  }
  return inst;
}

// Informative kernel on class-separated features plus a label-independent
// noise kernel.
GramSet informative_vs_noise(int m, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, "ivn");
  Matrix info(3, m), noise(3, m);
  IntVector labels(m);
  for (int j = 0; j < m; ++j) {
    const int y = j % 2 == 0 ? 1 : -1;
    labels[j] = y;
    for (int i = 0; i < 3; ++i) {
      info(i, j) = 1.2 * y + rng.normal();
      noise(i, j) = rng.normal();
    }
  }
  GramSet g;
  g.labels = labels;
  GramMatrix k_info = build_gram(info, KernelRecipe::linear());
  GramMatrix k_noise = build_gram(noise, KernelRecipe::linear());
  trace_normalize(k_info);
  trace_normalize(k_noise);
  g.kernels = {k_info, k_noise};
  return g;
}

}  // namespace

TEST_CASE("fit_l2 with one kernel equals the plain SVM") {
  SyntheticInstance inst = make_instance(1, 1, 30, 4, 51);
  LinfModel l2 = fit_l2(inst.train);
  LinfModel svm = fit_svm(inst.train);
  REQUIRE((l2.svm.alpha - svm.svm.alpha).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(l2.kind == ModelKind::l2);
}

TEST_CASE("fit_l2 alpha is exactly the solve on the summed kernel") {
  SyntheticInstance inst = make_instance(3, 3, 30, 6, 53);
  LinfModel l2 = fit_l2(inst.train);
  Matrix sum = inst.train.kernels[0].entries;
  for (int k = 1; k < 3; ++k) sum += inst.train.kernels[k].entries;
  SvmSolution direct =
      solve_svm(conjugate_labels(sum, inst.train.labels), inst.train.labels, 1.0, 1e-6);
  REQUIRE((l2.svm.alpha - direct.alpha).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(l2.svm.objective == direct.objective);
}

TEST_CASE("two identical kernels at C/2 match the single kernel at C") {
  SyntheticInstance inst = make_instance(1, 1, 36, 4, 57);
  GramSet doubled;
  doubled.labels = inst.train.labels;
  doubled.kernels = {inst.train.kernels[0], inst.train.kernels[0]};

  MklOptions half_c;
  half_c.C = 0.5;
  half_c.svm_tol = 1e-9;
  LinfModel dbl = fit_l2(doubled, half_c);
  MklOptions full_c;
  full_c.C = 1.0;
  full_c.svm_tol = 1e-9;
  LinfModel single = fit_svm(inst.train, full_c);

  std::vector<Matrix> slices_dbl = {inst.test_slices[0], inst.test_slices[0]};
  std::vector<Matrix> slices_single = {inst.test_slices[0]};
  IntVector pred_dbl = predict_linf(dbl, slices_dbl);
  IntVector pred_single = predict_linf(single, slices_single);
  REQUIRE((pred_dbl.array() == pred_single.array()).all());
}

TEST_CASE("fit_l1 with one kernel is the plain SVM") {
  SyntheticInstance inst = make_instance(1, 1, 30, 4, 59);
  LinfModel l1 = fit_l1(inst.train);
  LinfModel svm = fit_svm(inst.train);
  REQUIRE(l1.lambda.size() == 1);
  REQUIRE(l1.lambda[0] == 1.0);
  REQUIRE((l1.svm.alpha - svm.svm.alpha).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit_l1 concentrates weight on the informative kernel") {
  GramSet g = informative_vs_noise(60, 61);
  LinfModel l1 = fit_l1(g);
  REQUIRE(l1.lambda[0] >= 0.9);

  // 201-point grid oracle on the max-form dual value
  std::vector<Matrix> conj(2);
  for (int k = 0; k < 2; ++k) conj[k] = conjugate_labels(g.kernels[k].entries, g.labels);
  Vector warm;
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t <= 200; ++t) {
    Vector lam(2);
    lam << static_cast<double>(t) / 200.0, 1.0 - static_cast<double>(t) / 200.0;
    Matrix h = lam[0] * conj[0] + lam[1] * conj[1];
    if (t == 0 || t == 200)  // keep the Hessian PSD-valid at the vertices
      h += 1e-12 * Matrix::Identity(g.labels.size(), g.labels.size());
    SvmSolution sol =
        solve_svm(h, g.labels, 1.0, 1e-8, warm.size() == g.labels.size() ? &warm : nullptr);
    warm = sol.alpha;
    best = std::min(best, -sol.objective);
  }
  REQUIRE(std::abs(-l1.svm.objective - best) <= 1e-3);
}

TEST_CASE("identical kernels leave the l1 weights uniform") {
  SyntheticInstance inst = make_instance(1, 1, 30, 4, 63);
  GramSet g;
  g.labels = inst.train.labels;
  for (int k = 0; k < 3; ++k) g.kernels.push_back(inst.train.kernels[0]);
  LinfModel l1 = fit_l1(g);
  for (int k = 0; k < 3; ++k) REQUIRE(l1.lambda[k] == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("the l1 dual trace is non-increasing") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    SyntheticInstance inst = make_instance(4, 2, 36, 8, 200 + seed);
    MklOptions opt;
    opt.svm_tol = 1e-8;
    LinfModel l1 = fit_l1(inst.train, opt);
    for (std::size_t t = 1; t < l1.objective_trace.size(); ++t)
      REQUIRE(l1.objective_trace[t] <= l1.objective_trace[t - 1] + 1e-9);
  }
}

TEST_CASE("zero-redundancy data separates the l1 and linf weight profiles") {
  SyntheticInstance inst = make_instance(10, 10, 100, 20, 67);
  LinfModel l1 = fit_l1(inst.train);
  LinfModel li = fit_linf(inst.train);
  REQUIRE(l1.lambda.maxCoeff() >= 0.5);
  REQUIRE(li.lambda.maxCoeff() <= 2.0 / 10 * 3.0);
}

TEST_CASE("truncated l1 weights remain a simplex vector") {
  GramSet g = informative_vs_noise(40, 71);
  LinfModel l1 = fit_l1(g);
  REQUIRE(l1.lambda.sum() == Catch::Approx(1.0).epsilon(1e-12));
  for (Eigen::Index k = 0; k < l1.lambda.size(); ++k) {
    const bool zero_or_big = l1.lambda[k] == 0.0 || l1.lambda[k] >= 1e-6;
    REQUIRE(zero_or_big);
  }
}
