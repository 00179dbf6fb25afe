#include <limkl/kernels.hpp>
#include <limkl/rng.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace limkl;

namespace {

Matrix random_features(int n, int m, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, "features");
  Matrix x(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) x(i, j) = rng.normal();
  return x;
}

double eigen_min(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("gaussian kernel of a point with itself is 1") {
  Matrix x = random_features(3, 5, 7);
  for (double sigma : {0.3, 1.0, 4.0}) {
    GramMatrix g = build_gram(x, KernelRecipe::gaussian(sigma));
    for (int i = 0; i < 5; ++i) REQUIRE(g.entries(i, i) == 1.0);
  }
}

TEST_CASE("linear kernel on orthonormal columns is the identity") {
  Matrix x = Matrix::Identity(4, 4);
  GramMatrix g = build_gram(x, KernelRecipe::linear());
  REQUIRE((g.entries - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gaussian sigma=1 at distance sqrt(2) gives exp(-1)") {
  Matrix x(1, 2);
  x << 0.0, std::sqrt(2.0);
  GramMatrix g = build_gram(x, KernelRecipe::gaussian(1.0));
  // exp(-(sqrt(2))^2 / 2) = exp(-1), evaluated by hand
  REQUIRE(g.entries(0, 1) == Catch::Approx(0.36787944117144233).epsilon(1e-12));
}

TEST_CASE("build_gram validates inputs") {
  Matrix x(2, 2);
  x << 1.0, std::numeric_limits<double>::quiet_NaN(), 0.0, 1.0;
  REQUIRE_THROWS_AS(build_gram(x, KernelRecipe::linear()), validation_error);
  Matrix ok = Matrix::Identity(2, 2);
  REQUIRE_THROWS_AS(build_gram(ok, KernelRecipe::from_distance(1.0)), validation_error);
  REQUIRE_THROWS_AS(build_gram(ok, KernelRecipe::gaussian(0.0)), validation_error);
  REQUIRE_THROWS_AS(build_gram(ok, KernelRecipe::polynomial(0, 1.0)), validation_error);
}

TEST_CASE("linear build_gram equals X'X") {
  Matrix x = random_features(6, 20, 11);
  GramMatrix g = build_gram(x, KernelRecipe::linear());
  Matrix ref = x.transpose() * x;
  const double scale = ref.cwiseAbs().maxCoeff();
  REQUIRE((g.entries - ref).cwiseAbs().maxCoeff() <= 1e-12 * scale);
}

TEST_CASE("gram_from_distance on the zero matrix gives all ones") {
  Matrix dist = Matrix::Zero(4, 4);
  GramMatrix g = gram_from_distance(dist, 2.0);
  REQUIRE(g.ridge_applied == 0.0);  // rank-1 all-ones is already PSD
  REQUIRE((g.entries - Matrix::Ones(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gram_from_distance substitutes exp(-d/mu)") {
  const double mu = 0.7;
  Matrix dist(2, 2);
  dist << 0.0, mu, mu, 0.0;
  GramMatrix g = gram_from_distance(dist, mu);
  REQUIRE(g.entries(0, 1) == Catch::Approx(std::exp(-1.0)).epsilon(1e-12));
  REQUIRE(g.entries(1, 0) == g.entries(0, 1));
}

TEST_CASE("gram_from_distance output is PSD (eigendecomposition oracle)") {
  Rng rng = Rng::substream(3, "dist");
  for (int rep = 0; rep < 20; ++rep) {
    Matrix dist = Matrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const double d = 0.5 + rng.uniform() * 2.5;
        dist(i, j) = d;
        dist(j, i) = d;
      }
    GramMatrix g = gram_from_distance(dist, 1.0);
    REQUIRE(eigen_min(g.entries) >= -1e-12 * std::max(1.0, g.entries.cwiseAbs().maxCoeff()));
  }
  // strongly non-metric distances can need a ridge beyond the default cap;
  // a larger starting eps extends the doubling search
  for (int rep = 0; rep < 10; ++rep) {
    const int m = 4 + static_cast<int>(rng.uniform_index(5));
    Matrix dist = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        const double d = rng.uniform() * 3.0;
        dist(i, j) = d;
        dist(j, i) = d;
      }
    GramMatrix g = gram_from_distance(dist, 1.0, 1e-4);
    REQUIRE(eigen_min(g.entries) >= -1e-12 * std::max(1.0, g.entries.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("gram_from_distance validates inputs") {
  Matrix bad(2, 2);
  bad << 0.0, -0.5, -0.5, 0.0;
  REQUIRE_THROWS_AS(gram_from_distance(bad, 1.0), validation_error);
  Matrix diag(2, 2);
  diag << 1.0, 0.5, 0.5, 0.0;
  REQUIRE_THROWS_AS(gram_from_distance(diag, 1.0), validation_error);
  Matrix asym(2, 2);
  asym << 0.0, 0.5, 0.25, 0.0;
  REQUIRE_THROWS_AS(gram_from_distance(asym, 1.0), validation_error);
}

TEST_CASE("repair_psd leaves a PSD matrix untouched") {
  GramMatrix g;
  g.entries = Matrix::Identity(3, 3);
  GramMatrix r = repair_psd(g);
  REQUIRE(r.ridge_applied == 0.0);
  REQUIRE((r.entries - g.entries).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("repair_psd adds the smallest doubling ridge") {
  GramMatrix g;
  g.entries = Matrix::Zero(2, 2);
  g.entries(0, 0) = 1.0;
  g.entries(1, 1) = -1e-9;
  GramMatrix r = repair_psd(g, 1e-8);
  // eigenvalues are {1, -1e-9}; the first candidate 1e-8 already suffices
  REQUIRE(r.ridge_applied == 1e-8);
  REQUIRE(eigen_min(r.entries) >= 0.0);
}

TEST_CASE("repair_psd keeps a rank-1 outer product unchanged") {
  Vector v(3);
  v << 1.0, -2.0, 0.5;
  GramMatrix g;
  g.entries = v * v.transpose();
  GramMatrix r = repair_psd(g);
  REQUIRE(r.ridge_applied == 0.0);
}

TEST_CASE("repair_psd throws past the ridge cap") {
  GramMatrix g;
  g.entries = Matrix::Zero(2, 2);
  g.entries(0, 0) = 1.0;
  g.entries(1, 1) = -1.0;
  REQUIRE_THROWS_AS(repair_psd(g, 1e-9), irreparable_matrix_error);
}

TEST_CASE("repair_psd is idempotent in total ridge") {
  Rng rng = Rng::substream(5, "sym");
  for (int rep = 0; rep < 10; ++rep) {
    const int m = 4 + static_cast<int>(rng.uniform_index(5));
    Matrix b(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) b(i, j) = rng.normal();
    // PSD shifted to a known small negative minimum eigenvalue
    Matrix a = b.transpose() * b;
    a = 0.5 * (a + a.transpose());
    a -= (eigen_min(a) + 1e-5) * Matrix::Identity(m, m);
    GramMatrix g;
    g.entries = a;
    GramMatrix once = repair_psd(g, 1e-6);
    REQUIRE(once.ridge_applied > 0.0);
    GramMatrix twice = repair_psd(once, 1e-6);
    REQUIRE(twice.ridge_applied == once.ridge_applied);
  }
}

TEST_CASE("every recipe yields symmetric and repairable gram matrices") {
  Rng rng = Rng::substream(9, "prop");
  const KernelRecipe recipes[] = {KernelRecipe::linear(), KernelRecipe::polynomial(2, 1.0),
                                  KernelRecipe::polynomial(3, 0.5), KernelRecipe::gaussian(0.8),
                                  KernelRecipe::gaussian(2.5)};
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform_index(5));
    const int m = 5 + static_cast<int>(rng.uniform_index(46));
    Matrix x = random_features(n, m, 1000 + rep);
    for (const auto& recipe : recipes) {
      GramMatrix g = build_gram(x, recipe);
      REQUIRE(is_symmetric(g.entries));
      GramMatrix r = repair_psd(g);
      REQUIRE(eigen_min(r.entries) >=
              -1e-12 * std::max(1.0, r.entries.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("trace_normalize scales the mean diagonal to one") {
  Matrix x = random_features(4, 12, 21);
  GramMatrix g = build_gram(x, KernelRecipe::linear());
  const double factor = trace_normalize(g);
  REQUIRE(factor > 0.0);
  REQUIRE(g.entries.trace() / 12.0 == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("GramSet validation") {
  GramSet gs;
  REQUIRE_THROWS_AS(gs.validate(), validation_error);

  Matrix x = random_features(3, 6, 31);
  gs.kernels.push_back(build_gram(x, KernelRecipe::linear()));
  gs.labels = IntVector::Ones(6);
  REQUIRE_NOTHROW(gs.validate());

  gs.labels = IntVector::Ones(5);
  REQUIRE_THROWS_AS(gs.validate(), validation_error);
  gs.labels = IntVector::Ones(6);

  gs.descriptor_of = std::vector<int>{2};  // group 0 and 1 would be empty
  REQUIRE_THROWS_AS(gs.validate(), validation_error);
  gs.descriptor_of = std::vector<int>{0};
  REQUIRE_NOTHROW(gs.validate());
  REQUIRE(gs.groups().size() == 1);
}
