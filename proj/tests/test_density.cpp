#include <doctest.h>

#include <random>

#include "kdecorrect/density.hpp"
#include "kdecorrect/errors.hpp"
#include "oracles.hpp"

using namespace kdecorrect;

namespace {

Dataset random_dataset(std::uint64_t seed, Eigen::Index m, Eigen::Index d) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Dataset data;
  data.values.resize(m, d);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < d; ++j) data.values(i, j) = nd(rng) * (1.0 + 0.5 * static_cast<double>(j));
  for (Eigen::Index j = 0; j < d; ++j) data.columns.push_back("c" + std::to_string(j));
  data.output_index = d - 1;
  return data;
}

// Grid mass of a fitted 2-D model over +-6 marginal standard deviations.
double grid_mass(const FittedModel& model, int n) {
  const Eigen::MatrixXd& v = model.data.values;
  const double lam_max = model.locals ? model.locals->lambdas.maxCoeff() : 1.0;
  Eigen::Vector2d lo, hi;
  for (int k = 0; k < 2; ++k) {
    const double pad = 6.0 * std::sqrt(model.bw.H(k, k)) * lam_max;
    lo(k) = v.col(k).minCoeff() - pad;
    hi(k) = v.col(k).maxCoeff() + pad;
  }
  Eigen::MatrixXd q(n * n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      q(i * n + j, 0) = lo(0) + (hi(0) - lo(0)) * i / static_cast<double>(n - 1);
      q(i * n + j, 1) = lo(1) + (hi(1) - lo(1)) * j / static_cast<double>(n - 1);
    }
  const Eigen::VectorXd f = kde_evaluate(model, q);
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double w = ((i == 0 || i == n - 1) ? 0.5 : 1.0) * ((j == 0 || j == n - 1) ? 0.5 : 1.0);
      acc += w * f(i * n + j);
    }
  const double sx = (hi(0) - lo(0)) / (n - 1);
  const double sy = (hi(1) - lo(1)) / (n - 1);
  return acc * sx * sy;
}

}  // namespace

TEST_CASE("kernel evaluation matches the standard normal constants") {
  const BandwidthMatrix h1 = BandwidthMatrix::from_matrix(Eigen::MatrixXd::Identity(1, 1), 0);
  Eigen::VectorXd zero1 = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd one1 = Eigen::VectorXd::Ones(1);
  CHECK(kernel_eval(zero1, h1) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(kernel_eval(one1, h1) == doctest::Approx(0.24197072451914337).epsilon(1e-14));

  const BandwidthMatrix h2 = BandwidthMatrix::from_matrix(Eigen::MatrixXd::Identity(2, 2), 1);
  Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
  CHECK(kernel_eval(zero2, h2) == doctest::Approx(0.15915494309189535).epsilon(1e-14));
  CHECK(kernel_log_eval(zero2, h2) == doctest::Approx(std::log(0.15915494309189535)).epsilon(1e-14));
}

TEST_CASE("a single-kernel mixture reproduces the kernel at its center") {
  Eigen::MatrixXd pts(1, 2);
  pts << 0.4, -1.2;
  const BandwidthMatrix bw = BandwidthMatrix::from_matrix(Eigen::Matrix2d::Identity(), 1);
  KernelMixture mix{&pts, &bw, nullptr};
  const Eigen::VectorXd logf = kde_log_evaluate(mix, pts);
  CHECK(std::exp(logf(0)) == doctest::Approx(kernel_eval(Eigen::Vector2d::Zero(), bw)).epsilon(1e-14));
}

TEST_CASE("two symmetric kernels average at the origin") {
  Eigen::MatrixXd pts(2, 2);
  pts << 1, 0, -1, 0;
  const BandwidthMatrix bw = BandwidthMatrix::from_matrix(Eigen::Matrix2d::Identity(), 1);
  KernelMixture mix{&pts, &bw, nullptr};
  Eigen::MatrixXd origin = Eigen::MatrixXd::Zero(1, 2);
  const Eigen::VectorXd logf = kde_log_evaluate(mix, origin);
  CHECK(std::exp(logf(0)) == doctest::Approx(0.09653235263005391).epsilon(1e-14));
}

TEST_CASE("joint density integrates to one on a wide grid") {
  const Dataset data = random_dataset(11, 60, 2);
  for (Method method : {Method::FW, Method::AW, Method::SW, Method::SAW}) {
    BandwidthSpec spec;
    if (is_selective(method))
      spec = is_adaptive(method)
                 ? BandwidthSpec::selective_adaptive(Eigen::Vector2d(0.5, 0.3), 0.5)
                 : BandwidthSpec::selective(Eigen::Vector2d(0.5, 0.3));
    else
      spec = is_adaptive(method) ? BandwidthSpec::adaptive(0.4, 0.5) : BandwidthSpec::fixed(0.4);
    const FittedModel model = fit_model(data, spec);
    CHECK(grid_mass(model, 400) == doctest::Approx(1.0).epsilon(0.005));
  }
}

TEST_CASE("density evaluation matches the direct-sum oracle") {
  const Dataset data = random_dataset(4, 9, 2);
  const FittedModel model = fit_model(data, BandwidthSpec::fixed(0.7));
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd(0.0, 2.0);
  for (int t = 0; t < 25; ++t) {
    Eigen::VectorXd x(2);
    x << nd(rng), nd(rng);
    const double direct = oracle::kde_direct(data.values, model.bw.H, Eigen::VectorXd(), x);
    CHECK(kde_evaluate_point(model, x) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("far-field queries underflow quietly to zero") {
  const Dataset data = random_dataset(5, 10, 2);
  const FittedModel model = fit_model(data, BandwidthSpec::fixed(0.3));
  Eigen::VectorXd far(2);
  far << 1e6, -1e6;
  CHECK(kde_evaluate_point(model, far) == 0.0);
}

TEST_CASE("leave-one-out with two points is the remaining kernel") {
  Eigen::MatrixXd pts(2, 1);
  pts << 0, 1;
  const BandwidthMatrix bw = BandwidthMatrix::from_matrix(Eigen::MatrixXd::Identity(1, 1), 0);
  KernelMixture mix{&pts, &bw, nullptr};
  CHECK(kde_loo_evaluate(mix, 0) == doctest::Approx(0.24197072451914337).epsilon(1e-14));
}

TEST_CASE("leave-one-out satisfies the algebraic identity with the full sum") {
  const Dataset data = random_dataset(6, 12, 3);
  const FittedModel model = fit_model(data, BandwidthSpec::fixed(0.5));
  const double m = static_cast<double>(data.rows());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double full = kde_evaluate_point(model, data.values.row(i).transpose());
    const double loo = kde_loo_evaluate(model, i);
    const double self = kernel_eval(Eigen::VectorXd::Zero(3), model.bw);
    CHECK((m - 1.0) * loo + self == doctest::Approx(m * full).epsilon(1e-12));
  }
}

TEST_CASE("leave-one-out equals the refit oracle") {
  const Dataset data = random_dataset(7, 5, 2);
  const FittedModel model = fit_model(data, BandwidthSpec::fixed(0.6));
  for (Eigen::Index i = 0; i < 5; ++i) {
    const double refit = oracle::kde_loo_refit(data.values, model.bw.H, Eigen::VectorXd(), i,
                                               data.values.row(i).transpose());
    CHECK(kde_loo_evaluate(model, i) == doctest::Approx(refit).epsilon(1e-12));
  }
  KernelMixture single{&data.values, &model.bw, nullptr};
  CHECK_THROWS_AS(kde_loo_evaluate(single, 7), DataError);
}

TEST_CASE("squared integral: self-convolution of one kernel") {
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(1, 1);
  const BandwidthMatrix bw = BandwidthMatrix::from_matrix(Eigen::MatrixXd::Identity(1, 1), 0);
  KernelMixture mix{&pts, &bw, nullptr};
  CHECK(squared_integral(mix) == doctest::Approx(0.28209479177387814).epsilon(1e-14));
}

TEST_CASE("squared integral agrees with grid quadrature") {
  const Dataset data = random_dataset(8, 50, 2);
  const FittedModel model = fit_model(data, BandwidthSpec::fixed(0.5));
  std::vector<std::pair<double, double>> ranges;
  for (int k = 0; k < 2; ++k) {
    const double pad = 8.0 * std::sqrt(model.bw.H(k, k));
    ranges.emplace_back(data.values.col(k).minCoeff() - pad,
                        data.values.col(k).maxCoeff() + pad);
  }
  const double grid =
      oracle::squared_integral_grid(data.values, model.bw.H, Eigen::VectorXd(), ranges, 400);
  CHECK(squared_integral(model) == doctest::Approx(grid).epsilon(1e-4));
}

TEST_CASE("adaptive evaluation with alpha = 0 reproduces the fixed regime") {
  const Dataset data = random_dataset(9, 30, 2);
  const FittedModel fixed = fit_model(data, BandwidthSpec::fixed(0.45));
  const FittedModel adapt = fit_model(data, BandwidthSpec::adaptive(0.45, 0.0));
  REQUIRE(adapt.locals.has_value());

  Eigen::MatrixXd q(3, 2);
  q << 0.1, 0.2, -1.0, 0.5, 2.0, -0.3;
  const Eigen::VectorXd f1 = kde_log_evaluate(fixed, q);
  const Eigen::VectorXd f2 = kde_log_evaluate(adapt, q);
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(f1(i) == doctest::Approx(f2(i)).epsilon(1e-12));
  CHECK(squared_integral(fixed) == doctest::Approx(squared_integral(adapt)).epsilon(1e-12));
  for (Eigen::Index i = 0; i < 5; ++i)
    CHECK(kde_loo_evaluate(fixed, i) == doctest::Approx(kde_loo_evaluate(adapt, i)).epsilon(1e-12));
}

TEST_CASE("adaptive squared integral with unit factors equals the fixed value") {
  const Dataset data = random_dataset(10, 20, 2);
  const FittedModel fixed = fit_model(data, BandwidthSpec::fixed(0.5));
  Eigen::VectorXd zeros = Eigen::VectorXd::Zero(20);
  KernelMixture adaptive_view{&data.values, &fixed.bw, &zeros};
  CHECK(squared_integral(adaptive_view) == doctest::Approx(squared_integral(fixed)).epsilon(1e-13));
}

TEST_CASE("adaptive squared integral matches the pairwise oracle") {
  const Dataset data = random_dataset(12, 15, 2);
  const FittedModel model = fit_model(data, BandwidthSpec::adaptive(0.5, 0.5));
  const double direct = oracle::squared_integral_pairwise(data.values, model.bw.H,
                                                          model.locals->lambdas);
  CHECK(squared_integral(model) == doctest::Approx(direct).epsilon(1e-11));
}

TEST_CASE("row permutation leaves densities unchanged") {
  const Dataset data = random_dataset(13, 40, 2);
  Dataset shuffled = data;
  std::mt19937_64 rng(1);
  for (Eigen::Index i = shuffled.rows() - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(i + 1));
    shuffled.values.row(i).swap(shuffled.values.row(j));
  }
  const FittedModel m1 = fit_model(data, BandwidthSpec::fixed(0.4));
  const FittedModel m2 = fit_model(shuffled, BandwidthSpec::fixed(0.4));
  Eigen::MatrixXd q(2, 2);
  q << 0.0, 0.0, 1.0, -1.0;
  const Eigen::VectorXd f1 = kde_evaluate(m1, q);
  const Eigen::VectorXd f2 = kde_evaluate(m2, q);
  for (Eigen::Index i = 0; i < 2; ++i) CHECK(f1(i) == doctest::Approx(f2(i)).epsilon(1e-12));
}

TEST_CASE("marginal over two dims of a 3-D model matches a direct sub-model") {
  const Dataset data = random_dataset(14, 25, 3);
  const FittedModel model = fit_model(data, BandwidthSpec::fixed(0.5));
  Eigen::MatrixXd q(2, 2);
  q << 0.2, -0.1, 1.0, 0.7;
  const Eigen::VectorXd logf = kde_log_marginal2(model, 0, 2, q);
  Eigen::MatrixXd sub_h(2, 2);
  sub_h << model.bw.H(0, 0), model.bw.H(0, 2), model.bw.H(2, 0), model.bw.H(2, 2);
  Eigen::MatrixXd sub_pts(25, 2);
  sub_pts.col(0) = data.values.col(0);
  sub_pts.col(1) = data.values.col(2);
  for (Eigen::Index i = 0; i < 2; ++i) {
    const double direct = oracle::kde_direct(sub_pts, sub_h, Eigen::VectorXd(), q.row(i).transpose());
    CHECK(std::exp(logf(i)) == doctest::Approx(direct).epsilon(1e-12));
  }
}
