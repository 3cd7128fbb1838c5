#include "kdecorrect/density.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "kdecorrect/errors.hpp"
#include "kdecorrect/parallel.hpp"

namespace kdecorrect {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Columns of the result are the sample points mapped through L^{-1}, so a
// Mahalanobis form becomes a plain squared distance.
Eigen::MatrixXd whiten(const Eigen::MatrixXd& points, const Eigen::MatrixXd& chol) {
  return chol.triangularView<Eigen::Lower>().solve(points.transpose());
}

double logsumexp_fixed_order(const std::vector<double>& terms) {
  double mx = kNegInf;
  for (double t : terms) mx = std::max(mx, t);
  if (mx == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - mx);
  return mx + std::log(acc);
}

struct LambdaCache {
  bool adaptive = false;
  Eigen::VectorXd lam2;   // lambda_i^2
  Eigen::VectorXd det_term;  // d * log lambda_i
};

LambdaCache lambda_cache(const KernelMixture& mix) {
  LambdaCache c;
  if (mix.log_lambdas == nullptr) return c;
  c.adaptive = true;
  c.lam2 = (2.0 * mix.log_lambdas->array()).exp().matrix();
  c.det_term = (static_cast<double>(mix.bw->dims()) * mix.log_lambdas->array()).matrix();
  return c;
}

}  // namespace

FittedModel fit_model(const Dataset& data, const CovarianceDecomposition& decomp,
                      const BandwidthSpec& spec) {
  spec.validate(data.dims());
  if (decomp.output_index != data.output_index)
    throw DataError("covariance decomposition belongs to a different output split");
  FittedModel model;
  model.data = data;
  model.spec = spec;
  model.bw = is_selective(spec.method) ? selective_bandwidth(decomp, *spec.selective_factor)
                                       : fixed_bandwidth(decomp, *spec.scalar_factor);
  if (is_adaptive(spec.method))
    model.locals = local_factors(data, model.bw, spec.alpha);
  return model;
}

FittedModel fit_model(const Dataset& data, const BandwidthSpec& spec) {
  return fit_model(data, covariance_decomposition(data), spec);
}

double kernel_log_eval(const Eigen::VectorXd& delta, const BandwidthMatrix& bw) {
  if (delta.size() != bw.dims()) throw DataError("kernel argument dimension mismatch");
  Eigen::VectorXd z = bw.chol.triangularView<Eigen::Lower>().solve(delta);
  return -0.5 * (static_cast<double>(bw.dims()) * kLog2Pi + bw.log_det + z.squaredNorm());
}

double kernel_eval(const Eigen::VectorXd& delta, const BandwidthMatrix& bw) {
  return std::exp(kernel_log_eval(delta, bw));
}

KernelMixture mixture_view(const FittedModel& model) {
  KernelMixture mix;
  mix.points = &model.data.values;
  mix.bw = &model.bw;
  mix.log_lambdas = model.locals ? &model.locals->log_lambdas : nullptr;
  return mix;
}

Eigen::VectorXd kde_log_evaluate(const KernelMixture& mix, const Eigen::MatrixXd& queries) {
  const Eigen::Index m = mix.size();
  const Eigen::Index d = mix.bw->dims();
  if (queries.cols() != d) throw DataError("query dimension mismatch");
  const Eigen::MatrixXd z = whiten(*mix.points, mix.bw->chol);
  const Eigen::MatrixXd zq = whiten(queries, mix.bw->chol);
  const double base = -0.5 * (static_cast<double>(d) * kLog2Pi + mix.bw->log_det);
  const double log_m = std::log(static_cast<double>(m));
  const LambdaCache lc = lambda_cache(mix);

  Eigen::VectorXd out(queries.rows());
  parallel_for(static_cast<std::size_t>(queries.rows()), [&](std::size_t q) {
    thread_local std::vector<double> terms;
    terms.assign(static_cast<std::size_t>(m), 0.0);
    const auto zcol = zq.col(static_cast<Eigen::Index>(q));
    if (!lc.adaptive) {
      for (Eigen::Index j = 0; j < m; ++j)
        terms[static_cast<std::size_t>(j)] = base - 0.5 * (zcol - z.col(j)).squaredNorm();
    } else {
      for (Eigen::Index j = 0; j < m; ++j)
        terms[static_cast<std::size_t>(j)] =
            base - lc.det_term(j) - 0.5 * (zcol - z.col(j)).squaredNorm() / lc.lam2(j);
    }
    out(static_cast<Eigen::Index>(q)) = logsumexp_fixed_order(terms) - log_m;
  });
  return out;
}

Eigen::VectorXd kde_log_evaluate(const FittedModel& model, const Eigen::MatrixXd& queries) {
  return kde_log_evaluate(mixture_view(model), queries);
}

Eigen::VectorXd kde_evaluate(const FittedModel& model, const Eigen::MatrixXd& queries) {
  return kde_log_evaluate(model, queries).array().exp().matrix();
}

double kde_evaluate_point(const FittedModel& model, const Eigen::VectorXd& x) {
  Eigen::MatrixXd q(1, x.size());
  q.row(0) = x;
  return std::exp(kde_log_evaluate(model, q)(0));
}

Eigen::VectorXd kde_loo_all(const KernelMixture& mix) {
  const Eigen::Index m = mix.size();
  if (m < 2) throw DataError("leave-one-out needs at least 2 samples");
  const Eigen::Index d = mix.bw->dims();
  const Eigen::MatrixXd z = whiten(*mix.points, mix.bw->chol);
  const double base = -0.5 * (static_cast<double>(d) * kLog2Pi + mix.bw->log_det);
  const double log_m1 = std::log(static_cast<double>(m - 1));
  const LambdaCache lc = lambda_cache(mix);

  Eigen::VectorXd out(m);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t iu) {
    const auto i = static_cast<Eigen::Index>(iu);
    thread_local std::vector<double> terms;
    terms.clear();
    terms.reserve(static_cast<std::size_t>(m - 1));
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == i) continue;
      const double q = (z.col(i) - z.col(j)).squaredNorm();
      if (!lc.adaptive)
        terms.push_back(base - 0.5 * q);
      else
        terms.push_back(base - lc.det_term(j) - 0.5 * q / lc.lam2(j));
    }
    const double ls = logsumexp_fixed_order(terms);
    out(i) = ls == kNegInf ? 0.0 : std::exp(ls - log_m1);
  });
  return out;
}

double kde_loo_evaluate(const KernelMixture& mix, Eigen::Index i) {
  const Eigen::Index m = mix.size();
  if (m < 2) throw DataError("leave-one-out needs at least 2 samples");
  if (i < 0 || i >= m) throw DataError("leave-one-out index out of range");
  const Eigen::Index d = mix.bw->dims();
  const Eigen::MatrixXd z = whiten(*mix.points, mix.bw->chol);
  const double base = -0.5 * (static_cast<double>(d) * kLog2Pi + mix.bw->log_det);
  const LambdaCache lc = lambda_cache(mix);

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(m - 1));
  for (Eigen::Index j = 0; j < m; ++j) {
    if (j == i) continue;
    const double q = (z.col(i) - z.col(j)).squaredNorm();
    if (!lc.adaptive)
      terms.push_back(base - 0.5 * q);
    else
      terms.push_back(base - lc.det_term(j) - 0.5 * q / lc.lam2(j));
  }
  const double ls = logsumexp_fixed_order(terms);
  return ls == kNegInf ? 0.0 : std::exp(ls - std::log(static_cast<double>(m - 1)));
}

double kde_loo_evaluate(const FittedModel& model, Eigen::Index i) {
  return kde_loo_evaluate(mixture_view(model), i);
}

double squared_integral(const KernelMixture& mix) {
  const Eigen::Index m = mix.size();
  const Eigen::Index d = mix.bw->dims();
  const Eigen::MatrixXd z = whiten(*mix.points, mix.bw->chol);
  const double base = -0.5 * (static_cast<double>(d) * kLog2Pi + mix.bw->log_det);
  const LambdaCache lc = lambda_cache(mix);

  Eigen::VectorXd row_sum(m);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t iu) {
    const auto i = static_cast<Eigen::Index>(iu);
    thread_local std::vector<double> terms;
    terms.assign(static_cast<std::size_t>(m), 0.0);
    const double lam2_i = lc.adaptive ? lc.lam2(i) : 1.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double pair_lam2 = lam2_i + (lc.adaptive ? lc.lam2(j) : 1.0);
      const double q = (z.col(i) - z.col(j)).squaredNorm();
      terms[static_cast<std::size_t>(j)] =
          base - 0.5 * static_cast<double>(d) * std::log(pair_lam2) - 0.5 * q / pair_lam2;
    }
    const double ls = logsumexp_fixed_order(terms);
    row_sum(i) = ls == kNegInf ? 0.0 : std::exp(ls);
  });

  double total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) total += row_sum(i);
  return total / (static_cast<double>(m) * static_cast<double>(m));
}

double squared_integral(const FittedModel& model) {
  return squared_integral(mixture_view(model));
}

Eigen::VectorXd kde_log_self_density(const Eigen::MatrixXd& points, const BandwidthMatrix& bw) {
  KernelMixture mix;
  mix.points = &points;
  mix.bw = &bw;
  return kde_log_evaluate(mix, points);
}

Eigen::VectorXd kde_log_marginal2(const FittedModel& model, Eigen::Index dim_a,
                                  Eigen::Index dim_b, const Eigen::MatrixXd& queries) {
  const Eigen::Index d = model.data.dims();
  if (dim_a < 0 || dim_a >= d || dim_b < 0 || dim_b >= d || dim_a == dim_b)
    throw DataError("marginal dimensions out of range");
  Eigen::MatrixXd sub_h(2, 2);
  sub_h << model.bw.H(dim_a, dim_a), model.bw.H(dim_a, dim_b), model.bw.H(dim_b, dim_a),
      model.bw.H(dim_b, dim_b);
  const BandwidthMatrix bw2 = BandwidthMatrix::from_matrix(sub_h, 1);
  Eigen::MatrixXd pts(model.data.rows(), 2);
  pts.col(0) = model.data.values.col(dim_a);
  pts.col(1) = model.data.values.col(dim_b);
  KernelMixture mix;
  mix.points = &pts;
  mix.bw = &bw2;
  mix.log_lambdas = model.locals ? &model.locals->log_lambdas : nullptr;
  return kde_log_evaluate(mix, queries);
}

}  // namespace kdecorrect
