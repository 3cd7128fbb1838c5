#include "kdecorrect/conditional.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "kdecorrect/errors.hpp"
#include "kdecorrect/parallel.hpp"

namespace kdecorrect {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Below this every kernel weight underflows double precision.
const double kEvidenceFloor = std::log(1e-300);

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double mixture_std(const ConditionalMixture& mix) {
  const double mean = mix.weights.dot(mix.means);
  const double second =
      mix.weights.dot((mix.variances.array() + mix.means.array().square()).matrix());
  return std::sqrt(std::max(second - mean * mean, 0.0));
}

}  // namespace

double ConditionalMixture::pdf(double y) const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double s2 = variances(i);
    const double d = y - means(i);
    acc += weights(i) * std::exp(-0.5 * d * d / s2) / std::sqrt(2.0 * M_PI * s2);
  }
  return acc;
}

double ConditionalMixture::cdf(double y) const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i)
    acc += weights(i) * normal_cdf((y - means(i)) / std::sqrt(variances(i)));
  return acc;
}

ConditionalMixture condition(const KernelMixture& mix, const Eigen::VectorXd& x) {
  const Eigen::Index m = mix.size();
  const Eigen::Index d = mix.bw->dims();
  if (d < 2) throw DataError("conditioning needs at least one input dimension");
  if (x.size() != d - 1)
    throw DataError("query has " + std::to_string(x.size()) + " inputs, model expects " +
                    std::to_string(d - 1));
  if (!x.allFinite()) throw DataError("query contains non-finite values");
  const Eigen::Index out_col = mix.bw->output_index;

  // Input part of the sample, original column order.
  Eigen::MatrixXd xin(m, d - 1);
  {
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j == out_col) continue;
      xin.col(k++) = mix.points->col(j);
    }
  }
  const Eigen::MatrixXd zx =
      mix.bw->input_chol.triangularView<Eigen::Lower>().solve(xin.transpose());
  const Eigen::VectorXd zq = mix.bw->input_chol.triangularView<Eigen::Lower>().solve(x);
  const double base =
      -0.5 * (static_cast<double>(d - 1) * kLog2Pi + mix.bw->input_log_det);
  const Eigen::VectorXd* ll = mix.log_lambdas;

  Eigen::VectorXd logw(m);
  double mx = kNegInf;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double q = (zq - zx.col(i)).squaredNorm();
    double lw;
    if (ll == nullptr) {
      lw = base - 0.5 * q;
    } else {
      const double li = (*ll)(i);
      lw = base - static_cast<double>(d - 1) * li - 0.5 * q / std::exp(2.0 * li);
    }
    logw(i) = lw;
    mx = std::max(mx, lw);
  }
  if (!(mx >= kEvidenceFloor))
    throw NoEvidenceError("no evidence: query lies too far outside the data");

  double acc = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) acc += std::exp(logw(i) - mx);
  const double lse = mx + std::log(acc);

  ConditionalMixture out;
  out.weights = (logw.array() - lse).exp().matrix();
  out.log_evidence = lse - std::log(static_cast<double>(m));
  out.evidence = std::exp(out.log_evidence);
  out.means.resize(m);
  out.variances.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.means(i) = (*mix.points)(i, out_col) + mix.bw->gain.dot(x - xin.row(i).transpose());
    const double lam2 = ll ? std::exp(2.0 * (*ll)(i)) : 1.0;
    out.variances(i) = lam2 * mix.bw->cond_var;
  }
  return out;
}

ConditionalMixture condition(const FittedModel& model, const Eigen::VectorXd& x) {
  return condition(mixture_view(model), x);
}

ConditionalMixture prior_mixture(const FittedModel& model) {
  const Eigen::Index m = model.data.rows();
  ConditionalMixture out;
  out.weights = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  out.means = model.data.output_values();
  const double hyy = model.bw.H(model.bw.output_index, model.bw.output_index);
  out.variances.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double lam2 = model.locals ? std::exp(2.0 * model.locals->log_lambdas(i)) : 1.0;
    out.variances(i) = lam2 * hyy;
  }
  out.evidence = 0.0;
  out.log_evidence = kNegInf;
  return out;
}

double conditional_expectation(const ConditionalMixture& mix) {
  return mix.weights.dot(mix.means);
}

double conditional_quantile(const ConditionalMixture& mix, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DataError("quantile probability must lie in (0, 1)");
  const Eigen::VectorXd s = mix.variances.array().sqrt().matrix();
  double lo = (mix.means - 10.0 * s).minCoeff();
  double hi = (mix.means + 10.0 * s).maxCoeff();
  const double tol = 1e-9 * std::max(mixture_std(mix), std::numeric_limits<double>::min());
  int iter = 0;
  while (hi - lo > tol && iter++ < 200) {
    const double mid = 0.5 * (lo + hi);
    if (mix.cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> credible_interval(const ConditionalMixture& mix, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DataError("credible level must lie in (0, 1)");
  const double tail = 0.5 * (1.0 - level);
  return {conditional_quantile(mix, tail), conditional_quantile(mix, 1.0 - tail)};
}

std::vector<ConditionalResult> correct_batch(const FittedModel& model,
                                             const Eigen::MatrixXd& inputs, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DataError("credible level must lie in (0, 1)");
  if (inputs.rows() > 0 && inputs.cols() != model.data.dims() - 1)
    throw DataError("batch input width does not match the model");
  const auto n = static_cast<std::size_t>(inputs.rows());
  std::vector<ConditionalResult> results(n);
  if (n == 0) return results;

  const ConditionalMixture prior = prior_mixture(model);
  const KernelMixture mix = mixture_view(model);
  std::vector<std::exception_ptr> failures(n);

  parallel_for(n, [&](std::size_t r) {
    try {
      ConditionalResult res;
      res.level = level;
      try {
        const ConditionalMixture cm = condition(mix, inputs.row(static_cast<Eigen::Index>(r)));
        res.expectation = conditional_expectation(cm);
        auto [lo, hi] = credible_interval(cm, level);
        res.lower = lo;
        res.upper = hi;
        res.evidence = cm.evidence;
      } catch (const NoEvidenceError&) {
        res.no_evidence = true;
        res.expectation = conditional_expectation(prior);
        auto [lo, hi] = credible_interval(prior, level);
        res.lower = lo;
        res.upper = hi;
        res.evidence = 0.0;
      }
      results[r] = res;
    } catch (...) {
      failures[r] = std::current_exception();
    }
  });
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return results;
}

}  // namespace kdecorrect
