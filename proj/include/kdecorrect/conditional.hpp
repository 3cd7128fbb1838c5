#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "kdecorrect/density.hpp"

namespace kdecorrect {

// f(Y | x) for a Gaussian-kernel model is exactly a weighted mixture of M
// univariate Gaussians; this holds the mixture at one query point.
struct ConditionalMixture {
  Eigen::VectorXd weights;    // normalized to sum 1
  Eigen::VectorXd means;      // m_i = Y_i + gain . (x - X_i,inputs)
  Eigen::VectorXd variances;  // lambda_i^2 * (H_yy - H_yx H_xx^-1 H_xy)
  double evidence = 0.0;      // marginal input density f(x)
  double log_evidence = 0.0;

  double pdf(double y) const;
  double cdf(double y) const;
};

struct ConditionalResult {
  double expectation = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.9;
  double evidence = 0.0;
  bool no_evidence = false;  // row fell back to the marginal-Y mixture
};

// Conditions the joint KDE on the inputs. x carries the non-output columns
// in their original order. Throws NoEvidenceError when every input-kernel
// log density falls below log(1e-300).
ConditionalMixture condition(const FittedModel& model, const Eigen::VectorXd& x);
ConditionalMixture condition(const KernelMixture& mix, const Eigen::VectorXd& x);

// The marginal mixture of Y (equal kernel weights); the fallback posterior
// for queries with no evidence.
ConditionalMixture prior_mixture(const FittedModel& model);

// Sum of w_i m_i; exact, no quadrature.
double conditional_expectation(const ConditionalMixture& mix);

// Unique root of the strictly increasing mixture CDF, found by bisection
// on [min(m_i - 10 s_i), max(m_i + 10 s_i)].
double conditional_quantile(const ConditionalMixture& mix, double p);

// Equal-tail interval: quantiles at (1-level)/2 and 1-(1-level)/2.
std::pair<double, double> credible_interval(const ConditionalMixture& mix, double level);

// Per-row correction of a batch of input vectors (rows of `inputs`).
// No-evidence rows are flagged and answered from the prior instead of
// aborting the batch.
std::vector<ConditionalResult> correct_batch(const FittedModel& model,
                                             const Eigen::MatrixXd& inputs, double level = 0.9);

}  // namespace kdecorrect
