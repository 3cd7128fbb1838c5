#pragma once

#include <Eigen/Dense>
#include <optional>

#include "kdecorrect/bandwidth.hpp"
#include "kdecorrect/dataset.hpp"

namespace kdecorrect {

// A dataset bound to a bandwidth regime; the unit of persistence. Local
// factors are present exactly when the method is adaptive.
struct FittedModel {
  Dataset data;
  BandwidthSpec spec;
  BandwidthMatrix bw;
  std::optional<LocalFactors> locals;

  bool adaptive() const { return locals.has_value(); }
};

// Builds H from the spec, and local factors for adaptive methods (pilot
// bandwidth = the same H, fixed-regime evaluation).
FittedModel fit_model(const Dataset& data, const CovarianceDecomposition& decomp,
                      const BandwidthSpec& spec);
FittedModel fit_model(const Dataset& data, const BandwidthSpec& spec);

// Gaussian kernel N(delta; 0, H) via the cached Cholesky factor.
double kernel_log_eval(const Eigen::VectorXd& delta, const BandwidthMatrix& bw);
double kernel_eval(const Eigen::VectorXd& delta, const BandwidthMatrix& bw);

// Non-owning view of a kernel mixture over bare sample points. The public
// operations below delegate to it; tests use it directly for sizes the
// Dataset invariants exclude. log_lambdas == nullptr selects the fixed
// regime; otherwise kernel i has covariance lambda_i^2 H.
struct KernelMixture {
  const Eigen::MatrixXd* points = nullptr;       // M x d
  const BandwidthMatrix* bw = nullptr;
  const Eigen::VectorXd* log_lambdas = nullptr;  // length M or null

  Eigen::Index size() const { return points->rows(); }
};

KernelMixture mixture_view(const FittedModel& model);

// Log joint density at each query row; all kernel sums run in log space
// with a max-shifted, fixed-order reduction.
Eigen::VectorXd kde_log_evaluate(const KernelMixture& mix, const Eigen::MatrixXd& queries);
Eigen::VectorXd kde_log_evaluate(const FittedModel& model, const Eigen::MatrixXd& queries);
Eigen::VectorXd kde_evaluate(const FittedModel& model, const Eigen::MatrixXd& queries);
double kde_evaluate_point(const FittedModel& model, const Eigen::VectorXd& x);

// Leave-one-out density at sample i: mean over the other M-1 kernels,
// evaluated at X_i. The adaptive regime keeps the full-sample local
// factors.
double kde_loo_evaluate(const KernelMixture& mix, Eigen::Index i);
double kde_loo_evaluate(const FittedModel& model, Eigen::Index i);
// Batched variant covering every sample in one pass.
Eigen::VectorXd kde_loo_all(const KernelMixture& mix);

// Integral of the squared density via the pairwise Gaussian convolution
// identity: fixed regime uses kernel covariance 2H, adaptive pairs use
// (lambda_i^2 + lambda_j^2) H.
double squared_integral(const KernelMixture& mix);
double squared_integral(const FittedModel& model);

// Fixed-bandwidth log density of a sample at each of its own points
// (the pilot pass of the adaptive regime).
Eigen::VectorXd kde_log_self_density(const Eigen::MatrixXd& points, const BandwidthMatrix& bw);

// Exact 2-D marginal of the joint KDE over dimensions (dim_a, dim_b):
// Gaussian kernels marginalize to their sub-blocks. Queries carry
// (dim_a, dim_b) coordinates per row.
Eigen::VectorXd kde_log_marginal2(const FittedModel& model, Eigen::Index dim_a,
                                  Eigen::Index dim_b, const Eigen::MatrixXd& queries);

}  // namespace kdecorrect
