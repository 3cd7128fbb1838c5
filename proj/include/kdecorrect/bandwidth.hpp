#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "kdecorrect/dataset.hpp"

namespace kdecorrect {

enum class Method { FW, AW, SW, SAW };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

inline bool is_adaptive(Method m) { return m == Method::AW || m == Method::SAW; }
inline bool is_selective(Method m) { return m == Method::SW || m == Method::SAW; }

enum class PluginRule { Scott, Silverman };

// Which bandwidth regime to use and with what parameters. Exactly one of
// scalar_factor (FW/AW) and selective_factor (SW/SAW) is set.
struct BandwidthSpec {
  Method method = Method::FW;
  std::optional<double> scalar_factor;
  std::optional<Eigen::VectorXd> selective_factor;
  double alpha = 0.5;  // adaptive sensitivity, ignored for FW/SW

  static BandwidthSpec fixed(double h);
  static BandwidthSpec adaptive(double h, double alpha = 0.5);
  static BandwidthSpec selective(Eigen::VectorXd h);
  static BandwidthSpec selective_adaptive(Eigen::VectorXd h, double alpha = 0.5);

  // Throws DataError unless the factors are positive, alpha is in [0,1],
  // and a selective factor matches the dimension.
  void validate(Eigen::Index dims) const;
};

// The kernel covariance H with its factorization and the block partition
// used for conditioning on the inputs.
struct BandwidthMatrix {
  Eigen::MatrixXd H;           // d x d SPD
  Eigen::MatrixXd chol;        // lower-triangular L, H = L L^T
  double log_det = 0.0;        // log |H|
  Eigen::Index output_index = 0;

  // Input/output partition (empty input blocks when d == 1).
  Eigen::MatrixXd input_chol;  // chol of H_xx
  double input_log_det = 0.0;  // log |H_xx|
  Eigen::VectorXd gain;        // H_xx^{-1} H_xy
  double cond_var = 0.0;       // H_yy - H_yx H_xx^{-1} H_xy

  Eigen::Index dims() const { return H.rows(); }

  // Validates symmetry/positive definiteness and caches the factorization
  // and partition blocks. Throws NumericError on a non-SPD matrix or a
  // non-positive conditional variance.
  static BandwidthMatrix from_matrix(Eigen::MatrixXd H, Eigen::Index output_index);
};

// Per-sample scale multipliers for the adaptive regime.
struct LocalFactors {
  Eigen::VectorXd lambdas;        // all positive, geometric mean 1
  Eigen::VectorXd log_lambdas;    // primary representation
  Eigen::VectorXd pilot_density;  // fixed-bandwidth KDE at each sample
  double alpha = 0.5;
};

// Scott: M^(-1/(d+4)).  Silverman: [M(d+2)/4]^(-1/(d+4)).
double plugin_factor(Eigen::Index m, Eigen::Index d, PluginRule rule);

// H = h^2 * K_xx.
BandwidthMatrix fixed_bandwidth(const CovarianceDecomposition& decomp, double h);

// H = Q diag(h_i^2 * eig_i) Q^T with eigenvalues in the decomposition's
// ascending order; equal components reduce to fixed_bandwidth.
BandwidthMatrix selective_bandwidth(const CovarianceDecomposition& decomp,
                                    const Eigen::VectorXd& h);

// Abramson local factors: lambda_i = (pilot(X_i)/g)^(-alpha) with g the
// geometric mean of the pilot density, computed with the fixed-bandwidth
// KDE under `base`. Throws NumericError("pilot underflow ...") if a pilot
// value underflows to zero.
LocalFactors local_factors(const Dataset& data, const BandwidthMatrix& base, double alpha);

// Same, for a bare sample matrix (one row per point).
LocalFactors local_factors_for_points(const Eigen::MatrixXd& points, const BandwidthMatrix& base,
                                      double alpha);

}  // namespace kdecorrect
