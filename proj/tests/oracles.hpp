#pragma once

// Brute-force reference implementations for the test suites. Everything
// here deliberately avoids the library's evaluation path: plain inverses
// and determinants instead of Cholesky solves, direct summation instead
// of log-sum-exp, and grid quadrature instead of closed forms.

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace oracle {

// N(delta; 0, cov) via explicit inverse and determinant.
double mvn_pdf(const Eigen::VectorXd& delta, const Eigen::MatrixXd& cov);

// Joint KDE by direct summation; kernel i has covariance lambdas[i]^2 * H
// (pass an empty vector for the fixed regime).
double kde_direct(const Eigen::MatrixXd& points, const Eigen::MatrixXd& H,
                  const Eigen::VectorXd& lambdas, const Eigen::VectorXd& x);

// Leave-one-out by refitting without row `skip` (same H, same lambdas).
double kde_loo_refit(const Eigen::MatrixXd& points, const Eigen::MatrixXd& H,
                     const Eigen::VectorXd& lambdas, Eigen::Index skip, const Eigen::VectorXd& x);

// Abramson local factors by direct sums.
Eigen::VectorXd local_lambdas_direct(const Eigen::MatrixXd& points, const Eigen::MatrixXd& H,
                                     double alpha);

// Tensor-product trapezoid integral of kde^2 over axis-aligned ranges
// (supports d = 1, 2, 3).
double squared_integral_grid(const Eigen::MatrixXd& points, const Eigen::MatrixXd& H,
                             const Eigen::VectorXd& lambdas,
                             const std::vector<std::pair<double, double>>& ranges, int n_per_axis);

// Exact pairwise-convolution squared integral, written from the double-sum
// formula with explicit kernels.
double squared_integral_pairwise(const Eigen::MatrixXd& points, const Eigen::MatrixXd& H,
                                 const Eigen::VectorXd& lambdas);

// Cross-validation score transcribed term by term: first term either by
// grid quadrature or by the pairwise convolution, second term from the
// refit leave-one-out.
double lscv_grid(const Eigen::MatrixXd& points, const Eigen::MatrixXd& H,
                 const Eigen::VectorXd& lambdas,
                 const std::vector<std::pair<double, double>>& ranges, int n_per_axis);
double lscv_pairwise(const Eigen::MatrixXd& points, const Eigen::MatrixXd& H,
                     const Eigen::VectorXd& lambdas);

// Conditional quantities from the joint-KDE route: evaluate f(x, y) on a
// y-grid, normalize by its trapezoid integral. `output_index` locates y
// inside the full coordinate vector.
struct ConditionalGrid {
  Eigen::VectorXd y;       // grid nodes
  Eigen::VectorXd pdf;     // normalized conditional density
  double evidence = 0.0;   // trapezoid integral of the joint slice
  double expectation = 0.0;
};

ConditionalGrid conditional_grid(const Eigen::MatrixXd& points, const Eigen::MatrixXd& H,
                                 const Eigen::VectorXd& lambdas, Eigen::Index output_index,
                                 const Eigen::VectorXd& x_inputs, double y_lo, double y_hi, int n);

// Quantile by cumulative-trapezoid inversion with a refined pass inside
// the bracketing cell.
double conditional_quantile_grid(const Eigen::MatrixXd& points, const Eigen::MatrixXd& H,
                                 const Eigen::VectorXd& lambdas, Eigen::Index output_index,
                                 const Eigen::VectorXd& x_inputs, double y_lo, double y_hi, int n,
                                 double p);

// Mean conditional squared error by refit + quadrature: drop row i,
// integrate y * f(y | x_i) on a grid, average the squared errors.
double mcse_refit_quadrature(const Eigen::MatrixXd& points, const Eigen::MatrixXd& H,
                             const Eigen::VectorXd& lambdas, Eigen::Index output_index, int n);

}  // namespace oracle
