#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "kdecorrect/density.hpp"

namespace kdecorrect {

enum class Criterion { LSCV, MCSE };

std::string criterion_name(Criterion c);
Criterion criterion_from_name(const std::string& name);

struct OptimizerConfig {
  double scalar_bracket_lo = 0.05;   // multiples of the Scott factor
  double scalar_bracket_hi = 3.0;
  double scalar_tol = 1e-3;          // relative interval width
  double simplex_init_spread = 0.2;  // relative vertex perturbation
  double simplex_tol_lscv = 1e-6;    // objective-spread stop, LSCV scale
  double simplex_tol_mcse = 1e-4;    // objective-spread stop, MCSE scale
  long max_evals = 0;                // 0 means 200 * d
};

// One row of a benchmark table: the winning factor with both criteria
// evaluated at it.
struct CriterionReport {
  Method method = Method::FW;
  Criterion criterion = Criterion::LSCV;
  std::vector<double> factor;  // one entry for FW/AW, d entries for SW/SAW
  double alpha = 0.5;
  double lscv_value = 0.0;
  double mcse_value = 0.0;
  long evaluations = 0;
  bool converged = true;
  long no_evidence_rows = 0;  // MCSE fallback count at the winner
};

// Least-squares cross-validation: squared_integral - (2/M) sum_i loo_i,
// with adaptive local factors recomputed once per candidate spec.
double lscv(const KernelMixture& mix);
double lscv(const Dataset& data, const CovarianceDecomposition& decomp,
            const BandwidthSpec& spec);
double lscv(const Dataset& data, const BandwidthSpec& spec);

struct McseValue {
  double value = 0.0;
  long no_evidence_rows = 0;
};

// Mean squared gap between the leave-one-out conditional expectation and
// the observed output. Rows whose input evidence underflows fall back to
// the leave-one-out prior mean and are counted.
McseValue mcse_detailed(const KernelMixture& mix);
McseValue mcse_detailed(const Dataset& data, const CovarianceDecomposition& decomp,
                        const BandwidthSpec& spec);
double mcse(const Dataset& data, const BandwidthSpec& spec);

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  long evaluations = 0;
};

// Golden-section reduction until the relative interval width drops below
// tol; returns the midpoint of the final interval. Ties move to the lower
// end. Throws NumericError on a non-finite objective value.
ScalarMinimum golden_section_minimize(const std::function<double(double)>& objective, double lo,
                                      double hi, double tol);

struct SimplexMinimum {
  Eigen::VectorXd x;
  double value = 0.0;
  bool converged = false;
  long evaluations = 0;
};

// Classic Nelder-Mead (reflect 1, expand 2, contract 0.5, shrink 0.5).
// The initial simplex is x0 plus `step` along each coordinate. Returns the
// best point ever evaluated, so the result never falls behind the start.
// Non-finite objective values are treated as +infinity.
SimplexMinimum nelder_mead_minimize(
    const std::function<double(const Eigen::VectorXd&)>& objective, const Eigen::VectorXd& x0,
    double step, double tol, long max_evals);

// Minimizes the chosen criterion for the chosen regime: golden section
// over h for FW/AW, Nelder-Mead over (h_1..h_d) in log space for SW/SAW,
// warm-started at the scalar optimum.
CriterionReport select_bandwidth(const Dataset& data, Method method, Criterion criterion,
                                 const OptimizerConfig& config = {}, double alpha = 0.5);

}  // namespace kdecorrect
