#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kdecorrect/dataset.hpp"
#include "kdecorrect/selection.hpp"

namespace kdecorrect {

// Hypothetical 1-input example: x drawn from N(0, x_std^2),
// y = x/4 + sin(x) + N(0, noise_std^2).
struct Example1Config {
  Eigen::Index m = 100;
  double x_std = 5.0;
  double noise_std = 0.5;
  std::uint64_t seed = 1;
};

// Synthetic mast-shading stand-in: a reference instrument sees the true
// wind speed, the mast instrument sees it divided by `shading_gain` when
// the wind blows from inside the shading sector. Columns are
// (v_mast, dir_mast, v_ref) with v_ref the output.
struct ShadingConfig {
  Eigen::Index m = 3000;
  double sector_lo = 290.0;
  double sector_hi = 330.0;
  double shading_gain = 1.45;
  double weibull_shape = 2.2;   // speed draw
  double weibull_scale = 9.0;   // m/s
  double direction_mean = 310.0;
  double direction_spread = 60.0;  // degrees, redrawn into [0, 360)
  double noise_std = 0.5;
  std::uint64_t seed = 1;
};

double example1_target(double x);  // x/4 + sin(x)

Dataset gen_example1(const Example1Config& config);
Dataset gen_shading(const ShadingConfig& config);

double rmse(std::span<const double> predicted, std::span<const double> truth);

struct BenchmarkRow {
  std::string selector;  // "scott", "lscv", or "mcse"
  CriterionReport report;
  double rmse = 0.0;
  long no_evidence_predictions = 0;
};

struct BenchmarkTable {
  std::vector<BenchmarkRow> rows;
  std::optional<double> raw_rmse;  // proxy-column RMSE, when a proxy exists
  Eigen::Index train_rows = 0;
  Eigen::Index validation_rows = 0;
};

struct BenchmarkConfig {
  std::vector<Method> methods = {Method::FW, Method::AW, Method::SW, Method::SAW};
  std::vector<Criterion> criteria = {Criterion::LSCV, Criterion::MCSE};
  double split_fraction = 0.8;
  std::uint64_t split_seed = 1;
  double level = 0.9;
  double alpha = 0.5;
  OptimizerConfig optimizer;
  // Column whose raw values stand in for the output (mast speed vs
  // reference speed); enables the raw-RMSE baseline.
  std::optional<Eigen::Index> raw_proxy_column;
};

// Splits the data, selects bandwidths on the training part, corrects the
// validation inputs, and reports training criteria plus validation RMSE
// for the two plug-in baselines (FW, AW at Scott) and every requested
// (criterion, method) cell.
BenchmarkTable run_benchmark(const Dataset& data, const BenchmarkConfig& config);

}  // namespace kdecorrect
