#include "kdecorrect/experiments.hpp"

#include <cmath>
#include <random>

#include "kdecorrect/conditional.hpp"
#include "kdecorrect/errors.hpp"

namespace kdecorrect {

double example1_target(double x) { return x / 4.0 + std::sin(x); }

Dataset gen_example1(const Example1Config& config) {
  if (config.m < 10) throw DataError("example1 needs at least 10 samples");
  if (!(config.x_std > 0.0) || !(config.noise_std > 0.0))
    throw DataError("example1 standard deviations must be positive");
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> draw_x(0.0, config.x_std);
  std::normal_distribution<double> draw_noise(0.0, config.noise_std);
  Dataset data;
  data.columns = {"x", "y"};
  data.values.resize(config.m, 2);
  for (Eigen::Index i = 0; i < config.m; ++i) {
    const double x = draw_x(rng);
    data.values(i, 0) = x;
    data.values(i, 1) = example1_target(x) + draw_noise(rng);
  }
  data.output_index = 1;
  data.validate();
  return data;
}

Dataset gen_shading(const ShadingConfig& config) {
  if (config.m < 10) throw DataError("shading generator needs at least 10 samples");
  if (!(config.sector_lo >= 0.0 && config.sector_hi <= 360.0 &&
        config.sector_lo < config.sector_hi))
    throw DataError("shading sector must lie inside [0, 360)");
  if (!(config.shading_gain >= 1.0)) throw DataError("shading gain must be >= 1");
  std::mt19937_64 rng(config.seed);
  std::weibull_distribution<double> draw_speed(config.weibull_shape, config.weibull_scale);
  std::normal_distribution<double> draw_dir(config.direction_mean, config.direction_spread);
  std::normal_distribution<double> draw_noise(0.0, 1.0);

  Dataset data;
  data.columns = {"v_mast", "dir_mast", "v_ref"};
  data.values.resize(config.m, 3);
  for (Eigen::Index i = 0; i < config.m; ++i) {
    const double v_true = draw_speed(rng);
    double dir = draw_dir(rng);
    while (dir < 0.0 || dir >= 360.0) dir = draw_dir(rng);
    const double v_ref = v_true + config.noise_std * draw_noise(rng);
    const bool shaded = dir > config.sector_lo && dir < config.sector_hi;
    const double seen = shaded ? v_true / config.shading_gain : v_true;
    const double v_mast = seen + config.noise_std * draw_noise(rng);
    data.values(i, 0) = v_mast;
    data.values(i, 1) = dir;
    data.values(i, 2) = v_ref;
  }
  data.output_index = 2;
  data.validate();
  return data;
}

double rmse(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size()) throw DataError("RMSE length mismatch");
  if (predicted.empty()) throw DataError("RMSE of empty vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - truth[i];
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(predicted.size()));
}

namespace {

BenchmarkRow evaluated_row(const std::string& selector, const CriterionReport& report,
                           const Dataset& train, const CovarianceDecomposition& decomp,
                           const Dataset& validation, double level, double alpha) {
  BandwidthSpec spec;
  const Method method = report.method;
  if (is_selective(method)) {
    Eigen::VectorXd h(static_cast<Eigen::Index>(report.factor.size()));
    for (std::size_t j = 0; j < report.factor.size(); ++j)
      h(static_cast<Eigen::Index>(j)) = report.factor[j];
    spec = is_adaptive(method) ? BandwidthSpec::selective_adaptive(h, alpha)
                               : BandwidthSpec::selective(h);
  } else {
    spec = is_adaptive(method) ? BandwidthSpec::adaptive(report.factor.at(0), alpha)
                               : BandwidthSpec::fixed(report.factor.at(0));
  }
  const FittedModel model = fit_model(train, decomp, spec);
  const auto results = correct_batch(model, validation.input_values(), level);

  std::vector<double> predicted(results.size());
  long fallbacks = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    predicted[i] = results[i].expectation;
    if (results[i].no_evidence) ++fallbacks;
  }
  const Eigen::VectorXd truth = validation.output_values();

  BenchmarkRow row;
  row.selector = selector;
  row.report = report;
  row.rmse = rmse(predicted, std::span<const double>(truth.data(),
                                                     static_cast<std::size_t>(truth.size())));
  row.no_evidence_predictions = fallbacks;
  return row;
}

}  // namespace

BenchmarkTable run_benchmark(const Dataset& data, const BenchmarkConfig& config) {
  data.validate();
  auto [train, validation] = split_train_validation(data, config.split_fraction, config.split_seed);
  const CovarianceDecomposition decomp = covariance_decomposition(train);

  BenchmarkTable table;
  table.train_rows = train.rows();
  table.validation_rows = validation.rows();

  if (config.raw_proxy_column) {
    const Eigen::Index col = *config.raw_proxy_column;
    if (col < 0 || col >= validation.dims() || col == validation.output_index)
      throw DataError("raw proxy column out of range or equal to the output column");
    const Eigen::VectorXd proxy = validation.values.col(col);
    const Eigen::VectorXd truth = validation.output_values();
    table.raw_rmse = rmse(
        std::span<const double>(proxy.data(), static_cast<std::size_t>(proxy.size())),
        std::span<const double>(truth.data(), static_cast<std::size_t>(truth.size())));
  }

  // Plug-in baselines first, then one block per criterion.
  const double scott = plugin_factor(train.rows(), train.dims(), PluginRule::Scott);
  for (Method method : {Method::FW, Method::AW}) {
    CriterionReport report;
    report.method = method;
    report.criterion = Criterion::LSCV;
    report.factor = {scott};
    report.alpha = config.alpha;
    report.evaluations = 0;
    report.converged = true;
    const BandwidthSpec spec = is_adaptive(method)
                                   ? BandwidthSpec::adaptive(scott, config.alpha)
                                   : BandwidthSpec::fixed(scott);
    report.lscv_value = lscv(train, decomp, spec);
    const McseValue mv = mcse_detailed(train, decomp, spec);
    report.mcse_value = mv.value;
    report.no_evidence_rows = mv.no_evidence_rows;
    table.rows.push_back(
        evaluated_row("scott", report, train, decomp, validation, config.level, config.alpha));
  }

  for (Criterion criterion : config.criteria) {
    for (Method method : config.methods) {
      const CriterionReport report =
          select_bandwidth(train, method, criterion, config.optimizer, config.alpha);
      table.rows.push_back(evaluated_row(criterion_name(criterion), report, train, decomp,
                                         validation, config.level, config.alpha));
    }
  }
  return table;
}

}  // namespace kdecorrect
