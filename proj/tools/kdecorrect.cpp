#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kdecorrect/conditional.hpp"
#include "kdecorrect/errors.hpp"
#include "kdecorrect/experiments.hpp"
#include "kdecorrect/model_io.hpp"
#include "kdecorrect/selection.hpp"

namespace {

using nlohmann::json;
using namespace kdecorrect;

constexpr const char* kVersion = "kdecorrect 1.0.0";

// Flag/value problems discovered after CLI11 parsing; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt_full(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string fmt_display(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string join_factor(const std::vector<double>& factor, bool full) {
  std::string out;
  for (std::size_t i = 0; i < factor.size(); ++i) {
    if (i) out += ';';
    out += full ? fmt_full(factor[i]) : fmt_display(factor[i]);
  }
  return out;
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

void atomic_write_text(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path tmp(path);
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw DataError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, fs::path(path), ec);
  if (ec) throw DataError("cannot replace '" + path + "'");
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string input, output_col, model_path;
  std::string method = "fw";
  std::string criterion = "lscv";
  double alpha = 0.5;
  std::uint64_t seed = 1;
};

void run_fit(const FitArgs& a) {
  const Method method = method_from_name(a.method);
  LoadReport rep = load_csv(a.input, a.output_col);
  std::cerr << "loaded " << rep.rows_retained << " rows from '" << a.input << "' ("
            << rep.rows_dropped << " dropped)\n";
  const Dataset& data = rep.data;
  const CovarianceDecomposition decomp = covariance_decomposition(data);

  CriterionReport report;
  BandwidthSpec spec;
  if (a.criterion == "scott" || a.criterion == "silverman") {
    const double h = plugin_factor(
        data.rows(), data.dims(),
        a.criterion == "scott" ? PluginRule::Scott : PluginRule::Silverman);
    if (is_selective(method)) {
      Eigen::VectorXd hv = Eigen::VectorXd::Constant(data.dims(), h);
      spec = is_adaptive(method) ? BandwidthSpec::selective_adaptive(hv, a.alpha)
                                 : BandwidthSpec::selective(hv);
      report.factor.assign(static_cast<std::size_t>(data.dims()), h);
    } else {
      spec = is_adaptive(method) ? BandwidthSpec::adaptive(h, a.alpha) : BandwidthSpec::fixed(h);
      report.factor = {h};
    }
    report.method = method;
    report.alpha = a.alpha;
    report.lscv_value = lscv(data, decomp, spec);
    const McseValue mv = mcse_detailed(data, decomp, spec);
    report.mcse_value = mv.value;
    report.no_evidence_rows = mv.no_evidence_rows;
  } else {
    report = select_bandwidth(data, method, criterion_from_name(a.criterion), {}, a.alpha);
    if (is_selective(method)) {
      Eigen::VectorXd hv(static_cast<Eigen::Index>(report.factor.size()));
      for (std::size_t j = 0; j < report.factor.size(); ++j)
        hv(static_cast<Eigen::Index>(j)) = report.factor[j];
      spec = is_adaptive(method) ? BandwidthSpec::selective_adaptive(hv, a.alpha)
                                 : BandwidthSpec::selective(hv);
    } else {
      spec = is_adaptive(method) ? BandwidthSpec::adaptive(report.factor.at(0), a.alpha)
                                 : BandwidthSpec::fixed(report.factor.at(0));
    }
  }

  const FittedModel model = fit_model(data, decomp, spec);
  save_model(model, a.model_path);
  std::cout << "method=" << method_name(method) << " selector=" << a.criterion
            << " h=" << join_factor(report.factor, false)
            << " lscv=" << fmt_full(report.lscv_value)
            << " mcse=" << fmt_full(report.mcse_value)
            << " evaluations=" << report.evaluations << " model=" << a.model_path << "\n";
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
  std::string model_path, input, out;
  double level = 0.9;
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void run_predict(const PredictArgs& a) {
  if (!(a.level > 0.0 && a.level < 1.0)) throw UsageError("--level must lie in (0, 1)");
  const FittedModel model = load_model(a.model_path);

  auto lines = read_lines(a.input);
  if (lines.empty()) throw DataError("'" + a.input + "' is empty");
  const auto header = split_list(lines[0], ',');

  // Every model input column must be present by name.
  std::vector<std::size_t> col_of;
  for (Eigen::Index j : model.data.input_indices()) {
    const std::string& name = model.data.columns[static_cast<std::size_t>(j)];
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw DataError("input is missing model column '" + name + "'");
    col_of.push_back(static_cast<std::size_t>(it - header.begin()));
  }

  std::vector<std::vector<std::string>> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    auto fields = split_list(lines[li], ',');
    if (fields.size() != header.size())
      throw DataError("row " + std::to_string(li) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(header.size()));
    rows.push_back(std::move(fields));
  }

  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(rows.size()), model.data.dims() - 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t k = 0; k < col_of.size(); ++k) {
      std::string tok = rows[r][col_of[k]];
      const auto b = tok.find_first_not_of(" \t");
      const auto e = tok.find_last_not_of(" \t");
      tok = b == std::string::npos ? std::string() : tok.substr(b, e - b + 1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
        throw DataError("row " + std::to_string(r + 1) + ": cannot parse '" + tok + "'");
      inputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = v;
    }
  }

  const auto results = correct_batch(model, inputs, a.level);

  std::ostringstream out;
  out << lines[0] << ",expected,lower,upper,evidence,flag\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c) out << ',';
      out << rows[r][c];
    }
    const auto& res = results[r];
    out << ',' << fmt_full(res.expectation) << ',' << fmt_full(res.lower) << ','
        << fmt_full(res.upper) << ',' << fmt_full(res.evidence) << ','
        << (res.no_evidence ? "no_evidence" : "") << '\n';
  }
  atomic_write_text(a.out, out.str());
  std::cerr << "wrote " << rows.size() << " corrected rows to '" << a.out << "'\n";
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string out_dir;
  std::string methods = "fw,aw,sw,saw";
  std::string criteria = "lscv,mcse";
  double split = 0.8;
  double level = 0.9;
  double alpha = 0.5;
  std::uint64_t seed = 1;
  // example1 / shading
  Eigen::Index m = 0;
  // csv
  std::string input, output_col, raw_col;
};

BenchmarkConfig benchmark_config(const BenchArgs& a) {
  BenchmarkConfig cfg;
  cfg.methods.clear();
  for (const auto& name : split_list(a.methods, ','))
    if (!name.empty()) cfg.methods.push_back(method_from_name(name));
  cfg.criteria.clear();
  for (const auto& name : split_list(a.criteria, ','))
    if (!name.empty()) cfg.criteria.push_back(criterion_from_name(name));
  if (cfg.methods.empty()) throw UsageError("--methods selected nothing");
  if (cfg.criteria.empty()) throw UsageError("--criteria selected nothing");
  cfg.split_fraction = a.split;
  cfg.split_seed = a.seed;
  cfg.level = a.level;
  cfg.alpha = a.alpha;
  return cfg;
}

void write_table(const BenchmarkTable& table, const std::string& out_dir, const json& meta) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  std::ostringstream csv;
  csv << "method,criterion,factor,lscv,mcse,rmse,evaluations,converged,no_evidence\n";
  if (table.raw_rmse) csv << "raw,,,,," << fmt_full(*table.raw_rmse) << ",,,\n";
  for (const auto& row : table.rows) {
    csv << method_name(row.report.method) << ',' << row.selector << ','
        << join_factor(row.report.factor, true) << ',' << fmt_full(row.report.lscv_value) << ','
        << fmt_full(row.report.mcse_value) << ',' << fmt_full(row.rmse) << ','
        << row.report.evaluations << ',' << (row.report.converged ? "true" : "false") << ','
        << row.no_evidence_predictions << '\n';
  }
  atomic_write_text((fs::path(out_dir) / "table.csv").string(), csv.str());

  json jt;
  jt["raw_rmse"] = table.raw_rmse ? json(*table.raw_rmse) : json(nullptr);
  jt["train_rows"] = table.train_rows;
  jt["validation_rows"] = table.validation_rows;
  json rows = json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"method", method_name(row.report.method)},
                    {"criterion", row.selector},
                    {"factor", row.report.factor},
                    {"lscv", row.report.lscv_value},
                    {"mcse", row.report.mcse_value},
                    {"rmse", row.rmse},
                    {"evaluations", row.report.evaluations},
                    {"converged", row.report.converged},
                    {"no_evidence_rows", row.report.no_evidence_rows},
                    {"no_evidence_predictions", row.no_evidence_predictions}});
  }
  jt["rows"] = std::move(rows);
  atomic_write_text((fs::path(out_dir) / "table.json").string(), jt.dump(1));
  atomic_write_text((fs::path(out_dir) / "meta.json").string(), meta.dump(1));
}

json common_meta(const BenchArgs& a) {
  return json{{"methods", a.methods}, {"criteria", a.criteria}, {"split", a.split},
              {"level", a.level},     {"alpha", a.alpha},       {"seed", a.seed}};
}

void run_bench_example1(const BenchArgs& a) {
  Example1Config gen;
  if (a.m > 0) gen.m = a.m;
  gen.seed = a.seed;
  const Dataset data = gen_example1(gen);
  BenchmarkConfig cfg = benchmark_config(a);
  const BenchmarkTable table = run_benchmark(data, cfg);
  json meta = common_meta(a);
  meta["kind"] = "example1";
  meta["generator"] = {{"m", gen.m}, {"x_std", gen.x_std}, {"noise_std", gen.noise_std},
                       {"seed", gen.seed}};
  write_table(table, a.out_dir, meta);
}

void run_bench_shading(const BenchArgs& a) {
  ShadingConfig gen;
  if (a.m > 0) gen.m = a.m;
  gen.seed = a.seed;
  const Dataset data = gen_shading(gen);
  BenchmarkConfig cfg = benchmark_config(a);
  cfg.raw_proxy_column = 0;  // mast speed proxies the reference speed
  const BenchmarkTable table = run_benchmark(data, cfg);
  json meta = common_meta(a);
  meta["kind"] = "shading";
  meta["generator"] = {{"m", gen.m},
                       {"sector", {gen.sector_lo, gen.sector_hi}},
                       {"shading_gain", gen.shading_gain},
                       {"weibull_shape", gen.weibull_shape},
                       {"weibull_scale", gen.weibull_scale},
                       {"direction_mean", gen.direction_mean},
                       {"direction_spread", gen.direction_spread},
                       {"noise_std", gen.noise_std},
                       {"seed", gen.seed}};
  write_table(table, a.out_dir, meta);
}

void run_bench_csv(const BenchArgs& a) {
  LoadReport rep = load_csv(a.input, a.output_col);
  std::cerr << "loaded " << rep.rows_retained << " rows (" << rep.rows_dropped << " dropped)\n";
  BenchmarkConfig cfg = benchmark_config(a);
  if (!a.raw_col.empty()) {
    auto it = std::find(rep.data.columns.begin(), rep.data.columns.end(), a.raw_col);
    if (it == rep.data.columns.end())
      throw DataError("raw proxy column '" + a.raw_col + "' not found");
    cfg.raw_proxy_column = static_cast<Eigen::Index>(it - rep.data.columns.begin());
  }
  const BenchmarkTable table = run_benchmark(rep.data, cfg);
  json meta = common_meta(a);
  meta["kind"] = "csv";
  meta["input"] = a.input;
  meta["output_col"] = a.output_col;
  meta["raw_col"] = a.raw_col;
  write_table(table, a.out_dir, meta);
}

// ---------------------------------------------------------------- density

struct DensityArgs {
  std::string model_path, out;
  bool joint = false;
  bool conditional = false;
  std::string dims;   // "i,j"
  std::string at;     // "v1,v2,..."
  std::string range;  // "lo:hi" or "lo:hi,lo:hi"
  int points = 200;
  double level = 0.9;
};

std::pair<double, double> parse_range(const std::string& spec) {
  const auto pos = spec.find(':');
  if (pos == std::string::npos) throw UsageError("--range expects lo:hi");
  double lo = 0.0, hi = 0.0;
  const std::string a = spec.substr(0, pos), b = spec.substr(pos + 1);
  auto r1 = std::from_chars(a.data(), a.data() + a.size(), lo);
  auto r2 = std::from_chars(b.data(), b.data() + b.size(), hi);
  if (r1.ec != std::errc() || r1.ptr != a.data() + a.size() || r2.ec != std::errc() ||
      r2.ptr != b.data() + b.size() || !(lo < hi))
    throw UsageError("--range expects lo:hi with lo < hi");
  return {lo, hi};
}

void run_density(const DensityArgs& a) {
  if (a.joint == a.conditional)
    throw UsageError("choose exactly one of --joint and --conditional");
  if (a.points < 2) throw UsageError("--points must be at least 2");
  const FittedModel model = load_model(a.model_path);
  const Eigen::Index d = model.data.dims();
  const double lam_max =
      model.locals ? model.locals->lambdas.maxCoeff() : 1.0;

  if (a.joint) {
    auto toks = split_list(a.dims, ',');
    if (toks.size() != 2) throw UsageError("--dims expects two comma-separated indices");
    long ia = 0, ib = 0;
    auto p1 = std::from_chars(toks[0].data(), toks[0].data() + toks[0].size(), ia);
    auto p2 = std::from_chars(toks[1].data(), toks[1].data() + toks[1].size(), ib);
    if (p1.ec != std::errc() || p2.ec != std::errc() || ia < 0 || ib < 0 || ia >= d || ib >= d ||
        ia == ib)
      throw UsageError("--dims indices out of range");

    std::array<std::pair<double, double>, 2> ranges;
    if (!a.range.empty()) {
      auto parts = split_list(a.range, ',');
      if (parts.size() != 2) throw UsageError("--range for --joint expects lo:hi,lo:hi");
      ranges[0] = parse_range(parts[0]);
      ranges[1] = parse_range(parts[1]);
    } else {
      const std::array<Eigen::Index, 2> dims{static_cast<Eigen::Index>(ia),
                                             static_cast<Eigen::Index>(ib)};
      for (int k = 0; k < 2; ++k) {
        const auto col = model.data.values.col(dims[static_cast<std::size_t>(k)]);
        const double pad =
            4.0 * lam_max *
            std::sqrt(model.bw.H(dims[static_cast<std::size_t>(k)], dims[static_cast<std::size_t>(k)]));
        ranges[static_cast<std::size_t>(k)] = {col.minCoeff() - pad, col.maxCoeff() + pad};
      }
    }

    const int n = a.points;
    Eigen::MatrixXd queries(static_cast<Eigen::Index>(n) * n, 2);
    for (int i = 0; i < n; ++i) {
      const double va =
          ranges[0].first + (ranges[0].second - ranges[0].first) * i / static_cast<double>(n - 1);
      for (int j = 0; j < n; ++j) {
        const double vb = ranges[1].first +
                          (ranges[1].second - ranges[1].first) * j / static_cast<double>(n - 1);
        queries(static_cast<Eigen::Index>(i) * n + j, 0) = va;
        queries(static_cast<Eigen::Index>(i) * n + j, 1) = vb;
      }
    }
    const Eigen::VectorXd logf = kde_log_marginal2(model, ia, ib, queries);
    std::ostringstream out;
    out << model.data.columns[static_cast<std::size_t>(ia)] << ','
        << model.data.columns[static_cast<std::size_t>(ib)] << ",density\n";
    for (Eigen::Index q = 0; q < queries.rows(); ++q)
      out << fmt_full(queries(q, 0)) << ',' << fmt_full(queries(q, 1)) << ','
          << fmt_full(std::exp(logf(q))) << '\n';
    atomic_write_text(a.out, out.str());
    return;
  }

  // conditional
  auto toks = split_list(a.at, ',');
  if (static_cast<Eigen::Index>(toks.size()) != d - 1)
    throw UsageError("--at expects " + std::to_string(d - 1) + " comma-separated values");
  Eigen::VectorXd x(d - 1);
  for (std::size_t k = 0; k < toks.size(); ++k) {
    double v = 0.0;
    auto r = std::from_chars(toks[k].data(), toks[k].data() + toks[k].size(), v);
    if (r.ec != std::errc() || r.ptr != toks[k].data() + toks[k].size())
      throw UsageError("--at: cannot parse '" + toks[k] + "'");
    x(static_cast<Eigen::Index>(k)) = v;
  }

  const ConditionalMixture mix = condition(model, x);
  std::pair<double, double> yr;
  if (!a.range.empty()) {
    yr = parse_range(a.range);
  } else {
    const Eigen::VectorXd s = mix.variances.array().sqrt().matrix();
    yr = {(mix.means - 8.0 * s).minCoeff(), (mix.means + 8.0 * s).maxCoeff()};
  }
  std::ostringstream out;
  out << model.data.columns[static_cast<std::size_t>(model.data.output_index)] << ",density\n";
  for (int i = 0; i < a.points; ++i) {
    const double y = yr.first + (yr.second - yr.first) * i / static_cast<double>(a.points - 1);
    out << fmt_full(y) << ',' << fmt_full(mix.pdf(y)) << '\n';
  }
  atomic_write_text(a.out, out.str());

  json side;
  side["at"] = std::vector<double>(x.data(), x.data() + x.size());
  side["expectation"] = conditional_expectation(mix);
  const auto [lo, hi] = credible_interval(mix, a.level);
  side["lower"] = lo;
  side["upper"] = hi;
  side["level"] = a.level;
  side["evidence"] = mix.evidence;
  std::filesystem::path sidecar(a.out);
  sidecar.replace_extension(".json");
  if (sidecar == std::filesystem::path(a.out)) sidecar += ".meta.json";
  atomic_write_text(sidecar.string(), side.dump(1));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional-PDF data correction with multivariate Gaussian KDE"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a KDE model to a CSV sample");
  fit_cmd->add_option("--input", fit.input, "training CSV")->required();
  fit_cmd->add_option("--output-col", fit.output_col, "output column name (default: last)");
  fit_cmd->add_option("--method", fit.method, "fw|aw|sw|saw")
      ->check(CLI::IsMember({"fw", "aw", "sw", "saw"}));
  fit_cmd->add_option("--criterion", fit.criterion, "lscv|mcse|scott|silverman")
      ->check(CLI::IsMember({"lscv", "mcse", "scott", "silverman"}));
  fit_cmd->add_option("--alpha", fit.alpha, "adaptive sensitivity in [0,1]");
  fit_cmd->add_option("--seed", fit.seed, "reserved for resampling workflows");
  fit_cmd->add_option("--model", fit.model_path, "model file to write")->required();

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Correct a CSV with a fitted model");
  predict_cmd->add_option("--model", predict.model_path, "model file")->required();
  predict_cmd->add_option("--input", predict.input, "CSV with the model's input columns")
      ->required();
  predict_cmd->add_option("--out", predict.out, "corrected CSV to write")->required();
  predict_cmd->add_option("--level", predict.level, "credible level (default 0.90)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Reproduce benchmark tables");
  bench_cmd->require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", bench.out_dir, "output directory")->required();
    sub->add_option("--methods", bench.methods, "comma list of fw,aw,sw,saw");
    sub->add_option("--criteria", bench.criteria, "comma list of lscv,mcse");
    sub->add_option("--split", bench.split, "training fraction (default 0.8)");
    sub->add_option("--level", bench.level, "credible level");
    sub->add_option("--alpha", bench.alpha, "adaptive sensitivity");
    sub->add_option("--seed", bench.seed, "generator and split seed");
  };
  auto* bench_e1 = bench_cmd->add_subcommand("example1", "hypothetical 2-D sample");
  add_common(bench_e1);
  bench_e1->add_option("--m", bench.m, "sample count (default 100)");
  auto* bench_sh = bench_cmd->add_subcommand("shading", "synthetic mast-shading sample");
  add_common(bench_sh);
  bench_sh->add_option("--m", bench.m, "sample count (default 3000)");
  auto* bench_csv = bench_cmd->add_subcommand("csv", "user-supplied CSV");
  add_common(bench_csv);
  bench_csv->add_option("--input", bench.input, "CSV path")->required();
  bench_csv->add_option("--output-col", bench.output_col, "output column name");
  bench_csv->add_option("--raw-col", bench.raw_col, "column proxying the output (raw RMSE)");

  DensityArgs density;
  auto* density_cmd = app.add_subcommand("density", "Export density grids for plotting");
  density_cmd->add_option("--model", density.model_path, "model file")->required();
  density_cmd->add_flag("--joint", density.joint, "2-D marginal grid");
  density_cmd->add_flag("--conditional", density.conditional, "conditional curve f(Y|x)");
  density_cmd->add_option("--dims", density.dims, "joint dims as i,j (0-based)");
  density_cmd->add_option("--at", density.at, "conditional query, comma-separated inputs");
  density_cmd->add_option("--range", density.range, "lo:hi (or lo:hi,lo:hi for --joint)");
  density_cmd->add_option("--points", density.points, "grid points per axis (default 200)");
  density_cmd->add_option("--level", density.level, "credible level for the sidecar");
  density_cmd->add_option("--out", density.out, "CSV to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (*fit_cmd) {
      run_fit(fit);
    } else if (*predict_cmd) {
      run_predict(predict);
    } else if (*bench_cmd) {
      if (bench_cmd->get_subcommand("example1")->parsed())
        run_bench_example1(bench);
      else if (bench_cmd->get_subcommand("shading")->parsed())
        run_bench_shading(bench);
      else
        run_bench_csv(bench);
    } else if (*density_cmd) {
      run_density(density);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
