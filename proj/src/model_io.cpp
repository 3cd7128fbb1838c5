#include "kdecorrect/model_io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kdecorrect/errors.hpp"

namespace kdecorrect {

namespace {

using nlohmann::json;

std::uint64_t fnv1a64_bytes(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fingerprint_hash(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& name : data.columns) {
    h = fnv1a64_bytes(h, name.data(), name.size());
    h = fnv1a64_bytes(h, "\x1f", 1);
  }
  const auto out = static_cast<std::int64_t>(data.output_index);
  h = fnv1a64_bytes(h, &out, sizeof out);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.dims(); ++j) {
      const double v = data.values(i, j);
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      h = fnv1a64_bytes(h, &bits, sizeof bits);
    }
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void column_moments(const Dataset& data, Eigen::VectorXd& means, Eigen::VectorXd& stds) {
  means = data.values.colwise().mean();
  Eigen::MatrixXd centered = data.values.rowwise() - means.transpose();
  stds = (centered.array().square().colwise().sum() / static_cast<double>(data.rows() - 1))
             .sqrt()
             .matrix();
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw DataError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot replace '" + path + "'");
  }
}

}  // namespace

void save_model(const FittedModel& model, const std::string& path) {
  json j;
  j["format"] = "kdecorrect-model";
  j["format_version"] = kModelFormatVersion;
  j["columns"] = model.data.columns;
  j["output_column"] = model.data.columns[static_cast<std::size_t>(model.data.output_index)];

  json bw;
  bw["method"] = method_name(model.spec.method);
  if (model.spec.scalar_factor) bw["scalar_factor"] = *model.spec.scalar_factor;
  if (model.spec.selective_factor) bw["selective_factor"] = to_std(*model.spec.selective_factor);
  if (is_adaptive(model.spec.method)) bw["alpha"] = model.spec.alpha;
  j["bandwidth"] = bw;

  Eigen::VectorXd means, stds;
  column_moments(model.data, means, stds);
  j["fingerprint"] = {{"rows", model.data.rows()},
                      {"column_means", to_std(means)},
                      {"column_stds", to_std(stds)},
                      {"fnv1a64", fingerprint_hash(model.data)}};

  json rows = json::array();
  for (Eigen::Index i = 0; i < model.data.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < model.data.dims(); ++c) row.push_back(model.data.values(i, c));
    rows.push_back(std::move(row));
  }
  j["data"] = std::move(rows);

  if (model.locals) {
    j["local_factors"] = {{"alpha", model.locals->alpha},
                          {"log_lambdas", to_std(model.locals->log_lambdas)},
                          {"pilot_density", to_std(model.locals->pilot_density)}};
  }
  atomic_write(path, j.dump(1));
}

FittedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("model '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "kdecorrect-model")
      throw DataError("'" + path + "' is not a kdecorrect model file");
    if (j.at("format_version").get<int>() != kModelFormatVersion)
      throw DataError("unsupported model format version in '" + path + "'");

    Dataset data;
    data.columns = j.at("columns").get<std::vector<std::string>>();
    const auto out_name = j.at("output_column").get<std::string>();
    const auto it = std::find(data.columns.begin(), data.columns.end(), out_name);
    if (it == data.columns.end()) throw DataError("model output column missing from columns");
    data.output_index = static_cast<Eigen::Index>(it - data.columns.begin());

    const auto& rows = j.at("data");
    const auto m = static_cast<Eigen::Index>(rows.size());
    const auto d = static_cast<Eigen::Index>(data.columns.size());
    data.values.resize(m, d);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& row = rows.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(row.size()) != d)
        throw DataError("model data row width mismatch");
      for (Eigen::Index c = 0; c < d; ++c)
        data.values(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    data.validate();

    const auto& fp = j.at("fingerprint");
    if (fp.at("rows").get<Eigen::Index>() != data.rows())
      throw DataError("model fingerprint row count mismatch");
    if (fp.at("fnv1a64").get<std::string>() != fingerprint_hash(data))
      throw DataError("model fingerprint hash mismatch: embedded data was altered");
    Eigen::VectorXd means, stds;
    column_moments(data, means, stds);
    if (to_std(means) != fp.at("column_means").get<std::vector<double>>() ||
        to_std(stds) != fp.at("column_stds").get<std::vector<double>>())
      throw DataError("model fingerprint moments mismatch");

    const auto& bw = j.at("bandwidth");
    const Method method = method_from_name(bw.at("method").get<std::string>());
    BandwidthSpec spec;
    const double alpha = bw.value("alpha", 0.5);
    if (is_selective(method)) {
      Eigen::VectorXd h = to_eigen(bw.at("selective_factor").get<std::vector<double>>());
      spec = is_adaptive(method) ? BandwidthSpec::selective_adaptive(h, alpha)
                                 : BandwidthSpec::selective(h);
    } else {
      const double h = bw.at("scalar_factor").get<double>();
      spec = is_adaptive(method) ? BandwidthSpec::adaptive(h, alpha) : BandwidthSpec::fixed(h);
    }
    spec.validate(d);

    FittedModel model;
    model.data = std::move(data);
    model.spec = spec;
    model.bw = is_selective(method)
                   ? selective_bandwidth(covariance_decomposition(model.data),
                                         *spec.selective_factor)
                   : fixed_bandwidth(covariance_decomposition(model.data), *spec.scalar_factor);

    if (is_adaptive(method)) {
      if (!j.contains("local_factors"))
        throw DataError("adaptive model is missing its local factors");
      const auto& lf = j.at("local_factors");
      LocalFactors locals;
      locals.alpha = lf.at("alpha").get<double>();
      locals.log_lambdas = to_eigen(lf.at("log_lambdas").get<std::vector<double>>());
      locals.pilot_density = to_eigen(lf.at("pilot_density").get<std::vector<double>>());
      if (locals.log_lambdas.size() != m || locals.pilot_density.size() != m)
        throw DataError("local factor length mismatch");
      locals.lambdas = locals.log_lambdas.array().exp().matrix();
      if (!(locals.lambdas.minCoeff() > 0.0)) throw DataError("non-positive local factor");
      model.locals = std::move(locals);
    } else if (j.contains("local_factors")) {
      throw DataError("non-adaptive model carries local factors");
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError("model '" + path + "' has an invalid schema: " + e.what());
  }
}

}  // namespace kdecorrect
