#include "kdecorrect/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "kdecorrect/errors.hpp"

namespace kdecorrect {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// Strict full-token parse; returns false for blanks, trailing junk, and
// non-finite values.
bool parse_finite(const std::string& raw, double& out) {
  std::string tok = trim(raw);
  if (tok.empty()) return false;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) return false;
  return std::isfinite(out);
}

// Unbiased index draw from [0, n) using the raw 64-bit engine output, so
// the split is reproducible independent of any library distribution.
std::uint64_t draw_index(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

Dataset take_rows(const Dataset& data, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.columns = data.columns;
  out.output_index = data.output_index;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), data.dims());
  for (Eigen::Index k = 0; k < out.values.rows(); ++k)
    out.values.row(k) = data.values.row(rows[static_cast<std::size_t>(k)]);
  return out;
}

}  // namespace

std::vector<Eigen::Index> Dataset::input_indices() const {
  std::vector<Eigen::Index> idx;
  idx.reserve(static_cast<std::size_t>(dims() - 1));
  for (Eigen::Index j = 0; j < dims(); ++j)
    if (j != output_index) idx.push_back(j);
  return idx;
}

Eigen::MatrixXd Dataset::input_values() const {
  auto idx = input_indices();
  Eigen::MatrixXd out(rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = values.col(idx[k]);
  return out;
}

void Dataset::validate() const {
  if (rows() < 2) throw DataError("dataset needs at least 2 rows, got " + std::to_string(rows()));
  if (dims() < 2) throw DataError("dataset needs at least 2 columns, got " + std::to_string(dims()));
  if (static_cast<Eigen::Index>(columns.size()) != dims())
    throw DataError("column name count does not match data width");
  if (output_index < 0 || output_index >= dims()) throw DataError("output column index out of range");
  if (!values.allFinite()) throw DataError("dataset contains non-finite entries");
  for (Eigen::Index j = 0; j < dims(); ++j) {
    if (values.col(j).minCoeff() == values.col(j).maxCoeff())
      throw DataError("zero-variance column '" + columns[static_cast<std::size_t>(j)] + "'");
  }
}

LoadReport load_csv(const std::string& path, const std::string& output_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  auto header = split_fields(line);
  for (auto& h : header) h = trim(h);
  const std::size_t width = header.size();
  if (width < 2) throw DataError("'" + path + "' needs at least 2 columns");
  for (std::size_t a = 0; a < width; ++a)
    for (std::size_t b = a + 1; b < width; ++b)
      if (header[a] == header[b]) throw DataError("duplicate column name '" + header[a] + "'");

  std::vector<double> flat;
  std::size_t kept = 0, dropped = 0;
  std::vector<double> row(width);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    bool ok = fields.size() == width;
    for (std::size_t j = 0; ok && j < width; ++j) ok = parse_finite(fields[j], row[j]);
    if (!ok) {
      ++dropped;
      continue;
    }
    flat.insert(flat.end(), row.begin(), row.end());
    ++kept;
  }

  if (kept < 2)
    throw DataError("'" + path + "' has fewer than 2 complete rows (" + std::to_string(kept) +
                    " kept, " + std::to_string(dropped) + " dropped)");

  LoadReport rep;
  rep.rows_retained = kept;
  rep.rows_dropped = dropped;
  rep.data.columns = header;
  rep.data.values = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), static_cast<Eigen::Index>(kept), static_cast<Eigen::Index>(width));

  if (output_column.empty()) {
    rep.data.output_index = static_cast<Eigen::Index>(width) - 1;
  } else {
    auto it = std::find(header.begin(), header.end(), output_column);
    if (it == header.end()) throw DataError("output column '" + output_column + "' not found");
    rep.data.output_index = static_cast<Eigen::Index>(it - header.begin());
  }
  rep.data.validate();
  return rep;
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ostringstream out;
  for (std::size_t j = 0; j < data.columns.size(); ++j) {
    if (j) out << ',';
    out << data.columns[j];
  }
  out << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.dims(); ++j) {
      if (j) out << ',';
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, data.values(i, j));
      out.write(buf, ptr - buf);
      (void)ec;
    }
    out << '\n';
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write '" + path + "'");
  f << out.str();
}

std::pair<Dataset, Dataset> split_train_validation(const Dataset& data, double fraction,
                                                   std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw DataError("split fraction must lie in (0, 1)");
  const auto m = static_cast<std::uint64_t>(data.rows());
  // floor((1-fraction)*M) validation rows; the epsilon absorbs the
  // representation error of 1-fraction (e.g. 0.2*10 evaluating to
  // 1.9999999999999996).
  auto n_val = static_cast<std::uint64_t>(
      std::floor((1.0 - fraction) * static_cast<double>(m) + 1e-9));
  const std::uint64_t n_train = m - n_val;
  if (n_train < 2 || n_val < 1)
    throw DataError("split leaves too few rows (train " + std::to_string(n_train) +
                    ", validation " + std::to_string(n_val) + ")");

  std::vector<Eigen::Index> idx(m);
  for (std::uint64_t i = 0; i < m; ++i) idx[i] = static_cast<Eigen::Index>(i);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first n_val slots become the validation draw.
  for (std::uint64_t k = 0; k < n_val; ++k) {
    std::uint64_t j = k + draw_index(rng, m - k);
    std::swap(idx[k], idx[j]);
  }
  std::vector<Eigen::Index> val_rows(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<Eigen::Index> train_rows(idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
  std::sort(val_rows.begin(), val_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  return {take_rows(data, train_rows), take_rows(data, val_rows)};
}

CovarianceDecomposition covariance_decomposition(const Dataset& data) {
  data.validate();
  const Eigen::Index m = data.rows();
  Eigen::RowVectorXd mean = data.values.colwise().mean();
  Eigen::MatrixXd centered = data.values.rowwise() - mean;
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(m - 1);
  cov = 0.5 * (cov + cov.transpose());  // symmetrize away accumulation noise

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericError("covariance eigendecomposition failed");
  Eigen::VectorXd vals = solver.eigenvalues();  // ascending already
  Eigen::MatrixXd vecs = solver.eigenvectors();

  if (vals.minCoeff() <= 0.0 || vals.maxCoeff() / vals.minCoeff() > 1e12)
    throw NumericError("degenerate sample: covariance condition number exceeds 1e12");

  // Sign convention: largest-magnitude component of each eigenvector >= 0.
  for (Eigen::Index k = 0; k < vecs.cols(); ++k) {
    Eigen::Index imax;
    vecs.col(k).cwiseAbs().maxCoeff(&imax);
    if (vecs(imax, k) < 0.0) vecs.col(k) = -vecs.col(k);
  }

  CovarianceDecomposition dec;
  dec.cov = std::move(cov);
  dec.eigvecs = std::move(vecs);
  dec.eigvals = std::move(vals);
  dec.output_index = data.output_index;
  return dec;
}

}  // namespace kdecorrect
