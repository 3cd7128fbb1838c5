#include "kdecorrect/bandwidth.hpp"

#include <cmath>
#include <limits>

#include "kdecorrect/density.hpp"
#include "kdecorrect/errors.hpp"

namespace kdecorrect {

std::string method_name(Method m) {
  switch (m) {
    case Method::FW: return "fw";
    case Method::AW: return "aw";
    case Method::SW: return "sw";
    case Method::SAW: return "saw";
  }
  return "fw";
}

Method method_from_name(const std::string& name) {
  if (name == "fw" || name == "FW") return Method::FW;
  if (name == "aw" || name == "AW") return Method::AW;
  if (name == "sw" || name == "SW") return Method::SW;
  if (name == "saw" || name == "SAW") return Method::SAW;
  throw DataError("unknown bandwidth method '" + name + "'");
}

BandwidthSpec BandwidthSpec::fixed(double h) {
  BandwidthSpec s;
  s.method = Method::FW;
  s.scalar_factor = h;
  return s;
}

BandwidthSpec BandwidthSpec::adaptive(double h, double alpha) {
  BandwidthSpec s;
  s.method = Method::AW;
  s.scalar_factor = h;
  s.alpha = alpha;
  return s;
}

BandwidthSpec BandwidthSpec::selective(Eigen::VectorXd h) {
  BandwidthSpec s;
  s.method = Method::SW;
  s.selective_factor = std::move(h);
  return s;
}

BandwidthSpec BandwidthSpec::selective_adaptive(Eigen::VectorXd h, double alpha) {
  BandwidthSpec s;
  s.method = Method::SAW;
  s.selective_factor = std::move(h);
  s.alpha = alpha;
  return s;
}

void BandwidthSpec::validate(Eigen::Index dims) const {
  if (dims < 1) throw DataError("bandwidth spec needs at least one dimension");
  if (is_selective(method)) {
    if (!selective_factor || scalar_factor)
      throw DataError("selective method requires a selective factor only");
    if (selective_factor->size() != dims)
      throw DataError("selective factor has " + std::to_string(selective_factor->size()) +
                      " components, data has " + std::to_string(dims) + " dimensions");
    if (!(selective_factor->minCoeff() > 0.0))
      throw DataError("selective factor components must be positive");
  } else {
    if (!scalar_factor || selective_factor)
      throw DataError("scalar method requires a scalar factor only");
    if (!(*scalar_factor > 0.0)) throw DataError("bandwidth factor must be positive");
  }
  if (is_adaptive(method) && !(alpha >= 0.0 && alpha <= 1.0))
    throw DataError("alpha must lie in [0, 1]");
}

BandwidthMatrix BandwidthMatrix::from_matrix(Eigen::MatrixXd H, Eigen::Index output_index) {
  const Eigen::Index d = H.rows();
  if (H.cols() != d || d < 1) throw NumericError("bandwidth matrix must be square");
  if (output_index < 0 || output_index >= d)
    throw NumericError("bandwidth output index out of range");
  if (!H.allFinite() || (H - H.transpose()).cwiseAbs().maxCoeff() >
                            1e-12 * std::max(1.0, H.cwiseAbs().maxCoeff()))
    throw NumericError("bandwidth matrix is not symmetric");

  BandwidthMatrix bw;
  bw.H = std::move(H);
  bw.output_index = output_index;

  Eigen::LLT<Eigen::MatrixXd> llt(bw.H);
  if (llt.info() != Eigen::Success)
    throw NumericError("bandwidth matrix is not positive definite");
  bw.chol = llt.matrixL();
  bw.log_det = 2.0 * bw.chol.diagonal().array().log().sum();
  if (!std::isfinite(bw.log_det)) throw NumericError("bandwidth determinant is not finite");

  if (d >= 2) {
    std::vector<Eigen::Index> in;
    in.reserve(static_cast<std::size_t>(d - 1));
    for (Eigen::Index j = 0; j < d; ++j)
      if (j != output_index) in.push_back(j);
    Eigen::MatrixXd hxx(d - 1, d - 1);
    Eigen::VectorXd hxy(d - 1);
    for (std::size_t a = 0; a < in.size(); ++a) {
      hxy(static_cast<Eigen::Index>(a)) = bw.H(in[a], output_index);
      for (std::size_t b = 0; b < in.size(); ++b)
        hxx(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = bw.H(in[a], in[b]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt_xx(hxx);
    if (llt_xx.info() != Eigen::Success)
      throw NumericError("input block of the bandwidth matrix is not positive definite");
    bw.input_chol = llt_xx.matrixL();
    bw.input_log_det = 2.0 * bw.input_chol.diagonal().array().log().sum();
    bw.gain = llt_xx.solve(hxy);
    bw.cond_var = bw.H(output_index, output_index) - hxy.dot(bw.gain);
    if (!(bw.cond_var > 0.0))
      throw NumericError("conditional kernel variance is not positive");
  }
  return bw;
}

double plugin_factor(Eigen::Index m, Eigen::Index d, PluginRule rule) {
  if (m < 2 || d < 1) throw DataError("plug-in rule needs M >= 2 and d >= 1");
  const double md = static_cast<double>(m);
  const double dd = static_cast<double>(d);
  const double expo = -1.0 / (dd + 4.0);
  switch (rule) {
    case PluginRule::Scott: return std::pow(md, expo);
    case PluginRule::Silverman: return std::pow(md * (dd + 2.0) / 4.0, expo);
  }
  return std::pow(md, expo);
}

BandwidthMatrix fixed_bandwidth(const CovarianceDecomposition& decomp, double h) {
  if (!(h > 0.0)) throw DataError("bandwidth factor must be positive");
  return BandwidthMatrix::from_matrix(h * h * decomp.cov, decomp.output_index);
}

BandwidthMatrix selective_bandwidth(const CovarianceDecomposition& decomp,
                                    const Eigen::VectorXd& h) {
  const Eigen::Index d = decomp.cov.rows();
  if (h.size() != d)
    throw DataError("selective factor has " + std::to_string(h.size()) +
                    " components, covariance has " + std::to_string(d));
  if (!(h.minCoeff() > 0.0)) throw DataError("selective factor components must be positive");
  Eigen::VectorXd scaled = h.array().square() * decomp.eigvals.array();
  Eigen::MatrixXd H =
      decomp.eigvecs * scaled.asDiagonal() * decomp.eigvecs.transpose();
  H = 0.5 * (H + H.transpose());
  return BandwidthMatrix::from_matrix(std::move(H), decomp.output_index);
}

LocalFactors local_factors_for_points(const Eigen::MatrixXd& points, const BandwidthMatrix& base,
                                      double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DataError("alpha must lie in [0, 1]");
  const Eigen::Index m = points.rows();
  Eigen::VectorXd log_pilot = kde_log_self_density(points, base);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!std::isfinite(log_pilot(i)))
      throw NumericError("pilot underflow at row " + std::to_string(i));
  }
  const double log_g = log_pilot.mean();
  LocalFactors lf;
  lf.alpha = alpha;
  lf.log_lambdas = (-alpha * (log_pilot.array() - log_g)).matrix();
  lf.lambdas = lf.log_lambdas.array().exp().matrix();
  lf.pilot_density = log_pilot.array().exp().matrix();
  return lf;
}

LocalFactors local_factors(const Dataset& data, const BandwidthMatrix& base, double alpha) {
  return local_factors_for_points(data.values, base, alpha);
}

}  // namespace kdecorrect
