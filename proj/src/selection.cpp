#include "kdecorrect/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kdecorrect/errors.hpp"
#include "kdecorrect/parallel.hpp"

namespace kdecorrect {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kEvidenceFloor = std::log(1e-300);

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericError(std::string(what) + " produced a non-finite value");
  return v;
}

}  // namespace

std::string criterion_name(Criterion c) { return c == Criterion::LSCV ? "lscv" : "mcse"; }

Criterion criterion_from_name(const std::string& name) {
  if (name == "lscv" || name == "LSCV") return Criterion::LSCV;
  if (name == "mcse" || name == "MCSE") return Criterion::MCSE;
  throw DataError("unknown criterion '" + name + "'");
}

double lscv(const KernelMixture& mix) {
  const Eigen::Index m = mix.size();
  const double term1 = squared_integral(mix);
  const Eigen::VectorXd loo = kde_loo_all(mix);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) acc += loo(i);
  return term1 - 2.0 * acc / static_cast<double>(m);
}

double lscv(const Dataset& data, const CovarianceDecomposition& decomp,
            const BandwidthSpec& spec) {
  const FittedModel model = fit_model(data, decomp, spec);
  return lscv(mixture_view(model));
}

double lscv(const Dataset& data, const BandwidthSpec& spec) {
  return lscv(data, covariance_decomposition(data), spec);
}

McseValue mcse_detailed(const KernelMixture& mix) {
  const Eigen::Index m = mix.size();
  const Eigen::Index d = mix.bw->dims();
  if (m < 3) throw DataError("MCSE needs at least 3 samples");
  if (d < 2) throw DataError("MCSE needs at least one input dimension");
  const Eigen::Index out_col = mix.bw->output_index;

  Eigen::MatrixXd xin(m, d - 1);
  {
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j == out_col) continue;
      xin.col(k++) = mix.points->col(j);
    }
  }
  const Eigen::VectorXd y = mix.points->col(out_col);
  const Eigen::MatrixXd zx =
      mix.bw->input_chol.triangularView<Eigen::Lower>().solve(xin.transpose());
  // gain . x_i, so the pairwise conditional mean is y_j + a_i - a_j.
  const Eigen::VectorXd a = xin * mix.bw->gain;
  const double base = -0.5 * (static_cast<double>(d - 1) * kLog2Pi + mix.bw->input_log_det);
  const Eigen::VectorXd* ll = mix.log_lambdas;
  Eigen::VectorXd lam2, det_term;
  if (ll != nullptr) {
    lam2 = (2.0 * ll->array()).exp().matrix();
    det_term = (static_cast<double>(d - 1) * ll->array()).matrix();
  }
  const double y_total = y.sum();

  Eigen::VectorXd sqerr(m);
  Eigen::VectorXi fell_back = Eigen::VectorXi::Zero(m);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t iu) {
    const auto i = static_cast<Eigen::Index>(iu);
    thread_local std::vector<double> lw;
    lw.assign(static_cast<std::size_t>(m), 0.0);
    double mx = kNegInf;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == i) continue;
      const double q = (zx.col(i) - zx.col(j)).squaredNorm();
      const double v = ll == nullptr ? base - 0.5 * q
                                     : base - det_term(j) - 0.5 * q / lam2(j);
      lw[static_cast<std::size_t>(j)] = v;
      mx = std::max(mx, v);
    }
    double expectation;
    if (!(mx >= kEvidenceFloor)) {
      // Posterior degrades to the prior of the leave-one-out sample.
      expectation = (y_total - y(i)) / static_cast<double>(m - 1);
      fell_back(i) = 1;
    } else {
      double sw = 0.0, swm = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (j == i) continue;
        const double w = std::exp(lw[static_cast<std::size_t>(j)] - mx);
        sw += w;
        swm += w * (y(j) + a(i) - a(j));
      }
      expectation = swm / sw;
    }
    const double e = expectation - y(i);
    sqerr(i) = e * e;
  });

  McseValue out;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    acc += sqerr(i);
    out.no_evidence_rows += fell_back(i);
  }
  out.value = acc / static_cast<double>(m);
  return out;
}

McseValue mcse_detailed(const Dataset& data, const CovarianceDecomposition& decomp,
                        const BandwidthSpec& spec) {
  const FittedModel model = fit_model(data, decomp, spec);
  return mcse_detailed(mixture_view(model));
}

double mcse(const Dataset& data, const BandwidthSpec& spec) {
  return mcse_detailed(data, covariance_decomposition(data), spec).value;
}

ScalarMinimum golden_section_minimize(const std::function<double(double)>& objective, double lo,
                                      double hi, double tol) {
  if (!(lo < hi)) throw DataError("golden section needs lo < hi");
  if (!(tol > 0.0)) throw DataError("golden section tolerance must be positive");
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  ScalarMinimum result;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = checked(objective(x1), "objective");
  double f2 = checked(objective(x2), "objective");
  result.evaluations = 2;
  int iter = 0;
  while (hi - lo > tol * 0.5 * (std::abs(lo) + std::abs(hi)) && iter++ < 500) {
    if (f1 <= f2) {  // ties move toward the lower end
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = checked(objective(x1), "objective");
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = checked(objective(x2), "objective");
    }
    ++result.evaluations;
  }
  result.x = 0.5 * (lo + hi);
  result.value = checked(objective(result.x), "objective");
  ++result.evaluations;
  return result;
}

SimplexMinimum nelder_mead_minimize(
    const std::function<double(const Eigen::VectorXd&)>& objective, const Eigen::VectorXd& x0,
    double step, double tol, long max_evals) {
  const Eigen::Index k = x0.size();
  if (k < 1) throw DataError("simplex search needs at least one parameter");
  if (max_evals < k + 2) max_evals = k + 2;

  SimplexMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  long evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    double v = objective(x);
    ++evals;
    if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
    if (v < best.value) {
      best.value = v;
      best.x = x;
    }
    return v;
  };

  std::vector<Eigen::VectorXd> vert(static_cast<std::size_t>(k) + 1, x0);
  std::vector<double> fv(static_cast<std::size_t>(k) + 1);
  for (Eigen::Index j = 0; j < k; ++j) vert[static_cast<std::size_t>(j) + 1](j) += step;
  for (std::size_t v = 0; v < vert.size(); ++v) fv[v] = eval(vert[v]);

  std::vector<std::size_t> order(vert.size());
  while (true) {
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t ib = order.front(), iw = order.back();
    const std::size_t is = order[order.size() - 2];  // second worst
    if (std::isfinite(fv[ib]) && fv[iw] - fv[ib] < tol) {
      best.converged = true;
      break;
    }
    if (evals >= max_evals) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(k);
    for (std::size_t v : order)
      if (v != iw) centroid += vert[v];
    centroid /= static_cast<double>(k);

    const Eigen::VectorXd xr = centroid + (centroid - vert[iw]);
    const double fr = eval(xr);
    if (fr < fv[ib]) {
      if (evals >= max_evals) {
        vert[iw] = xr;
        fv[iw] = fr;
        break;
      }
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - vert[iw]);
      const double fe = eval(xe);
      if (fe < fr) {
        vert[iw] = xe;
        fv[iw] = fe;
      } else {
        vert[iw] = xr;
        fv[iw] = fr;
      }
    } else if (fr < fv[is]) {
      vert[iw] = xr;
      fv[iw] = fr;
    } else {
      if (evals >= max_evals) break;
      bool shrink = false;
      if (fr < fv[iw]) {  // outside contraction
        const Eigen::VectorXd xc = centroid + 0.5 * (xr - centroid);
        const double fc = eval(xc);
        if (fc <= fr) {
          vert[iw] = xc;
          fv[iw] = fc;
        } else {
          shrink = true;
        }
      } else {  // inside contraction
        const Eigen::VectorXd xc = centroid - 0.5 * (centroid - vert[iw]);
        const double fc = eval(xc);
        if (fc < fv[iw]) {
          vert[iw] = xc;
          fv[iw] = fc;
        } else {
          shrink = true;
        }
      }
      if (shrink) {
        for (std::size_t v : order) {
          if (v == ib) continue;
          vert[v] = vert[ib] + 0.5 * (vert[v] - vert[ib]);
          if (evals >= max_evals) break;
          fv[v] = eval(vert[v]);
        }
        if (evals >= max_evals) break;
      }
    }
  }
  best.evaluations = evals;
  if (!best.x.size()) best.x = x0;
  return best;
}

CriterionReport select_bandwidth(const Dataset& data, Method method, Criterion criterion,
                                 const OptimizerConfig& config, double alpha) {
  data.validate();
  const CovarianceDecomposition decomp = covariance_decomposition(data);
  const Eigen::Index d = data.dims();
  const double scott = plugin_factor(data.rows(), d, PluginRule::Scott);

  const bool adaptive = is_adaptive(method);
  auto scalar_spec = [&](double h) {
    return adaptive ? BandwidthSpec::adaptive(h, alpha) : BandwidthSpec::fixed(h);
  };
  auto vector_spec = [&](const Eigen::VectorXd& h) {
    return adaptive ? BandwidthSpec::selective_adaptive(h, alpha) : BandwidthSpec::selective(h);
  };
  auto value_of = [&](const BandwidthSpec& s) {
    return criterion == Criterion::LSCV ? lscv(data, decomp, s)
                                        : mcse_detailed(data, decomp, s).value;
  };

  long evaluations = 0;
  const ScalarMinimum scalar = golden_section_minimize(
      [&](double h) {
        ++evaluations;
        return value_of(scalar_spec(h));
      },
      config.scalar_bracket_lo * scott, config.scalar_bracket_hi * scott, config.scalar_tol);

  CriterionReport report;
  report.method = method;
  report.criterion = criterion;
  report.alpha = alpha;

  BandwidthSpec winner = scalar_spec(scalar.x);
  if (is_selective(method)) {
    const double tol =
        criterion == Criterion::LSCV ? config.simplex_tol_lscv : config.simplex_tol_mcse;
    const long max_evals = config.max_evals > 0 ? config.max_evals : 200 * d;
    const SimplexMinimum sm = nelder_mead_minimize(
        [&](const Eigen::VectorXd& logh) {
          ++evaluations;
          return value_of(vector_spec(logh.array().exp().matrix()));
        },
        Eigen::VectorXd::Constant(d, std::log(scalar.x)), std::log1p(config.simplex_init_spread),
        tol, max_evals);
    winner = vector_spec(sm.x.array().exp().matrix());
    report.converged = sm.converged;
    report.factor.assign(sm.x.size(), 0.0);
    for (Eigen::Index j = 0; j < sm.x.size(); ++j)
      report.factor[static_cast<std::size_t>(j)] = std::exp(sm.x(j));
  } else {
    report.factor = {scalar.x};
  }
  report.evaluations = evaluations;

  report.lscv_value = lscv(data, decomp, winner);
  const McseValue mv = mcse_detailed(data, decomp, winner);
  report.mcse_value = mv.value;
  report.no_evidence_rows = mv.no_evidence_rows;
  return report;
}

}  // namespace kdecorrect
