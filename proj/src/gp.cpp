#include "hybridopt/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "hybridopt/error.hpp"

namespace hybridopt {
namespace {

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::VectorXd an = a.rowwise().squaredNorm();
  const Eigen::VectorXd bn = b.rowwise().squaredNorm();
  Eigen::MatrixXd d = (-2.0 * a * b.transpose()).colwise() + an;
  d.rowwise() += bn.transpose();
  return d.cwiseMax(0.0);
}

Eigen::MatrixXd se_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double length_scale) {
  const double scale = -0.5 / (length_scale * length_scale);
  return (squared_distances(a, b) * scale).array().exp().matrix();
}

struct Factorization {
  Eigen::MatrixXd chol;
  Eigen::VectorXd alpha;
  double diagonal = 0.0;
  double lml = -std::numeric_limits<double>::infinity();
};

bool factorize(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& y, double diagonal, Factorization& out) {
  const auto n = kernel.rows();
  Eigen::MatrixXd k = kernel;
  k.diagonal().array() += diagonal;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return false;
  Eigen::MatrixXd l = llt.matrixL();
  if (!l.allFinite() || (l.diagonal().array() <= 0.0).any()) return false;
  out.chol = std::move(l);
  out.alpha = llt.solve(y);
  out.diagonal = diagonal;
  out.lml = -0.5 * y.dot(out.alpha) - out.chol.diagonal().array().log().sum() -
            0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  return true;
}

}  // namespace

GpModel GpModel::fit(const std::vector<Point>& points, std::span<const double> values, const GpHyperConfig& config) {
  if (points.empty()) throw InvalidArgument("gp_fit needs at least one observation");
  if (points.size() != values.size()) throw InvalidArgument("gp_fit: points and values differ in length");
  if (config.length_scale_grid.empty()) throw InvalidArgument("gp_fit: empty length-scale grid");
  if (!(config.noise_variance > 0.0)) throw InvalidArgument("gp_fit: noise variance must be positive");

  const auto n = static_cast<Eigen::Index>(points.size());
  const auto d = static_cast<Eigen::Index>(points.front().size());
  GpModel model;
  model.inputs_.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(points[i].size()) != d) throw InvalidArgument("gp_fit: ragged input points");
    for (Eigen::Index j = 0; j < d; ++j) model.inputs_(i, j) = points[i][j];
  }

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double scale = var > 1e-24 ? std::sqrt(var) : 1.0;
  model.target_mean_ = mean;
  model.target_scale_ = scale;

  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = (values[i] - mean) / scale;

  const Eigen::MatrixXd dist = squared_distances(model.inputs_, model.inputs_);
  Factorization best;
  double best_length = 0.0;
  bool found = false;
  for (double length : config.length_scale_grid) {
    const Eigen::MatrixXd kernel = (dist * (-0.5 / (length * length))).array().exp().matrix();
    Factorization f;
    bool ok = false;
    for (double diag = config.noise_variance; diag <= config.max_jitter * (1.0 + 1e-9); diag *= 10.0) {
      if (factorize(kernel, y, diag, f)) {
        ok = true;
        break;
      }
    }
    if (ok && (!found || f.lml > best.lml)) {
      best = std::move(f);
      best_length = length;
      found = true;
    }
  }
  if (!found) throw Error("gp_fit: kernel matrix not positive definite even with maximum jitter");

  model.chol_ = std::move(best.chol);
  model.alpha_ = std::move(best.alpha);
  model.diagonal_noise_ = best.diagonal;
  model.log_marginal_likelihood_ = best.lml;
  model.length_scale_ = best_length;
  return model;
}

GpPrediction GpModel::predict(std::span<const double> x) const {
  Eigen::MatrixXd row(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j) row(0, static_cast<Eigen::Index>(j)) = x[j];
  return predict(row).front();
}

std::vector<GpPrediction> GpModel::predict(const Eigen::MatrixXd& candidates) const {
  const auto m = candidates.rows();
  std::vector<GpPrediction> out(static_cast<std::size_t>(m));
  if (inputs_.rows() == 0) {
    for (auto& p : out) p = {target_mean_, target_scale_ * target_scale_};
    return out;
  }
  if (candidates.cols() != inputs_.cols()) throw InvalidArgument("gp_predict: dimension mismatch");
  const Eigen::MatrixXd cross = se_kernel(inputs_, candidates, length_scale_);  // n x m
  const Eigen::VectorXd mean = cross.transpose() * alpha_;
  const Eigen::MatrixXd v = chol_.triangularView<Eigen::Lower>().solve(cross);
  const Eigen::VectorXd reduction = v.colwise().squaredNorm();
  const double scale2 = target_scale_ * target_scale_;
  for (Eigen::Index i = 0; i < m; ++i) {
    double variance = 1.0 - reduction(i);
    if (variance < 0.0) variance = 0.0;  // round-off below the prior floor
    out[static_cast<std::size_t>(i)] = {target_mean_ + target_scale_ * mean(i), scale2 * variance};
  }
  return out;
}

Eigen::MatrixXd GpModel::kernel_matrix() const {
  Eigen::MatrixXd k = se_kernel(inputs_, inputs_, length_scale_);
  k.diagonal().array() += diagonal_noise_;
  return k;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(double mean, double variance, double best) {
  const double gain = mean - best;
  if (!(variance > 0.0)) return gain > 0.0 ? gain : 0.0;
  const double sigma = std::sqrt(variance);
  const double z = gain / sigma;
  const double ei = gain * normal_cdf(z) + sigma * normal_pdf(z);
  return ei > 0.0 ? ei : 0.0;
}

}  // namespace hybridopt
