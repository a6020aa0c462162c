#include "asmc/target.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "asmc/errors.hpp"
#include "asmc/logsum.hpp"

namespace asmc {

namespace {
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2 pi)
}

double log_normal_pdf(double x, double mu, double sigma) {
  const double s = (x - mu) / sigma;
  return -0.5 * s * s - std::log(sigma) - kLogSqrt2Pi;
}

void AnnealedTarget::check_point(std::span<const double> x) const {
  if (x.size() != dim()) {
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) +
                                ", target has dimension " + std::to_string(dim()));
  }
}

void AnnealedTarget::check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::domain_error("beta must lie in [0, 1], got " + std::to_string(beta));
  }
}

double AnnealedTarget::log_gamma(double beta, std::span<const double> x) const {
  check_beta(beta);
  check_point(x);
  if (beta == 0.0) return log_reference(x);
  return log_reference(x) + beta * potential(x);
}

double AnnealedTarget::analytic_log_z(double) const {
  throw capability_error("target does not provide analytic_log_z");
}

double AnnealedTarget::analytic_delta(double) const {
  throw capability_error("target does not provide analytic_delta");
}

double AnnealedTarget::analytic_discrepancy(double, double) const {
  throw capability_error("target does not provide analytic_discrepancy");
}

void AnnealedTarget::exact_sample(double, rng::Stream&, std::span<double>) const {
  throw capability_error("target does not provide an exact sampler");
}

GaussianShiftTarget::GaussianShiftTarget(double mu0, double mu1, double sigma,
                                         std::size_t dim)
    : mu0_(mu0), mu1_(mu1), sigma_(sigma), dim_(dim) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (dim == 0) throw std::invalid_argument("dim must be at least 1");
  z_ = std::abs(mu1 - mu0) / sigma;
}

double GaussianShiftTarget::log_reference(std::span<const double> x) const {
  double acc = 0.0;
  for (double xi : x) acc += log_normal_pdf(xi, mu0_, sigma_);
  return acc;
}

double GaussianShiftTarget::potential(std::span<const double> x) const {
  // log N(x; mu1, s) - log N(x; mu0, s), coordinatewise.
  const double a = (mu1_ - mu0_) / (sigma_ * sigma_);
  const double mid = 0.5 * (mu0_ + mu1_);
  double acc = 0.0;
  for (double xi : x) acc += a * (xi - mid);
  return acc;
}

void GaussianShiftTarget::sample_reference(rng::Stream& stream, std::span<double> out) const {
  check_point(out);
  for (double& xi : out) xi = mu0_ + sigma_ * stream.normal();
}

double GaussianShiftTarget::analytic_log_z(double beta) const {
  check_beta(beta);
  // dim scales last so the d-fold product is exactly d times the scalar case.
  return static_cast<double>(dim_) * (-0.5 * beta * (1.0 - beta) * z_ * z_);
}

double GaussianShiftTarget::analytic_delta(double beta) const {
  check_beta(beta);
  return static_cast<double>(dim_) * z_ * z_;
}

double GaussianShiftTarget::analytic_discrepancy(double beta, double beta2) const {
  check_beta(beta);
  check_beta(beta2);
  if (beta2 < beta) throw std::domain_error("analytic_discrepancy requires beta2 >= beta");
  if (2.0 * beta2 - beta > 1.0 + 1e-15) {
    throw std::domain_error("analytic_discrepancy undefined for 2*beta2 - beta > 1");
  }
  const double d = beta2 - beta;
  return static_cast<double>(dim_) * z_ * z_ * d * d;
}

void GaussianShiftTarget::exact_sample(double beta, rng::Stream& stream,
                                       std::span<double> out) const {
  check_beta(beta);
  check_point(out);
  const double mu = (1.0 - beta) * mu0_ + beta * mu1_;
  for (double& xi : out) xi = mu + sigma_ * stream.normal();
}

MixtureTarget::MixtureTarget(double ref_sigma, double weight, double mu1, double sigma1,
                             double mu2, double sigma2, std::size_t dim)
    : ref_sigma_(ref_sigma),
      weight_(weight),
      mu1_(mu1),
      sigma1_(sigma1),
      mu2_(mu2),
      sigma2_(sigma2),
      dim_(dim) {
  if (!(ref_sigma > 0.0 && sigma1 > 0.0 && sigma2 > 0.0)) {
    throw std::invalid_argument("mixture sigmas must be positive");
  }
  if (!(weight > 0.0 && weight < 1.0)) {
    throw std::invalid_argument("mixture weight must lie strictly in (0, 1)");
  }
  if (dim == 0) throw std::invalid_argument("dim must be at least 1");
}

double MixtureTarget::log_reference(std::span<const double> x) const {
  double acc = 0.0;
  for (double xi : x) acc += log_normal_pdf(xi, 0.0, ref_sigma_);
  return acc;
}

double MixtureTarget::potential(std::span<const double> x) const {
  const double lw1 = std::log(weight_);
  const double lw2 = std::log1p(-weight_);
  double acc = 0.0;
  for (double xi : x) {
    const double a = lw1 + log_normal_pdf(xi, mu1_, sigma1_);
    const double b = lw2 + log_normal_pdf(xi, mu2_, sigma2_);
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    const double log_mix = hi + std::log1p(std::exp(lo - hi));
    acc += log_mix - log_normal_pdf(xi, 0.0, ref_sigma_);
  }
  return acc;
}

void MixtureTarget::sample_reference(rng::Stream& stream, std::span<double> out) const {
  check_point(out);
  for (double& xi : out) xi = ref_sigma_ * stream.normal();
}

}  // namespace asmc
