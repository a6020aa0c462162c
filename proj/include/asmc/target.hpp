#pragma once

#include <memory>
#include <span>
#include <vector>

#include "asmc/rng.hpp"

namespace asmc {

struct Capabilities {
  bool analytic_log_z = false;
  bool exact_sampler = false;
  bool analytic_delta = false;
};

// A geometric annealing family between a normalized reference density eta
// and an unnormalized target density gamma, both over R^dim:
//
//   log gamma_beta(x) = log eta(x) + beta * V(x),   V = log gamma - log eta.
//
// beta = 0 recovers the reference exactly (normalized); beta = 1 the target.
class AnnealedTarget {
 public:
  virtual ~AnnealedTarget() = default;

  virtual std::size_t dim() const = 0;
  virtual double log_reference(std::span<const double> x) const = 0;
  virtual double potential(std::span<const double> x) const = 0;
  virtual void sample_reference(rng::Stream& stream, std::span<double> out) const = 0;
  virtual Capabilities capabilities() const { return {}; }

  // Validates beta in [0,1] and x of length dim.
  double log_gamma(double beta, std::span<const double> x) const;

  // log Z(beta) = log integral of gamma_beta. Requires analytic_log_z.
  virtual double analytic_log_z(double beta) const;

  // delta(beta) = var under pi_beta of V. Requires analytic_delta.
  virtual double analytic_delta(double beta) const;

  // Incremental discrepancy D(beta, beta2) = log(1 + var[gamma_beta2/gamma_beta]).
  // Requires analytic_log_z; defined while 2*beta2 - beta <= 1.
  virtual double analytic_discrepancy(double beta, double beta2) const;

  // Exact draw from pi_beta. Requires exact_sampler.
  virtual void exact_sample(double beta, rng::Stream& stream, std::span<double> out) const;

 protected:
  void check_point(std::span<const double> x) const;
  static void check_beta(double beta);
};

// Product of dim independent unit problems N(mu0, sigma^2) -> N(mu1, sigma^2).
// pi_beta is N((1-beta) mu0 + beta mu1, sigma^2) per coordinate;
// log Z(beta) = -dim * beta (1-beta) z^2 / 2 with z = |mu1 - mu0| / sigma.
class GaussianShiftTarget final : public AnnealedTarget {
 public:
  GaussianShiftTarget(double mu0, double mu1, double sigma, std::size_t dim);

  std::size_t dim() const override { return dim_; }
  double log_reference(std::span<const double> x) const override;
  double potential(std::span<const double> x) const override;
  void sample_reference(rng::Stream& stream, std::span<double> out) const override;
  Capabilities capabilities() const override { return {true, true, true}; }

  double analytic_log_z(double beta) const override;
  double analytic_delta(double beta) const override;
  double analytic_discrepancy(double beta, double beta2) const override;
  void exact_sample(double beta, rng::Stream& stream, std::span<double> out) const override;

  double z() const { return z_; }

 private:
  double mu0_, mu1_, sigma_, z_;
  std::size_t dim_;
};

// Product of dim independent copies of a two-component Gaussian mixture
// target (normalized, Z(1) = 1) with a centered Gaussian reference.
// Intermediate normalizing constants are not analytic.
class MixtureTarget final : public AnnealedTarget {
 public:
  MixtureTarget(double ref_sigma, double weight, double mu1, double sigma1,
                double mu2, double sigma2, std::size_t dim);

  std::size_t dim() const override { return dim_; }
  double log_reference(std::span<const double> x) const override;
  double potential(std::span<const double> x) const override;
  void sample_reference(rng::Stream& stream, std::span<double> out) const override;
  Capabilities capabilities() const override { return {false, false, false}; }

 private:
  double ref_sigma_, weight_, mu1_, sigma1_, mu2_, sigma2_;
  std::size_t dim_;
};

double log_normal_pdf(double x, double mu, double sigma);

}  // namespace asmc
