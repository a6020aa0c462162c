#include "asmc/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "asmc/errors.hpp"
#include "asmc/logsum.hpp"

namespace asmc {

namespace {

void check_step_index(const IncrementStats& stats, int t) {
  if (t < 1 || t > stats.steps()) {
    throw std::invalid_argument("step index " + std::to_string(t) + " out of range");
  }
  if (stats.log_g0[t] == kNegInf) {
    throw std::invalid_argument("no increment statistics recorded for step " +
                                std::to_string(t));
  }
}

}  // namespace

double discrepancy_hat(const IncrementStats& stats, int t) {
  check_step_index(stats, t);
  const double raw = stats.log_g2[t] - 2.0 * stats.log_g1[t] + stats.log_g0[t];
  return raw > 0.0 ? raw : 0.0;
}

double cess(const IncrementStats& stats, int t, std::size_t n_particles) {
  check_step_index(stats, t);
  const double raw = stats.log_g2[t] - 2.0 * stats.log_g1[t] + stats.log_g0[t];
  const double n = static_cast<double>(n_particles);
  const double value = n * std::exp(-raw);
  return std::min(n, std::max(1.0, value));
}

BarrierEstimate barrier_estimate(const IncrementStats& stats, const Schedule& schedule) {
  schedule.validate();
  const int total_steps = schedule.steps();
  if (stats.steps() != total_steps) {
    throw std::invalid_argument("statistics cover " + std::to_string(stats.steps()) +
                                " steps, schedule has " + std::to_string(total_steps));
  }
  BarrierEstimate est;
  est.lambda.resize(total_steps + 1);
  est.beta = schedule.betas;
  est.lambda[0] = 0.0;
  for (int t = 1; t <= total_steps; ++t) {
    est.lambda[t] = est.lambda[t - 1] + std::sqrt(discrepancy_hat(stats, t));
  }
  return est;
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) {
    throw std::invalid_argument("interpolant needs at least two matched knots");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) {
      throw std::invalid_argument("interpolant abscissae must be strictly increasing");
    }
  }
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    d[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  m_.resize(n);
  m_.front() = d.front();
  m_.back() = d.back();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0.0) != (d[i] > 0.0)) {
      m_[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
}

double MonotoneCubic::eval(double q) const {
  if (q <= x_.front()) return y_.front() + m_.front() * (q - x_.front());
  if (q >= x_.back()) return y_.back() + m_.back() * (q - x_.back());
  const auto it = std::upper_bound(x_.begin(), x_.end(), q);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double s = (q - x_[i]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

double MonotoneCubic::derivative(double q) const {
  if (q <= x_.front()) return m_.front();
  if (q >= x_.back()) return m_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), q);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double s = (q - x_[i]) / h;
  const double s2 = s * s;
  const double g00 = (6.0 * s2 - 6.0 * s) / h;
  const double g10 = 3.0 * s2 - 4.0 * s + 1.0;
  const double g01 = (-6.0 * s2 + 6.0 * s) / h;
  const double g11 = 3.0 * s2 - 2.0 * s;
  return g00 * y_[i] + g10 * m_[i] + g01 * y_[i + 1] + g11 * m_[i + 1];
}

namespace {

void validate_barrier(const BarrierEstimate& est) {
  const std::size_t n = est.lambda.size();
  if (n < 2 || est.beta.size() != n) {
    throw std::invalid_argument("barrier estimate needs at least two matched knots");
  }
  if (est.lambda.front() != 0.0) {
    throw std::invalid_argument("barrier estimate must start at Lambda = 0");
  }
  if (est.beta.front() != 0.0 || est.beta.back() != 1.0) {
    throw std::invalid_argument("barrier estimate must span beta in [0, 1]");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (est.lambda[i] < est.lambda[i - 1]) {
      throw std::invalid_argument("barrier knots must be nondecreasing");
    }
    if (!(est.beta[i] > est.beta[i - 1])) {
      throw std::invalid_argument("barrier beta knots must be strictly increasing");
    }
  }
}

}  // namespace

Schedule generate_schedule(const BarrierEstimate& estimate, int t_new) {
  validate_barrier(estimate);
  if (t_new < 1) throw std::invalid_argument("schedule needs at least one step");
  const double total = estimate.total();
  if (total == 0.0) return Schedule::uniform(t_new);

  // Merge duplicate-Lambda knots, keeping the largest beta at each abscissa.
  std::vector<double> xs, ys;
  xs.reserve(estimate.lambda.size());
  ys.reserve(estimate.lambda.size());
  for (std::size_t i = 0; i < estimate.lambda.size(); ++i) {
    if (!xs.empty() && estimate.lambda[i] == xs.back()) {
      ys.back() = estimate.beta[i];
    } else {
      xs.push_back(estimate.lambda[i]);
      ys.push_back(estimate.beta[i]);
    }
  }
  if (xs.size() < 2) return Schedule::uniform(t_new);

  const MonotoneCubic inverse(std::move(xs), std::move(ys));
  Schedule out;
  out.betas.resize(t_new + 1);
  out.betas[0] = 0.0;
  out.betas[t_new] = 1.0;
  for (int t = 1; t < t_new; ++t) {
    const double q = total * static_cast<double>(t) / static_cast<double>(t_new);
    double b = inverse.eval(q);
    b = std::min(1.0, std::max(0.0, b));
    out.betas[t] = b;
  }
  for (int t = 1; t < t_new; ++t) {
    if (out.betas[t] <= out.betas[t - 1]) {
      out.betas[t] = std::nextafter(out.betas[t - 1], 1.0);
    }
  }
  for (int t = t_new - 1; t >= 1; --t) {
    if (out.betas[t] >= out.betas[t + 1]) {
      out.betas[t] = std::nextafter(out.betas[t + 1], 0.0);
    }
  }
  out.validate();
  return out;
}

std::vector<double> local_barrier(const BarrierEstimate& estimate) {
  validate_barrier(estimate);
  const MonotoneCubic forward(estimate.beta, estimate.lambda);
  std::vector<double> out(estimate.beta.size());
  for (std::size_t i = 0; i < estimate.beta.size(); ++i) {
    out[i] = forward.derivative(estimate.beta[i]);
  }
  return out;
}

namespace {

double zja_dhat(const AnnealedTarget& target, double beta, double beta2,
                std::span<const double> positions, std::size_t n,
                std::span<const double> log_weights, double log_m0) {
  const std::size_t d = target.dim();
  LogAccumulator m1, m2;
  for (std::size_t p = 0; p < n; ++p) {
    const double lg = log_incremental_weight(target, beta, beta2,
                                             positions.subspan(p * d, d));
    m1.add(log_weights[p] + lg);
    m2.add(log_weights[p] + 2.0 * lg);
  }
  const double raw = m2.log_total() - 2.0 * m1.log_total() + log_m0;
  return raw > 0.0 ? raw : 0.0;
}

}  // namespace

ZjaResult zja_next_beta(const AnnealedTarget& target, double beta,
                        std::span<const double> positions, std::size_t n_particles,
                        std::span<const double> log_weights, double delta_star,
                        double tol) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw std::domain_error("zja_next_beta requires beta in [0, 1)");
  }
  if (!(delta_star > 0.0)) throw std::invalid_argument("delta_star must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (n_particles == 0 || log_weights.size() != n_particles ||
      positions.size() != n_particles * target.dim()) {
    throw std::invalid_argument("particle arrays inconsistent with n_particles");
  }
  const double log_m0 = logsumexp(log_weights);
  if (log_m0 == kNegInf) throw degenerate_weights_error("all log-weights are -inf");

  const auto dhat = [&](double b2) {
    return zja_dhat(target, beta, b2, positions, n_particles, log_weights, log_m0);
  };

  if (dhat(1.0) <= delta_star) return {1.0, false};

  const auto bisect = [&](double lo, double hi) {
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (dhat(mid) <= delta_star) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return lo;
  };

  double root = bisect(beta, 1.0);
  // The objective is monotone for well-behaved families; scan a coarse grid
  // below the root and fall back to the smallest bracketing root if the
  // threshold is crossed earlier.
  constexpr int kGridPoints = 16;
  for (int i = 1; i < kGridPoints; ++i) {
    const double probe = beta + (root - beta) * static_cast<double>(i) / kGridPoints;
    if (dhat(probe) > delta_star * (1.0 + 1e-12)) {
      return {bisect(beta, probe), true};
    }
  }
  return {root, false};
}

}  // namespace asmc
