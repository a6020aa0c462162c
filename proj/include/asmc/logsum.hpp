#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace asmc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Reduction granularity over particles. Fixed at compile time so the
// accumulation order, and hence every bit of the result, is independent of
// the worker count and of the particle chunking.
inline constexpr std::size_t kReductionBlock = 256;

// Streaming log-sum-exp with a tracked running maximum.
class LogAccumulator {
 public:
  void add(double l) {
    if (l == kNegInf) return;
    if (l <= max_) {
      sum_ += std::exp(l - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - l) + 1.0;
      max_ = l;
    }
  }

  void combine(const LogAccumulator& o) {
    if (o.max_ == kNegInf) return;
    if (o.max_ <= max_) {
      sum_ += o.sum_ * std::exp(o.max_ - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - o.max_) + o.sum_;
      max_ = o.max_;
    }
  }

  double log_total() const {
    return max_ == kNegInf ? kNegInf : max_ + std::log(sum_);
  }

  bool empty() const { return max_ == kNegInf; }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

// Streaming sum of sign * exp(log_abs) terms; the running maximum keeps the
// mantissa sum in a representable range.
class SignedLogAccumulator {
 public:
  void add(double log_abs, double sign) {
    if (log_abs == kNegInf || sign == 0.0) return;
    if (log_abs <= max_) {
      sum_ += sign * std::exp(log_abs - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - log_abs) + sign;
      max_ = log_abs;
    }
  }

  void combine(const SignedLogAccumulator& o) {
    if (o.max_ == kNegInf) return;
    if (o.max_ <= max_) {
      sum_ += o.sum_ * std::exp(o.max_ - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - o.max_) + o.sum_;
      max_ = o.max_;
    }
  }

  // Total scaled by exp(-log_scale).
  double value_scaled(double log_scale) const {
    if (max_ == kNegInf) return 0.0;
    return sum_ * std::exp(max_ - log_scale);
  }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

inline std::size_t block_count(std::size_t n) {
  return n == 0 ? 0 : (n - 1) / kReductionBlock + 1;
}

// Ordered fold over per-block partials. Blocks are folded in index order so
// that a streaming pass (one block at a time) reproduces the result exactly.
template <class Acc>
Acc fold_blocks(std::span<const Acc> blocks) {
  Acc total;
  for (const Acc& b : blocks) total.combine(b);
  return total;
}

inline double logsumexp(std::span<const double> ls) {
  LogAccumulator acc;
  for (double l : ls) acc.add(l);
  return acc.log_total();
}

}  // namespace asmc
