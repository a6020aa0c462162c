#pragma once

// Internal helpers shared by the in-memory engine, the streaming driver, and
// the online-adaptation driver. All of them must produce bit-identical
// accumulator states, so the per-particle arithmetic and the reduction order
// live here in exactly one place.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "asmc/engine.hpp"
#include "asmc/errors.hpp"
#include "asmc/logsum.hpp"

namespace asmc::detail {

// Weighting and propagation for one particle at one annealing step, into
// caller-supplied accumulators (the streaming driver keeps them in per-step
// arrays). Accumulates the pre-update-weight moments, then moves the
// particle and updates its log-weight in place.
inline void weight_and_move(const AnnealedTarget& target, const Kernel& kernel,
                            double beta_prev, double beta_cur, std::span<double> x,
                            double& log_w, LogAccumulator& g0, LogAccumulator& g1,
                            LogAccumulator& g2, SignedLogAccumulator& elbo_num,
                            rng::Stream& stream) {
  const double lg = log_incremental_weight(target, beta_prev, beta_cur, x);
  g0.add(log_w);
  g1.add(log_w + lg);
  g2.add(log_w + 2.0 * lg);
  if (lg != 0.0) {
    elbo_num.add(log_w + std::log(std::abs(lg)), lg > 0.0 ? 1.0 : -1.0);
  }
  propagate(target, kernel, beta_cur, x, stream);
  log_w += lg;
}

struct StepAccumulators {
  LogAccumulator g0, g1, g2;
  SignedLogAccumulator elbo_num;

  void combine(const StepAccumulators& o) {
    g0.combine(o.g0);
    g1.combine(o.g1);
    g2.combine(o.g2);
    elbo_num.combine(o.elbo_num);
  }
};

inline void weight_and_move(const AnnealedTarget& target, const Kernel& kernel,
                            double beta_prev, double beta_cur, std::span<double> x,
                            double& log_w, StepAccumulators& acc, rng::Stream& stream) {
  weight_and_move(target, kernel, beta_prev, beta_cur, x, log_w, acc.g0, acc.g1, acc.g2,
                  acc.elbo_num, stream);
}

// Static block partition: block b covers particles [b*kReductionBlock,
// min(n, (b+1)*kReductionBlock)). Workers own blocks round-robin, so the
// partition (and all per-block accumulation) never depends on worker count.
template <class Fn>
void for_each_block(std::size_t n, int workers, Fn&& fn) {
  const std::size_t blocks = block_count(n);
  if (workers <= 1 || blocks <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t lo = b * kReductionBlock;
      const std::size_t hi = std::min(n, lo + kReductionBlock);
      fn(b, lo, hi);
    }
    return;
  }
  const int w = static_cast<int>(std::min<std::size_t>(workers, blocks));
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (int wi = 0; wi < w; ++wi) {
    pool.emplace_back([&, wi] {
      for (std::size_t b = wi; b < blocks; b += w) {
        const std::size_t lo = b * kReductionBlock;
        const std::size_t hi = std::min(n, lo + kReductionBlock);
        fn(b, lo, hi);
      }
    });
  }
  for (auto& th : pool) th.join();
}

inline void init_particles(const AnnealedTarget& target, std::vector<double>& xs,
                           std::size_t dim, std::size_t n, std::uint64_t seed,
                           std::uint64_t round, int workers) {
  for_each_block(n, workers, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      rng::Stream st(rng::Key{seed, round, p, 0, rng::kSubstepInit});
      target.sample_reference(st, {xs.data() + p * dim, dim});
    }
  });
}

struct StepPassResult {
  StepAccumulators tot;
  LogAccumulator sq_tot;  // logsumexp of 2 * log w after the update
  double max1 = kNegInf;  // two largest post-update log-weights
  double max2 = kNegInf;
};

// One full propagate/reweigh pass at (beta_prev -> beta_cur): per-block
// accumulation in particle order, then an ordered fold over block index, so
// every bit of the result is worker-count invariant. `acc`, `sq`, `bmax1`,
// `bmax2` are caller scratch sized to block_count(n).
inline StepPassResult step_pass(const AnnealedTarget& target, const Kernel& kernel,
                                double beta_prev, double beta_cur, std::vector<double>& xs,
                                std::vector<double>& log_w, std::size_t dim,
                                std::uint64_t seed, std::uint64_t round, std::uint64_t step,
                                int workers, std::vector<StepAccumulators>& acc,
                                std::vector<LogAccumulator>& sq, std::vector<double>& bmax1,
                                std::vector<double>& bmax2) {
  const std::size_t n = log_w.size();
  for_each_block(n, workers, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    StepAccumulators a;
    LogAccumulator s2;
    double m1 = kNegInf, m2 = kNegInf;
    for (std::size_t p = lo; p < hi; ++p) {
      rng::Stream st(rng::Key{seed, round, p, step, rng::kSubstepExplore});
      weight_and_move(target, kernel, beta_prev, beta_cur, {xs.data() + p * dim, dim},
                      log_w[p], a, st);
      s2.add(2.0 * log_w[p]);
      if (log_w[p] > m1) {
        m2 = m1;
        m1 = log_w[p];
      } else if (log_w[p] > m2) {
        m2 = log_w[p];
      }
    }
    acc[b] = a;
    sq[b] = s2;
    bmax1[b] = m1;
    bmax2[b] = m2;
  });

  StepPassResult r;
  const std::size_t blocks = block_count(n);
  for (std::size_t b = 0; b < blocks; ++b) {
    r.tot.combine(acc[b]);
    r.sq_tot.combine(sq[b]);
    if (bmax1[b] > r.max1) {
      r.max2 = std::max(r.max1, bmax2[b]);
      r.max1 = bmax1[b];
    } else {
      r.max2 = std::max(r.max2, bmax1[b]);
    }
  }
  return r;
}

// Abort rather than continue with a numerically one-particle system.
inline void check_degenerate(std::size_t n, double ess_t, double max1, double max2, int t) {
  if (n > 1 && ess_t < 1.0 + 1e-9) {
    const double gap =
        (max2 == kNegInf) ? std::numeric_limits<double>::infinity() : max1 - max2;
    if (gap > 700.0) {
      throw degenerate_weights_error("weights degenerate at step " + std::to_string(t) +
                                     " (max log-weight " + std::to_string(max1) + ")");
    }
  }
}

}  // namespace asmc::detail
