#pragma once

/**
 * @file sim.hpp
 * @brief Monte Carlo trajectories of a stochastic chain: empirical occupation
 * frequencies and first-return statistics, driven by a counter-based
 * SplitMix64 generator so that results are reproducible across platforms.
 */

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "chains.hpp"
#include "errors.hpp"

namespace mopchains {

/**
 * @brief Counter-based SplitMix64 generator.
 *
 * The i-th output (i = 0, 1, ...) is mix64(seed + (i + 1) * 0x9E3779B97F4A7C15),
 * i.e. the classic SplitMix64 sequence, but addressable by counter so any
 * position of a stream can be reproduced independently.
 */
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

  /** @brief Finalizer of SplitMix64 (Stafford variant 13). */
  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /** @brief Output at an explicit counter position. */
  std::uint64_t at(std::uint64_t i) const { return mix64(seed_ + (i + 1) * kGamma); }

  /** @brief Next 64-bit output; advances the counter. */
  std::uint64_t next() { return at(counter_++); }

  /** @brief Next uniform double in [0, 1) with 53 random bits. */
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_{0};
};

/** @brief Empirical statistics of simulated trajectories. */
struct SimReport {
  std::uint64_t steps{0};                    ///< total transitions over all trajectories
  int start_state{1};                        ///< 1-based start state
  std::uint64_t seed{0};
  int trajectories{1};
  std::vector<double> empirical_distribution;  ///< occupation frequencies (sum to 1)
  std::vector<double> empirical_return_times;  ///< mean completed excursion length per state (NaN if none)
  std::vector<double> return_time_stderr;      ///< standard error of the mean excursion length
  std::vector<std::uint64_t> visit_counts;     ///< occupation counts
  std::vector<std::uint64_t> return_counts;    ///< number of completed excursions per state
};

namespace sim {

/** @brief Per-state accumulators; summed across trajectories. */
struct Accumulator {
  std::vector<std::uint64_t> visits, returns;
  std::vector<double> sum, sumsq;
  explicit Accumulator(int m) : visits(m, 0), returns(m, 0), sum(m, 0.0), sumsq(m, 0.0) {}
};

/** @brief Cumulative row distributions of P used for inverse-CDF sampling. */
inline std::vector<std::vector<double>> row_cdfs(const Matrix& P) {
  const int m = static_cast<int>(P.rows());
  std::vector<std::vector<double>> cdf(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i) {
    double s = 0;
    for (int j = 0; j < m; ++j) cdf[i][j] = (s += P(i, j));
    for (int j = 0; j < m; ++j) cdf[i][j] /= s;  // absorb rounding of the row sum
    cdf[i][m - 1] = 1.0;
  }
  return cdf;
}

/** @brief One trajectory of `steps` transitions from 0-based state `start`. */
inline void run_trajectory(const std::vector<std::vector<double>>& cdf, int start, std::uint64_t steps,
                           std::uint64_t stream_seed, Accumulator& acc) {
  const int m = static_cast<int>(cdf.size());
  SplitMix64 rng(stream_seed);
  std::vector<std::int64_t> last(m, -1);
  int state = start;
  last[state] = 0;
  for (std::uint64_t t = 1; t <= steps; ++t) {
    const double u = rng.uniform();
    const auto& row = cdf[state];
    int next = 0;
    while (next < m - 1 && u >= row[next]) ++next;
    state = next;
    ++acc.visits[state];
    if (last[state] >= 0) {
      const double len = static_cast<double>(static_cast<std::int64_t>(t) - last[state]);
      ++acc.returns[state];
      acc.sum[state] += len;
      acc.sumsq[state] += len * len;
    }
    last[state] = static_cast<std::int64_t>(t);
  }
}

/**
 * @brief Simulate the chain from a 1-based start state.
 *
 * The steps are split evenly over `trajectories` independent runs; run k uses
 * the stream seed + k.  Occupation frequencies count the states entered after
 * each transition; return statistics use completed excursions only.
 */
inline SimReport simulate(const StochasticChain& ch, int start, std::uint64_t steps, std::uint64_t seed,
                          int trajectories = 1) {
  const int m = ch.m;
  if (start < 1 || start > m)
    throw Error(ErrorCode::InvalidParams, "start state must lie in 1.." + std::to_string(m));
  if (steps < 1) throw Error(ErrorCode::InvalidParams, "steps must be at least 1");
  if (trajectories < 1) throw Error(ErrorCode::InvalidParams, "trajectories must be at least 1");

  const auto cdf = row_cdfs(ch.P);
  Accumulator acc(m);
  const std::uint64_t per = steps / static_cast<std::uint64_t>(trajectories);
  const std::uint64_t extra = steps % static_cast<std::uint64_t>(trajectories);
  for (int k = 0; k < trajectories; ++k) {
    const std::uint64_t n = per + (static_cast<std::uint64_t>(k) < extra ? 1 : 0);
    if (n > 0) run_trajectory(cdf, start - 1, n, seed + static_cast<std::uint64_t>(k), acc);
  }

  SimReport rep;
  rep.steps = steps;
  rep.start_state = start;
  rep.seed = seed;
  rep.trajectories = trajectories;
  rep.visit_counts = acc.visits;
  rep.return_counts = acc.returns;
  rep.empirical_distribution.resize(m);
  rep.empirical_return_times.resize(m);
  rep.return_time_stderr.resize(m);
  for (int j = 0; j < m; ++j) {
    rep.empirical_distribution[j] = static_cast<double>(acc.visits[j]) / static_cast<double>(steps);
    const double n = static_cast<double>(acc.returns[j]);
    if (acc.returns[j] == 0) {
      rep.empirical_return_times[j] = std::nan("");
      rep.return_time_stderr[j] = std::nan("");
      continue;
    }
    const double mean = acc.sum[j] / n;
    rep.empirical_return_times[j] = mean;
    const double var = n > 1 ? std::max(0.0, (acc.sumsq[j] - n * mean * mean) / (n - 1)) : 0.0;
    rep.return_time_stderr[j] = std::sqrt(var / n);
  }
  return rep;
}

}  // namespace sim
}  // namespace mopchains
