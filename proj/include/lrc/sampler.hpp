#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lrc/bigint.hpp"
#include "lrc/enumerate.hpp"
#include "lrc/restriction.hpp"
#include "lrc/types.hpp"

namespace lrc {

// Exact completion counts indexed by (remaining sum, DP state); drives
// uniform sampling without any floating-point bias.
class SamplerTable {
 public:
  static SamplerTable build(const RestrictionSpec& spec, int n,
                            const Budget& budget = {});

  const RestrictionSpec& spec() const { return spec_; }
  int n() const { return n_; }
  // completions from the initial state; equals C(n)
  const BigInt& root() const;

  Composition sample_one(std::mt19937_64& g) const;

 private:
  enum class Kind { scalar, dense1, wide };

  const BigInt& completions(int t, int rho, const Part* window) const;

  RestrictionSpec spec_;
  int n_ = 0, m_ = 1, p_ = 1;
  Kind kind_ = Kind::dense1;
  // scalar: by remaining sum only
  std::vector<BigInt> scalar_;
  // dense1: level t holds (rho, w) for w <= n - t
  std::vector<std::vector<BigInt>> dense_;
  // wide: packed-key maps per level
  std::vector<std::unordered_map<std::uint64_t, BigInt>> wide_;
};

// Per-composition large-part statistics.
struct CompositionSummary {
  Part max_part = 0;            // M
  int distinct_recurrent = 0;   // D
  int max_multiplicity = 0;     // number of parts of maximum size
  bool gap_free = false;
  std::vector<int> multiplicity_counts;  // index k: parts sizes appearing exactly k times, k <= k_max
};

// gap-free: every recurrent part below the maximum appears. The alternative
// "interval between min and max" reading sits behind a flag, default off.
CompositionSummary summarize_composition(const RestrictionSpec& spec,
                                         const Composition& c, int k_max,
                                         bool interval_gap_free = false);

// trials exactly uniform draws; trial i uses the stream derived from
// (seed, i), so partial runs and reorderings reproduce bit for bit.
std::vector<Composition> sample_many(const SamplerTable& table,
                                     std::uint64_t trials, std::uint64_t seed);

struct SampleStats {
  int n = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  int k_max = 0;
  int j_lo = 0, j_hi = -1;

  std::vector<std::uint64_t> max_hist;       // M_n histogram, index 0..n
  std::vector<std::uint64_t> distinct_hist;  // D_n histogram
  std::vector<std::uint64_t> max_mult_hist;  // number of maximum parts
  std::uint64_t gap_free_count = 0;
  std::vector<std::uint64_t> gap_free_by_max;  // gap-free with M = k

  std::vector<double> dnk_sum, dnk_sumsq;  // D_n(k), index k = 1..k_max
  double max_sum = 0, max_sumsq = 0;
  double distinct_sum = 0, distinct_sumsq = 0;

  // zeta_j for j in [j_lo, j_hi]: raw sums for moment checks
  std::vector<double> zeta_sum, zeta_sumsq, zeta_fall2;
  std::vector<std::vector<double>> zeta_cross;  // E[zeta_j zeta_j'] sums

  double q_hat() const { return double(gap_free_count) / double(trials); }
  double mean_max() const { return max_sum / double(trials); }
  double se_max() const;
  double mean_distinct() const { return distinct_sum / double(trials); }
  double se_distinct() const;
  double gnk_hat(int k) const;  // fraction with exactly k maximum parts
  double mean_dnk(int k) const { return dnk_sum.at(k - 1) / double(trials); }
  double se_dnk(int k) const;
  double mean_zeta(int j) const;
  double se_zeta(int j) const;
  double q_hat_se() const;
};

struct StatOptions {
  bool interval_gap_free = false;
  bool validate_samples = false;  // re-check every sample against the rule
};

SampleStats collect_stats(const SamplerTable& table, std::uint64_t trials,
                          int k_max, int j_lo, int j_hi, std::uint64_t seed,
                          const StatOptions& opts = {});

// Factorial-moment comparison against independent Poisson(C n r^j) targets.
struct PoissonCheck {
  struct Entry {
    int j;
    double mu, mean, mean_ratio, mean_ratio_se;
    double fall2, fall2_ratio, fall2_ratio_se;
  };
  std::vector<Entry> entries;
  struct Cross {
    int j1, j2;
    double target, value, ratio, ratio_se;
  };
  std::vector<Cross> crosses;
};

PoissonCheck poisson_check(const SampleStats& stats, double r, double C);

nlohmann::json stats_to_json(const SampleStats& s);
std::string stats_to_csv(const SampleStats& s);

}  // namespace lrc
