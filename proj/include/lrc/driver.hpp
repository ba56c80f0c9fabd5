#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "lrc/asymptotics.hpp"
#include "lrc/constants.hpp"
#include "lrc/enumerate.hpp"
#include "lrc/restriction.hpp"
#include "lrc/sampler.hpp"

namespace lrc {

struct RunOptions {
  int n_max = 200;       // count tail for the r fit
  int moments_n = 0;     // 0: use n_max
  int n = 300;           // target size for sampling / comparisons
  std::uint64_t trials = 20000;
  std::uint64_t seed = 1;
  int k_max = 5;
  int j_lo = 0, j_hi = -1;  // default: a window around log(Cn)
  int spectral_cap = 40;
  bool with_spectral = true;
  int ell_max = 8;
  int exact_limit = 600;    // exact E(M_n)/E(D_n) only up to this n
  int freeness_probe = 24;  // 0: skip the probe in reports
  MomentFitOptions fit;
  Budget budget;
};

// Full constants pipeline: counts -> r/A, moments -> B/C, optional spectral
// cross-check of r.
ConstantEstimates estimate_constants(const RestrictionSpec& spec, int n_max,
                                     int moments_n, int spectral_cap,
                                     const MomentFitOptions& fit,
                                     const Budget& budget,
                                     bool with_spectral = true);

// Monte Carlo ratio check at (n, n+1); trials per size, streams derived from
// seed (indices [0, trials) at n, [trials, 2 trials) at n+1).
JvzReport jvz_check(const RestrictionSpec& spec, double r, int k, int n,
                    std::uint64_t trials, std::uint64_t seed,
                    const Budget& budget = {});

// Exact-vs-asymptotic and sampled-vs-asymptotic deltas for the large-part
// statistics at options.n.
nlohmann::json compare_report(const RestrictionSpec& spec,
                              const RunOptions& options);

// One bundled document: counts, constants, freeness probe, sample stats,
// comparison table, provenance.
nlohmann::json full_report(const RestrictionSpec& spec,
                           const RunOptions& options);

std::uint64_t fnv1a64(const std::string& s);
nlohmann::json freeness_to_json(const FreenessReport& rep, std::size_t detail_limit = 8);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace lrc
