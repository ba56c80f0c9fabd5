#include "lrc/driver.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

#include "lrc/rng.hpp"

namespace lrc {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

ConstantEstimates estimate_constants(const RestrictionSpec& spec, int n_max,
                                     int moments_n, int spectral_cap,
                                     const MomentFitOptions& fit,
                                     const Budget& budget, bool with_spectral) {
  ConstantEstimates est;
  const CountTable counts = count(spec, n_max, Variant::plain(), budget);
  est.growth = estimate_r_A(counts);
  est.r = est.growth.r;
  est.A = est.growth.A;

  if (moments_n <= 0) moments_n = n_max;
  std::vector<Part> ks;
  for (Part k = 1; k <= fit.k_hi; ++k) ks.push_back(k);
  const MomentTable mom = moments(spec, moments_n, ks, budget);
  est.bc = estimate_B_C(spec, mom, est.r, fit);
  est.B = est.bc.B;
  est.C = est.bc.C;
  est.u_k = est.bc.u_k;

  if (with_spectral && spectral_cap > 0)
    est.spectral = spectral_r(spec, spectral_cap);
  return est;
}

namespace {

struct MinMaxFractions {
  double frac_min = 0, se_min = 0;
  double frac_max = 0, se_max = 0;
};

MinMaxFractions multiplicity_fractions(const SamplerTable& table, int k,
                                       std::uint64_t trials,
                                       std::uint64_t seed,
                                       std::uint64_t stream_offset) {
  std::uint64_t min_hits = 0, max_hits = 0;
  const auto& spec = table.spec();
  for (std::uint64_t i = 0; i < trials; ++i) {
    auto g = trial_rng(seed, stream_offset + i);
    const Composition c = table.sample_one(g);
    // the minimum ranges over recurrent part sizes only
    Part lo = 0, hi = c[0];
    for (Part v : c) {
      if (spec.part_is_recurrent(v) && (lo == 0 || v < lo)) lo = v;
      hi = std::max(hi, v);
    }
    int nlo = 0, nhi = 0;
    for (Part v : c) {
      nlo += v == lo;
      nhi += v == hi;
    }
    min_hits += lo > 0 && nlo > k;
    max_hits += nhi > k;
  }
  MinMaxFractions f;
  const double T = double(trials);
  f.frac_min = double(min_hits) / T;
  f.frac_max = double(max_hits) / T;
  f.se_min = std::sqrt(std::max(0.0, f.frac_min * (1 - f.frac_min)) / T);
  f.se_max = std::sqrt(std::max(0.0, f.frac_max * (1 - f.frac_max)) / T);
  return f;
}

}  // namespace

JvzReport jvz_check(const RestrictionSpec& spec, double r, int k, int n,
                    std::uint64_t trials, std::uint64_t seed,
                    const Budget& budget) {
  const CountTable counts = count(spec, n + 1, Variant::plain(), budget);
  JvzInputs in;
  in.n = n;
  in.k = k;
  if (counts.at(n) == 0 || counts.at(n + 1) == 0) {
    in.supported = false;
    return jvz_ratios(in, r);
  }
  in.count_ratio = ratio_as_double(counts.at(n + 1), counts.at(n));
  const SamplerTable t0 = SamplerTable::build(spec, n, budget);
  const SamplerTable t1 = SamplerTable::build(spec, n + 1, budget);
  const auto f0 = multiplicity_fractions(t0, k, trials, seed, 0);
  const auto f1 = multiplicity_fractions(t1, k, trials, seed, trials);
  in.frac_min_n = f0.frac_min;
  in.se_min_n = f0.se_min;
  in.frac_max_n = f0.frac_max;
  in.se_max_n = f0.se_max;
  in.frac_min_n1 = f1.frac_min;
  in.se_min_n1 = f1.se_min;
  in.frac_max_n1 = f1.frac_max;
  in.se_max_n1 = f1.se_max;
  return jvz_ratios(in, r);
}

nlohmann::json freeness_to_json(const FreenessReport& rep,
                                std::size_t detail_limit) {
  nlohmann::json doc;
  doc["probe_bound"] = rep.probe_bound;
  doc["context_cap"] = rep.context_cap;
  doc["contexts"] = rep.contexts;
  doc["nonstabilizing"] = rep.nonstabilizing;
  doc["candidate_contexts"] = rep.candidate_contexts;
  doc["conclusive"] = rep.conclusive();
  doc["freeness_supported"] = rep.freeness_supported();
  doc["saturation_threshold"] = rep.saturation_threshold;
  doc["note"] =
      "bounded empirical probe, not a proof; thresholds are evidence only";
  auto samples = nlohmann::json::array();
  for (const auto& c : rep.details) {
    if (!c.stabilized) {
      nlohmann::json e;
      e["residue"] = c.residue;
      e["before"] = c.before;
      e["after"] = c.after;
      samples.push_back(e);
      if (samples.size() >= detail_limit) break;
    }
  }
  doc["nonstabilizing_samples"] = samples;
  return doc;
}

nlohmann::json compare_report(const RestrictionSpec& spec,
                              const RunOptions& opt) {
  nlohmann::json doc;
  const int n = opt.n;
  ConstantEstimates consts = estimate_constants(
      spec, opt.n_max, opt.moments_n ? opt.moments_n : std::max(opt.n_max, 400),
      opt.with_spectral ? opt.spectral_cap : 0, opt.fit, opt.budget,
      opt.with_spectral);
  AsymptoticModel model{consts.r, consts.C, spec.nu(), opt.ell_max};
  doc["n"] = n;
  doc["constants"] = constants_to_json(consts);
  doc["asymptotic_regime_reached"] = model.asymptotic_regime(n);

  // sampled statistics
  int j_lo = opt.j_lo, j_hi = opt.j_hi;
  if (j_hi < j_lo) {
    const int center = std::max(1, int(std::floor(model.log_base(consts.C * n))));
    j_lo = std::max(1, center - 1);
    j_hi = center + 1;
  }
  const SamplerTable table = SamplerTable::build(spec, n, opt.budget);
  const SampleStats stats =
      collect_stats(table, opt.trials, opt.k_max, j_lo, j_hi, opt.seed);
  doc["sample"] = stats_to_json(stats);

  doc["zeta_window"] = {{"j_lo", j_lo},
                        {"j_hi", j_hi},
                        {"log_cn", model.log_base(consts.C * n)}};

  const double pm_index = consts.C * n / (1.0 - consts.r);
  const int m = int(std::floor(pm_index));
  const double pm = pm_sequence(consts.r, std::max(m, 1)).back();
  double qnk_sum = 0;
  bool qnk_unimodal = true;  // observed, not asserted
  {
    double prev = 0;
    bool descending = false;
    for (int k = 1; k <= n; ++k) {
      const double q = qnk(n, k, model);
      qnk_sum += q;
      if (q < prev - 1e-15) descending = true;
      if (descending && q > prev + 1e-15) qnk_unimodal = false;
      prev = q;
      if (k > 5 && q < 1e-14) break;
    }
  }

  auto entry = [](double asym, double sampled, double se) {
    nlohmann::json e;
    e["asymptotic"] = asym;
    e["sampled"] = sampled;
    e["sampled_se"] = se;
    e["delta_sampled"] = sampled - asym;
    return e;
  };

  nlohmann::json rows;
  {
    nlohmann::json e = entry(expected_max(n, model), stats.mean_max(),
                             stats.se_max());
    if (n <= opt.exact_limit) {
      const auto exact = max_part_distribution(spec, n, opt.budget);
      e["exact"] = exact.expectation;
      e["delta_exact"] = exact.expectation - expected_max(n, model);
    }
    rows["expected_max"] = e;
  }
  {
    nlohmann::json e = entry(expected_distinct(n, model), stats.mean_distinct(),
                             stats.se_distinct());
    if (n <= opt.exact_limit) {
      const auto exact = distinct_parts_expectation(spec, n, opt.budget);
      e["exact"] = exact.value;
      e["delta_exact"] = exact.value - expected_distinct(n, model);
    }
    rows["expected_distinct"] = e;
  }
  {
    nlohmann::json e = entry(pm, stats.q_hat(), stats.q_hat_se());
    e["qnk_sum"] = qnk_sum;
    e["qnk_unimodal_observed"] = qnk_unimodal;
    e["p_m"] = pm;
    e["m"] = m;
    rows["gap_free"] = e;
  }
  {
    auto arr = nlohmann::json::array();
    for (int k = 1; k <= opt.k_max; ++k) {
      nlohmann::json e = entry(gnk(n, k, model), stats.gnk_hat(k),
                               std::sqrt(stats.gnk_hat(k) *
                                         (1 - stats.gnk_hat(k)) /
                                         double(stats.trials)));
      e["k"] = k;
      arr.push_back(e);
    }
    rows["max_multiplicity"] = arr;
  }
  {
    auto arr = nlohmann::json::array();
    for (int k = 1; k <= opt.k_max; ++k) {
      nlohmann::json e =
          entry(expected_dnk(n, k, model), stats.mean_dnk(k), stats.se_dnk(k));
      e["k"] = k;
      arr.push_back(e);
    }
    rows["distinct_with_multiplicity"] = arr;
  }
  doc["statistics"] = rows;
  doc["poisson"] = [&] {
    const auto pc = poisson_check(stats, consts.r, consts.C);
    auto arr = nlohmann::json::array();
    for (const auto& e : pc.entries)
      arr.push_back({{"j", e.j},
                     {"mu", e.mu},
                     {"mean_ratio", e.mean_ratio},
                     {"mean_ratio_se", e.mean_ratio_se},
                     {"fall2_ratio", e.fall2_ratio},
                     {"fall2_ratio_se", e.fall2_ratio_se}});
    nlohmann::json pj;
    pj["entries"] = arr;
    auto cr = nlohmann::json::array();
    for (const auto& c : pc.crosses)
      cr.push_back({{"j1", c.j1},
                    {"j2", c.j2},
                    {"ratio", c.ratio},
                    {"ratio_se", c.ratio_se}});
    pj["crosses"] = cr;
    return pj;
  }();
  doc["jvz"] = [&] {
    const auto rep = jvz_check(spec, consts.r, 1, n,
                               std::min<std::uint64_t>(opt.trials, 50000),
                               opt.seed + 1, opt.budget);
    nlohmann::json j;
    j["k"] = rep.k;
    j["supported"] = rep.supported;
    j["target"] = rep.target;
    j["min_ratio"] = rep.min_ratio;
    j["max_ratio"] = rep.max_ratio;
    j["min_rel_err"] = rep.min_rel_err;
    j["max_rel_err"] = rep.max_rel_err;
    return j;
  }();
  return doc;
}

nlohmann::json full_report(const RestrictionSpec& spec, const RunOptions& opt) {
  nlohmann::json doc;
  doc["report_version"] = 1;
  nlohmann::json spec_doc;
  try {
    spec_doc = spec_to_json(spec);
  } catch (const validation_error&) {
    spec_doc = {{"family", spec.family()}, {"custom", true}};
  }
  doc["spec"] = spec_doc;
  doc["provenance"] = {
      {"seed", opt.seed},
      {"trials", opt.trials},
      {"spec_hash", fnv1a64(spec_doc.dump())},
      {"generator", std::string("compo ") + kToolVersion},
  };
  const CountTable counts = count(spec, opt.n_max, Variant::plain(), opt.budget);
  doc["counts"] = count_table_json(counts);
  doc["compare"] = compare_report(spec, opt);
  if (opt.freeness_probe >= 2 * spec.span() + 2)
    doc["freeness"] = freeness_to_json(check_freeness(spec, opt.freeness_probe));
  return doc;
}

}  // namespace lrc
