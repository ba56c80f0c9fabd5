#include "lrc/sampler.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dp_engine.hpp"
#include "lrc/rng.hpp"

namespace lrc {
namespace {

const BigInt kZero = 0;

double sample_se(double sum, double sumsq, double trials) {
  const double mean = sum / trials;
  const double var = std::max(0.0, sumsq / trials - mean * mean);
  return std::sqrt(var / trials);
}

}  // namespace

SamplerTable SamplerTable::build(const RestrictionSpec& spec, int n,
                                 const Budget& budget) {
  if (n < 0) throw validation_error("sampler needs n >= 0");
  SamplerTable T;
  T.spec_ = spec;
  T.n_ = n;
  T.m_ = spec.modulus();
  T.p_ = spec.span();
  const auto kernel = detail::classify(spec);
  if (kernel == detail::Kernel::scalar_free) {
    T.kind_ = Kind::scalar;
    T.scalar_.resize(n + 1);
    T.scalar_[0] = 1;
    BigInt pref = 1;
    for (int t = 1; t <= n; ++t) {
      T.scalar_[t] = pref;
      pref += T.scalar_[t];
    }
    return T;
  }
  if (kernel == detail::Kernel::generic_wide) {
    T.kind_ = Kind::wide;
    detail::WideDP forward(spec, n, Variant::plain(), budget);
    const auto& flv = forward.levels();
    T.wide_.resize(n + 1);
    Part win[4], next[4];
    for (int t = 0; t <= n; ++t) {
      const auto& keys = flv[n - t];
      auto& level = T.wide_[t];
      for (const auto& [key, cnt] : keys) {
        (void)cnt;
        int rho;
        detail::WideDP::unpack(key, T.p_, rho, win);
        BigInt total = 0;
        if (t == 0) {
          total = spec.valid_termination(rho, std::span<const Part>(win, T.p_))
                      ? 1
                      : 0;
        } else {
          for (Part v = 1; v <= t; ++v) {
            if (!spec.allows(rho, v, std::span<const Part>(win, T.p_)))
              continue;
            next[0] = v;
            for (int i = 1; i < T.p_; ++i) next[i] = win[i - 1];
            auto it = T.wide_[t - v].find(
                detail::WideDP::pack((rho + 1) % T.m_, next, T.p_));
            if (it != T.wide_[t - v].end()) total += it->second;
          }
        }
        level.emplace(key, std::move(total));
      }
    }
    return T;
  }
  // dense span-1 backward table
  T.kind_ = Kind::dense1;
  const std::uint64_t states =
      static_cast<std::uint64_t>(T.m_) * (static_cast<std::uint64_t>(n) + 1);
  if (states > budget.max_states)
    throw budget_error("state space m*n exceeds --budget-states");
  if (states * (static_cast<std::uint64_t>(n) + 2) / 2 > budget.max_table_cells)
    throw budget_error("sampler table would exceed the cell budget");
  const auto accept = detail::accept_map_p1(spec, n);
  T.dense_.resize(n + 1);
  Part w_arr[1];
  for (int t = 0; t <= n; ++t) {
    const int wmax = n - t;
    auto& level = T.dense_[t];
    level.assign(static_cast<std::size_t>(T.m_) * (wmax + 1), 0);
    for (int rho = 0; rho < T.m_; ++rho) {
      for (Part w = 0; w <= wmax; ++w) {
        BigInt& slot = level[rho * (wmax + 1) + w];
        if (t == 0) {
          if (accept[rho][w]) slot = 1;
          continue;
        }
        w_arr[0] = w;
        for (Part v = 1; v <= t; ++v) {
          if (!spec.allows(rho, v, std::span<const Part>(w_arr, 1))) continue;
          const int wmax2 = n - (t - v);
          slot += T.dense_[t - v][((rho + 1) % T.m_) * (wmax2 + 1) + v];
        }
      }
    }
  }
  return T;
}

const BigInt& SamplerTable::root() const {
  static const std::vector<Part> zeros(4, 0);
  return completions(n_, 1 % m_, zeros.data());
}

const BigInt& SamplerTable::completions(int t, int rho,
                                        const Part* window) const {
  switch (kind_) {
    case Kind::scalar:
      return scalar_[t];
    case Kind::dense1: {
      const int wmax = n_ - t;
      const Part w = window[0];
      if (w > wmax) return kZero;
      return dense_[t][static_cast<std::size_t>(rho) * (wmax + 1) + w];
    }
    case Kind::wide: {
      auto it = wide_[t].find(detail::WideDP::pack(rho, window, p_));
      return it == wide_[t].end() ? kZero : it->second;
    }
  }
  return kZero;
}

Composition SamplerTable::sample_one(std::mt19937_64& g) const {
  Composition out;
  int t = n_;
  int rho = 1 % m_;
  Part win[4] = {0, 0, 0, 0};
  Part next[4];
  while (t > 0) {
    const BigInt& total = completions(t, rho, win);
    if (total == 0)
      throw validation_error("empty class at n; nothing to sample");
    BigInt u = uniform_below(total, g);
    bool chosen = false;
    for (Part v = 1; v <= t && !chosen; ++v) {
      if (!spec_.allows(rho, v, std::span<const Part>(win, p_))) continue;
      next[0] = v;
      for (int i = 1; i < p_; ++i) next[i] = win[i - 1];
      const BigInt& wt = completions(t - v, (rho + 1) % m_, next);
      if (u < wt) {
        out.push_back(v);
        t -= v;
        rho = (rho + 1) % m_;
        std::copy(next, next + p_, win);
        chosen = true;
      } else {
        u -= wt;
      }
    }
    if (!chosen) throw error("sampler walk exhausted its candidates");
  }
  return out;
}

std::vector<Composition> sample_many(const SamplerTable& table,
                                     std::uint64_t trials,
                                     std::uint64_t seed) {
  std::vector<Composition> out;
  out.reserve(trials);
  for (std::uint64_t i = 0; i < trials; ++i) {
    auto g = trial_rng(seed, i);
    out.push_back(table.sample_one(g));
  }
  return out;
}

CompositionSummary summarize_composition(const RestrictionSpec& spec,
                                         const Composition& c, int k_max,
                                         bool interval_gap_free) {
  CompositionSummary s;
  s.multiplicity_counts.assign(std::max(0, k_max) + 1, 0);
  if (c.empty()) {
    s.gap_free = true;
    return s;
  }
  std::map<Part, int> mult;
  for (Part v : c) mult[v]++;
  s.max_part = mult.rbegin()->first;
  s.max_multiplicity = mult.rbegin()->second;
  for (const auto& [v, k] : mult) {
    if (!spec.part_is_recurrent(v)) continue;
    s.distinct_recurrent++;
    if (k <= k_max) s.multiplicity_counts[k]++;
  }
  const Part lo = interval_gap_free ? mult.begin()->first : 1;
  s.gap_free = true;
  for (Part j = lo; j < s.max_part; ++j)
    if (spec.part_is_recurrent(j) && !mult.count(j)) {
      s.gap_free = false;
      break;
    }
  return s;
}

SampleStats collect_stats(const SamplerTable& table, std::uint64_t trials,
                          int k_max, int j_lo, int j_hi, std::uint64_t seed,
                          const StatOptions& opts) {
  if (trials == 0) throw validation_error("collect_stats needs trials >= 1");
  const int n = table.n();
  SampleStats st;
  st.n = n;
  st.trials = trials;
  st.seed = seed;
  st.k_max = k_max;
  st.j_lo = j_lo;
  st.j_hi = j_hi;
  st.max_hist.assign(n + 1, 0);
  st.distinct_hist.assign(n + 1, 0);
  st.max_mult_hist.assign(n + 1, 0);
  st.gap_free_by_max.assign(n + 1, 0);
  st.dnk_sum.assign(std::max(0, k_max), 0.0);
  st.dnk_sumsq.assign(std::max(0, k_max), 0.0);
  const int jw = j_hi >= j_lo ? j_hi - j_lo + 1 : 0;
  st.zeta_sum.assign(jw, 0.0);
  st.zeta_sumsq.assign(jw, 0.0);
  st.zeta_fall2.assign(jw, 0.0);
  st.zeta_cross.assign(jw, std::vector<double>(jw, 0.0));
  std::vector<double> zeta(jw);

  for (std::uint64_t i = 0; i < trials; ++i) {
    auto g = trial_rng(seed, i);
    const Composition c = table.sample_one(g);
    if (opts.validate_samples) {
      if (sum_of(c) != n || !is_valid_composition(table.spec(), c))
        throw error("sampler produced an invalid composition");
    }
    const auto s =
        summarize_composition(table.spec(), c, k_max, opts.interval_gap_free);
    st.max_hist[s.max_part]++;
    st.distinct_hist[s.distinct_recurrent]++;
    st.max_mult_hist[std::min<int>(s.max_multiplicity, n)]++;
    if (s.gap_free) {
      st.gap_free_count++;
      st.gap_free_by_max[s.max_part]++;
    }
    st.max_sum += s.max_part;
    st.max_sumsq += double(s.max_part) * s.max_part;
    st.distinct_sum += s.distinct_recurrent;
    st.distinct_sumsq += double(s.distinct_recurrent) * s.distinct_recurrent;
    for (int k = 1; k <= k_max; ++k) {
      const double d = s.multiplicity_counts[k];
      st.dnk_sum[k - 1] += d;
      st.dnk_sumsq[k - 1] += d * d;
    }
    if (jw > 0) {
      std::fill(zeta.begin(), zeta.end(), 0.0);
      for (Part v : c)
        if (v >= j_lo && v <= j_hi) zeta[v - j_lo]++;
      for (int a = 0; a < jw; ++a) {
        st.zeta_sum[a] += zeta[a];
        st.zeta_sumsq[a] += zeta[a] * zeta[a];
        st.zeta_fall2[a] += zeta[a] * (zeta[a] - 1);
        for (int b = a + 1; b < jw; ++b)
          st.zeta_cross[a][b] += zeta[a] * zeta[b];
      }
    }
  }
  return st;
}

double SampleStats::se_max() const {
  return sample_se(max_sum, max_sumsq, double(trials));
}
double SampleStats::se_distinct() const {
  return sample_se(distinct_sum, distinct_sumsq, double(trials));
}
double SampleStats::gnk_hat(int k) const {
  return double(max_mult_hist.at(k)) / double(trials);
}
double SampleStats::se_dnk(int k) const {
  return sample_se(dnk_sum.at(k - 1), dnk_sumsq.at(k - 1), double(trials));
}
double SampleStats::mean_zeta(int j) const {
  return zeta_sum.at(j - j_lo) / double(trials);
}
double SampleStats::se_zeta(int j) const {
  return sample_se(zeta_sum.at(j - j_lo), zeta_sumsq.at(j - j_lo),
                   double(trials));
}
double SampleStats::q_hat_se() const {
  const double q = q_hat();
  return std::sqrt(std::max(0.0, q * (1 - q)) / double(trials));
}

PoissonCheck poisson_check(const SampleStats& stats, double r, double C) {
  PoissonCheck out;
  const double T = double(stats.trials);
  for (int j = stats.j_lo; j <= stats.j_hi; ++j) {
    const int a = j - stats.j_lo;
    PoissonCheck::Entry e;
    e.j = j;
    e.mu = j > stats.n ? 0.0 : C * stats.n * std::pow(r, j);
    e.mean = stats.zeta_sum[a] / T;
    const double mean_se = sample_se(stats.zeta_sum[a], stats.zeta_sumsq[a], T);
    e.mean_ratio = e.mu > 0 ? e.mean / e.mu : e.mean;
    e.mean_ratio_se = e.mu > 0 ? mean_se / e.mu : mean_se;
    e.fall2 = stats.zeta_fall2[a] / T;
    const double f2_se =
        std::sqrt(std::max(0.0, stats.zeta_fall2[a] / T)) / std::sqrt(T);
    e.fall2_ratio = e.mu > 0 ? e.fall2 / (e.mu * e.mu) : e.fall2;
    e.fall2_ratio_se = e.mu > 0 ? f2_se / (e.mu * e.mu) : f2_se;
    out.entries.push_back(e);
    for (int j2 = j + 1; j2 <= stats.j_hi; ++j2) {
      const int b = j2 - stats.j_lo;
      PoissonCheck::Cross c;
      c.j1 = j;
      c.j2 = j2;
      const double mu2 = j2 > stats.n ? 0.0 : C * stats.n * std::pow(r, j2);
      c.target = e.mu * mu2;
      c.value = stats.zeta_cross[a][b] / T;
      c.ratio = c.target > 0 ? c.value / c.target : c.value;
      const double se = std::sqrt(std::max(0.0, c.value)) / std::sqrt(T);
      c.ratio_se = c.target > 0 ? se / c.target : se;
      out.crosses.push_back(c);
    }
  }
  return out;
}

nlohmann::json stats_to_json(const SampleStats& s) {
  nlohmann::json doc;
  doc["n"] = s.n;
  doc["trials"] = s.trials;
  doc["seed"] = s.seed;
  doc["q_hat"] = s.q_hat();
  doc["q_hat_se"] = s.q_hat_se();
  doc["mean_max"] = s.mean_max();
  doc["mean_max_se"] = s.se_max();
  doc["mean_distinct"] = s.mean_distinct();
  doc["max_hist"] = s.max_hist;
  doc["distinct_hist"] = s.distinct_hist;
  doc["max_multiplicity_hist"] = s.max_mult_hist;
  doc["gap_free_by_max"] = s.gap_free_by_max;
  if (s.k_max > 0) {
    auto arr = nlohmann::json::array();
    for (int k = 1; k <= s.k_max; ++k)
      arr.push_back({{"k", k},
                     {"mean", s.mean_dnk(k)},
                     {"se", s.se_dnk(k)},
                     {"gnk_hat", s.gnk_hat(k)}});
    doc["multiplicity"] = arr;
  }
  if (s.j_hi >= s.j_lo) {
    auto arr = nlohmann::json::array();
    for (int j = s.j_lo; j <= s.j_hi; ++j)
      arr.push_back(
          {{"j", j}, {"mean", s.mean_zeta(j)}, {"se", s.se_zeta(j)}});
    doc["zeta"] = arr;
  }
  return doc;
}

std::string stats_to_csv(const SampleStats& s) {
  std::ostringstream os;
  os << "statistic,value,se\n";
  os << "q_hat," << s.q_hat() << ',' << s.q_hat_se() << '\n';
  os << "mean_max," << s.mean_max() << ',' << s.se_max() << '\n';
  os << "mean_distinct," << s.mean_distinct() << ',' << '\n';
  for (int k = 1; k <= s.k_max; ++k)
    os << "mean_D" << k << ',' << s.mean_dnk(k) << ',' << s.se_dnk(k) << '\n';
  for (int j = s.j_lo; j <= s.j_hi; ++j)
    os << "mean_zeta" << j << ',' << s.mean_zeta(j) << ',' << s.se_zeta(j)
       << '\n';
  return os.str();
}

}  // namespace lrc
