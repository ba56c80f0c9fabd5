#include "lrc/enumerate.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

#include "dp_engine.hpp"

namespace lrc {
namespace {

// Scalar tables for the window-free rule: the state is just the sum so far.
// counts[s] with the variant applied; O(n) memory, O(n) amortized work per
// variant thanks to running prefix sums.
std::vector<BigInt> scalar_counts(int nmax, Variant var) {
  std::vector<BigInt> c(nmax + 1);
  c[0] = 1;
  if (var.kind == VariantKind::parts_cap) {
    const Part cap = var.value;
    BigInt run = cap >= 1 ? 1 : 0;  // run = sum of c[s-cap .. s-1]
    for (int s = 1; s <= nmax; ++s) {
      c[s] = run;
      run += c[s];
      if (s - cap >= 0) run -= c[s - cap];
    }
    return c;
  }
  BigInt pref = 1;  // sum of c[0..s-1]
  for (int s = 1; s <= nmax; ++s) {
    c[s] = pref;
    if (var.kind == VariantKind::avoid_part && s - var.value >= 0)
      c[s] -= c[s - var.value];
    pref += c[s];
  }
  return c;
}

struct ScalarMoments {
  std::vector<BigInt> counts, total_parts;
  std::map<Part, std::vector<BigInt>> part_counts;
};

ScalarMoments scalar_moments(int nmax, const std::vector<Part>& ks) {
  ScalarMoments t;
  t.counts = scalar_counts(nmax, Variant::plain());
  t.total_parts.assign(nmax + 1, 0);
  BigInt pref_c = 1, pref_ls = 0;
  for (int s = 1; s <= nmax; ++s) {
    t.total_parts[s] = pref_ls + pref_c;
    pref_ls += t.total_parts[s];
    pref_c += t.counts[s];
  }
  for (Part k : ks) {
    auto& pc = t.part_counts[k];
    pc.assign(nmax + 1, 0);
    BigInt pref = 0;
    for (int s = 1; s <= nmax; ++s) {
      pc[s] = pref;
      if (s - k >= 0) pc[s] += t.counts[s - k];
      pref += pc[s];
    }
  }
  return t;
}

void validate_variant(const Variant& v) {
  if (v.kind == VariantKind::parts_cap && v.value < 0)
    throw validation_error("parts_cap requires cap >= 0");
  if (v.kind == VariantKind::avoid_part && v.value < 1)
    throw validation_error("avoid_part requires a positive part");
}

}  // namespace

std::string Variant::name() const {
  switch (kind) {
    case VariantKind::plain: return "plain";
    case VariantKind::parts_cap: return "parts_cap(" + std::to_string(value) + ")";
    case VariantKind::avoid_part: return "avoid_part(" + std::to_string(value) + ")";
  }
  return "?";
}

CountTable count(const RestrictionSpec& spec, int n_max, Variant variant,
                 const Budget& budget) {
  if (n_max < 0) throw validation_error("n_max must be nonnegative");
  validate_variant(variant);
  CountTable t{spec, n_max, variant, {}};
  switch (detail::classify(spec)) {
    case detail::Kernel::scalar_free:
      t.counts = scalar_counts(n_max, variant);
      break;
    case detail::Kernel::generic_wide:
      t.counts = detail::WideDP(spec, n_max, variant, budget).counts_readout();
      break;
    default:
      t.counts =
          detail::DenseP1(spec, n_max, variant, budget).counts_readout();
  }
  return t;
}

MomentTable moments(const RestrictionSpec& spec, int n_max,
                    const std::vector<Part>& ks, const Budget& budget) {
  if (n_max < 1) throw validation_error("moments need n_max >= 1");
  MomentTable t;
  t.spec = spec;
  t.n_max = n_max;
  t.ks = ks;
  const auto kernel = detail::classify(spec);
  if (kernel == detail::Kernel::scalar_free) {
    auto sm = scalar_moments(n_max, ks);
    t.counts = std::move(sm.counts);
    t.total_parts = std::move(sm.total_parts);
    t.part_counts = std::move(sm.part_counts);
    return t;
  }
  if (kernel == detail::Kernel::generic_wide) {
    detail::WideDP dp(spec, n_max, Variant::plain(), budget);
    t.counts = dp.counts_readout();
    t.total_parts = dp.stat_readout([](Part) { return 1; });
    for (Part k : ks)
      t.part_counts[k] = dp.stat_readout([k](Part v) { return v == k; });
    return t;
  }
  detail::DenseP1 dp(spec, n_max, Variant::plain(), budget);
  t.counts = dp.counts_readout();
  t.total_parts = dp.stat_readout([](Part) { return 1; });
  for (Part k : ks)
    t.part_counts[k] = dp.stat_readout([k](Part v) { return v == k; });
  return t;
}

double MomentTable::mean_parts(int n) const {
  if (counts.at(n) == 0) throw validation_error("empty class at n");
  return ratio_as_double(total_parts.at(n), counts.at(n));
}

double MomentTable::mean_part_count(Part k, int n) const {
  if (counts.at(n) == 0) throw validation_error("empty class at n");
  return ratio_as_double(part_counts.at(k).at(n), counts.at(n));
}

MaxPartDistribution max_part_distribution(const RestrictionSpec& spec, int n,
                                          const Budget& budget) {
  if (n < 1) throw validation_error("max_part_distribution needs n >= 1");
  const CountTable plain = count(spec, n, Variant::plain(), budget);
  const BigInt& total = plain.at(n);
  if (total == 0) throw validation_error("empty class at n");
  MaxPartDistribution dist;
  dist.n = n;
  dist.tail.resize(n);
  BigInt numerator_sum = 0;
  for (Part j = 1; j <= n; ++j) {
    // Pr(M_n >= j) = 1 - #(compositions with all parts <= j-1) / C(n)
    const CountTable capped = count(spec, n, Variant::cap(j - 1), budget);
    BigInt num = total - capped.at(n);
    dist.tail[j - 1] = ratio_as_double(num, total);
    numerator_sum += num;
    if (num == 0) break;  // larger caps admit everything as well
  }
  dist.expectation_exact = BigRat(numerator_sum, total);
  dist.expectation_exact.canonicalize();
  dist.expectation = dist.expectation_exact.get_d();
  return dist;
}

DistinctPartsExpectation distinct_parts_expectation(const RestrictionSpec& spec,
                                                    int n,
                                                    const Budget& budget) {
  if (n < 1) throw validation_error("distinct_parts_expectation needs n >= 1");
  const CountTable plain = count(spec, n, Variant::plain(), budget);
  const BigInt& total = plain.at(n);
  if (total == 0) throw validation_error("empty class at n");
  BigInt numerator_sum = 0;
  for (Part j = 1; j <= n; ++j) {
    if (!spec.part_is_recurrent(j)) continue;
    const CountTable avoided = count(spec, n, Variant::avoid(j), budget);
    numerator_sum += total - avoided.at(n);
  }
  DistinctPartsExpectation d;
  d.n = n;
  d.exact = BigRat(numerator_sum, total);
  d.exact.canonicalize();
  d.value = d.exact.get_d();
  return d;
}

std::vector<Composition> brute_force(const RestrictionSpec& spec, int n,
                                     int bound) {
  if (n < 0) throw validation_error("n must be nonnegative");
  if (n > bound)
    throw validation_error("brute_force bound exceeded (n > " +
                           std::to_string(bound) + ")");
  const int m = spec.modulus();
  const int p = spec.span();
  std::vector<Composition> out;
  Composition prefix;
  std::vector<Part> window(p, 0);
  auto fill_window = [&](std::vector<Part>& win) {
    const int len = static_cast<int>(prefix.size());
    for (int t = 0; t < p; ++t)
      win[t] = (len - t >= 1) ? prefix[len - 1 - t] : 0;
  };
  auto rec = [&](auto&& self, int remaining) -> void {
    fill_window(window);
    const int next_pos = static_cast<int>(prefix.size()) + 1;
    if (remaining == 0) {
      if (spec.valid_termination(next_pos % m, window)) out.push_back(prefix);
    }
    for (Part v = 1; v <= remaining; ++v) {
      if (!spec.allows(next_pos % m, v, window)) continue;
      prefix.push_back(v);
      self(self, remaining - v);
      prefix.pop_back();
      fill_window(window);
    }
  };
  rec(rec, n);
  return out;
}

std::string count_table_csv(const CountTable& t) {
  std::ostringstream os;
  os << "n,count\n";
  for (int n = 0; n <= t.n_max; ++n) os << n << ',' << to_decimal(t.at(n)) << '\n';
  return os.str();
}

nlohmann::json count_table_json(const CountTable& t) {
  nlohmann::json doc;
  doc["family"] = t.spec.family();
  doc["variant"] = t.variant.name();
  doc["n_max"] = t.n_max;
  auto arr = nlohmann::json::array();
  for (int n = 0; n <= t.n_max; ++n) arr.push_back(to_decimal(t.at(n)));
  doc["counts"] = arr;
  return doc;
}

nlohmann::json moment_table_json(const MomentTable& t) {
  nlohmann::json doc;
  doc["family"] = t.spec.family();
  doc["n_max"] = t.n_max;
  auto counts = nlohmann::json::array();
  auto parts = nlohmann::json::array();
  for (int n = 0; n <= t.n_max; ++n) {
    counts.push_back(to_decimal(t.counts.at(n)));
    parts.push_back(to_decimal(t.total_parts.at(n)));
  }
  doc["counts"] = counts;
  doc["total_parts"] = parts;
  nlohmann::json pk = nlohmann::json::object();
  for (const auto& [k, vec] : t.part_counts) {
    auto arr = nlohmann::json::array();
    for (int n = 0; n <= t.n_max; ++n) arr.push_back(to_decimal(vec.at(n)));
    pk[std::to_string(k)] = arr;
  }
  doc["part_counts"] = pk;
  return doc;
}

}  // namespace lrc
