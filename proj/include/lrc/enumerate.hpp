#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lrc/bigint.hpp"
#include "lrc/restriction.hpp"
#include "lrc/types.hpp"

namespace lrc {

enum class VariantKind { plain, parts_cap, avoid_part };

struct Variant {
  VariantKind kind = VariantKind::plain;
  Part value = 0;

  static Variant plain() { return {}; }
  static Variant cap(Part c) { return {VariantKind::parts_cap, c}; }
  static Variant avoid(Part j) { return {VariantKind::avoid_part, j}; }

  bool admits(Part v) const {
    switch (kind) {
      case VariantKind::plain: return true;
      case VariantKind::parts_cap: return v <= value;
      case VariantKind::avoid_part: return v != value;
    }
    return true;
  }
  std::string name() const;
};

// Exact counts C(0..n_max) of compositions in the class, restricted by the
// variant. C(0) = 1 (the empty composition).
struct CountTable {
  RestrictionSpec spec;
  int n_max = 0;
  Variant variant;
  std::vector<BigInt> counts;

  const BigInt& at(int n) const { return counts.at(n); }
};

// Exact accumulated statistics: total_parts[n] sums len(c) over all
// compositions of n; part_counts[k][n] sums the number of parts equal to k.
struct MomentTable {
  RestrictionSpec spec;
  int n_max = 0;
  std::vector<Part> ks;
  std::vector<BigInt> counts;
  std::vector<BigInt> total_parts;
  std::map<Part, std::vector<BigInt>> part_counts;

  double mean_parts(int n) const;            // E(X_0(n))
  double mean_part_count(Part k, int n) const;  // E(X_k(n))
};

CountTable count(const RestrictionSpec& spec, int n_max,
                 Variant variant = Variant::plain(), const Budget& budget = {});

MomentTable moments(const RestrictionSpec& spec, int n_max,
                    const std::vector<Part>& ks, const Budget& budget = {});

// Pr(M_n >= j) for j = 1..n, exact rationals rounded once, plus the exact
// expectation E(M_n) as the telescoped sum.
struct MaxPartDistribution {
  int n = 0;
  std::vector<double> tail;  // tail[j-1] = Pr(M_n >= j)
  BigRat expectation_exact;
  double expectation = 0;
};

MaxPartDistribution max_part_distribution(const RestrictionSpec& spec, int n,
                                          const Budget& budget = {});

// E(D_n) over recurrent part sizes, via the avoidance identity.
struct DistinctPartsExpectation {
  int n = 0;
  BigRat exact;
  double value = 0;
};

DistinctPartsExpectation distinct_parts_expectation(const RestrictionSpec& spec,
                                                    int n,
                                                    const Budget& budget = {});

// Exhaustive generation; the testing oracle. Refuses n beyond the bound.
std::vector<Composition> brute_force(const RestrictionSpec& spec, int n,
                                     int bound = 22);

// CSV with columns n,count (counts as decimal strings).
std::string count_table_csv(const CountTable& t);
// JSON with counts as decimal strings, never floats.
nlohmann::json count_table_json(const CountTable& t);
nlohmann::json moment_table_json(const MomentTable& t);

}  // namespace lrc
