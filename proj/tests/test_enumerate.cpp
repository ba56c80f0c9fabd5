#include <doctest.h>

#include <nlohmann/json.hpp>

#include <algorithm>

#include "lrc/enumerate.hpp"
#include "support.hpp"

using namespace lrc;

namespace {

BigRat rat(long num, long den) {
  BigRat q(num, den);
  q.canonicalize();
  return q;
}

std::vector<RestrictionSpec> specs_under_test() {
  std::vector<RestrictionSpec> specs;
  for (const auto& name : builtin_names()) specs.push_back(builtin_spec(name));
  specs.push_back(
      build_spec(AlternatingParams{true, FirstStep::either, Parity::any}));
  specs.push_back(build_spec(PeriodicChainParams{{Relation::ge, Relation::le}}));
  return specs;
}

}  // namespace

TEST_CASE("DP counts equal brute-force counts for every family, n <= 12") {
  for (const auto& spec : specs_under_test()) {
    const auto table = count(spec, 12);
    CHECK(table.at(0) == 1);
    for (int n = 0; n <= 12; ++n) {
      const auto brute = brute_force(spec, n);
      CHECK_MESSAGE(table.at(n) == BigInt(brute.size()), spec.family(),
                    " n=", n);
    }
  }
}

TEST_CASE("brute force matches direct filtering of all compositions") {
  const auto spec = builtin_spec("carlitz");
  for (int n = 0; n <= 9; ++n) {
    auto brute = brute_force(spec, n);
    std::vector<Composition> direct;
    for (const auto& c : testsupport::all_compositions(n))
      if (testsupport::carlitz_ok(c)) direct.push_back(c);
    std::sort(brute.begin(), brute.end());
    std::sort(direct.begin(), direct.end());
    CHECK(brute == direct);
  }
}

TEST_CASE("worked count examples") {
  CHECK(count(builtin_spec("unrestricted"), 4).at(4) == 8);
  CHECK(count(builtin_spec("unrestricted"), 4, Variant::cap(2)).at(4) == 5);
  const auto carlitz = count(builtin_spec("carlitz"), 12);
  const BigInt expected[] = {1, 1, 1, 3, 4, 7, 14, 23, 39, 71, 124, 214, 378};
  for (int n = 0; n <= 12; ++n) CHECK(carlitz.at(n) == expected[n]);
}

TEST_CASE("brute force worked examples") {
  auto carlitz4 = brute_force(builtin_spec("carlitz"), 4);
  std::sort(carlitz4.begin(), carlitz4.end());
  const std::vector<Composition> want{{1, 3}, {3, 1}, {4}, {1, 2, 1}};
  auto sorted_want = want;
  std::sort(sorted_want.begin(), sorted_want.end());
  CHECK(carlitz4 == sorted_want);

  CHECK(brute_force(builtin_spec("unrestricted"), 3).size() == 4);

  auto strict4 = brute_force(builtin_spec("strict-alternating"), 4);
  std::sort(strict4.begin(), strict4.end());
  CHECK(strict4 == std::vector<Composition>{{1, 2, 1}, {4}});

  CHECK_THROWS_AS(brute_force(builtin_spec("unrestricted"), 23),
                  validation_error);
}

TEST_CASE("unrestricted counts are powers of two up to n = 64") {
  const auto table = count(builtin_spec("unrestricted"), 64);
  BigInt pow2 = 1;
  for (int n = 1; n <= 64; ++n) {
    CHECK(table.at(n) == pow2);
    pow2 *= 2;
  }
}

TEST_CASE("cap variants: cap(n) is plain, cap(0) is empty") {
  for (const auto& spec : specs_under_test()) {
    const int n = 10;
    const auto plain = count(spec, n);
    const auto full_cap = count(spec, n, Variant::cap(n));
    const auto zero_cap = count(spec, n, Variant::cap(0));
    for (int s = 0; s <= n; ++s) {
      CHECK(full_cap.at(s) == plain.at(s));
      CHECK(zero_cap.at(s) == (s == 0 ? 1 : 0));
    }
  }
}

TEST_CASE("plain counts dominate capped and avoiding variants termwise") {
  for (const auto& spec : specs_under_test()) {
    const auto plain = count(spec, 14);
    for (const auto variant :
         {Variant::cap(3), Variant::cap(7), Variant::avoid(1),
          Variant::avoid(2)}) {
      const auto t = count(spec, 14, variant);
      for (int n = 0; n <= 14; ++n) {
        CHECK(t.at(n) <= plain.at(n));
        CHECK(t.at(n) >= 0);
      }
    }
  }
}

TEST_CASE("moment tables: worked examples and conservation identities") {
  const auto unres = builtin_spec("unrestricted");
  {
    const auto t = moments(unres, 2, {1});
    CHECK(t.total_parts.at(2) == 3);  // compositions 2 and 1 1
    CHECK(t.mean_parts(2) == doctest::Approx(1.5));
  }
  {
    const auto t = moments(builtin_spec("carlitz"), 4, {1});
    CHECK(t.part_counts.at(1).at(4) == 4);  // over {4, 13, 31, 121}
    CHECK(t.mean_part_count(1, 4) == doctest::Approx(1.0));
  }
  {
    std::vector<Part> ks;
    for (Part k = 1; k <= 10; ++k) ks.push_back(k);
    const auto t = moments(unres, 10, ks);
    BigInt weighted = 0;
    for (Part k = 1; k <= 10; ++k)
      weighted += BigInt(k) * t.part_counts.at(k).at(10);
    CHECK(weighted == BigInt(10) * t.counts.at(10));
    CHECK(weighted == 5120);
  }
}

TEST_CASE("moment conservation holds for every family and n <= 12") {
  for (const auto& spec : specs_under_test()) {
    std::vector<Part> ks;
    for (Part k = 1; k <= 12; ++k) ks.push_back(k);
    const auto t = moments(spec, 12, ks);
    for (int n = 1; n <= 12; ++n) {
      BigInt weighted = 0, total = 0;
      for (Part k = 1; k <= 12; ++k) {
        weighted += BigInt(k) * t.part_counts.at(k).at(n);
        total += t.part_counts.at(k).at(n);
      }
      CHECK(weighted == BigInt(n) * t.counts.at(n));
      CHECK(total == t.total_parts.at(n));
    }
  }
}

TEST_CASE("max-part distribution: worked examples") {
  {
    const auto d = max_part_distribution(builtin_spec("unrestricted"), 4);
    CHECK(d.tail[3] == doctest::Approx(1.0 / 8));
    CHECK(d.expectation_exact == rat(19, 8));
    CHECK(d.expectation == doctest::Approx(2.375));
  }
  {
    const auto d = max_part_distribution(builtin_spec("carlitz"), 5);
    CHECK(d.tail[4] == doctest::Approx(1.0 / 7));
  }
}

TEST_CASE("max-part distributions are proper tails") {
  for (const auto& spec : specs_under_test()) {
    const auto d = max_part_distribution(spec, 18);
    CHECK(d.tail[0] == doctest::Approx(1.0));
    for (std::size_t j = 0; j < d.tail.size(); ++j) {
      CHECK(d.tail[j] >= 0.0);
      CHECK(d.tail[j] <= 1.0);
      if (j > 0) CHECK(d.tail[j] <= d.tail[j - 1] + 1e-15);
    }
  }
}

TEST_CASE("max-part expectation agrees with brute force") {
  for (const auto& spec : specs_under_test()) {
    for (int n : {5, 8, 10}) {
      const auto brute = brute_force(spec, n);
      if (brute.empty()) continue;
      long sum = 0;
      for (const auto& c : brute) sum += *std::max_element(c.begin(), c.end());
      const auto d = max_part_distribution(spec, n);
      CHECK(d.expectation_exact == rat(sum, static_cast<long>(brute.size())));
    }
  }
}

TEST_CASE("distinct-part expectation: worked examples and oracle") {
  CHECK(distinct_parts_expectation(builtin_spec("unrestricted"), 3).exact ==
        rat(3, 2));
  CHECK(distinct_parts_expectation(builtin_spec("unrestricted"), 1).exact == 1);
  CHECK(distinct_parts_expectation(builtin_spec("carlitz"), 5).exact ==
        rat(13, 7));
  for (const auto& spec : specs_under_test()) {
    for (int n : {6, 9}) {
      const auto brute = brute_force(spec, n);
      if (brute.empty()) continue;
      long sum = 0;
      for (const auto& c : brute) {
        std::vector<Part> d(c);
        std::sort(d.begin(), d.end());
        sum += std::unique(d.begin(), d.end()) - d.begin();
      }
      CHECK(distinct_parts_expectation(spec, n).exact ==
            rat(sum, static_cast<long>(brute.size())));
    }
  }
}

TEST_CASE("budget guard refuses oversized state spaces") {
  Budget tiny;
  tiny.max_states = 50;
  CHECK_THROWS_AS(count(builtin_spec("carlitz"), 100, Variant::plain(), tiny),
                  budget_error);
  const auto wide =
      build_spec(AlternatingParams{true, FirstStep::either, Parity::any});
  Budget small;
  small.max_states = 1000;
  CHECK_THROWS_AS(count(wide, 200, Variant::plain(), small), budget_error);
}

TEST_CASE("empty class at n raises a validation error") {
  CustomParams cu;
  cu.modulus = 1;
  cu.span = 1;
  cu.label = "even-parts";
  cu.rule = [](const PartWindow& w) {
    return w.parts[0] == 0 || w.parts[0] % 2 == 0;
  };
  const auto spec = build_spec(FamilyParams{cu});
  CHECK(count(spec, 6).at(6) == 4);  // 6, 2+4, 4+2, 2+2+2
  CHECK(count(spec, 5).at(5) == 0);
  CHECK_THROWS_AS(max_part_distribution(spec, 5), validation_error);
  CHECK_THROWS_AS(distinct_parts_expectation(spec, 5), validation_error);
}

TEST_CASE("count table exports") {
  const auto t = count(builtin_spec("carlitz"), 12);
  const auto csv = count_table_csv(t);
  CHECK(csv.find("n,count\n") == 0);
  CHECK(csv.find("12,378\n") != std::string::npos);
  const auto doc = count_table_json(t);
  CHECK(doc.at("counts").at(12).get<std::string>() == "378");
  CHECK(doc.at("counts").at(11).get<std::string>() == "214");
  // counts survive a JSON round-trip untouched (decimal strings, not floats)
  const auto reparsed = nlohmann::json::parse(doc.dump());
  CHECK(reparsed == doc);
}

TEST_CASE("large counts stay exact in exports") {
  const auto t = count(builtin_spec("unrestricted"), 400);
  const auto doc = count_table_json(t);
  const std::string s = doc.at("counts").at(400).get<std::string>();
  BigInt want = 1;
  want <<= 399;
  CHECK(s == to_decimal(want));
}
