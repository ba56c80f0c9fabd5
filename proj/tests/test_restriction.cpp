#include <doctest.h>

#include <nlohmann/json.hpp>

#include "lrc/restriction.hpp"
#include "support.hpp"

using namespace lrc;

namespace {

RestrictionSpec weak_alt_odd_spec() {
  return build_spec(AlternatingParams{false, FirstStep::up, Parity::odd_only});
}

}  // namespace

TEST_CASE("carlitz spec accepts and rejects the textbook pairs") {
  const auto spec = builtin_spec("carlitz");
  CHECK(spec.modulus() == 1);
  CHECK(spec.span() == 1);
  CHECK(spec.nu() == 0);
  CHECK(is_valid_composition(spec, {1, 2, 1}));
  CHECK_FALSE(is_valid_composition(spec, {1, 1, 2}));
  CHECK_FALSE(is_valid_composition(spec, {2, 2}));
}

TEST_CASE("unrestricted accepts every positive sequence") {
  const auto spec = builtin_spec("unrestricted");
  CHECK(is_valid_composition(spec, {5}));
  CHECK(is_valid_composition(spec, {1, 1, 1, 7, 1}));
  CHECK(is_valid_composition(spec, {3, 3, 3, 3}));
}

TEST_CASE("strict alternating up-first odd-length") {
  const auto spec = builtin_spec("strict-alternating");
  CHECK(is_valid_composition(spec, {1, 3, 2}));
  CHECK_FALSE(is_valid_composition(spec, {2, 1, 3}));  // starts by going down
  CHECK_FALSE(is_valid_composition(spec, {1, 3}));     // even length
  CHECK(is_valid_composition(spec, {4}));
}

TEST_CASE("weak alternating odd-length matches the worked example") {
  const auto spec = weak_alt_odd_spec();
  CHECK(is_valid_composition(spec, {1, 2, 1}));
  CHECK_FALSE(is_valid_composition(spec, {1, 2}));
}

TEST_CASE("the empty composition is valid for every spec") {
  for (const auto& name : builtin_names())
    CHECK(is_valid_composition(builtin_spec(name), {}));
}

TEST_CASE("all-zero windows are allowed at every residue") {
  for (const auto& name : builtin_names()) {
    const auto spec = builtin_spec(name);
    for (int rho = 0; rho < spec.modulus(); ++rho) {
      PartWindow w;
      w.position_residue = rho;
      w.parts.assign(spec.span() + 1, 0);
      CHECK(spec.rule(w));
    }
  }
}

TEST_CASE("validity agrees with hand-coded family definitions") {
  struct Case {
    const char* name;
    bool (*ok)(const Composition&);
  };
  const Case cases[] = {
      {"carlitz", testsupport::carlitz_ok},
      {"diffset011", testsupport::diffset011_ok},
      {"weak-alternating", testsupport::weak_alt_ok},
      {"strict-alternating", testsupport::strict_alt_odd_ok},
  };
  for (const auto& c : cases) {
    const auto spec = builtin_spec(c.name);
    for (int n = 0; n <= 14; ++n)
      for (const auto& comp : testsupport::all_compositions(n))
        CHECK_MESSAGE(is_valid_composition(spec, comp) == c.ok(comp), c.name);
  }
}

TEST_CASE("strict alternating with either first step (span 2 encoding)") {
  const auto spec =
      build_spec(AlternatingParams{true, FirstStep::either, Parity::any});
  CHECK(spec.modulus() == 1);
  CHECK(spec.span() == 2);
  for (int n = 0; n <= 10; ++n)
    for (const auto& comp : testsupport::all_compositions(n))
      CHECK(is_valid_composition(spec, comp) ==
            testsupport::strict_alt_any_ok(comp));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(
      build_spec(AlternatingParams{false, FirstStep::either, Parity::any}),
      validation_error);
  CHECK_THROWS_AS(build_spec(PeriodicChainParams{{}}), validation_error);
  CHECK_THROWS_AS(build_spec(PeriodicChainParams{{Relation::ge, Relation::gt}}),
                  validation_error);
  CHECK_THROWS_AS(
      build_spec(GeneralizedCarlitzParams{{0}, {{0, {1}}}}),
      validation_error);
  CustomParams cu;
  cu.rule = nullptr;
  CHECK_THROWS_AS(build_spec(FamilyParams{cu}), validation_error);
  // a rule that forbids the all-zero window is not a restriction function
  CustomParams bad;
  bad.rule = [](const PartWindow&) { return false; };
  CHECK_THROWS_AS(build_spec(FamilyParams{bad}), validation_error);
}

TEST_CASE("periodic chain cycles its relations by position") {
  // even positions must rise, odd positions (after the first) must fall
  PeriodicChainParams ch{{Relation::ge, Relation::le}};
  const auto spec = build_spec(ch);
  CHECK(spec.modulus() == 2);
  for (int n = 0; n <= 9; ++n)
    for (const auto& comp : testsupport::all_compositions(n))
      CHECK(is_valid_composition(spec, comp) == testsupport::weak_alt_ok(comp));
}

TEST_CASE("PartWindow validation") {
  const auto spec = builtin_spec("carlitz");
  PartWindow w;
  w.position_residue = 0;
  w.parts = {1};  // needs span+1 = 2 entries
  CHECK_THROWS_AS(spec.rule(w), validation_error);
  w.parts = {1, -1};
  CHECK_THROWS_AS(spec.rule(w), validation_error);
  w.position_residue = 5;
  w.parts = {1, 1};
  CHECK_THROWS_AS(spec.rule(w), validation_error);
}

TEST_CASE("freeness probe: carlitz stabilizes with threshold max(a,b)+1") {
  const auto rep = check_freeness(builtin_spec("carlitz"), 40);
  CHECK(rep.context_cap == 18);
  CHECK(rep.conclusive());
  CHECK(rep.freeness_supported());
  CHECK(rep.candidate_contexts == rep.contexts);
  for (const auto& c : rep.details) {
    CHECK(c.stabilized);
    CHECK(c.tail_value);
    const int expected = std::max(c.before[0], c.after[0]) + 1;
    CHECK(c.threshold == expected);
    if (c.before[0] == 1 && c.after[0] == 1) CHECK(c.threshold == 2);
  }
  CHECK(rep.saturation_threshold == 19);  // context parts reach 18
}

TEST_CASE("freeness probe: difference set {0,1,-1} needs two more") {
  const auto rep = check_freeness(builtin_spec("diffset011"), 40);
  CHECK(rep.conclusive());
  CHECK(rep.freeness_supported());
  for (const auto& c : rep.details)
    CHECK(c.threshold == std::max(c.before[0], c.after[0]) + 2);
}

TEST_CASE("freeness probe flags the divisor rule") {
  // acceptance sets are finite but not co-finite: stabilization is to
  // "forbidden", so no context supports arbitrarily large middle parts
  CustomParams cu;
  cu.modulus = 1;
  cu.span = 1;
  cu.label = "divides-previous";
  cu.rule = [](const PartWindow& w) {
    const Part v = w.parts[0], prev = w.parts[1];
    if (v == 0 || prev == 0) return true;
    return prev % v == 0;
  };
  const auto rep = check_freeness(build_spec(FamilyParams{cu}), 40);
  CHECK_FALSE(rep.freeness_supported());
  CHECK(rep.candidate_contexts == 0);
  // a mixed rule that keeps flipping inside the window is non-stabilizing
  CustomParams flip;
  flip.modulus = 1;
  flip.span = 1;
  flip.label = "even-after-anything";
  flip.rule = [](const PartWindow& w) {
    const Part v = w.parts[0], prev = w.parts[1];
    if (v == 0 || prev == 0) return true;
    return v % 2 == 0;
  };
  const auto rep2 = check_freeness(build_spec(FamilyParams{flip}), 40);
  CHECK_FALSE(rep2.conclusive());
  CHECK(rep2.nonstabilizing > 0);
}

TEST_CASE("freeness probe: every built-in stabilizes for contexts <= 20") {
  for (const auto& name : builtin_names()) {
    const auto rep = check_freeness(builtin_spec(name), 44);
    CHECK(rep.context_cap == 20);
    CHECK_MESSAGE(rep.conclusive(), name);
    CHECK_MESSAGE(rep.freeness_supported(), name);
  }
}

TEST_CASE("freeness probe rejects tiny bounds") {
  CHECK_THROWS_AS(check_freeness(builtin_spec("carlitz"), 3), validation_error);
}

TEST_CASE("spec JSON round-trip") {
  for (const auto& name : builtin_names()) {
    const auto spec = builtin_spec(name);
    const auto doc = spec_to_json(spec);
    CHECK(doc.at("schema_version") == 1);
    const auto back = spec_from_json(doc);
    CHECK(back.family() == spec.family());
    CHECK(back.modulus() == spec.modulus());
    CHECK(back.span() == spec.span());
    for (int n = 0; n <= 8; ++n)
      for (const auto& comp : testsupport::all_compositions(n))
        CHECK(is_valid_composition(back, comp) ==
              is_valid_composition(spec, comp));
  }
}

TEST_CASE("spec JSON rejects bad documents") {
  nlohmann::json doc = spec_to_json(builtin_spec("carlitz"));
  doc["schema_version"] = 2;
  CHECK_THROWS_AS(spec_from_json(doc), validation_error);
  doc["schema_version"] = 1;
  doc["modulus"] = 7;
  CHECK_THROWS_AS(spec_from_json(doc), validation_error);
  doc["modulus"] = 1;
  doc["nu"] = 3;
  CHECK_THROWS_AS(spec_from_json(doc), validation_error);
  doc["nu"] = 0;
  doc["family"] = "no-such-family";
  CHECK_THROWS_AS(spec_from_json(doc), validation_error);
  // custom rules are a library-only extension point
  CustomParams cu;
  cu.rule = [](const PartWindow&) { return true; };
  CHECK_THROWS_AS(spec_to_json(build_spec(FamilyParams{cu})), validation_error);
}

TEST_CASE("generalized carlitz with a per-previous-part table") {
  GeneralizedCarlitzParams gc;
  gc.forbidden_differences = {0};
  gc.by_previous[2] = {0, 1, -1};  // after a 2, the next part must leave [1,3]
  const auto spec = build_spec(gc);
  CHECK(is_valid_composition(spec, {1, 2, 4}));
  CHECK_FALSE(is_valid_composition(spec, {1, 2, 3}));
  CHECK_FALSE(is_valid_composition(spec, {1, 2, 1}));
  CHECK(is_valid_composition(spec, {3, 1, 3}));
  const auto doc = spec_to_json(spec);
  const auto back = spec_from_json(doc);
  CHECK_FALSE(is_valid_composition(back, {1, 2, 3}));
}
