#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lrc/types.hpp"

namespace lrc {

// One evaluation window of a local restriction: the part at some position i
// together with the p parts before it (newest first) and the residue i mod m.
// Entry 0 encodes "beyond the composition's ends".
struct PartWindow {
  int position_residue = 0;
  std::vector<Part> parts;  // exactly p+1 entries: c_i, c_{i-1}, ..., c_{i-p}

  Part current() const { return parts.front(); }
};

struct UnrestrictedParams {};

// Forbidden adjacent differences: part v may follow part w unless
// v - w lies in the difference set for w. A finite per-previous-part table
// overrides the default set.
struct GeneralizedCarlitzParams {
  std::set<long> forbidden_differences;
  std::map<Part, std::set<long>> by_previous;
};

enum class FirstStep { up, down, either };
enum class Parity { odd_only, any };

struct AlternatingParams {
  bool strict = false;
  FirstStep first_step = FirstStep::up;
  Parity parity = Parity::any;
};

enum class Relation { lt, le, gt, ge };

// relations[i mod m] is required between the new part v and its predecessor w
// (v REL w), period m = relations.size().
struct PeriodicChainParams {
  std::vector<Relation> relations;
};

// Library-only extension point; not expressible in config files.
struct CustomParams {
  int modulus = 1;
  int span = 1;
  std::function<bool(const PartWindow&)> rule;
  std::string label = "custom";
  int nu = 0;
  bool splice_declared = false;
  // Which part sizes count as recurrent (gap-free statistics, avoid-part
  // sums). Default: every part size.
  std::function<bool(Part)> recurrent_part;
};

using FamilyParams = std::variant<UnrestrictedParams, GeneralizedCarlitzParams,
                                  AlternatingParams, PeriodicChainParams,
                                  CustomParams>;

class RestrictionSpec {
 public:
  int modulus() const { return modulus_; }
  int span() const { return span_; }
  int nu() const { return nu_; }
  const std::string& family() const { return family_; }
  const FamilyParams& params() const { return params_; }
  bool splice_declared() const { return splice_declared_; }

  bool rule(const PartWindow& w) const;

  // Fast-path form: previous parts newest-first, length span() (zero padded).
  bool allows(int residue, Part v, std::span<const Part> prev) const;

  // Trailing end conditions: the rule evaluated at the span() positions past
  // the last part, given the final window (newest first, zero padded).
  // next_residue is the residue of the first position past the end.
  bool valid_termination(int next_residue, std::span<const Part> last) const;

  bool part_is_recurrent(Part j) const {
    return recurrent_part_ ? recurrent_part_(j) : true;
  }

 private:
  friend RestrictionSpec build_spec(const FamilyParams& params);

  int modulus_ = 1;
  int span_ = 1;
  int nu_ = 0;
  std::string family_;
  FamilyParams params_;
  bool splice_declared_ = false;
  std::function<bool(Part)> recurrent_part_;
};

// Builds the spec for a family, validating parameters.
RestrictionSpec build_spec(const FamilyParams& params);

// Built-in names: unrestricted, carlitz, diffset011, weak-alternating,
// strict-alternating.
RestrictionSpec builtin_spec(const std::string& name);
std::vector<std::string> builtin_names();

bool is_valid_composition(const RestrictionSpec& spec, const Composition& c);

// Bounded probe of the asymptotic-freeness condition.
struct FreenessContext {
  int residue = 0;              // residue of the probed slot
  std::vector<Part> before;     // parts preceding the slot, oldest first
  std::vector<Part> after;      // parts following the slot
  bool stabilized = false;      // acceptance constant on [probe/2, probe]
  bool tail_value = false;      // that constant, when stabilized
  int threshold = -1;           // least t with acceptance constant on [t, probe]
};

struct FreenessReport {
  int probe_bound = 0;
  int context_cap = 0;  // contexts use parts <= this, so the tail window is informative
  std::size_t contexts = 0;
  std::size_t nonstabilizing = 0;
  std::size_t candidate_contexts = 0;  // stabilized with the tail allowed
  int saturation_threshold = 0;  // max threshold over stabilized contexts
  std::vector<FreenessContext> details;

  // no context kept flip-flopping inside the probe window
  bool conclusive() const { return nonstabilizing == 0; }
  // evidence for freeness: clean stabilization and at least one context
  // that admits arbitrarily large middle parts
  bool freeness_supported() const {
    return conclusive() && candidate_contexts > 0;
  }
};

// For every surrounding context with parts <= probe_bound/2 - span, tests
// whether acceptance of the middle part stabilizes over the upper half of
// [1, probe_bound]. A non-stabilizing context is reported, not an error.
FreenessReport check_freeness(const RestrictionSpec& spec, int probe_bound);

// JSON document form ({"schema_version":1, "family":..., ...}). Custom specs
// are library-only and do not round-trip.
nlohmann::json spec_to_json(const RestrictionSpec& spec);
RestrictionSpec spec_from_json(const nlohmann::json& doc);

}  // namespace lrc
