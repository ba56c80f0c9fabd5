#include "lrc/restriction.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>

namespace lrc {
namespace {

bool relation_holds(Relation rel, Part v, Part w) {
  switch (rel) {
    case Relation::lt: return v < w;
    case Relation::le: return v <= w;
    case Relation::gt: return v > w;
    case Relation::ge: return v >= w;
  }
  return false;
}

bool relation_allows_increase(Relation rel) {
  return rel == Relation::gt || rel == Relation::ge;
}
bool relation_allows_decrease(Relation rel) {
  return rel == Relation::lt || rel == Relation::le;
}

// m=2, p=1 alternating with a fixed first step. Even positions take the
// first-step comparison, odd positions (third part onward) the reverse.
bool alt_m2p1(const AlternatingParams& a, int rho, Part v, Part w) {
  if (v == 0) {
    if (w == 0) return true;
    // first zero past the end sits at residue rho; odd length <=> rho == 0
    return a.parity == Parity::any || rho == 0;
  }
  if (w == 0) return true;  // first part carries no comparison
  const bool up_position = (a.first_step == FirstStep::up) == (rho == 0);
  if (up_position) return a.strict ? v > w : v >= w;
  return a.strict ? v < w : v <= w;
}

// Strict alternating with either first step: the direction is recovered from
// the two preceding parts, so one rule with span 2 covers both phases.
// modulus 1 when any length is allowed, 2 when the length must be odd.
bool alt_either_strict(const AlternatingParams& a, int m, int rho, Part v,
                       Part w1, Part w2) {
  if (v == 0) {
    if (w1 == 0) return true;
    return a.parity == Parity::any || (m == 2 && rho == 0);
  }
  if (w1 == 0) return true;       // first part
  if (w2 == 0) return v != w1;    // second part: either strict direction
  if (w2 < w1) return v < w1;     // previous step went up, now down
  if (w2 > w1) return v > w1;
  return false;                   // equal neighbours never occur in the class
}

}  // namespace

bool RestrictionSpec::allows(int residue, Part v,
                             std::span<const Part> prev) const {
  const Part w = prev.empty() ? 0 : prev[0];
  if (const auto* u = std::get_if<UnrestrictedParams>(&params_)) {
    (void)u;
    return true;
  }
  if (const auto* gc = std::get_if<GeneralizedCarlitzParams>(&params_)) {
    if (v == 0 || w == 0) return true;
    const std::set<long>* set = &gc->forbidden_differences;
    if (auto it = gc->by_previous.find(w); it != gc->by_previous.end())
      set = &it->second;
    return set->find(static_cast<long>(v) - w) == set->end();
  }
  if (const auto* alt = std::get_if<AlternatingParams>(&params_)) {
    if (alt->first_step != FirstStep::either)
      return alt_m2p1(*alt, residue, v, w);
    const Part w2 = prev.size() > 1 ? prev[1] : 0;
    return alt_either_strict(*alt, modulus_, residue, v, w, w2);
  }
  if (const auto* ch = std::get_if<PeriodicChainParams>(&params_)) {
    if (v == 0 || w == 0) return true;
    return relation_holds(ch->relations[residue], v, w);
  }
  const auto& cu = std::get<CustomParams>(params_);
  PartWindow win;
  win.position_residue = residue;
  win.parts.assign(1, v);
  for (int t = 0; t < span_; ++t)
    win.parts.push_back(t < static_cast<int>(prev.size()) ? prev[t] : 0);
  return cu.rule(win);
}

bool RestrictionSpec::rule(const PartWindow& w) const {
  if (w.position_residue < 0 || w.position_residue >= modulus_)
    throw validation_error("PartWindow residue out of range");
  if (static_cast<int>(w.parts.size()) != span_ + 1)
    throw validation_error("PartWindow must hold span+1 parts");
  for (Part p : w.parts)
    if (p < 0) throw validation_error("PartWindow parts must be nonnegative");
  return allows(w.position_residue, w.parts[0],
                std::span<const Part>(w.parts).subspan(1));
}

bool RestrictionSpec::valid_termination(int next_residue,
                                        std::span<const Part> last) const {
  // Positions len+1 .. len+span see windows that still contain real parts;
  // everything past that is all-zero and allowed by construction.
  std::vector<Part> window(last.begin(), last.end());
  window.resize(span_, 0);
  int rho = next_residue;
  for (int t = 0; t < span_; ++t) {
    if (!allows(rho, 0, window)) return false;
    for (int i = span_ - 1; i > 0; --i) window[i] = window[i - 1];
    window[0] = 0;
    rho = (rho + 1) % modulus_;
  }
  return true;
}

RestrictionSpec build_spec(const FamilyParams& params) {
  RestrictionSpec s;
  s.params_ = params;
  if (std::holds_alternative<UnrestrictedParams>(params)) {
    s.modulus_ = 1;
    s.span_ = 1;
    s.family_ = "unrestricted";
    s.splice_declared_ = true;
  } else if (const auto* gc = std::get_if<GeneralizedCarlitzParams>(&params)) {
    for (const auto& [w, set] : gc->by_previous) {
      (void)set;
      if (w < 1)
        throw validation_error(
            "generalized_carlitz: by_previous keys must be positive parts");
    }
    s.modulus_ = 1;
    s.span_ = 1;
    s.family_ = "generalized_carlitz";
    s.splice_declared_ = true;  // parts restricted only by their neighbours
  } else if (const auto* alt = std::get_if<AlternatingParams>(&params)) {
    if (alt->first_step == FirstStep::either) {
      if (!alt->strict)
        throw validation_error(
            "alternating: weak comparisons with first_step=either are not a "
            "single local restriction; pick a direction");
      if (alt->parity == Parity::odd_only) {
        s.modulus_ = 2;
        s.span_ = 2;
      } else {
        s.modulus_ = 1;
        s.span_ = 2;
      }
    } else {
      s.modulus_ = 2;
      s.span_ = 1;
    }
    s.family_ = "alternating";
    s.splice_declared_ = alt->strict && alt->parity == Parity::odd_only &&
                         alt->first_step == FirstStep::up;
  } else if (const auto* ch = std::get_if<PeriodicChainParams>(&params)) {
    if (ch->relations.empty())
      throw validation_error("periodic_chain: relation list is empty");
    bool inc = false, dec = false;
    for (Relation r : ch->relations) {
      inc = inc || relation_allows_increase(r);
      dec = dec || relation_allows_decrease(r);
    }
    if (!inc || !dec)
      throw validation_error(
          "periodic_chain: relations must allow parts to both increase and "
          "decrease");
    s.modulus_ = static_cast<int>(ch->relations.size());
    s.span_ = 1;
    s.family_ = "periodic_chain";
  } else {
    const auto& cu = std::get<CustomParams>(params);
    if (cu.modulus < 1 || cu.span < 1)
      throw validation_error("custom: modulus and span must be >= 1");
    if (!cu.rule) throw validation_error("custom: rule is required");
    s.modulus_ = cu.modulus;
    s.span_ = cu.span;
    s.family_ = cu.label.empty() ? "custom" : cu.label;
    s.nu_ = cu.nu;
    s.splice_declared_ = cu.splice_declared;
    s.recurrent_part_ = cu.recurrent_part;
  }
  // Def-level invariant: the all-zero window is allowed at every residue.
  std::vector<Part> zeros(s.span_, 0);
  for (int rho = 0; rho < s.modulus_; ++rho)
    if (!s.allows(rho, 0, zeros))
      throw validation_error("rule must allow the all-zero window");
  return s;
}

RestrictionSpec builtin_spec(const std::string& name) {
  std::string key = name;
  std::replace(key.begin(), key.end(), '_', '-');
  if (key == "unrestricted") return build_spec(UnrestrictedParams{});
  if (key == "carlitz")
    return build_spec(GeneralizedCarlitzParams{{0}, {}});
  if (key == "diffset011")
    return build_spec(GeneralizedCarlitzParams{{-1, 0, 1}, {}});
  if (key == "weak-alternating")
    return build_spec(AlternatingParams{false, FirstStep::up, Parity::any});
  if (key == "strict-alternating")
    return build_spec(
        AlternatingParams{true, FirstStep::up, Parity::odd_only});
  throw validation_error("unknown family: " + name);
}

std::vector<std::string> builtin_names() {
  return {"unrestricted", "carlitz", "diffset011", "weak-alternating",
          "strict-alternating"};
}

bool is_valid_composition(const RestrictionSpec& spec, const Composition& c) {
  const int len = static_cast<int>(c.size());
  const int p = spec.span();
  const int m = spec.modulus();
  std::vector<Part> prev(p, 0);
  for (int i = 1; i <= len + p; ++i) {
    const Part v = i <= len ? c[i - 1] : 0;
    if (v < 1 && i <= len)
      throw validation_error("composition parts must be positive");
    for (int t = 0; t < p; ++t) {
      const int j = i - 1 - t;
      prev[t] = (j >= 1 && j <= len) ? c[j - 1] : 0;
    }
    if (!spec.allows(i % m, v, prev)) return false;
  }
  return true;
}

FreenessReport check_freeness(const RestrictionSpec& spec, int probe_bound) {
  const int p = spec.span();
  const int m = spec.modulus();
  if (probe_bound < 2 * p + 2)
    throw validation_error("probe_bound must be at least 2*span+2");
  FreenessReport rep;
  rep.probe_bound = probe_bound;
  // Context parts stay one unit further below probe/2 so that thresholds
  // lying just past the largest context part still land inside the window.
  rep.context_cap = probe_bound / 2 - p - 1;
  if (rep.context_cap < 1)
    throw validation_error("probe_bound too small for this span");
  const int cap = rep.context_cap;
  const int mid = probe_bound / 2;

  std::vector<Part> ctx(2 * p, 1);  // before (p parts, oldest first) + after
  std::vector<Part> window(p, 0);
  std::vector<Part> full(2 * p + 1, 0);
  std::vector<char> acc(probe_bound + 1, 0);

  while (true) {
    for (int rho = 0; rho < m; ++rho) {
      for (int q = 0; q < p; ++q) full[q] = ctx[q];
      for (int q = 0; q < p; ++q) full[p + 1 + q] = ctx[p + q];
      for (Part x = 1; x <= probe_bound; ++x) {
        full[p] = x;
        bool ok = true;
        for (int q = p; ok && q <= 2 * p; ++q) {
          for (int t = 0; t < p; ++t) window[t] = full[q - 1 - t];
          ok = spec.allows((rho + (q - p)) % m, full[q], window);
        }
        acc[x] = ok;
      }
      const bool tail = acc[probe_bound];
      int flip = 0;  // largest x disagreeing with the tail value
      for (int x = probe_bound - 1; x >= 1; --x)
        if (acc[x] != tail) {
          flip = x;
          break;
        }
      FreenessContext c;
      c.residue = rho;
      c.before.assign(ctx.begin(), ctx.begin() + p);
      c.after.assign(ctx.begin() + p, ctx.end());
      c.tail_value = tail;
      c.threshold = flip + 1;
      c.stabilized = flip < mid;
      rep.contexts++;
      if (c.stabilized) {
        rep.saturation_threshold =
            std::max(rep.saturation_threshold, c.threshold);
        if (c.tail_value) rep.candidate_contexts++;
      } else {
        rep.nonstabilizing++;
      }
      rep.details.push_back(std::move(c));
    }
    // odometer over context parts
    int d = 0;
    while (d < 2 * p && ctx[d] == cap) ctx[d++] = 1;
    if (d == 2 * p) break;
    ctx[d]++;
  }
  return rep;
}

namespace {

std::string relation_name(Relation r) {
  switch (r) {
    case Relation::lt: return "<";
    case Relation::le: return "<=";
    case Relation::gt: return ">";
    case Relation::ge: return ">=";
  }
  return "?";
}

Relation relation_from(const std::string& s) {
  if (s == "<") return Relation::lt;
  if (s == "<=") return Relation::le;
  if (s == ">") return Relation::gt;
  if (s == ">=") return Relation::ge;
  throw validation_error("unknown relation: " + s);
}

}  // namespace

nlohmann::json spec_to_json(const RestrictionSpec& spec) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["family"] = spec.family();
  doc["modulus"] = spec.modulus();
  doc["span"] = spec.span();
  doc["nu"] = spec.nu();
  nlohmann::json p = nlohmann::json::object();
  if (const auto* gc = std::get_if<GeneralizedCarlitzParams>(&spec.params())) {
    p["forbidden_differences"] = gc->forbidden_differences;
    if (!gc->by_previous.empty()) {
      nlohmann::json bp = nlohmann::json::object();
      for (const auto& [w, set] : gc->by_previous) bp[std::to_string(w)] = set;
      p["by_previous"] = bp;
    }
  } else if (const auto* alt = std::get_if<AlternatingParams>(&spec.params())) {
    p["strict"] = alt->strict;
    p["first_step"] = alt->first_step == FirstStep::up     ? "up"
                      : alt->first_step == FirstStep::down ? "down"
                                                           : "either";
    p["parity"] = alt->parity == Parity::odd_only ? "odd" : "any";
  } else if (const auto* ch = std::get_if<PeriodicChainParams>(&spec.params())) {
    auto rels = nlohmann::json::array();
    for (Relation r : ch->relations) rels.push_back(relation_name(r));
    p["relations"] = rels;
  } else if (std::holds_alternative<CustomParams>(spec.params())) {
    throw validation_error("custom specs are library-only; no JSON form");
  }
  doc["params"] = p;
  return doc;
}

RestrictionSpec spec_from_json(const nlohmann::json& doc) {
  if (!doc.contains("schema_version") || doc["schema_version"] != 1)
    throw validation_error("unsupported spec schema_version");
  const std::string family = doc.at("family").get<std::string>();
  const auto params = doc.value("params", nlohmann::json::object());
  FamilyParams fp;
  if (family == "unrestricted") {
    fp = UnrestrictedParams{};
  } else if (family == "generalized_carlitz") {
    GeneralizedCarlitzParams gc;
    for (const auto& d : params.value("forbidden_differences",
                                      std::vector<long>{}))
      gc.forbidden_differences.insert(d);
    if (params.contains("by_previous"))
      for (const auto& [k, v] : params["by_previous"].items()) {
        std::set<long> set;
        for (const auto& d : v) set.insert(d.get<long>());
        gc.by_previous[std::stoi(k)] = std::move(set);
      }
    fp = std::move(gc);
  } else if (family == "alternating") {
    AlternatingParams alt;
    alt.strict = params.value("strict", false);
    const std::string fs = params.value("first_step", "up");
    alt.first_step = fs == "up"     ? FirstStep::up
                     : fs == "down" ? FirstStep::down
                     : fs == "either"
                         ? FirstStep::either
                         : throw validation_error("bad first_step: " + fs);
    const std::string par = params.value("parity", "any");
    alt.parity = par == "odd"   ? Parity::odd_only
                 : par == "any" ? Parity::any
                                : throw validation_error("bad parity: " + par);
    fp = alt;
  } else if (family == "periodic_chain") {
    PeriodicChainParams ch;
    for (const auto& r : params.at("relations"))
      ch.relations.push_back(relation_from(r.get<std::string>()));
    fp = std::move(ch);
  } else {
    throw validation_error("unknown family in spec document: " + family);
  }
  RestrictionSpec spec = build_spec(fp);
  if (doc.contains("modulus") && doc["modulus"].get<int>() != spec.modulus())
    throw validation_error("spec document modulus disagrees with family");
  if (doc.contains("span") && doc["span"].get<int>() != spec.span())
    throw validation_error("spec document span disagrees with family");
  if (doc.value("nu", 0) != 0)
    throw validation_error("built-in families have no nonrecurrent parts");
  return spec;
}

}  // namespace lrc
