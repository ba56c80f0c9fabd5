#pragma once

// Internal DP machinery shared by the counting and sampling translation of a
// RestrictionSpec. Not installed; include only from src/.

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "lrc/bigint.hpp"
#include "lrc/enumerate.hpp"
#include "lrc/restriction.hpp"
#include "lrc/types.hpp"

namespace lrc::detail {

enum class Kernel {
  scalar_free,  // rule ignores the window entirely (unrestricted)
  diffset,      // m=1, p=1, forbidden adjacent differences
  chain,        // p=1, per-residue comparison against the previous part
  generic1,     // p=1, direct rule calls
  generic_wide  // p in [2,3], hash-map state space
};

inline Kernel classify(const RestrictionSpec& spec) {
  if (std::holds_alternative<UnrestrictedParams>(spec.params()))
    return Kernel::scalar_free;
  if (std::holds_alternative<GeneralizedCarlitzParams>(spec.params()))
    return Kernel::diffset;
  if (std::holds_alternative<PeriodicChainParams>(spec.params()))
    return Kernel::chain;
  if (const auto* alt = std::get_if<AlternatingParams>(&spec.params()))
    if (alt->first_step != FirstStep::either) return Kernel::chain;
  if (spec.span() == 1) return Kernel::generic1;
  return Kernel::generic_wide;
}

// The comparison a new part v must satisfy against its predecessor at a
// position with this residue (chain kernel only).
inline Relation chain_relation(const RestrictionSpec& spec, int rho) {
  if (const auto* ch = std::get_if<PeriodicChainParams>(&spec.params()))
    return ch->relations[rho];
  const auto& alt = std::get<AlternatingParams>(spec.params());
  const bool up = (alt.first_step == FirstStep::up) == (rho == 0);
  if (up) return alt.strict ? Relation::gt : Relation::ge;
  return alt.strict ? Relation::lt : Relation::le;
}

// accept[rho][w]: may a composition stop in state (next residue rho, last
// part w)?  Covers the trailing zero-window conditions.
inline std::vector<std::vector<char>> accept_map_p1(const RestrictionSpec& spec,
                                                    int nmax) {
  std::vector<std::vector<char>> a(spec.modulus());
  for (int rho = 0; rho < spec.modulus(); ++rho) {
    a[rho].resize(nmax + 1);
    for (Part w = 0; w <= nmax; ++w) {
      std::vector<Part> win{w};
      a[rho][w] = spec.valid_termination(rho, win);
    }
  }
  return a;
}

// For the diffset kernel: excluded_sources[v] lists the previous parts w >= 1
// that forbid appending v.
inline std::vector<std::vector<Part>> diffset_excluded(
    const GeneralizedCarlitzParams& gc, int nmax) {
  std::vector<std::vector<Part>> excl(nmax + 1);
  for (Part v = 1; v <= nmax; ++v) {
    auto& e = excl[v];
    for (long d : gc.forbidden_differences) {
      const long w = v - d;
      if (w >= 1 && w <= nmax && !gc.by_previous.count(static_cast<Part>(w)))
        e.push_back(static_cast<Part>(w));
    }
    for (const auto& [w, set] : gc.by_previous)
      if (w <= nmax && set.count(static_cast<long>(v) - w)) e.push_back(w);
  }
  return excl;
}

// Dense span-1 forward table: levels by prefix sum s, states (rho, w) with w
// the last part (0 = empty prefix).
class DenseP1 {
 public:
  DenseP1(const RestrictionSpec& spec, int nmax, Variant variant,
          const Budget& budget);

  // Exact counts of valid prefixes; finishes with per-level accept readout.
  std::vector<BigInt> counts_readout() const;

  // Augmented linear pass: inject(v) in {0,1} adds that many copies of the
  // source count per transition. Returns the accept readout per n.
  template <class Inject>
  std::vector<BigInt> stat_readout(Inject inject) const;

  const BigInt& cell(int s, int rho, Part w) const {
    return lv_[s].cell[rho * (lv_[s].wmax + 1) + w];
  }

 private:
  struct Level {
    int wmax = 0;
    std::vector<BigInt> cell;    // (rho, w) -> count
    std::vector<BigInt> total;   // per rho (diffset)
    std::vector<BigInt> prefix;  // per rho, prefix over w >= 1 (chain)
  };

  void build();
  void finish_level(Level& L) const;
  // Sum of table cells at level s_src, source residue rho_src, over the
  // previous parts w that admit appending v there.
  BigInt source_sum(const std::vector<Level>& t, int s_src, int rho_src,
                    Part v) const;

  const RestrictionSpec& spec_;
  int m_, nmax_;
  Variant variant_;
  Kernel kernel_;
  std::vector<std::vector<Part>> excl_;          // diffset
  std::vector<Relation> rel_;                    // chain, by residue
  std::vector<std::vector<char>> accept_;
  std::vector<Level> lv_;
};

inline DenseP1::DenseP1(const RestrictionSpec& spec, int nmax, Variant variant,
                        const Budget& budget)
    : spec_(spec),
      m_(spec.modulus()),
      nmax_(nmax),
      variant_(variant),
      kernel_(classify(spec)) {
  const std::uint64_t states =
      static_cast<std::uint64_t>(m_) * (static_cast<std::uint64_t>(nmax) + 1);
  if (states > budget.max_states)
    throw budget_error("state space m*n exceeds --budget-states");
  const std::uint64_t cells = states * (static_cast<std::uint64_t>(nmax) + 2) / 2;
  if (cells > budget.max_table_cells)
    throw budget_error("DP table would exceed the cell budget");
  if (kernel_ == Kernel::diffset)
    excl_ = diffset_excluded(std::get<GeneralizedCarlitzParams>(spec.params()),
                             nmax);
  if (kernel_ == Kernel::chain)
    for (int rho = 0; rho < m_; ++rho)
      rel_.push_back(chain_relation(spec, rho));
  accept_ = accept_map_p1(spec, nmax);
  build();
}

inline void DenseP1::finish_level(Level& L) const {
  if (kernel_ == Kernel::diffset) {
    L.total.assign(m_, 0);
    for (int rho = 0; rho < m_; ++rho)
      for (Part w = 0; w <= L.wmax; ++w)
        L.total[rho] += L.cell[rho * (L.wmax + 1) + w];
  } else if (kernel_ == Kernel::chain) {
    L.prefix.assign(static_cast<std::size_t>(m_) * (L.wmax + 1), 0);
    for (int rho = 0; rho < m_; ++rho) {
      BigInt run = 0;
      for (Part w = 1; w <= L.wmax; ++w) {
        run += L.cell[rho * (L.wmax + 1) + w];
        L.prefix[rho * (L.wmax + 1) + w] = run;
      }
    }
  }
}

inline BigInt DenseP1::source_sum(const std::vector<Level>& t, int s_src,
                                  int rho_src, Part v) const {
  const Level& S = t[s_src];
  const int stride = S.wmax + 1;
  BigInt sum;
  switch (kernel_) {
    case Kernel::diffset: {
      sum = S.total[rho_src];
      for (Part w : excl_[v])
        if (w <= S.wmax) sum -= S.cell[rho_src * stride + w];
      break;
    }
    case Kernel::chain: {
      Part lo = 1, hi = S.wmax;
      switch (rel_[rho_src]) {
        case Relation::lt: lo = v + 1; break;
        case Relation::le: lo = v; break;
        case Relation::gt: hi = std::min<Part>(hi, v - 1); break;
        case Relation::ge: hi = std::min<Part>(hi, v); break;
      }
      hi = std::min(hi, S.wmax);
      sum = S.cell[rho_src * stride + 0];  // empty prefix: first part is free
      if (lo <= hi)
        sum += S.prefix[rho_src * stride + hi] -
               (lo >= 2 ? S.prefix[rho_src * stride + lo - 1] : BigInt(0));
      break;
    }
    default: {  // generic1
      Part w_arr[1];
      for (Part w = 0; w <= S.wmax; ++w) {
        w_arr[0] = w;
        if (spec_.allows(rho_src, v, w_arr))
          sum += S.cell[rho_src * stride + w];
      }
    }
  }
  return sum;
}

inline void DenseP1::build() {
  lv_.resize(nmax_ + 1);
  lv_[0].wmax = 0;
  lv_[0].cell.assign(m_, 0);
  lv_[0].cell[1 % m_] = 1;  // empty prefix; next position is 1
  finish_level(lv_[0]);
  for (int s = 1; s <= nmax_; ++s) {
    Level& L = lv_[s];
    L.wmax = s;
    L.cell.assign(static_cast<std::size_t>(m_) * (s + 1), 0);
    for (Part v = 1; v <= s; ++v) {
      if (!variant_.admits(v)) continue;
      for (int rho_t = 0; rho_t < m_; ++rho_t) {
        const int rho_src = (rho_t + m_ - 1) % m_;
        L.cell[rho_t * (s + 1) + v] = source_sum(lv_, s - v, rho_src, v);
      }
    }
    finish_level(L);
  }
}

inline std::vector<BigInt> DenseP1::counts_readout() const {
  std::vector<BigInt> out(nmax_ + 1);
  for (int s = 0; s <= nmax_; ++s) {
    const Level& L = lv_[s];
    BigInt acc = 0;
    for (int rho = 0; rho < m_; ++rho)
      for (Part w = 0; w <= L.wmax; ++w)
        if (accept_[rho][w]) acc += L.cell[rho * (L.wmax + 1) + w];
    out[s] = acc;
  }
  return out;
}

template <class Inject>
std::vector<BigInt> DenseP1::stat_readout(Inject inject) const {
  std::vector<Level> st(nmax_ + 1);
  st[0].wmax = 0;
  st[0].cell.assign(m_, 0);
  finish_level(st[0]);
  std::vector<BigInt> out(nmax_ + 1);
  for (int s = 1; s <= nmax_; ++s) {
    Level& L = st[s];
    L.wmax = s;
    L.cell.assign(static_cast<std::size_t>(m_) * (s + 1), 0);
    for (Part v = 1; v <= s; ++v) {
      if (!variant_.admits(v)) continue;
      const int weight = inject(v);
      for (int rho_t = 0; rho_t < m_; ++rho_t) {
        const int rho_src = (rho_t + m_ - 1) % m_;
        BigInt val = source_sum(st, s - v, rho_src, v);
        if (weight != 0) {
          // the matching count transition was already aggregated in lv_
          val += lv_[s].cell[rho_t * (s + 1) + v] * weight;
        }
        L.cell[rho_t * (s + 1) + v] = std::move(val);
      }
    }
    finish_level(L);
    BigInt acc = 0;
    for (int rho = 0; rho < m_; ++rho)
      for (Part w = 0; w <= s; ++w)
        if (accept_[rho][w]) acc += L.cell[rho * (s + 1) + w];
    out[s] = std::move(acc);
  }
  return out;
}

// Hash-map engine for span 2..3. State key packs the residue and the last
// span() parts (newest first, 16 bits each).
class WideDP {
 public:
  WideDP(const RestrictionSpec& spec, int nmax, Variant variant,
         const Budget& budget);

  std::vector<BigInt> counts_readout() const;
  template <class Inject>
  std::vector<BigInt> stat_readout(Inject inject) const;

  using Map = std::unordered_map<std::uint64_t, BigInt>;
  const std::vector<Map>& levels() const { return lv_; }

  static std::uint64_t pack(int rho, const Part* win, int p) {
    std::uint64_t k = static_cast<std::uint64_t>(rho) << 48;
    for (int i = 0; i < p; ++i)
      k |= static_cast<std::uint64_t>(static_cast<std::uint16_t>(win[i]))
           << (16 * i);
    return k;
  }
  static void unpack(std::uint64_t k, int p, int& rho, Part* win) {
    rho = static_cast<int>(k >> 48);
    for (int i = 0; i < p; ++i)
      win[i] = static_cast<Part>((k >> (16 * i)) & 0xFFFF);
  }

 private:
  void build();

  const RestrictionSpec& spec_;
  int m_, p_, nmax_;
  Variant variant_;
  std::uint64_t cell_budget_;
  std::vector<Map> lv_;
};

inline WideDP::WideDP(const RestrictionSpec& spec, int nmax, Variant variant,
                      const Budget& budget)
    : spec_(spec),
      m_(spec.modulus()),
      p_(spec.span()),
      nmax_(nmax),
      variant_(variant),
      cell_budget_(budget.max_table_cells) {
  if (p_ > 3)
    throw budget_error("span > 3 is not supported by the generic DP engine");
  if (nmax > 65535) throw budget_error("n_max too large for packed DP states");
  double states = m_;
  for (int i = 0; i < p_; ++i) states *= static_cast<double>(nmax) + 1;
  if (states > static_cast<double>(budget.max_states))
    throw budget_error("state space m*n^p exceeds --budget-states");
  build();
}

inline void WideDP::build() {
  lv_.resize(nmax_ + 1);
  std::vector<Part> zeros(p_, 0);
  lv_[0][pack(1 % m_, zeros.data(), p_)] = 1;
  std::uint64_t cells = 1;
  Part win[4];
  Part next_win[4];
  for (int s = 0; s < nmax_; ++s) {
    for (const auto& [key, val] : lv_[s]) {
      int rho;
      unpack(key, p_, rho, win);
      for (Part v = 1; v <= nmax_ - s; ++v) {
        if (!variant_.admits(v)) continue;
        if (!spec_.allows(rho, v, std::span<const Part>(win, p_))) continue;
        next_win[0] = v;
        for (int i = 1; i < p_; ++i) next_win[i] = win[i - 1];
        auto [it, fresh] = lv_[s + v].try_emplace(
            pack((rho + 1) % m_, next_win, p_), 0);
        if (fresh && ++cells > cell_budget_)
          throw budget_error("DP table exceeded the cell budget");
        it->second += val;
      }
    }
  }
}

inline std::vector<BigInt> WideDP::counts_readout() const {
  std::vector<BigInt> out(nmax_ + 1);
  Part win[4];
  for (int s = 0; s <= nmax_; ++s) {
    BigInt acc = 0;
    for (const auto& [key, val] : lv_[s]) {
      int rho;
      unpack(key, p_, rho, win);
      if (spec_.valid_termination(rho, std::span<const Part>(win, p_)))
        acc += val;
    }
    out[s] = std::move(acc);
  }
  return out;
}

template <class Inject>
std::vector<BigInt> WideDP::stat_readout(Inject inject) const {
  std::vector<Map> st(nmax_ + 1);
  Part win[4];
  Part next_win[4];
  for (int s = 0; s < nmax_; ++s) {
    for (const auto& [key, val] : lv_[s]) {
      int rho;
      unpack(key, p_, rho, win);
      const BigInt* sval = nullptr;
      if (auto it = st[s].find(key); it != st[s].end()) sval = &it->second;
      for (Part v = 1; v <= nmax_ - s; ++v) {
        if (!variant_.admits(v)) continue;
        if (!spec_.allows(rho, v, std::span<const Part>(win, p_))) continue;
        const int weight = inject(v);
        if (!sval && weight == 0) continue;
        next_win[0] = v;
        for (int i = 1; i < p_; ++i) next_win[i] = win[i - 1];
        BigInt& slot = st[s + v][pack((rho + 1) % m_, next_win, p_)];
        if (sval) slot += *sval;
        if (weight != 0) slot += val * weight;
      }
    }
  }
  std::vector<BigInt> out(nmax_ + 1);
  for (int s = 0; s <= nmax_; ++s) {
    BigInt acc = 0;
    for (const auto& [key, val] : st[s]) {
      int rho;
      unpack(key, p_, rho, win);
      if (spec_.valid_termination(rho, std::span<const Part>(win, p_)))
        acc += val;
    }
    out[s] = std::move(acc);
  }
  return out;
}

}  // namespace lrc::detail
