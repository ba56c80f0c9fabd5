#pragma once

// Shared test helpers: independent hand-coded family definitions, an
// exhaustive composition generator, and a chi-square tail probability.
// These deliberately avoid the library's DP machinery so they can serve as
// oracles for it.

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "lrc/types.hpp"

namespace testsupport {

using lrc::Composition;

// all compositions of n, lexicographic by construction
inline std::vector<Composition> all_compositions(int n) {
  std::vector<Composition> out;
  Composition cur;
  std::function<void(int)> rec = [&](int rem) {
    if (rem == 0) {
      out.push_back(cur);
      return;
    }
    for (int v = 1; v <= rem; ++v) {
      cur.push_back(v);
      rec(rem - v);
      cur.pop_back();
    }
  };
  if (n >= 0) rec(n);
  return out;
}

inline bool carlitz_ok(const Composition& c) {
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    if (c[i] == c[i + 1]) return false;
  return true;
}

inline bool diffset011_ok(const Composition& c) {
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const int d = c[i + 1] - c[i];
    if (d >= -1 && d <= 1) return false;
  }
  return true;
}

// c1 <= c2 >= c3 <= c4 ... (any length)
inline bool weak_alt_ok(const Composition& c) {
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    if (i % 2 == 0 && !(c[i] <= c[i + 1])) return false;
    if (i % 2 == 1 && !(c[i] >= c[i + 1])) return false;
  }
  return true;
}

// c1 < c2 > c3 < c4 ..., odd number of parts; the empty composition is in
// every class (all its windows are all-zero)
inline bool strict_alt_odd_ok(const Composition& c) {
  if (c.empty()) return true;
  if (c.size() % 2 == 0) return false;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    if (i % 2 == 0 && !(c[i] < c[i + 1])) return false;
    if (i % 2 == 1 && !(c[i] > c[i + 1])) return false;
  }
  return true;
}

// strictly alternating in either direction, any length
inline bool strict_alt_any_ok(const Composition& c) {
  if (c.size() < 2) return true;
  if (c[0] == c[1]) return false;
  for (std::size_t i = 0; i + 2 < c.size(); ++i) {
    if (c[i] < c[i + 1] && !(c[i + 2] < c[i + 1])) return false;
    if (c[i] > c[i + 1] && !(c[i + 2] > c[i + 1])) return false;
    if (c[i + 1] == c[i + 2]) return false;
  }
  return true;
}

// upper tail probability of a chi-square with df degrees of freedom
inline double chi_square_p_value(double stat, double df) {
  return boost::math::gamma_q(df / 2.0, stat / 2.0);
}

}  // namespace testsupport
