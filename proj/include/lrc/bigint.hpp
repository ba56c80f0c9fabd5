#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>

namespace lrc {

using BigInt = mpz_class;
using BigRat = mpq_class;

// num/den as a double; exact rational formed first so huge operands are fine.
inline double ratio_as_double(const BigInt& num, const BigInt& den) {
  BigRat q(num, den);
  q.canonicalize();
  return q.get_d();
}

// Natural log of a positive big integer.
inline double log_bigint(const BigInt& v) {
  signed long exp2;
  double m = mpz_get_d_2exp(&exp2, v.get_mpz_t());
  return std::log(m) + static_cast<double>(exp2) * std::log(2.0);
}

inline std::string to_decimal(const BigInt& v) { return v.get_str(); }

}  // namespace lrc
