#pragma once

#include <complex>
#include <vector>

#include "lrc/types.hpp"

namespace lrc {

// Evaluator bundle for the closed-form large-part asymptotics. Every
// logarithm is taken to base 1/r; log_e() is the one conversion constant,
// centralised here because it is the easiest thing to get wrong.
struct AsymptoticModel {
  double r = 0.5;
  double C = 0.5;
  int nu = 0;
  int ell_max = 8;  // extended automatically until the series tail < 1e-15

  double log_e() const { return 1.0 / std::log(1.0 / r); }
  double log_base(double x) const { return std::log(x) / std::log(1.0 / r); }
  bool asymptotic_regime(double n) const { return log_base(C * n) >= 3.0; }
};

inline constexpr double kEulerGamma = 0.57721566490153286;

// Gamma on the complex plane (Lanczos, reflected for Re z < 1/2).
// Relative error stays below ~1e-12 on Re z in [0.5, 25], |Im z| <= 60,
// which covers every series term the oscillation sum uses.
std::complex<double> gamma_complex(std::complex<double> z);

// The tiny periodic-in-log-x oscillation term. Conjugate terms are paired,
// so the result is exactly real.
double oscillation(double x, int k, const AsymptoticModel& model);

double expected_max(double n, const AsymptoticModel& model);
double expected_distinct(double n, const AsymptoticModel& model);

// Fraction of compositions of n that are gap-free with largest part k.
double qnk(double n, int k, const AsymptoticModel& model);

// p_m: probability that m iid geometric(1-r) values form a gap-free
// multiset. p_0 = 1; binomial weights are built by running products inside
// a +-10 sigma window, so m up to 1e4 stays cheap and stable.
std::vector<double> pm_sequence(double r, int m_max);

// Fraction of compositions with exactly k parts of maximum size.
double gnk(double n, int k, const AsymptoticModel& model);

// Expected number of distinct recurrent parts of multiplicity k, and the
// probability that a random part size has multiplicity k.
double expected_dnk(double n, int k, const AsymptoticModel& model);
double mnk(double n, int k, const AsymptoticModel& model);

// Growth-ratio check on counts of compositions with more than k copies of
// the minimal/maximal part: both ratios approach 1/r.
struct JvzReport {
  int k = 0;
  int n = 0;
  bool supported = true;  // false when C(n+1) = 0 (unsupported residue)
  double target = 0;      // 1/r
  double count_ratio = 0; // C(n+1)/C(n), exact
  double min_ratio = 0, max_ratio = 0;
  double min_rel_err = 0, max_rel_err = 0;
  double min_ratio_se = 0, max_ratio_se = 0;
};

struct JvzInputs {
  int n = 0, k = 0;
  double count_ratio = 0;  // C(n+1)/C(n)
  bool supported = true;
  // Monte Carlo fractions of compositions with > k copies of the
  // minimal/maximal part, at n and n+1, with standard errors.
  double frac_min_n = 0, frac_min_n1 = 0, se_min_n = 0, se_min_n1 = 0;
  double frac_max_n = 0, frac_max_n1 = 0, se_max_n = 0, se_max_n1 = 0;
};

JvzReport jvz_ratios(const JvzInputs& in, double r);

}  // namespace lrc
