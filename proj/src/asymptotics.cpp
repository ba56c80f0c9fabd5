#include "lrc/asymptotics.hpp"

#include <algorithm>
#include <cmath>

namespace lrc {
namespace {

// Lanczos approximation, g = 607/128, 15 terms.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr double kLanczos[15] = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4,
    0.15808870322491248884e-3,  -0.21026444172410488319e-3,
    0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4,
    0.36899182659531622704e-5};

constexpr double kTwoPi = 6.283185307179586476925;

std::complex<double> lanczos_positive(std::complex<double> z) {
  // valid for Re z >= 0.5; callers reflect otherwise
  z -= 1.0;
  std::complex<double> x = kLanczos[0];
  for (int i = 1; i < 15; ++i) x += kLanczos[i] / (z + double(i));
  const std::complex<double> t = z + (kLanczosG + 0.5);
  return std::sqrt(kTwoPi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

// |Gamma(k + iy)| <= bound(k, y): Stirling modulus with exp(-pi y / 2)
// decay along vertical lines, times a generous safety factor.
double gamma_tail_bound(double k, double y) {
  if (y <= 1.0) return std::tgamma(std::max(k, 1.0));
  const double mod = std::hypot(k, y);
  const double logb =
      0.5 * std::log(kTwoPi) + (k - 0.5) * std::log(mod) - M_PI * y / 2.0;
  return 4.0 * std::exp(logb);
}

}  // namespace

std::complex<double> gamma_complex(std::complex<double> z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 &&
      z.real() == std::floor(z.real()))
    throw validation_error("gamma pole at a nonpositive integer");
  if (z.real() < 0.5) {
    // reflection; sin does not vanish because poles were rejected above
    const std::complex<double> s = std::sin(M_PI * z);
    return M_PI / (s * lanczos_positive(1.0 - z));
  }
  return lanczos_positive(z);
}

double oscillation(double x, int k, const AsymptoticModel& model) {
  if (!(x > 0)) throw validation_error("oscillation needs x > 0");
  if (k < 0) throw validation_error("oscillation needs k >= 0");
  const double loge = model.log_e();
  const double theta = kTwoPi * model.log_base(x);  // phase advance per ell
  double sum = 0.0;
  int ell = 1;
  const int hard_cap = 512;
  while (ell <= hard_cap) {
    const double y = kTwoPi * ell * loge;
    const std::complex<double> term =
        gamma_complex({double(k), y}) *
        std::exp(std::complex<double>(0.0, -theta * ell));
    sum += 2.0 * term.real();  // the -ell term is the conjugate
    ++ell;
    if (ell > model.ell_max) {
      const double next = 2.0 * loge *
                          gamma_tail_bound(k, kTwoPi * ell * loge);
      if (next < 1e-15) break;
    }
  }
  return loge * sum;
}

double expected_max(double n, const AsymptoticModel& model) {
  if (!(n >= 1)) throw validation_error("expected_max needs n >= 1");
  const double x = model.C * n / (1.0 - model.r);
  return model.log_base(x) + kEulerGamma * model.log_e() - 0.5 +
         oscillation(x, 0, model);
}

double expected_distinct(double n, const AsymptoticModel& model) {
  if (!(n >= 1)) throw validation_error("expected_distinct needs n >= 1");
  const double x = model.C * n;
  return model.log_base(x) + kEulerGamma * model.log_e() - 0.5 +
         oscillation(x, 0, model) - model.nu;
}

double qnk(double n, int k, const AsymptoticModel& model) {
  if (k < 1) throw validation_error("qnk needs k >= 1");
  const double r = model.r;
  const double cn = model.C * n;
  double value = std::exp(-cn * std::pow(r, k + 1) / (1.0 - r));
  for (int j = 1; j <= k; ++j) value *= 1.0 - std::exp(-cn * std::pow(r, j));
  return value;
}

std::vector<double> pm_sequence(double r, int m_max) {
  if (!(r > 0 && r < 1)) throw validation_error("pm_sequence needs r in (0,1)");
  std::vector<double> p(m_max + 1, 0.0);
  p[0] = 1.0;
  const double lr = std::log(r), l1r = std::log1p(-r);
  for (int m = 1; m <= m_max; ++m) {
    const double mu = m * r;
    const double sd = std::sqrt(m * r * (1.0 - r));
    const int klo = std::max(0, int(mu - 10.0 * sd - 2.0));
    const int khi = std::min(m - 1, int(mu + 10.0 * sd + 2.0));
    // anchor the binomial weight once, then advance by running products
    double logw = std::lgamma(m + 1.0) - std::lgamma(klo + 1.0) -
                  std::lgamma(m - klo + 1.0) + klo * lr + (m - klo) * l1r;
    double w = std::exp(logw);
    double acc = 0.0;
    for (int k = klo; k <= khi; ++k) {
      acc += p[k] * w;
      w *= (double(m - k) / double(k + 1)) * (r / (1.0 - r));
    }
    p[m] = acc;
  }
  return p;
}

double gnk(double n, int k, const AsymptoticModel& model) {
  if (k < 1) throw validation_error("gnk needs k >= 1");
  const double x = model.C * n / (1.0 - model.r);
  const double pk = std::pow(1.0 - model.r, k);
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;
  return pk / kfact * oscillation(x, k, model) + pk * model.log_e() / k;
}

double expected_dnk(double n, int k, const AsymptoticModel& model) {
  if (k < 1) throw validation_error("expected_dnk needs k >= 1");
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;
  return oscillation(model.C * n, k, model) / kfact + model.log_e() / k;
}

double mnk(double n, int k, const AsymptoticModel& model) {
  return expected_dnk(n, k, model) / model.log_base(n);
}

JvzReport jvz_ratios(const JvzInputs& in, double r) {
  JvzReport rep;
  rep.k = in.k;
  rep.n = in.n;
  rep.supported = in.supported;
  rep.target = 1.0 / r;
  rep.count_ratio = in.count_ratio;
  if (!in.supported) return rep;
  rep.min_ratio = in.count_ratio * in.frac_min_n1 / in.frac_min_n;
  rep.max_ratio = in.count_ratio * in.frac_max_n1 / in.frac_max_n;
  rep.min_rel_err = std::abs(rep.min_ratio - rep.target) / rep.target;
  rep.max_rel_err = std::abs(rep.max_ratio - rep.target) / rep.target;
  auto ratio_se = [&](double f1, double se1, double f0, double se0,
                      double ratio) {
    return ratio * std::hypot(se1 / f1, se0 / f0);
  };
  rep.min_ratio_se = ratio_se(in.frac_min_n1, in.se_min_n1, in.frac_min_n,
                              in.se_min_n, rep.min_ratio);
  rep.max_ratio_se = ratio_se(in.frac_max_n1, in.se_max_n1, in.frac_max_n,
                              in.se_max_n, rep.max_ratio);
  return rep;
}

}  // namespace lrc
