#include "lrc/constants.hpp"

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lrc {
namespace {

// One Aitken delta-squared step; entries where the second difference
// vanishes pass through unchanged (already converged).
std::vector<double> aitken(const std::vector<double>& s) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 2 < s.size(); ++i) {
    const double d1 = s[i + 1] - s[i];
    const double d2 = s[i + 2] - s[i + 1];
    const double den = d2 - d1;
    if (std::abs(den) < 1e-15 * std::max(1.0, std::abs(s[i + 2])))
      out.push_back(s[i + 2]);
    else
      out.push_back(s[i + 2] - d2 * d2 / den);
  }
  if (out.empty()) out = s;
  return out;
}

}  // namespace

GrowthEstimate estimate_r_A(const CountTable& counts, int tail_window) {
  const int nmax = counts.n_max;
  std::vector<int> support;
  for (int n = 1; n <= nmax; ++n)
    if (counts.at(n) > 0) support.push_back(n);
  if (support.size() < 6)
    throw convergence_error("too few nonzero counts to estimate r");

  // Periodic classes put the counts on a residue class; fit on it.
  int stride = 0;
  for (std::size_t i = support.size() / 2; i + 1 < support.size(); ++i)
    stride = std::gcd(stride, support[i + 1] - support[i]);
  if (stride == 0) stride = 1;

  std::vector<int> tail;
  for (int n = support.back(); n >= 1 && static_cast<int>(tail.size()) <
                                              tail_window + 2 * stride;
       n -= stride) {
    if (counts.at(n) == 0) break;  // leading zeros before the class settles
    tail.push_back(n);
  }
  std::reverse(tail.begin(), tail.end());
  if (tail.size() < 6)
    throw convergence_error(
        "fit window too short for r estimation; counts are zero or not "
        "supported on an arithmetic progression");

  GrowthEstimate est;
  est.stride = stride;
  for (std::size_t i = 0; i + 1 < tail.size(); ++i) {
    const double ratio =
        ratio_as_double(counts.at(tail[i]), counts.at(tail[i + 1]));
    est.ratios.push_back(stride == 1 ? ratio
                                     : std::pow(ratio, 1.0 / stride));
  }
  est.ratios_accelerated = aitken(est.ratios);
  est.r = est.ratios_accelerated.back();
  if (!(est.r > 0 && est.r < 1))
    throw convergence_error("ratio estimate for r left (0,1)");
  const auto& acc = est.ratios_accelerated;
  est.r_uncertainty =
      acc.size() >= 2 ? std::abs(acc.back() - acc[acc.size() - 2]) : 0.0;

  for (std::size_t i = 0; i + 2 < est.ratios.size(); ++i) {
    const double d1 = est.ratios[i + 1] - est.ratios[i];
    const double d2 = est.ratios[i + 2] - est.ratios[i + 1];
    if (std::abs(d1) > 0) est.ratio_diff_decay.push_back(std::abs(d2 / d1));
  }

  const double ln_r = std::log(est.r);
  const std::size_t a_lo = tail.size() > 12 ? tail.size() - 12 : 0;
  for (std::size_t i = a_lo; i < tail.size(); ++i)
    est.A_sequence.push_back(
        std::exp(log_bigint(counts.at(tail[i])) + tail[i] * ln_r));
  est.A = aitken(est.A_sequence).back();
  return est;
}

namespace {

// Transfer operator truncated at parts <= K, realised as the product of
// single-part steps over one residue period. A step maps weights on
// p-part windows; applying it costs O(m K^(p+1)).
class TransferOperator {
 public:
  TransferOperator(const RestrictionSpec& spec, int K) : K_(K) {
    m_ = spec.modulus();
    p_ = spec.span();
    dim_ = 1;
    for (int i = 0; i < p_; ++i) dim_ *= K;
    stride_ = dim_ / K;  // advance: s' = (v-1) + (s % stride_) * K ... see below
    // adjacency cache per residue: bit (s * K + v - 1)
    allowed_.assign(m_, std::vector<char>(static_cast<std::size_t>(dim_) * K));
    std::vector<Part> win(p_);
    for (int rho = 0; rho < m_; ++rho)
      for (long s = 0; s < dim_; ++s) {
        decode(s, win);
        for (Part v = 1; v <= K; ++v)
          allowed_[rho][s * K + v - 1] = spec.allows(rho, v, win);
      }
    xpow_.resize(K + 1);
  }

  long dim() const { return dim_; }

  void set_x(double x) {
    for (Part v = 1; v <= K_; ++v) xpow_[v] = std::pow(x, v);
  }

  // one full residue period
  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out,
             Eigen::VectorXd& tmp) const {
    tmp = in;
    for (int step = 0; step < m_; ++step) {
      const int rho = (1 + step) % m_;  // phase rotation does not move the radius
      out.setZero();
      const auto& adj = allowed_[rho];
      for (long s = 0; s < dim_; ++s) {
        const double c = tmp[s];
        if (c == 0) continue;
        const long base = s * K_;
        const long shifted = (s % stride_) * K_;
        for (Part v = 1; v <= K_; ++v)
          if (adj[base + v - 1]) out[shifted + v - 1] += xpow_[v] * c;
      }
      if (step + 1 < m_) tmp.swap(out);
    }
  }

 private:
  void decode(long s, std::vector<Part>& win) const {
    for (int i = 0; i < p_; ++i) {
      win[i] = static_cast<Part>(s % K_) + 1;
      s /= K_;
    }
  }

  int K_, m_, p_;
  long dim_, stride_;
  std::vector<std::vector<char>> allowed_;
  std::vector<double> xpow_;
};

}  // namespace

SpectralResult spectral_r(const RestrictionSpec& spec, int cap,
                          const SpectralOptions& opts) {
  if (cap < 2) throw validation_error("spectral cap must be at least 2");
  auto radius_root = [&](int K, std::vector<std::pair<double, double>>* probes)
      -> double {
    double cost = static_cast<double>(spec.modulus());
    for (int i = 0; i <= spec.span(); ++i) cost *= K;
    if (cost > static_cast<double>(opts.max_apply_cost))
      throw budget_error(
          "transfer operator apply cost m*K^(p+1) exceeds the budget");
    TransferOperator T(spec, K);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(T.dim());
    Eigen::VectorXd w(T.dim()), tmp(T.dim());
    // spectral radius of the period product, shifted by +1 to damp
    // oscillation on reducible or periodic truncations
    auto radius = [&](double x) -> double {
      T.set_x(x);
      double lam = 0;
      if (v.maxCoeff() <= 0) v.setOnes();
      for (long it = 0; it < opts.max_iterations; ++it) {
        T.apply(v, w, tmp);
        w += v;  // shift
        const double norm = w.maxCoeff();
        if (norm <= 0) return 0.0;  // no cycles below this cap
        w /= norm;
        const double lam_new = norm - 1.0;
        const double change = std::abs(lam_new - lam);
        v = w;
        lam = lam_new;
        if (it > 8 && change < opts.eig_tol * std::max(1.0, lam)) return lam;
        // bisection only needs the side of 1; exit once that is certain
        if (it > 32 && std::abs(lam_new - 1.0) > 1000 * change) return lam;
      }
      throw convergence_error(
          "power iteration did not converge; enlarge the cap");
    };
    double lo = 1e-6, hi = 1.0 - 1e-9;
    if (radius(hi) < 1.0)
      throw convergence_error(
          "spectral radius stays below 1 up to x=1; cap too small");
    std::vector<std::pair<double, double>> seen;
    while (hi - lo > opts.x_tol) {
      const double mid = 0.5 * (lo + hi);
      const double lam = radius(mid);
      seen.emplace_back(mid, lam);
      if (lam < 1.0)
        lo = mid;
      else
        hi = mid;
    }
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 0; i + 1 < seen.size(); ++i)
      if (seen[i + 1].second < seen[i].second - 1e-7)
        throw convergence_error(
            "spectral radius was not monotone across bisection probes");
    if (probes) *probes = std::move(seen);
    return 0.5 * (lo + hi);
  };

  SpectralResult res;
  res.cap = 2 * cap;
  res.x_star_small = radius_root(cap, nullptr);
  res.x_star = radius_root(2 * cap, &res.probes);
  res.truncation_certificate = std::abs(res.x_star - res.x_star_small);
  return res;
}

BCEstimate estimate_B_C(const RestrictionSpec& spec, const MomentTable& moments,
                        double r, const MomentFitOptions& opts) {
  if (!(r > 0 && r < 1)) throw validation_error("estimate_B_C needs r in (0,1)");
  // the two largest n with nonzero counts
  int n1 = -1, n0 = -1;
  for (int n = moments.n_max; n >= 1; --n) {
    if (moments.counts.at(n) == 0) continue;
    if (n1 < 0)
      n1 = n;
    else {
      n0 = n;
      break;
    }
  }
  if (n0 < 0) throw convergence_error("not enough nonzero counts for moments");

  BCEstimate est;
  est.fit_n = n1;
  const double e0_1 = moments.mean_parts(n1);
  const double e0_0 = moments.mean_parts(n0);
  est.parts_per_n = (e0_1 - e0_0) / (n1 - n0);

  for (Part k : moments.ks) {
    const double ek_1 = moments.mean_part_count(k, n1);
    const double ek_0 = moments.mean_part_count(k, n0);
    est.u_k[k] = (ek_1 - ek_0) / (e0_1 - e0_0);
    est.u_k_at_n[k] = ek_1 / e0_1;
  }

  est.k_lo = opts.k_lo;
  est.k_hi = opts.k_hi;
  std::vector<double> window;
  for (Part k = opts.k_lo; k <= opts.k_hi; ++k) {
    if (!spec.part_is_recurrent(k)) continue;  // the geometric tail law covers recurrent sizes
    auto it = est.u_k.find(k);
    if (it == est.u_k.end())
      throw validation_error(
          "moment table lacks part sizes covering the B fit window");
    // sizes that never occur (periodic support) say nothing about the tail law
    if (it->second <= 0) continue;
    window.push_back(it->second * std::pow(r, -k));
  }
  if (window.empty())
    throw validation_error(
        "B fit window contains no occurring recurrent part sizes");
  est.B = std::accumulate(window.begin(), window.end(), 0.0) / window.size();
  const auto [mn, mx] = std::minmax_element(window.begin(), window.end());
  est.tail_spread = (*mx - *mn) / est.B;
  est.low_confidence =
      est.tail_spread > opts.stability_bound || n1 < 4 * opts.k_hi;
  est.C = est.B * est.parts_per_n;
  return est;
}

AeqCReport check_A_equals_C(const RestrictionSpec& spec,
                            const GrowthEstimate& growth, const BCEstimate& bc,
                            double tolerance) {
  AeqCReport rep;
  rep.applicable = spec.splice_declared();
  rep.A = growth.A;
  rep.C = bc.C;
  rep.delta = std::abs(growth.A - bc.C);
  rep.tolerance = tolerance;
  rep.pass = !rep.applicable || rep.delta < tolerance;
  return rep;
}

nlohmann::json constants_to_json(const ConstantEstimates& est) {
  nlohmann::json doc;
  doc["r"] = est.r;
  doc["A"] = est.A;
  doc["B"] = est.B;
  doc["C"] = est.C;
  nlohmann::json uk = nlohmann::json::object();
  for (const auto& [k, u] : est.u_k) uk[std::to_string(k)] = u;
  doc["u_k"] = uk;
  nlohmann::json diag;
  diag["r_ratios"] = est.growth.ratios;
  diag["r_ratios_accelerated"] = est.growth.ratios_accelerated;
  diag["r_uncertainty"] = est.growth.r_uncertainty;
  diag["ratio_diff_decay"] = est.growth.ratio_diff_decay;
  diag["A_sequence"] = est.growth.A_sequence;
  diag["stride"] = est.growth.stride;
  diag["parts_per_n"] = est.bc.parts_per_n;
  diag["u_k_plain_ratio"] = nlohmann::json::object();
  for (const auto& [k, u] : est.bc.u_k_at_n)
    diag["u_k_plain_ratio"][std::to_string(k)] = u;
  diag["B_window"] = {est.bc.k_lo, est.bc.k_hi};
  diag["B_tail_spread"] = est.bc.tail_spread;
  diag["B_low_confidence"] = est.bc.low_confidence;
  diag["fit_n"] = est.bc.fit_n;
  if (est.spectral) {
    diag["spectral_x"] = est.spectral->x_star;
    diag["spectral_cap"] = est.spectral->cap;
    diag["spectral_truncation_certificate"] =
        est.spectral->truncation_certificate;
  }
  doc["diagnostics"] = diag;
  return doc;
}

}  // namespace lrc
