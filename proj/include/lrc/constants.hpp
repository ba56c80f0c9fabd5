#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lrc/enumerate.hpp"
#include "lrc/restriction.hpp"

namespace lrc {

// Estimates of r and A from the exact count tail. Ratios C(n)/C(n+d) over
// the supported residue class, one Aitken step for the geometric error term.
struct GrowthEstimate {
  double r = 0;
  double A = 0;
  int stride = 1;            // counts supported on one class mod stride
  double r_uncertainty = 0;  // |last two accelerated estimates|
  std::vector<double> ratios;            // raw ratio estimates (tail)
  std::vector<double> ratios_accelerated;
  std::vector<double> ratio_diff_decay;  // successive-difference ratios
  std::vector<double> A_sequence;
};

GrowthEstimate estimate_r_A(const CountTable& counts, int tail_window = 40);

struct SpectralOptions {
  double x_tol = 1e-10;
  double eig_tol = 1e-12;
  long max_iterations = 100000;
  std::uint64_t max_apply_cost = 20'000'000;  // m * K^(p+1) per matrix apply
};

// Root of (spectral radius of the truncated transfer operator) = 1, solved
// by bisection with power iteration; run at cap and 2*cap.
struct SpectralResult {
  double x_star = 0;        // at the larger cap
  double x_star_small = 0;  // at the requested cap
  int cap = 0;
  double truncation_certificate = 0;  // |x*_K - x*_2K|
  std::vector<std::pair<double, double>> probes;  // (x, spectral radius), larger cap
};

SpectralResult spectral_r(const RestrictionSpec& spec, int cap,
                          const SpectralOptions& opts = {});

struct MomentFitOptions {
  int k_lo = 12;
  int k_hi = 18;
  double stability_bound = 0.05;  // relative spread of u_k r^-k over the window
};

// B from the tail window of u_k r^-k, C = B * (parts-per-n slope). u_k come
// from successive differences of E(X_k) at the two largest supported n, which
// cancels the O(1/n) bias of the plain ratio.
struct BCEstimate {
  double B = 0;
  double C = 0;
  double parts_per_n = 0;
  std::map<Part, double> u_k;        // slope-based (used for the fit)
  std::map<Part, double> u_k_at_n;   // plain ratio at the fit n (diagnostic)
  double tail_spread = 0;
  bool low_confidence = false;
  int k_lo = 0, k_hi = 0;
  int fit_n = 0;
};

BCEstimate estimate_B_C(const RestrictionSpec& spec, const MomentTable& moments,
                        double r, const MomentFitOptions& opts = {});

struct AeqCReport {
  bool applicable = false;  // the family declares the splice condition
  double A = 0, C = 0, delta = 0, tolerance = 0;
  bool pass = false;
};

AeqCReport check_A_equals_C(const RestrictionSpec& spec,
                            const GrowthEstimate& growth, const BCEstimate& bc,
                            double tolerance = 0.01);

struct ConstantEstimates {
  double r = 0, A = 0, B = 0, C = 0;
  std::map<Part, double> u_k;
  GrowthEstimate growth;
  BCEstimate bc;
  std::optional<SpectralResult> spectral;
};

nlohmann::json constants_to_json(const ConstantEstimates& est);

}  // namespace lrc
