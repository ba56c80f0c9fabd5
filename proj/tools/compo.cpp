// compo: exact counting, constant estimation, uniform sampling and
// asymptotic-formula evaluation for locally restricted compositions.

#include <unistd.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lrc/driver.hpp"
#include "lrc/rng.hpp"

using nlohmann::json;

namespace {

struct CommonArgs {
  std::string family;
  std::string spec_file;
  std::string format;  // "", table, csv, json
  std::string out;
  lrc::Budget budget;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool need_family = true) {
  auto* fam = cmd->add_option("--family", a.family,
                              "built-in family (unrestricted, carlitz, "
                              "diffset011, weak-alternating, strict-alternating)");
  auto* file =
      cmd->add_option("--spec-file", a.spec_file, "restriction spec JSON file");
  if (need_family) {
    fam->excludes(file);
    file->excludes(fam);
  }
  cmd->add_option("--format", a.format, "table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  cmd->add_option("--out", a.out, "write output to a file instead of stdout");
  cmd->add_option("--budget-states", a.budget.max_states,
                  "DP state budget (m*n^p)");
}

lrc::RestrictionSpec resolve_spec(const CommonArgs& a) {
  if (!a.spec_file.empty()) {
    std::ifstream in(a.spec_file);
    if (!in) throw lrc::validation_error("cannot open " + a.spec_file);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw lrc::validation_error(a.spec_file + ": " + e.what());
    }
    return lrc::spec_from_json(doc);
  }
  if (a.family.empty())
    throw lrc::validation_error("one of --family / --spec-file is required");
  return lrc::builtin_spec(a.family);
}

std::string default_format(const CommonArgs& a) {
  if (!a.format.empty()) return a.format;
  return isatty(fileno(stdout)) ? "table" : "json";
}

void emit(const CommonArgs& a, const std::string& text) {
  if (a.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    std::ofstream out(a.out);
    if (!out) throw lrc::validation_error("cannot write " + a.out);
    out << text;
  }
}

int parse_int(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw lrc::validation_error(std::string("bad integer in ") + what + ": " + s);
  }
}

lrc::Variant parse_variant(const std::string& s) {
  if (s.empty() || s == "plain") return lrc::Variant::plain();
  if (s.rfind("cap:", 0) == 0)
    return lrc::Variant::cap(parse_int(s.substr(4), "--variant"));
  if (s.rfind("avoid:", 0) == 0)
    return lrc::Variant::avoid(parse_int(s.substr(6), "--variant"));
  throw lrc::validation_error("bad --variant (plain, cap:K, avoid:J): " + s);
}

void parse_jwindow(const std::string& s, int& lo, int& hi) {
  const auto colon = s.find(':');
  if (colon == std::string::npos)
    throw lrc::validation_error("--jwindow expects lo:hi");
  lo = parse_int(s.substr(0, colon), "--jwindow");
  hi = parse_int(s.substr(colon + 1), "--jwindow");
  if (lo < 1 || hi < lo) throw lrc::validation_error("--jwindow out of order");
}

std::string fixed(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

int run_count(const CommonArgs& a, int nmax, const std::string& variant_str) {
  const auto spec = resolve_spec(a);
  const auto variant = parse_variant(variant_str);
  const auto table = lrc::count(spec, nmax, variant, a.budget);
  const std::string fmt = default_format(a);
  if (fmt == "csv") {
    emit(a, lrc::count_table_csv(table));
  } else if (fmt == "json") {
    emit(a, lrc::count_table_json(table).dump(2));
  } else {
    std::ostringstream os;
    os << "# " << spec.family() << " counts, variant " << variant.name()
       << "\n";
    for (int n = 0; n <= nmax; ++n)
      os << n << ", " << lrc::to_decimal(table.at(n)) << "\n";
    emit(a, os.str());
  }
  return 0;
}

int run_constants(const CommonArgs& a, int nmax, int moments_n, int cap,
                  bool no_spectral, const lrc::MomentFitOptions& fit) {
  const auto spec = resolve_spec(a);
  const auto est = lrc::estimate_constants(spec, nmax, moments_n, cap, fit,
                                           a.budget, !no_spectral);
  const std::string fmt = default_format(a);
  if (fmt == "json" || fmt == "csv") {
    emit(a, lrc::constants_to_json(est).dump(2));
    return 0;
  }
  std::ostringstream os;
  os << "family            " << spec.family() << "\n";
  os << "r                 " << fixed(est.r, 10);
  if (est.spectral)
    os << "   (spectral " << fixed(est.spectral->x_star, 10) << ", cap "
       << est.spectral->cap << ", cert "
       << fixed(est.spectral->truncation_certificate, 10) << ")";
  os << "\n";
  os << "A                 " << fixed(est.A, 10) << "\n";
  os << "B                 " << fixed(est.B, 10) << "\n";
  os << "C                 " << fixed(est.C, 10)
     << (est.bc.low_confidence ? "   [low confidence]" : "") << "\n";
  os << "parts per n       " << fixed(est.bc.parts_per_n, 10) << "\n";
  os << "r uncertainty     " << est.growth.r_uncertainty << "\n";
  const auto aeqc = lrc::check_A_equals_C(spec, est.growth, est.bc);
  if (aeqc.applicable)
    os << "|A - C|           " << fixed(aeqc.delta, 8) << "  ("
       << (aeqc.pass ? "consistent" : "DISAGREES") << ")\n";
  else
    os << "|A - C|           skipped (splice condition not declared)\n";
  os << "u_k (k, value):\n";
  for (const auto& [k, u] : est.u_k)
    os << "  " << k << "  " << fixed(u, 10) << "\n";
  emit(a, os.str());
  return 0;
}

int run_sample(const CommonArgs& a, int n, std::uint64_t trials,
               std::uint64_t seed, int kmax, const std::string& jwindow,
               bool validate) {
  const auto spec = resolve_spec(a);
  const auto table = lrc::SamplerTable::build(spec, n, a.budget);
  int jlo = 0, jhi = -1;
  if (!jwindow.empty()) parse_jwindow(jwindow, jlo, jhi);
  lrc::StatOptions opts;
  opts.validate_samples = validate;
  const auto stats = lrc::collect_stats(table, trials, kmax, jlo, jhi, seed, opts);
  const std::string fmt = default_format(a);
  if (fmt == "csv")
    emit(a, lrc::stats_to_csv(stats));
  else if (fmt == "json")
    emit(a, lrc::stats_to_json(stats).dump(2));
  else {
    std::ostringstream os;
    os << "family        " << spec.family() << "  n " << n << "  trials "
       << trials << "  seed " << seed << "\n";
    os << "E(M_n)        " << fixed(stats.mean_max()) << " +- "
       << fixed(stats.se_max()) << "\n";
    os << "E(D_n)        " << fixed(stats.mean_distinct()) << " +- "
       << fixed(stats.se_distinct()) << "\n";
    os << "gap-free      " << fixed(stats.q_hat()) << " +- "
       << fixed(stats.q_hat_se()) << "\n";
    for (int k = 1; k <= kmax; ++k)
      os << "g_n(" << k << ")        " << fixed(stats.gnk_hat(k)) << "\n";
    emit(a, os.str());
  }
  return 0;
}

int run_asym_pm(const CommonArgs& a, double r, int m, bool all) {
  const auto p = lrc::pm_sequence(r, m);
  const std::string fmt = default_format(a);
  if (all) {
    std::ostringstream os;
    if (fmt == "json") {
      emit(a, json(p).dump(2));
    } else {
      os << "m,p_m\n";
      for (std::size_t i = 0; i < p.size(); ++i) os << i << ',' << p[i] << "\n";
      emit(a, os.str());
    }
  } else {
    emit(a, fixed(p.back(), 8));
  }
  return 0;
}

int run_asym_eval(const CommonArgs& a, double r, double C, int nu, int n,
                  int kmax, int ellmax) {
  if (!(r > 0 && r < 1)) throw lrc::validation_error("--r must be in (0,1)");
  if (!(C > 0)) throw lrc::validation_error("--C must be positive");
  lrc::AsymptoticModel model{r, C, nu, ellmax};
  json doc;
  doc["n"] = n;
  doc["r"] = r;
  doc["C"] = C;
  doc["asymptotic_regime_reached"] = model.asymptotic_regime(n);
  doc["expected_max"] = lrc::expected_max(n, model);
  doc["expected_distinct"] = lrc::expected_distinct(n, model);
  const int m = int(std::floor(C * n / (1 - r)));
  doc["m"] = m;
  doc["p_m"] = lrc::pm_sequence(r, std::max(1, m)).back();
  json qn = json::array(), gn = json::array(), dn = json::array();
  double qsum = 0;
  for (int k = 1; k <= n; ++k) {
    const double q = lrc::qnk(n, k, model);
    qsum += q;
    if (q > 1e-12) qn.push_back({{"k", k}, {"q_nk", q}});
    if (k > 5 && q < 1e-14) break;
  }
  doc["qnk_sum"] = qsum;
  doc["qnk"] = qn;
  for (int k = 1; k <= kmax; ++k) {
    gn.push_back({{"k", k}, {"g_nk", lrc::gnk(n, k, model)}});
    dn.push_back({{"k", k},
                  {"E_Dnk", lrc::expected_dnk(n, k, model)},
                  {"m_nk", lrc::mnk(n, k, model)}});
  }
  doc["gnk"] = gn;
  doc["dnk"] = dn;
  const std::string fmt = default_format(a);
  if (fmt == "table") {
    std::ostringstream os;
    os << "n " << n << "  r " << fixed(r, 8) << "  C " << fixed(C, 8) << "\n";
    os << "E(M_n)   " << fixed(doc["expected_max"].get<double>()) << "\n";
    os << "E(D_n)   " << fixed(doc["expected_distinct"].get<double>()) << "\n";
    os << "q_n      " << fixed(qsum) << "  (p_m " << fixed(doc["p_m"].get<double>())
       << " at m " << m << ")\n";
    for (const auto& e : gn)
      os << "g_n(" << e["k"] << ")   " << fixed(e["g_nk"].get<double>()) << "\n";
    for (const auto& e : dn)
      os << "E(D_n(" << e["k"] << ")) " << fixed(e["E_Dnk"].get<double>())
         << "\n";
    emit(a, os.str());
  } else {
    emit(a, doc.dump(2));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "compo: exact enumeration, uniform sampling, constant estimation and "
      "asymptotics for locally restricted integer compositions"};
  app.require_subcommand(1);

  // count
  CommonArgs count_args;
  int count_nmax = 40;
  std::string count_variant;
  auto* cmd_count = app.add_subcommand("count", "exact counts C(0..nmax)");
  add_common(cmd_count, count_args);
  cmd_count->add_option("--nmax", count_nmax, "largest n")->required();
  cmd_count->add_option("--variant", count_variant,
                        "plain (default), cap:K or avoid:J");

  // constants
  CommonArgs const_args;
  int const_nmax = 200, const_moments_n = 0, const_cap = 40;
  bool const_no_spectral = false;
  lrc::MomentFitOptions fit;
  auto* cmd_const =
      app.add_subcommand("constants", "estimate r, A, B, C from exact tables");
  add_common(cmd_const, const_args);
  cmd_const->add_option("--nmax", const_nmax, "count tail for the r fit");
  cmd_const->add_option("--moments-n", const_moments_n,
                        "moment table size (default: nmax)");
  cmd_const->add_option("--cap", const_cap,
                        "transfer-operator truncation cap (0: skip)");
  cmd_const->add_flag("--no-spectral", const_no_spectral,
                      "skip the spectral cross-check of r");
  cmd_const->add_option("--fit-lo", fit.k_lo, "B fit window lower k");
  cmd_const->add_option("--fit-hi", fit.k_hi, "B fit window upper k");

  // sample
  CommonArgs sample_args;
  int sample_n = 200, sample_kmax = 5;
  std::uint64_t sample_trials = 10000, sample_seed = 1;
  std::string sample_jwindow;
  bool sample_validate = false;
  auto* cmd_sample =
      app.add_subcommand("sample", "uniform sampling and empirical statistics");
  add_common(cmd_sample, sample_args);
  cmd_sample->add_option("--n", sample_n, "composition size")->required();
  cmd_sample->add_option("--trials", sample_trials, "number of samples");
  cmd_sample->add_option("--seed", sample_seed, "RNG seed (stream-split per trial)");
  cmd_sample->add_option("--kmax", sample_kmax, "track multiplicities up to k");
  cmd_sample->add_option("--jwindow", sample_jwindow,
                         "part-count window lo:hi for zeta statistics");
  cmd_sample->add_flag("--validate", sample_validate,
                       "re-check every sample against the restriction");

  // asymptotics
  auto* cmd_asym = app.add_subcommand("asymptotics", "closed-form evaluators");
  cmd_asym->require_subcommand(1);
  CommonArgs pm_args;
  double pm_r = 0.5;
  int pm_m = 100;
  bool pm_all = false;
  auto* cmd_pm = cmd_asym->add_subcommand("pm", "gap-free limit p_m");
  add_common(cmd_pm, pm_args, false);
  cmd_pm->add_option("--r", pm_r, "geometric ratio r in (0,1)")->required();
  cmd_pm->add_option("--m", pm_m, "index m")->required();
  cmd_pm->add_flag("--all", pm_all, "emit the whole sequence p_0..p_m");

  CommonArgs eval_args;
  double eval_r = 0, eval_C = 0;
  int eval_nu = 0, eval_n = 500, eval_kmax = 5, eval_ellmax = 8;
  auto* cmd_eval = cmd_asym->add_subcommand(
      "eval", "evaluate the large-part formulas at given r, C");
  add_common(cmd_eval, eval_args, false);
  cmd_eval->add_option("--r", eval_r, "growth ratio r")->required();
  cmd_eval->add_option("--C", eval_C, "Poisson intensity constant")->required();
  cmd_eval->add_option("--nu", eval_nu, "number of nonrecurrent parts");
  cmd_eval->add_option("--n", eval_n, "composition size");
  cmd_eval->add_option("--kmax", eval_kmax, "multiplicities up to k");
  cmd_eval->add_option("--ellmax", eval_ellmax, "oscillation series order");

  // compare
  CommonArgs cmp_args;
  lrc::RunOptions cmp_opt;
  std::string cmp_jwindow;
  auto* cmd_cmp = app.add_subcommand(
      "compare", "exact vs sampled vs asymptotic statistics at one n");
  add_common(cmd_cmp, cmp_args);
  cmd_cmp->add_option("--n", cmp_opt.n, "composition size")->required();
  cmd_cmp->add_option("--nmax", cmp_opt.n_max, "count tail for the r fit");
  cmd_cmp->add_option("--moments-n", cmp_opt.moments_n, "moment table size");
  cmd_cmp->add_option("--trials", cmp_opt.trials, "Monte Carlo trials");
  cmd_cmp->add_option("--seed", cmp_opt.seed, "RNG seed");
  cmd_cmp->add_option("--kmax", cmp_opt.k_max, "multiplicities up to k");
  cmd_cmp->add_option("--jwindow", cmp_jwindow, "zeta window lo:hi");
  cmd_cmp->add_option("--ellmax", cmp_opt.ell_max, "oscillation series order");
  cmd_cmp->add_option("--cap", cmp_opt.spectral_cap, "spectral cap (0: skip)");

  // report
  CommonArgs rep_args;
  lrc::RunOptions rep_opt;
  std::string rep_jwindow;
  auto* cmd_rep = app.add_subcommand(
      "report", "bundle counts, constants, freeness probe, samples and "
                "comparisons into one JSON document");
  add_common(cmd_rep, rep_args);
  cmd_rep->add_option("--n", rep_opt.n, "composition size")->required();
  cmd_rep->add_option("--nmax", rep_opt.n_max, "count tail");
  cmd_rep->add_option("--moments-n", rep_opt.moments_n, "moment table size");
  cmd_rep->add_option("--trials", rep_opt.trials, "Monte Carlo trials");
  cmd_rep->add_option("--seed", rep_opt.seed, "RNG seed");
  cmd_rep->add_option("--kmax", rep_opt.k_max, "multiplicities up to k");
  cmd_rep->add_option("--jwindow", rep_jwindow, "zeta window lo:hi");
  cmd_rep->add_option("--freeness-probe", rep_opt.freeness_probe,
                      "bound for the freeness probe (0: skip)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", "validation"}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  }

  try {
    if (cmd_count->parsed())
      return run_count(count_args, count_nmax, count_variant);
    if (cmd_const->parsed())
      return run_constants(const_args, const_nmax, const_moments_n, const_cap,
                           const_no_spectral, fit);
    if (cmd_sample->parsed())
      return run_sample(sample_args, sample_n, sample_trials, sample_seed,
                        sample_kmax, sample_jwindow, sample_validate);
    if (cmd_pm->parsed()) return run_asym_pm(pm_args, pm_r, pm_m, pm_all);
    if (cmd_eval->parsed())
      return run_asym_eval(eval_args, eval_r, eval_C, eval_nu, eval_n,
                           eval_kmax, eval_ellmax);
    if (cmd_cmp->parsed()) {
      if (!cmp_jwindow.empty())
        parse_jwindow(cmp_jwindow, cmp_opt.j_lo, cmp_opt.j_hi);
      cmp_opt.budget = cmp_args.budget;
      const auto spec = resolve_spec(cmp_args);
      emit(cmp_args, lrc::compare_report(spec, cmp_opt).dump(2));
      return 0;
    }
    if (cmd_rep->parsed()) {
      if (!rep_jwindow.empty())
        parse_jwindow(rep_jwindow, rep_opt.j_lo, rep_opt.j_hi);
      rep_opt.budget = rep_args.budget;
      const auto spec = resolve_spec(rep_args);
      emit(rep_args, lrc::full_report(spec, rep_opt).dump(2));
      return 0;
    }
  } catch (const lrc::budget_error& e) {
    std::cerr << json{{"error", "budget"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const lrc::convergence_error& e) {
    std::cerr << json{{"error", "convergence"}, {"message", e.what()}}.dump()
              << "\n";
    return 3;
  } catch (const lrc::validation_error& e) {
    std::cerr << json{{"error", "validation"}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  }
  return 0;
}
