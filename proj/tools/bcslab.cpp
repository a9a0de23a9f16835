// Command line front end: critical temperature, gap solves, randomized
// verification suites, kernel evaluations, BdG scaling sweeps, pair-field
// decomposition and lower-bound certificates. Structured results go to JSON
// (one file per run), profile dumps to CSV.
//
// Exit codes: 0 success, 1 numerical failure (non-convergence or a violated
// contract), 2 usage or schema error.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bcslab/bdg.hpp"
#include "bcslab/cert.hpp"
#include "bcslab/decomp.hpp"
#include "bcslab/entropy.hpp"
#include "bcslab/foundation.hpp"
#include "bcslab/kernels.hpp"
#include "bcslab/rng.hpp"
#include "bcslab/serialize.hpp"
#include "bcslab/tibcs.hpp"

using nlohmann::json;
using namespace bcslab;

namespace {

// Bound options of one subcommand, so a JSON config file can fill any value
// that was not given as a flag (flags win, with a warning).
class OptionTable {
 public:
  explicit OptionTable(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* add(const std::string& name, T& target, const std::string& desc) {
    CLI::Option* opt = app_->add_option("--" + name, target, desc);
    setters_[name] = [&target, opt](const json& v) {
      target = v.get<T>();
      (void)opt;
    };
    options_[name] = opt;
    return opt;
  }

  CLI::Option* add_flag(const std::string& name, bool& target, const std::string& desc) {
    CLI::Option* opt = app_->add_flag("--" + name, target, desc);
    setters_[name] = [&target](const json& v) { target = v.get<bool>(); };
    options_[name] = opt;
    return opt;
  }

  // Returns false (usage error) on unknown fields.
  bool apply_config(const json& cfg) {
    for (const auto& [key, value] : cfg.items()) {
      if (key == "command") continue;
      auto it = setters_.find(key);
      if (it == setters_.end()) {
        std::cerr << "config: unknown field \"" << key << "\"\n";
        return false;
      }
      if (options_[key]->count() > 0) {
        std::cerr << "config: --" << key << " also given on the command line; flag wins\n";
        continue;
      }
      try {
        it->second(value);
      } catch (const std::exception& e) {
        std::cerr << "config: bad value for \"" << key << "\": " << e.what() << "\n";
        return false;
      }
    }
    return true;
  }

 private:
  CLI::App* app_;
  std::map<std::string, std::function<void(const json&)>> setters_;
  std::map<std::string, CLI::Option*> options_;
};

void emit(const json& out, const std::string& path) {
  if (path.empty()) {
    std::cout << out.dump(2) << "\n";
    return;
  }
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot open output path " + path);
  os << out.dump(2) << "\n";
}

std::vector<double> parse_h_list(const std::string& csv) {
  std::vector<double> out;
  std::string token;
  std::istringstream is(csv);
  while (std::getline(is, token, ',')) {
    if (!token.empty()) out.push_back(std::stod(token));
  }
  if (out.empty()) throw InvalidArgument("empty h-list");
  return out;
}

struct ModelOptions {
  double depth = -5.0;
  double width = 1.0;
  double wdepth = 1.0;
  double wwidth = 1.0;
  double mu = 1.0;
  double pmax = 12.0;
  int nodes = 256;

  void add_to(OptionTable& t, bool with_w = true) {
    t.add("depth", depth, "interaction well depth");
    t.add("width", width, "interaction well width");
    if (with_w) {
      t.add("wdepth", wdepth, "external potential depth");
      t.add("wwidth", wwidth, "external potential width");
    }
    t.add("mu", mu, "chemical potential");
    t.add("pmax", pmax, "radial grid cutoff");
    t.add("nodes", nodes, "radial grid size");
  }

  foundation::Potential V() const { return foundation::Potential::gaussian(depth, width); }
  foundation::Potential W() const {
    return foundation::Potential::gaussian(wdepth, wwidth);
  }
  foundation::RadialGrid grid() const { return foundation::RadialGrid(pmax, nodes); }
};

double critical_temperature_auto(const foundation::Potential& V, double mu,
                                 const foundation::RadialGrid& grid, double tol) {
  const auto bracket = tibcs::find_tc_bracket(V, mu, grid, 0.1);
  if (!bracket) throw BracketError("no pairing: Tc = 0 (lowest eigenvalue nonnegative)");
  return tibcs::critical_temperature(V, mu, grid, *bracket, tol);
}

// --- verify suite helpers -------------------------------------------------

entropy::SuiteReport scalar_grid_suite() {
  entropy::SuiteReport rep;
  rep.inequality_id = "scalar_entropy_grid";
  rep.samples = 99 * 99;
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 99; ++i)
    for (int j = 1; j <= 99; ++j) {
      const double gap = entropy::scalar_entropy_inequality_gap(i / 100.0, j / 100.0);
      if (gap < rep.min_slack) {
        rep.min_slack = gap;
        rep.argmin_seed = static_cast<std::uint64_t>(100 * i + j);
      }
    }
  return rep;
}

decomp::PairField random_smooth_alpha(const foundation::BoxGrid& box,
                                      const decomp::BoxTransform& t, Rng& rng,
                                      double cutoff) {
  const int M = box.size();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(M, M);
  for (int p = 0; p < M; ++p)
    for (int q = 0; q < M; ++q)
      if (box.momentum_norm(p) <= cutoff && box.momentum_norm(q) <= cutoff)
        A(p, q) = rng.complex_normal();
  Eigen::MatrixXcd pos = t.matrix().adjoint() * A * t.matrix();
  Eigen::MatrixXcd sym = 0.5 * (pos + pos.transpose());
  return decomp::PairField(box, sym, true);
}

Eigen::VectorXcd random_smooth_psi(const foundation::BoxGrid& box, Rng& rng, int modes) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(box.size());
  for (int p = 1; p <= modes; ++p) {
    const std::complex<double> amp = 0.25 * rng.complex_normal() / (1.0 + p);
    for (int x = 0; x < box.size(); ++x)
      psi(x) += amp * std::polar(1.0, p * box.dk() * box.position(x)[0]);
  }
  return psi;
}

entropy::SuiteReport gradient_bound_suite(int samples, std::uint64_t seed) {
  foundation::BoxGrid box(2.0 * M_PI, 32, 1, 0.1);
  const decomp::BoxTransform t(box);
  foundation::RadialGrid grid(12.0, 96);
  foundation::RadialProfile a0(grid, [](double p) { return 0.8 * std::exp(-0.5 * p * p); });
  entropy::SuiteReport rep;
  rep.inequality_id = "gradient_bound";
  rep.samples = samples;
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::for_sample(seed, s);
    const decomp::PairField a = random_smooth_alpha(box, t, rng, 6.0);
    const decomp::GradientBound gb = decomp::gradient_bound_gap(a, a0, 0.1);
    const double slack = gb.gap() / std::max(1.0, gb.rhs);
    if (slack < rep.min_slack) {
      rep.min_slack = slack;
      rep.argmin_seed = s;
    }
  }
  return rep;
}

entropy::SuiteReport split_bounds_suite(int samples, std::uint64_t seed) {
  foundation::BoxGrid box(2.0 * M_PI, 32, 1, 0.1);
  entropy::SuiteReport rep;
  rep.inequality_id = "split_bounds";
  rep.samples = samples;
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::for_sample(seed, s);
    decomp::OrderField psi{box, random_smooth_psi(box, rng, 5)};
    const decomp::SplitBounds sb = decomp::split_bounds_report(psi, 2.5);
    const double slack =
        std::min({sb.l1_low_bound - sb.l1_low, sb.l2_high_bound - sb.l2_high,
                  sb.l4_interp_bound - sb.l4_high});
    if (slack < rep.min_slack) {
      rep.min_slack = slack;
      rep.argmin_seed = s;
    }
  }
  return rep;
}

entropy::SuiteReport phi_tail_suite(int samples, std::uint64_t seed) {
  foundation::BoxGrid box(2.0 * M_PI, 32, 1, 0.1);
  entropy::SuiteReport rep;
  rep.inequality_id = "phi_tail";
  rep.samples = samples;
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::for_sample(seed, s);
    decomp::OrderField psi{box, random_smooth_psi(box, rng, 6)};
    const decomp::PhiTail pt = decomp::phi_tail_gap(psi, 8.0);
    const double slack = pt.gap() / std::max(1.0, pt.bound);
    if (slack < rep.min_slack) {
      rep.min_slack = slack;
      rep.argmin_seed = s;
    }
  }
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  // Cap internal parallelism (Eigen) from the environment.
  if (const char* threads = std::getenv("BCSLAB_THREADS")) {
    const int t = std::atoi(threads);
    if (t > 0) Eigen::setNbThreads(t);
  }

  // Extract --config before CLI11 sees the rest.
  std::vector<std::string> args;
  std::string config_path;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config") {
      if (i + 1 >= argc) {
        std::cerr << "--config needs a path\n";
        return 2;
      }
      config_path = argv[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
    } else {
      args.push_back(a);
    }
  }

  json config;
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) {
      std::cerr << "cannot open config file " << config_path << "\n";
      return 2;
    }
    try {
      is >> config;
    } catch (const std::exception& e) {
      std::cerr << "config parse error: " << e.what() << "\n";
      return 2;
    }
  }

  CLI::App app{"bcslab: numerical laboratory for the BCS functional with "
               "boundary conditions at infinity"};
  app.set_help_flag("--help", "print usage");  // frees -h for the certify --h flag
  app.require_subcommand(0, 1);
  std::string out_path;
  app.add_option("--out", out_path, "output JSON path (stdout when empty)");

  // ---- tc ----
  CLI::App* tc = app.add_subcommand("tc", "critical temperature of the model well");
  OptionTable tc_opts(tc);
  ModelOptions tc_model;
  tc_model.add_to(tc_opts, false);
  double tc_tol = 1e-8;
  double tc_tlo = 0.0, tc_thi = 0.0;
  tc_opts.add("tol", tc_tol, "relative bisection tolerance");
  tc_opts.add("tlo", tc_tlo, "bracket lower end (0 = automatic)");
  tc_opts.add("thi", tc_thi, "bracket upper end (0 = automatic)");

  // ---- gap ----
  CLI::App* gap = app.add_subcommand("gap", "solve the BCS gap equation");
  OptionTable gap_opts(gap);
  ModelOptions gap_model;
  gap_model.add_to(gap_opts, false);
  double gap_T = 0.1;
  double gap_damping = 0.5, gap_tol = 1e-10;
  long long gap_maxiter = 200000;
  bool gap_anderson = false;
  std::string gap_csv;
  gap_opts.add("T", gap_T, "temperature");
  gap_opts.add("damping", gap_damping, "fixed-point damping in (0,1]");
  gap_opts.add("tol", gap_tol, "residual tolerance");
  gap_opts.add("maxiter", gap_maxiter, "iteration cap");
  gap_opts.add_flag("anderson", gap_anderson, "enable Anderson mixing");
  gap_opts.add("csv", gap_csv, "also write (p, delta, gamma, alpha) CSV here");

  // ---- verify ----
  CLI::App* verify = app.add_subcommand("verify", "randomized inequality suites");
  OptionTable verify_opts(verify);
  std::string verify_suite = "entropy";
  int verify_samples = 100;
  int verify_dim = 4;
  std::uint64_t verify_seed = 1;
  verify->add_option("suite", verify_suite,
                     "entropy | klein | block-trace | hs-chain | identity | "
                     "scalar-grid | gradient-bound | split-bounds | phi-tail | ktv-form");
  verify_opts.add("samples", verify_samples, "number of samples");
  verify_opts.add("dim", verify_dim, "max half-dimension of random states");
  verify_opts.add("seed", verify_seed, "base seed");

  // ---- kernel ----
  CLI::App* kernel = app.add_subcommand("kernel", "Matsubara kernel evaluations");
  OptionTable kernel_opts(kernel);
  std::string kernel_which = "zeta";
  double kx = 1.0, kT = 1.0, ka = 1.0, kb = 2.0, kk = 0.0, kEp = 1.0, kEq = 2.0;
  long long kN = 100000;
  bool kernel_series = false;
  kernel->add_option("which", kernel_which, "xcoth | matsubara | lorentzian | zeta");
  kernel_opts.add("x", kx, "argument of x/tanh(x/2T)");
  kernel_opts.add("T", kT, "temperature");
  kernel_opts.add("N", kN, "series truncation");
  kernel_opts.add("a", ka, "first parameter");
  kernel_opts.add("b", kb, "second parameter");
  kernel_opts.add("k", kk, "Fourier variable");
  kernel_opts.add("Ep", kEp, "first energy");
  kernel_opts.add("Eq", kEq, "second energy");
  kernel_opts.add_flag("series", kernel_series, "use the series path for zeta");

  // ---- bdg-scaling ----
  CLI::App* bdgcmd = app.add_subcommand("bdg-scaling", "pairing-difference h sweep");
  OptionTable bdg_opts(bdgcmd);
  ModelOptions bdg_model;
  bdg_model.add_to(bdg_opts);
  int bdg_dims = 3, bdg_n = 8;
  double bdg_L = 0.5 * M_PI;
  double bdg_tfrac = 0.9;
  std::string bdg_hlist = "0.4,0.2,0.1,0.05";
  bdg_opts.add("dims", bdg_dims, "box dimensions");
  bdg_opts.add("n", bdg_n, "lattice points per dimension");
  bdg_opts.add("L", bdg_L, "box side length");
  bdg_opts.add("tfrac", bdg_tfrac, "temperature as a fraction of Tc");
  bdg_opts.add("h-list", bdg_hlist, "comma separated h values");

  // ---- decompose ----
  CLI::App* dec = app.add_subcommand("decompose", "pair-field decomposition");
  OptionTable dec_opts(dec);
  ModelOptions dec_model;
  dec_model.add_to(dec_opts, false);
  std::string dec_input;
  double dec_tfrac = 0.9;
  double dec_r = 0.0;
  dec_opts.add("input", dec_input, "binary pair-field file")->required();
  dec_opts.add("tfrac", dec_tfrac, "temperature as a fraction of Tc");
  dec_opts.add("r", dec_r,
               "also report the |psi|^2-1 tail beyond radius r (must stay at or "
               "below the box Nyquist momentum; 0 = skip)");

  // ---- certify ----
  CLI::App* cer = app.add_subcommand("certify", "lower-bound certificate");
  OptionTable cer_opts(cer);
  ModelOptions cer_model;
  cer_model.add_to(cer_opts);
  std::string cer_state;
  double cer_h = 0.2, cer_beta = 0.0, cer_c1 = 0.01, cer_c2 = 10.0, cer_eps = 0.0;
  double cer_L = 2.0 * M_PI;
  int cer_n = 16, cer_dims = 1;
  std::uint64_t cer_seed = 1;
  cer_opts.add("state", cer_state, "block-state file (default: the reference state)");
  cer_opts.add("h", cer_h, "microscopic ratio");
  cer_opts.add("beta", cer_beta, "inverse temperature (0 = Tc(1-h^2) rule)");
  cer_opts.add("c1", cer_c1, "certificate constant c1");
  cer_opts.add("c2", cer_c2, "certificate constant c2");
  cer_opts.add("eps", cer_eps, "perturbation amplitude for the generated state");
  cer_opts.add("seed", cer_seed, "perturbation seed");
  cer_opts.add("L", cer_L, "box side length");
  cer_opts.add("n", cer_n, "lattice points per dimension");
  cer_opts.add("dims", cer_dims, "box dimensions");

  // ---- apriori ----
  CLI::App* apr = app.add_subcommand("apriori", "a-priori norm scaling sweep");
  OptionTable apr_opts(apr);
  ModelOptions apr_model;
  apr_model.add_to(apr_opts);
  std::string apr_hlist = "0.4,0.2,0.1,0.05";
  double apr_L = 2.0 * M_PI, apr_D = 1.0, apr_eps0 = 0.05, apr_c1 = 0.01, apr_c2 = 10.0;
  int apr_n = 32, apr_dims = 1;
  std::uint64_t apr_seed = 1;
  apr_opts.add("h-list", apr_hlist, "comma separated h values");
  apr_opts.add("L", apr_L, "box side length");
  apr_opts.add("n", apr_n, "lattice points per dimension");
  apr_opts.add("dims", apr_dims, "box dimensions");
  apr_opts.add("D", apr_D, "GL temperature parameter, T = Tc (1 - D h^2)");
  apr_opts.add("eps0", apr_eps0, "perturbation amplitude prefactor");
  apr_opts.add("seed", apr_seed, "perturbation seed");
  apr_opts.add("c1", apr_c1, "certificate constant c1");
  apr_opts.add("c2", apr_c2, "certificate constant c2");

  // let --out (declared on the parent) appear after a subcommand name
  for (CLI::App* sc : app.get_subcommands([](const CLI::App*) { return true; }))
    sc->fallthrough();

  try {
    std::reverse(args.begin(), args.end());  // CLI11 takes the vector reversed
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  // Dispatch on the active subcommand, merging the config file first.
  try {
    if (tc->parsed()) {
      if (!tc_opts.apply_config(config)) return 2;
      if (tc_tol <= 0.0) throw InvalidArgument("tolerance must be positive");
      const auto grid = tc_model.grid();
      const auto V = tc_model.V();
      double value = 0.0;
      if (tc_tlo > 0.0 && tc_thi > tc_tlo) {
        value = tibcs::critical_temperature(V, tc_model.mu, grid, {tc_tlo, tc_thi}, tc_tol);
      } else {
        value = critical_temperature_auto(V, tc_model.mu, grid, tc_tol);
      }
      json out{{"schema", serialize::kSchemaVersion},
               {"Tc", value},
               {"rel_tolerance", tc_tol},
               {"potential", serialize::potential_json(V)},
               {"grid", serialize::radial_grid_json(grid)}};
      emit(out, out_path);
      return 0;
    }

    if (gap->parsed()) {
      if (!gap_opts.apply_config(config)) return 2;
      if (gap_tol <= 0.0) throw InvalidArgument("tolerance must be positive");
      const auto grid = gap_model.grid();
      const auto V = gap_model.V();
      tibcs::GapSolveOptions opts;
      opts.damping = gap_damping;
      opts.tol = gap_tol;
      opts.max_iter = gap_maxiter;
      opts.anderson = gap_anderson;
      const tibcs::GapSolution sol = tibcs::solve_gap(gap_T, V, gap_model.mu, grid, opts);
      json out = serialize::gap_solution_json(sol, grid, gap_tol);
      out["potential"] = serialize::potential_json(V);
      emit(out, out_path);
      if (!gap_csv.empty()) {
        const tibcs::TiState st =
            tibcs::state_from_delta(grid, sol.delta, gap_T, gap_model.mu);
        std::ofstream os(gap_csv);
        if (!os) throw InvalidArgument("cannot open csv path " + gap_csv);
        os << serialize::gap_solution_csv(sol, st, grid);
      }
      return sol.converged ? 0 : 1;
    }

    if (verify->parsed()) {
      if (!verify_opts.apply_config(config)) return 2;
      entropy::SuiteReport rep;
      double floor = 1e-10;
      if (verify_suite == "entropy") {
        rep = entropy::run_entropy_suite(verify_samples, verify_dim, verify_seed);
      } else if (verify_suite == "klein") {
        rep = entropy::run_klein_suite(verify_samples, verify_dim, verify_seed);
      } else if (verify_suite == "block-trace") {
        rep = entropy::run_block_trace_suite(verify_samples, verify_dim, verify_seed);
      } else if (verify_suite == "hs-chain") {
        rep = entropy::run_hs_chain_suite(verify_samples, verify_dim, verify_seed);
      } else if (verify_suite == "identity") {
        rep = entropy::run_identity_suite(verify_samples, verify_dim, verify_seed);
      } else if (verify_suite == "scalar-grid") {
        rep = scalar_grid_suite();
        floor = 1e-12;
      } else if (verify_suite == "gradient-bound") {
        rep = gradient_bound_suite(verify_samples, verify_seed);
      } else if (verify_suite == "split-bounds") {
        rep = split_bounds_suite(verify_samples, verify_seed);
      } else if (verify_suite == "phi-tail") {
        rep = phi_tail_suite(verify_samples, verify_seed);
      } else if (verify_suite == "ktv-form") {
        foundation::RadialGrid grid(12.0, 192);
        const auto V = foundation::Potential::gaussian(-5.0, 1.0);
        const double Tc = critical_temperature_auto(V, 1.0, grid, 1e-8);
        tibcs::GapSolveOptions opts;
        opts.known_tc = Tc;
        const tibcs::GapSolution sol = tibcs::solve_gap(0.9 * Tc, V, 1.0, grid, opts);
        foundation::RadialProfile delta(grid, sol.delta);
        foundation::BoxGrid box(2.0 * M_PI, 16, 1, 0.25);
        const cert::KtvFormBound kb = cert::ktv_form_bound_check(
            box, 0.9 * Tc, V, 1.0, delta, 0.25, verify_samples, verify_seed);
        json out = serialize::ktv_json(kb);
        out["inequality_id"] = "ktv_form_bound";
        emit(out, out_path);
        return kb.cstar > 0.0 ? 0 : 1;
      } else {
        std::cerr << "unknown verify suite: " << verify_suite << "\n";
        return 2;
      }
      emit(serialize::suite_report_json(rep, floor), out_path);
      return rep.min_slack >= -floor ? 0 : 1;
    }

    if (kernel->parsed()) {
      if (!kernel_opts.apply_config(config)) return 2;
      json out;
      if (kernel_which == "xcoth") {
        const kernels::SeriesEval e = kernels::xcoth_series(kx, kT, kN);
        out = serialize::series_eval_json(
            e, "series(" + std::to_string(kN) + ")+tail",
            json{{"x", kx}, {"T", kT}, {"N", kN}});
      } else if (kernel_which == "matsubara") {
        kernels::KernelEval e;
        e.p = ka;
        e.q = kb;
        e.value = kernels::matsubara_sum(ka, kb);
        e.method = "closed-form";
        e.tail_bound = 0.0;
        out = serialize::kernel_eval_json(e);
        out["inputs"] = json{{"a", ka}, {"b", kb}};
      } else if (kernel_which == "lorentzian") {
        kernels::KernelEval e;
        e.value = kernels::lorentzian_pair_ft(ka, kb, kk);
        e.method = "closed-form";
        out = serialize::kernel_eval_json(e);
        out["inputs"] = json{{"a", ka}, {"b", kb}, {"k", kk}};
      } else if (kernel_which == "zeta") {
        const kernels::KernelEval e = kernels::zeta_kernel(
            kEp, kEq, kT, kernel_series ? kernels::ZetaMethod::Series
                                        : kernels::ZetaMethod::ClosedForm,
            kN);
        out = serialize::kernel_eval_json(e);
      } else {
        std::cerr << "unknown kernel: " << kernel_which << "\n";
        return 2;
      }
      emit(out, out_path);
      return 0;
    }

    if (bdgcmd->parsed()) {
      if (!bdg_opts.apply_config(config)) return 2;
      const auto grid = bdg_model.grid();
      const auto V = bdg_model.V();
      const auto W = bdg_model.W();
      const double Tc = critical_temperature_auto(V, bdg_model.mu, grid, 1e-8);
      const double T = bdg_tfrac * Tc;
      tibcs::GapSolveOptions opts;
      opts.known_tc = Tc;
      opts.anderson = true;
      const tibcs::GapSolution sol = tibcs::solve_gap(T, V, bdg_model.mu, grid, opts);
      if (!sol.converged) return 1;
      foundation::RadialProfile delta(grid, sol.delta);
      const std::vector<double> hs = parse_h_list(bdg_hlist);
      foundation::BoxGrid box(bdg_L, bdg_n, bdg_dims, hs.front());
      const bdg::BdgScalingResult res =
          bdg::bdg_scaling_study(box, hs, W, delta, bdg_model.mu, T);
      json out = serialize::bdg_scaling_json(res);
      out["T"] = T;
      out["Tc"] = Tc;
      out["box"] = serialize::box_grid_json(box);
      emit(out, out_path);
      return 0;
    }

    if (dec->parsed()) {
      if (!dec_opts.apply_config(config)) return 2;
      const decomp::PairField field = serialize::read_pair_field(dec_input);
      const auto grid = dec_model.grid();
      const auto V = dec_model.V();
      const double Tc = critical_temperature_auto(V, dec_model.mu, grid, 1e-8);
      const double T = dec_tfrac * Tc;
      tibcs::GapSolveOptions opts;
      opts.known_tc = Tc;
      const tibcs::GapSolution sol = tibcs::solve_gap(T, V, dec_model.mu, grid, opts);
      if (!sol.converged) return 1;
      const tibcs::TiState ti =
          tibcs::state_from_delta(grid, sol.delta, T, dec_model.mu);
      foundation::RadialProfile alpha0(grid, ti.alpha);

      const double h = field.box.h();
      const decomp::OrderField psi = decomp::extract_psi(field, alpha0, h);
      const decomp::PairField xi = decomp::residual_xi(field, alpha0, psi, h);
      const decomp::BoxTransform t(field.box);
      const double dV = field.box.cell_volume();
      double gps = 0.0;
      for (int d = 0; d < field.box.dims(); ++d)
        gps += t.gradient(psi.psi, d).squaredNorm();

      double xi_h1 = 0.0;
      const Eigen::MatrixXcd xi_mom = t.matrix() * xi.values * t.matrix().adjoint();
      for (int p = 0; p < field.box.size(); ++p)
        for (int q = 0; q < field.box.size(); ++q) {
          const double wp = h * field.box.momentum_norm(p);
          const double wq = h * field.box.momentum_norm(q);
          xi_h1 += (1.0 + wp * wp + wq * wq) * std::norm(xi_mom(p, q));
        }

      json out{{"schema", serialize::kSchemaVersion},
               {"box", serialize::box_grid_json(field.box)},
               {"T", T},
               {"Tc", Tc},
               {"psi_l2_sq", dV * psi.psi.squaredNorm()},
               {"grad_psi_sq", dV * gps},
               {"phi_l2_sq", dV * psi.phi().squaredNorm()},
               {"xi_l2_sq", xi.values.squaredNorm()},
               {"xi_h1_sq", xi_h1},
               {"alpha_l2_sq", field.values.squaredNorm()}};
      if (dec_r > 0.0) {
        // refuses r above the Nyquist momentum rather than silently clamping
        const decomp::PhiTail pt = decomp::phi_tail_gap(psi, dec_r);
        out["phi_tail"] = json{{"r", pt.r}, {"tail", pt.tail}, {"bound", pt.bound}};
      }
      emit(out, out_path);
      return 0;
    }

    if (cer->parsed()) {
      if (!cer_opts.apply_config(config)) return 2;
      const auto grid = cer_model.grid();
      const auto V = cer_model.V();
      const auto W = cer_model.W();
      const double Tc = critical_temperature_auto(V, cer_model.mu, grid, 1e-8);
      const double T = cer_beta > 0.0 ? 1.0 / cer_beta : Tc * (1.0 - cer_h * cer_h);
      if (T >= Tc) throw InvalidArgument("certify: temperature must stay below Tc");
      const double beta = 1.0 / T;
      tibcs::GapSolveOptions opts;
      opts.known_tc = Tc;
      opts.anderson = true;
      const tibcs::GapSolution sol = tibcs::solve_gap(T, V, cer_model.mu, grid, opts);
      if (!sol.converged) return 1;
      foundation::RadialProfile delta(grid, sol.delta);
      const tibcs::TiState ti = tibcs::state_from_delta(grid, sol.delta, T, cer_model.mu);
      foundation::RadialProfile alpha0(grid, ti.alpha);

      foundation::BoxGrid box(cer_L, cer_n, cer_dims, cer_h);
      const bdg::BdgOperator op = bdg::build_h0w(box, cer_model.mu, W, delta, cer_h);
      const entropy::BlockState g0w = bdg::reference_state(op, beta);

      entropy::BlockState g = g0w;
      if (!cer_state.empty()) {
        g = serialize::read_block_state(cer_state);
      } else if (cer_eps != 0.0) {
        Rng rng = Rng::for_sample(cer_seed, 0);
        const entropy::BlockHamiltonian Y =
            entropy::random_block_hamiltonian(box.size(), rng, 1.0);
        const entropy::BlockHamiltonian Hp = entropy::BlockHamiltonian::from_matrix(
            op.matrix.cast<std::complex<double>>() + cer_eps * Y.matrix(), 1e-9);
        g = entropy::gibbs_block_state(Hp, beta);
      }
      const cert::Certificate c = cert::theorem_certificate(
          g, g0w, V, cer_h, beta, box, alpha0, cer_c1, cer_c2);
      json out = serialize::certificate_json(c);
      out["T"] = T;
      out["Tc"] = Tc;
      out["box"] = serialize::box_grid_json(box);
      emit(out, out_path);
      return 0;
    }

    if (apr->parsed()) {
      if (!apr_opts.apply_config(config)) return 2;
      cert::AprioriConfig cfg;
      cfg.h_list = parse_h_list(apr_hlist);
      cfg.L = apr_L;
      cfg.n = apr_n;
      cfg.dims = apr_dims;
      cfg.mu = apr_model.mu;
      cfg.D = apr_D;
      cfg.eps0 = apr_eps0;
      cfg.seed = apr_seed;
      cfg.c1 = apr_c1;
      cfg.c2 = apr_c2;
      const auto grid = apr_model.grid();
      const cert::AprioriResult res =
          cert::apriori_scaling(cfg, apr_model.V(), apr_model.W(), grid);
      emit(serialize::apriori_json(res), out_path);
      return 0;
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::cout << app.help() << "\n";
  return 2;
}
