// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// in code. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "bcslab/bdg.hpp"
#include "bcslab/cert.hpp"
#include "bcslab/decomp.hpp"
#include "bcslab/entropy.hpp"
#include "bcslab/foundation.hpp"
#include "bcslab/kernels.hpp"
#include "bcslab/rng.hpp"
#include "bcslab/tibcs.hpp"

using namespace bcslab;
using foundation::BoxGrid;
using foundation::Potential;
using foundation::RadialGrid;
using foundation::RadialProfile;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail, double seconds) {
  std::printf("%s criterion %2d: %s  [%.1f s]\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <typename F>
void run(int criterion, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    std::tie(pass, detail) = body();
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(criterion, pass, detail, seconds);
}

// Shared model setup: Gaussian well (depth -5, width 1), mu = 1.
const Potential& model_V() {
  static const Potential v = Potential::gaussian(-5.0, 1.0);
  return v;
}

const RadialGrid& model_grid() {
  static const RadialGrid g(12.0, 256);
  return g;
}

double model_tc() {
  static const double tc = [] {
    const auto br = tibcs::find_tc_bracket(model_V(), 1.0, model_grid(), 0.1);
    return tibcs::critical_temperature(model_V(), 1.0, model_grid(), *br, 1e-8);
  }();
  return tc;
}

const tibcs::GapSolution& model_gap_09() {
  static const tibcs::GapSolution sol = [] {
    tibcs::GapSolveOptions opts;
    opts.known_tc = model_tc();
    opts.tol = 1e-10;
    opts.anderson = true;
    return tibcs::solve_gap(0.9 * model_tc(), model_V(), 1.0, model_grid(), opts);
  }();
  return sol;
}

// Oscillatory Fourier quadrature: 2 \int_0^inf f cos(2 pi k x) dx by
// half-period panels with repeated averaging of the alternating tail.
double fourier_cos_oracle(const std::function<double(double)>& f, double k, int nterms,
                          double feature_scale) {
  std::vector<double> x8, w8;
  foundation::gauss_legendre(8, -1.0, 1.0, x8, w8);
  // keep panels below both a quarter period and the integrand's own scale
  auto panel = [&](double a, double b) {
    const int sub = std::max(
        4, static_cast<int>(std::ceil((b - a) / std::min(0.125 / k, feature_scale))));
    double s = 0.0;
    const double w = (b - a) / sub;
    for (int j = 0; j < sub; ++j) {
      const double mid = a + (j + 0.5) * w, half = 0.5 * w;
      for (int i = 0; i < 8; ++i) {
        const double x = mid + half * x8[i];
        s += half * w8[i] * f(x) * std::cos(2.0 * M_PI * k * x);
      }
    }
    return s;
  };
  const double z0 = 0.25 / k;
  std::vector<double> partial;
  double acc = 0.0;
  for (int m = 0; m < nterms; ++m) {
    const double a = z0 + 0.5 * m / k;
    acc += panel(a, a + 0.5 / k);
    partial.push_back(acc);
  }
  std::vector<double> avg = partial;
  for (int level = 0; level < 60 && avg.size() > 1; ++level) {
    std::vector<double> next(avg.size() - 1);
    for (std::size_t i = 0; i + 1 < avg.size(); ++i) next[i] = 0.5 * (avg[i] + avg[i + 1]);
    avg.swap(next);
  }
  return 2.0 * (panel(0.0, z0) + avg.back());
}

}  // namespace

int main() {
  // 1. scalar entropy inequality on the 99 x 99 grid
  run(1, [] {
    double min_gap = 1e300;
    for (int i = 1; i <= 99; ++i)
      for (int j = 1; j <= 99; ++j)
        min_gap = std::min(min_gap,
                           entropy::scalar_entropy_inequality_gap(i / 100.0, j / 100.0));
    char buf[128];
    std::snprintf(buf, sizeof buf, "scalar entropy grid min gap %.3e >= -1e-12", min_gap);
    return std::make_pair(min_gap >= -1e-12, std::string(buf));
  });

  // 2. Lemma 2.1 matrix inequality, 1000 seeded triples at n <= 6
  run(2, [] {
    const entropy::SuiteReport rep = entropy::run_entropy_suite(1000, 6, 2001);
    char buf[128];
    std::snprintf(buf, sizeof buf, "relative-entropy bound min slack %.3e >= -1e-10",
                  rep.min_slack);
    return std::make_pair(rep.min_slack >= -1e-10, std::string(buf));
  });

  // 3. operator identity defect on 100 seeded Hamiltonians
  run(3, [] {
    const entropy::SuiteReport rep = entropy::run_identity_suite(100, 6, 2002);
    char buf[128];
    std::snprintf(buf, sizeof buf, "operator identity max defect %.3e <= 1e-10",
                  -rep.min_slack);
    return std::make_pair(rep.min_slack >= -1e-10, std::string(buf));
  });

  // 4. Klein contraction, block-trace and HS-chain gaps, 500 seeds each
  run(4, [] {
    const entropy::SuiteReport klein = entropy::run_klein_suite(500, 6, 2003);
    const entropy::SuiteReport block = entropy::run_block_trace_suite(500, 4, 2004);
    const entropy::SuiteReport chain = entropy::run_hs_chain_suite(500, 4, 2005);
    const double worst = std::min({klein.min_slack, block.min_slack, chain.min_slack});
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "klein %.2e, block-trace %.2e, hs-chain %.2e, all >= -1e-10",
                  klein.min_slack, block.min_slack, chain.min_slack);
    return std::make_pair(worst >= -1e-10, std::string(buf));
  });

  // 5. Matsubara identities against oracles
  run(5, [] {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double x = 0.05 + 0.5 * i;
      const kernels::SeriesEval e = kernels::xcoth_series(x, 1.0, 100000);
      worst = std::max(worst, std::abs(e.approx - x / std::tanh(0.5 * x)));
    }
    Rng rng(2006);
    double worst_ms = 0.0, worst_lo = 0.0;
    for (int i = 0; i < 20; ++i) {
      const bool diag = i % 5 == 0;  // include a = b limits
      const double a = rng.uniform(0.2, 4.0);
      const double b = diag ? a : rng.uniform(0.2, 4.0);
      const kernels::SeriesEval os = kernels::matsubara_sum_series(a, b, 1000000);
      worst_ms = std::max(worst_ms, std::abs(kernels::matsubara_sum(a, b) - os.approx));
      const double kk = rng.uniform(0.1, 1.0);
      auto f = [a, b](double x) {
        return x * x / ((a * a + x * x) * (b * b + x * x));
      };
      const double oracle = fourier_cos_oracle(f, kk, 400, 0.25 * std::min(a, b));
      worst_lo =
          std::max(worst_lo, std::abs(kernels::lorentzian_pair_ft(a, b, kk) - oracle));
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "xcoth %.2e, matsubara %.2e, lorentzian %.2e, all <= 1e-8", worst,
                  worst_ms, worst_lo);
    return std::make_pair(std::max({worst, worst_ms, worst_lo}) <= 1e-8,
                          std::string(buf));
  });

  // 6. gap solver on the model well at 256 radial nodes
  run(6, [] {
    const double tc = model_tc();
    const tibcs::GapSolution low = model_gap_09();
    tibcs::GapSolveOptions opts;
    opts.known_tc = tc;
    const tibcs::GapSolution high =
        tibcs::solve_gap(1.1 * tc, model_V(), 1.0, model_grid(), opts);
    double high_max = 0.0;
    for (double d : high.delta) high_max = std::max(high_max, std::abs(d));
    const double eps = 10.0 * 1e-8 * tc;
    const bool bracket_ok =
        tibcs::lowest_eigenvalue_ktv(tc - eps, model_V(), 1.0, model_grid()) < 0.0 &&
        tibcs::lowest_eigenvalue_ktv(tc + eps, model_V(), 1.0, model_grid()) > 0.0;
    const bool pass = low.converged && low.residual <= 1e-10 && high_max == 0.0 &&
                      bracket_ok;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "Tc %.6f, residual %.2e <= 1e-10, normal-phase max %.1e, bracket %s",
                  tc, low.residual, high_max, bracket_ok ? "consistent" : "BROKEN");
    return std::make_pair(pass, std::string(buf));
  });

  // 7. order-parameter scaling over 6 temperatures in (0.9, 0.99) Tc
  run(7, [] {
    const double tc = model_tc();
    std::vector<double> temps;
    for (double f : {0.90, 0.92, 0.94, 0.96, 0.98, 0.99}) temps.push_back(f * tc);
    // plain damped iteration: slower but free of the mixing's zero-basin
    // hazard this close to Tc
    tibcs::GapSolveOptions opts;
    opts.known_tc = tc;
    opts.max_iter = 400000;
    const tibcs::ScalingFit fit =
        tibcs::order_parameter_scaling(model_V(), 1.0, model_grid(), temps, opts);
    char buf[128];
    std::snprintf(buf, sizeof buf, "||alpha|| ~ (Tc-T)^%.4f in [0.4, 0.6], r2 %.4f",
                  fit.exponent, fit.r2);
    return std::make_pair(fit.exponent >= 0.4 && fit.exponent <= 0.6, std::string(buf));
  });

  // 8. Lemma A.2 pairing-difference scaling on a 3D box, n = 8
  run(8, [] {
    const double T = 0.9 * model_tc();
    RadialProfile delta(model_grid(), model_gap_09().delta);
    const Potential W = Potential::gaussian(1.0, 1.0);
    BoxGrid box(0.5 * M_PI, 8, 3, 0.1);
    const bdg::BdgScalingResult res =
        bdg::bdg_scaling_study(box, {0.4, 0.2, 0.1, 0.05}, W, delta, 1.0, T);

    const Potential zero = Potential::gaussian(0.0, 1.0);
    BoxGrid cbox(0.5 * M_PI, 8, 3, 0.2);
    const bdg::BdgOperator op = bdg::build_h0w(cbox, 1.0, zero, delta, 0.2);
    const entropy::BlockState st = bdg::reference_state(op, 1.0 / T);
    const bdg::PairingNorms control =
        bdg::pairing_difference_norms(st, delta, 0.2, cbox, 1.0, T);
    const double cmax = std::max({control.l2, control.h1, control.weighted_h2});

    const bool pass = res.fit_h1.exponent >= 1.2 && res.fit_h1.exponent <= 1.8 &&
                      cmax <= 1e-10;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "H1 exponent %.3f in [1.2, 1.8] (l2 %.3f, w2 %.3f), W=0 control %.1e",
                  res.fit_h1.exponent, res.fit_l2.exponent, res.fit_weighted.exponent,
                  cmax);
    return std::make_pair(pass, std::string(buf));
  });

  // 9. Lemma 2.3 weighted kernel-norm scaling on the 1D n = 64 lattice
  run(9, [] {
    const double T = 0.9 * model_tc();
    RadialProfile delta(model_grid(), model_gap_09().delta);
    const Potential W = Potential::gaussian(1.0, 1.0);
    BoxGrid box(M_PI, 64, 1, 0.1);
    const kernels::NormScalingResult res = kernels::weighted_norm_scaling(
        {0.4, 0.2, 0.1, 0.05}, box, W, delta, 1.0, T);
    const bool pass = std::abs(res.e11 - 2.0) <= 0.3 && std::abs(res.e12 - 3.0) <= 0.3;
    char buf[128];
    std::snprintf(buf, sizeof buf, "a11 ~ h^%.3f (2 +- 0.3), a12 ~ h^%.3f (3 +- 0.3)",
                  res.e11, res.e12);
    return std::make_pair(pass, std::string(buf));
  });

  // 10. decomposition identities
  run(10, [] {
    const double T = 0.9 * model_tc();
    const tibcs::TiState ti =
        tibcs::state_from_delta(model_grid(), model_gap_09().delta, T, 1.0);
    RadialProfile alpha0(model_grid(), ti.alpha);

    const double h = 0.2;
    BoxGrid box(2.0 * M_PI, 32, 1, h);
    const decomp::BoxTransform t(box);
    decomp::PairField ref(box, decomp::reference_pair_kernel(t, alpha0, h), false);
    const decomp::OrderField psi_ref = decomp::extract_psi(ref, alpha0, h);
    double round_trip = 0.0;
    for (int y = 0; y < box.size(); ++y)
      round_trip = std::max(round_trip, std::abs(psi_ref.psi(y) - 1.0));
    const decomp::PairField xi_ref = decomp::residual_xi(ref, alpha0, psi_ref, h);
    round_trip = std::max(round_trip, xi_ref.values.cwiseAbs().maxCoeff());

    double grad_defect = 0.0;
    double min_gap = 1e300;
    for (int s = 0; s < 200; ++s) {
      Rng rng = Rng::for_sample(2010, s);
      Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(box.size(), box.size());
      for (int p = 0; p < box.size(); ++p)
        for (int q = 0; q < box.size(); ++q)
          if (box.momentum_norm(p) <= 6.0 && box.momentum_norm(q) <= 6.0)
            A(p, q) = rng.complex_normal();
      Eigen::MatrixXcd pos = t.matrix().adjoint() * A * t.matrix();
      Eigen::MatrixXcd sym = 0.5 * (pos + pos.transpose());
      decomp::PairField a(box, sym, true);
      const decomp::GradientBound gb = decomp::gradient_bound_gap(a, alpha0, h);
      min_gap = std::min(min_gap, gb.gap() / std::max(1.0, gb.rhs));
      if (s < 20) {
        const decomp::OrderField psi = decomp::extract_psi(a, alpha0, h);
        const Eigen::MatrixXcd cg = decomp::com_gradient(a, alpha0, h);
        grad_defect = std::max(
            grad_defect,
            (cg.col(0) - t.gradient(psi.psi, 0)).cwiseAbs().maxCoeff());
      }
    }

    double quartic_rel = 0.0;
    for (int s = 0; s < 20; ++s) {
      Rng rng = Rng::for_sample(2011, s);
      Eigen::VectorXcd c = Eigen::VectorXcd::Zero(box.size());
      for (int p = 0; p < box.size(); ++p)
        if (box.momentum_norm(p) <= 3.0) c(p) = rng.complex_normal();
      Eigen::VectorXd phi = (t.matrix().adjoint() * c).real();
      const decomp::QuarticOverlap q =
          decomp::quartic_overlap(box, phi, alpha0, h, 3.0 + 1e-9);
      quartic_rel = std::max(quartic_rel, std::abs(q.trace_path - q.fourier_path) /
                                              std::max(1.0, std::abs(q.trace_path)));
    }

    const bool pass = round_trip <= 1e-10 && grad_defect <= 1e-8 &&
                      min_gap >= -1e-10 && quartic_rel <= 1e-8;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "round trip %.1e <= 1e-10, gradient defect %.1e <= 1e-8, CS gap %.1e "
                  ">= -1e-10, quartic %.1e <= 1e-8",
                  round_trip, grad_defect, min_gap, quartic_rel);
    return std::make_pair(pass, std::string(buf));
  });

  // 11. functional consistency at the reference state, three h values
  run(11, [] {
    const Potential W = Potential::gaussian(1.0, 1.0);
    double worst_f = 0.0;
    double worst_slack = 1e300;
    for (double h : {0.3, 0.2, 0.1}) {
      const double T = model_tc() * (1.0 - h * h);
      const double beta = 1.0 / T;
      tibcs::GapSolveOptions opts;
      opts.known_tc = model_tc();
      opts.anderson = true;
      const tibcs::GapSolution sol =
          tibcs::solve_gap(T, model_V(), 1.0, model_grid(), opts);
      RadialProfile delta(model_grid(), sol.delta);
      const tibcs::TiState ti = tibcs::state_from_delta(model_grid(), sol.delta, T, 1.0);
      RadialProfile alpha0(model_grid(), ti.alpha);
      BoxGrid box(2.0 * M_PI, 16, 1, h);
      const bdg::BdgOperator op = bdg::build_h0w(box, 1.0, W, delta, h);
      const entropy::BlockState g0w = bdg::reference_state(op, beta);
      worst_f = std::max(worst_f, std::abs(cert::free_energy_difference(
                                      g0w, g0w, model_V(), h, beta, box, alpha0)));

      // entropy term dominates the lemma terms on perturbed states
      const entropy::BlockHamiltonian H0 = entropy::BlockHamiltonian::from_matrix(
          op.matrix.cast<std::complex<double>>(), 1e-9);
      for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        Rng rng = Rng::for_sample(seed, 0);
        const entropy::BlockHamiltonian Y =
            entropy::random_block_hamiltonian(box.size(), rng, 1.0);
        const entropy::BlockHamiltonian Hp = entropy::BlockHamiltonian::from_matrix(
            H0.matrix() + 0.1 * Y.matrix(), 1e-9);
        const entropy::BlockState g = entropy::gibbs_block_state(Hp, beta);
        worst_slack =
            std::min(worst_slack, entropy::entropy_bound_terms(g, H0, beta).slack());
      }
    }
    const bool pass = worst_f <= 1e-10 && worst_slack >= -1e-10;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "max |F(G0w,G0w)| %.1e <= 1e-10, min entropy-domination slack %.2e",
                  worst_f, worst_slack);
    return std::make_pair(pass, std::string(buf));
  });

  // 12. a-priori norm scaling, default family over a 4-point h sweep
  run(12, [] {
    cert::AprioriConfig cfg;
    cfg.h_list = {0.4, 0.2, 0.1, 0.05};
    // n = 24 keeps beta E(h p) under ~20, clear of the spot where the Gibbs
    // spectrum rounds onto {0,1}
    cfg.n = 24;
    const cert::AprioriResult res = cert::apriori_scaling(
        cfg, model_V(), Potential::gaussian(1.0, 1.0), model_grid());
    const bool pass = res.xi_fit.exponent >= 0.4 && res.q_fit.exponent >= 0.4;
    char buf[128];
    std::snprintf(buf, sizeof buf, "||xi||_H1 ~ h^%.3f, ||q||_H1 ~ h^%.3f, both >= 0.4",
                  res.xi_fit.exponent, res.q_fit.exponent);
    return std::make_pair(pass, std::string(buf));
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures;
}
