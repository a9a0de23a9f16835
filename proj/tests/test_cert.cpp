#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bcslab/cert.hpp"
#include "bcslab/tibcs.hpp"

using namespace bcslab;
using namespace bcslab::cert;
using foundation::BoxGrid;
using foundation::Potential;
using foundation::RadialGrid;
using foundation::RadialProfile;

namespace {

const Potential& model_well() {
  static const Potential v = Potential::gaussian(-5.0, 1.0);
  return v;
}

const RadialGrid& rgrid() {
  static const RadialGrid g(12.0, 192);
  return g;
}

double model_tc() { return 1.3862483095; }

struct Setup {
  double h;
  double T;
  double beta;
  BoxGrid box;
  RadialProfile delta;
  RadialProfile alpha0;
  bdg::BdgOperator op;
  entropy::BlockState g0w;
};

Setup make_setup(double h, int n, const Potential& W) {
  const double T = model_tc() * (1.0 - h * h);
  tibcs::GapSolveOptions opts;
  opts.known_tc = model_tc();
  opts.anderson = true;
  const tibcs::GapSolution sol = tibcs::solve_gap(T, model_well(), 1.0, rgrid(), opts);
  REQUIRE(sol.converged);
  RadialProfile delta(rgrid(), sol.delta);
  const tibcs::TiState ti = tibcs::state_from_delta(rgrid(), sol.delta, T, 1.0);
  RadialProfile alpha0(rgrid(), ti.alpha);
  BoxGrid box(2.0 * M_PI, n, 1, h);
  bdg::BdgOperator op = bdg::build_h0w(box, 1.0, W, delta, h);
  entropy::BlockState g0w = bdg::reference_state(op, 1.0 / T);
  return Setup{h,  T, 1.0 / T, box, delta, alpha0, std::move(op), std::move(g0w)};
}

entropy::BlockState perturbed_state(const Setup& s, double eps, std::uint64_t seed) {
  Rng rng = Rng::for_sample(seed, 0);
  const entropy::BlockHamiltonian Y =
      entropy::random_block_hamiltonian(s.box.size(), rng, 1.0);
  const entropy::BlockHamiltonian Hp = entropy::BlockHamiltonian::from_matrix(
      s.op.matrix.cast<std::complex<double>>() + eps * Y.matrix(), 1e-9);
  return entropy::gibbs_block_state(Hp, s.beta);
}

}  // namespace

TEST_CASE("free energy difference vanishes at the reference state") {
  const Setup s = make_setup(0.2, 16, Potential::gaussian(1.0, 1.0));
  const double f =
      free_energy_difference(s.g0w, s.g0w, model_well(), s.h, s.beta, s.box, s.alpha0);
  CHECK(std::abs(f) < 1e-10);
}

TEST_CASE("free energy difference with V = 0 is the entropy term") {
  const Setup s = make_setup(0.2, 16, Potential::gaussian(1.0, 1.0));
  const entropy::BlockState g = perturbed_state(s, 0.1, 7);
  const Potential zero = Potential::gaussian(0.0, 1.0);
  const double f = free_energy_difference(g, s.g0w, zero, s.h, s.beta, s.box, s.alpha0);
  CHECK(f == doctest::Approx(relative_entropy(g, s.g0w) / (2.0 * s.beta)).epsilon(1e-12));
  CHECK(f >= 0.0);
}

TEST_CASE("free energy difference matches a brute-force double loop") {
  const Setup s = make_setup(0.25, 12, Potential::gaussian(0.8, 1.0));
  const entropy::BlockState g = perturbed_state(s, 0.15, 42);
  const double got =
      free_energy_difference(g, s.g0w, model_well(), s.h, s.beta, s.box, s.alpha0);

  // oracle: explicit loops over lattice pairs for the interaction terms
  const decomp::BoxTransform t(s.box);
  const Eigen::MatrixXcd a_pos = t.matrix().adjoint() * g.alpha() * t.matrix();
  const Eigen::MatrixXcd a0w_pos = t.matrix().adjoint() * s.g0w.alpha() * t.matrix();
  const Eigen::MatrixXcd ref = decomp::reference_pair_kernel(t, s.alpha0, s.h);
  double t2 = 0.0, t3 = 0.0;
  const int M = s.box.size();
  for (int x = 0; x < M; ++x)
    for (int y = 0; y < M; ++y) {
      Eigen::Vector3d d = s.box.position(x) - s.box.position(y);
      for (int k = 0; k < s.box.dims(); ++k) {
        while (d[k] < -0.5 * s.box.L()) d[k] += s.box.L();
        while (d[k] >= 0.5 * s.box.L()) d[k] -= s.box.L();
      }
      const double v = model_well().position(d.norm() / s.h);
      const std::complex<double> da = a_pos(x, y) - a0w_pos(x, y);
      t2 += v * std::norm(da);
      t3 += 2.0 * v * (da * std::conj(a0w_pos(x, y) - ref(x, y))).real();
    }
  const double want = relative_entropy(g, s.g0w) / (2.0 * s.beta) + t2 + t3;
  CHECK(got == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("entropy term dominates the lemma terms on perturbations") {
  const Setup s = make_setup(0.2, 16, Potential::gaussian(1.0, 1.0));
  const entropy::BlockHamiltonian H0 = entropy::BlockHamiltonian::from_matrix(
      s.op.matrix.cast<std::complex<double>>(), 1e-9);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const entropy::BlockState g = perturbed_state(s, 0.2, seed);
    const entropy::EntropyBoundTerms terms = entropy::entropy_bound_terms(g, H0, s.beta);
    CHECK(terms.slack() >= -1e-10);
    CHECK(terms.lhs == doctest::Approx(relative_entropy(g, s.g0w)).epsilon(1e-9));
  }
}

TEST_CASE("gl energy closed forms") {
  BoxGrid box(2.0 * M_PI, 32, 1, 0.1);
  const Potential zero = Potential::gaussian(0.0, 1.0);
  const Eigen::Matrix3d B1 = Eigen::Matrix3d::Identity();

  decomp::OrderField ones{box, Eigen::VectorXcd::Ones(box.size())};
  CHECK(std::abs(gl_energy(ones, zero, B1, 0.5, 1.0)) < 1e-13);

  decomp::OrderField zerofield{box, Eigen::VectorXcd::Zero(box.size())};
  const double vol = std::pow(box.L(), box.dims());
  CHECK(gl_energy(zerofield, zero, B1, 0.0, 1.0) == doctest::Approx(vol).epsilon(1e-12));

  // single cosine mode: gradient term B1_00 a^2 k^2 Vol / 2
  const double a = 0.3, k = 2.0;
  Eigen::VectorXcd psi(box.size());
  for (int x = 0; x < box.size(); ++x)
    psi(x) = a * std::cos(k * box.position(x)[0]);
  Eigen::Matrix3d B;
  B.setIdentity();
  B(0, 0) = 2.5;
  const double grad_term = gl_energy(decomp::OrderField{box, psi}, zero, B, 0.0, 0.0);
  CHECK(grad_term == doctest::Approx(2.5 * a * a * k * k * vol / 2.0).epsilon(1e-10));

  Eigen::Matrix3d bad = Eigen::Matrix3d::Identity();
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(gl_energy(ones, zero, bad, 0.0, 1.0), InvalidArgument);
  CHECK(gl_energy(ones, zero, B1, 0.0, 1.0) >= 0.0);  // B2 = 0 nonnegativity
}

TEST_CASE("certificate at the reference state") {
  const Setup s = make_setup(0.2, 16, Potential::gaussian(1.0, 1.0));
  const Certificate c = theorem_certificate(s.g0w, s.g0w, model_well(), s.h, s.beta,
                                            s.box, s.alpha0, 0.01, 10.0);
  CHECK(std::abs(c.f_value) < 1e-10);
  CHECK(c.grad_psi_sq >= 0.0);
  CHECK(c.phi_l2_sq >= 0.0);
  CHECK(c.xi_h1_sq >= 0.0);
  CHECK(c.q_h1_sq < 1e-20);  // q = 0 exactly at the reference
  // psi stays near 1: the pair block deviates from the reference kernel at
  // order h^2 W only
  CHECK(c.phi_l2_sq < 0.1);
  CHECK(c.rhs() == doctest::Approx(0.01 * (s.h * c.grad_psi_sq + s.h * c.phi_l2_sq +
                                           c.xi_h1_sq + c.q_h1_sq) -
                                   10.0 * s.h));
  CHECK(c.applicable());
  CHECK(c.lower_bound_holds());
}

TEST_CASE("certificate under a pair phase flip") {
  const Setup s = make_setup(0.2, 16, Potential::gaussian(1.0, 1.0));
  const entropy::BlockState flipped(s.g0w.gamma(), -s.g0w.alpha());
  const Certificate c = theorem_certificate(flipped, s.g0w, model_well(), s.h, s.beta,
                                            s.box, s.alpha0, 0.01, 10.0);
  // psi near -1, Phi = |psi|^2 - 1 unchanged by the phase
  const Certificate c0 = theorem_certificate(s.g0w, s.g0w, model_well(), s.h, s.beta,
                                             s.box, s.alpha0, 0.01, 10.0);
  CHECK(c.phi_l2_sq == doctest::Approx(c0.phi_l2_sq).epsilon(1e-9));
  CHECK(c.grad_psi_sq == doctest::Approx(c0.grad_psi_sq).epsilon(1e-9));
  CHECK(c.q_h1_sq < 1e-20);
}

TEST_CASE("certificate norms grow quadratically with an injected perturbation") {
  const Setup s = make_setup(0.2, 16, Potential::gaussian(1.0, 1.0));
  const Certificate base = theorem_certificate(s.g0w, s.g0w, model_well(), s.h, s.beta,
                                               s.box, s.alpha0, 0.01, 10.0);
  const Certificate c1 = theorem_certificate(perturbed_state(s, 0.05, 9), s.g0w,
                                             model_well(), s.h, s.beta, s.box, s.alpha0,
                                             0.01, 10.0);
  const Certificate c2 = theorem_certificate(perturbed_state(s, 0.10, 9), s.g0w,
                                             model_well(), s.h, s.beta, s.box, s.alpha0,
                                             0.01, 10.0);
  const double g1 = c1.xi_h1_sq - base.xi_h1_sq;
  const double g2 = c2.xi_h1_sq - base.xi_h1_sq;
  CHECK(g2 / g1 == doctest::Approx(4.0).epsilon(0.2));
  const double q1 = c1.q_h1_sq, q2 = c2.q_h1_sq;
  CHECK(q2 / q1 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("apriori scaling on a reduced sweep") {
  AprioriConfig cfg;
  cfg.h_list = {0.4, 0.25, 0.15};
  cfg.n = 16;
  const AprioriResult res =
      apriori_scaling(cfg, model_well(), Potential::gaussian(1.0, 1.0), rgrid());
  CHECK(res.Tc == doctest::Approx(model_tc()).epsilon(1e-4));
  CHECK(res.rows.size() == 3);
  for (const auto& row : res.rows) CHECK(row.certificate.f_value <= 0.0);
  MESSAGE("apriori exponents: xi=", res.xi_fit.exponent, " q=", res.q_fit.exponent);
  CHECK(res.xi_fit.exponent >= 0.4);
  CHECK(res.q_fit.exponent >= 0.4);

  AprioriConfig bad = cfg;
  bad.h_list = {0.4, 0.2};
  CHECK_THROWS_AS(apriori_scaling(bad, model_well(), Potential::gaussian(1.0, 1.0), rgrid()),
                  InvalidArgument);
}

TEST_CASE("ktv form bound: free case") {
  BoxGrid box(2.0 * M_PI, 16, 1, 0.2);
  const Potential zero = Potential::gaussian(0.0, 1.0);
  RadialProfile nodelta(rgrid(), std::vector<double>(rgrid().count(), 0.0));
  const KtvFormBound kb = ktv_form_bound_check(box, 1.0, zero, 1.0, nodelta, 0.2, 20);
  // LHS = K >= 2T > 0 while the COM form vanishes on functions of x - y
  CHECK(kb.cstar > 0.0);
  CHECK(kb.min_sampled_ratio >= kb.cstar - 1e-10);
  CHECK(!kb.refined_nontrivial);
}

TEST_CASE("ktv form bound: model well near Tc") {
  tibcs::GapSolveOptions opts;
  opts.known_tc = model_tc();
  opts.anderson = true;
  const double T = 0.9 * model_tc();
  const tibcs::GapSolution sol = tibcs::solve_gap(T, model_well(), 1.0, rgrid(), opts);
  RadialProfile delta(rgrid(), sol.delta);
  BoxGrid box(2.0 * M_PI, 16, 1, 0.25);
  const KtvFormBound kb = ktv_form_bound_check(box, T, model_well(), 1.0, delta, 0.25, 20);
  MESSAGE("ktv C* = ", kb.cstar, ", kernel LHS = ", kb.kernel_lhs);
  CHECK(kb.gap_residual < 1e-10);
  CHECK(kb.cstar > 0.0);
  // the refined kernel direction annihilates both forms simultaneously
  CHECK(std::abs(kb.kernel_lhs) < 1e-8);
  CHECK(kb.kernel_rhs == 0.0);
  CHECK(kb.min_sampled_ratio >= kb.cstar - 1e-10);

  CHECK_THROWS_AS(
      ktv_form_bound_check(BoxGrid(2.0, 16, 2, 0.25), T, model_well(), 1.0, delta, 0.25, 5),
      InvalidArgument);
}
