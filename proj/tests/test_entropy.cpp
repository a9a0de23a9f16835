#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bcslab/entropy.hpp"

using namespace bcslab;
using namespace bcslab::entropy;

namespace {

Matrix diag2n(std::initializer_list<double> vals) {
  Eigen::VectorXcd v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v(i++) = x;
  return v.asDiagonal();
}

}  // namespace

TEST_CASE("gibbs state of H = 0 is the half state") {
  const int n = 3;
  BlockHamiltonian H(Matrix::Zero(n, n), Matrix::Zero(n, n));
  const BlockState G = gibbs_block_state(H, 2.0);
  CHECK((G.matrix() - 0.5 * Matrix::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("gibbs state of a diagonal Hamiltonian has Fermi factors") {
  const int n = 2;
  Matrix A = diag2n({1.5, -0.7});
  BlockHamiltonian H(A, Matrix::Zero(n, n));
  const double beta = 1.3;
  const BlockState G = gibbs_block_state(H, beta);
  for (int i = 0; i < n; ++i) {
    const double e = A(i, i).real();
    CHECK(G.matrix()(i, i).real() ==
          doctest::Approx(1.0 / (1.0 + std::exp(beta * e))).epsilon(1e-13));
    CHECK(G.matrix()(n + i, n + i).real() ==
          doctest::Approx(1.0 / (1.0 + std::exp(-beta * e))).epsilon(1e-13));
  }
}

TEST_CASE("gibbs state of a random Hamiltonian keeps pattern and spectrum") {
  Rng rng(42);
  const BlockHamiltonian H = random_block_hamiltonian(4, rng);
  const BlockState G = gibbs_block_state(H, 0.8);
  CHECK(G.pattern_defect() < 1e-12);
  CHECK(G.spectrum_defect() == 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(G.matrix(), Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK(es.eigenvalues().maxCoeff() < 1.0);
  CHECK_THROWS_AS(gibbs_block_state(H, -1.0), InvalidArgument);
}

TEST_CASE("relative entropy basics") {
  Rng rng(7);
  const BlockState G = random_block_state(4, rng);
  CHECK(std::abs(relative_entropy(G, G)) < 1e-12);

  const BlockState G2 = random_block_state(4, rng);
  CHECK(relative_entropy(G, G2) >= 0.0);  // Klein nonnegativity

  // scalars embedded diagonally: x ln(x/y) + (1-x) ln((1-x)/(1-y))
  const double x = 0.3, y = 0.5;
  BlockState Gx(diag2n({x}), Matrix::Zero(1, 1));
  BlockState Gy(diag2n({y}), Matrix::Zero(1, 1));
  const double want =
      2.0 * (x * std::log(x / y) + (1.0 - x) * std::log((1.0 - x) / (1.0 - y)));
  // both diagonal entries x and 1-x contribute; for y = 1/2 they are equal
  CHECK(relative_entropy(Gx, Gy) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("relative entropy rejects singular references") {
  BlockState G(diag2n({0.3}), Matrix::Zero(1, 1));
  BlockState edge(diag2n({1.0}), Matrix::Zero(1, 1));
  CHECK_THROWS_AS(relative_entropy(G, edge), SingularReference);
  CHECK(relative_entropy(edge, G) >= 0.0);  // 0 ln 0 = 0 on the state side
}

TEST_CASE("relative entropy separates states") {
  Rng rng(12);
  for (int s = 0; s < 20; ++s) {
    const BlockState G = random_block_state(3, rng);
    const BlockState Gp = random_block_state(3, rng);
    const double dist = (G.matrix() - Gp.matrix()).cwiseAbs().maxCoeff();
    const double h = relative_entropy(G, Gp);
    if (dist > 1e-5) CHECK(h > 0.0);
    if (h < 1e-12) CHECK(dist < 1e-5);
  }
}

TEST_CASE("scalar entropy inequality gap") {
  CHECK(scalar_entropy_inequality_gap(0.3, 0.3) == doctest::Approx(0.0).epsilon(1e-14));
  // y = 1/2 uses the removable-limit coefficient 2
  CHECK(entropy_coefficient(0.5) == doctest::Approx(2.0));
  const double x = 0.9;
  const double lhs =
      x * std::log(x / 0.5) + (1.0 - x) * std::log((1.0 - x) / 0.5);
  const double want = lhs - 2.0 * (x - 0.5) * (x - 0.5) -
                      (4.0 / 3.0) * std::pow(x * (1.0 - x) - 0.25, 2);
  CHECK(scalar_entropy_inequality_gap(x, 0.5) == doctest::Approx(want).epsilon(1e-12));
  CHECK(want >= 0.0);
  CHECK_THROWS_AS(scalar_entropy_inequality_gap(0.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(scalar_entropy_inequality_gap(0.5, 1.0), InvalidArgument);
}

TEST_CASE("scalar entropy inequality on the 99x99 grid") {
  double min_gap = 1e300;
  for (int i = 1; i <= 99; ++i)
    for (int j = 1; j <= 99; ++j)
      min_gap = std::min(min_gap, scalar_entropy_inequality_gap(i / 100.0, j / 100.0));
  CHECK(min_gap >= -1e-12);
}

TEST_CASE("entropy coefficient series branch is smooth") {
  const double below = entropy_coefficient(0.5 - 0.49e-4);
  const double above = entropy_coefficient(0.5 - 1.01e-4);
  CHECK(std::abs(below - above) < 1e-7);
}

TEST_CASE("entropy bound terms: equality and H = 0 cases") {
  Rng rng(3);
  const int n = 3;
  const BlockHamiltonian H = random_block_hamiltonian(n, rng);
  const double beta = 1.1;
  const BlockState Gp = gibbs_block_state(H, beta);
  const EntropyBoundTerms eq = entropy_bound_terms(Gp, H, beta);
  CHECK(std::abs(eq.lhs) < 1e-10);
  CHECK(std::abs(eq.kinetic_term) < 1e-10);
  CHECK(std::abs(eq.quartic_term) < 1e-10);

  // H = 0: Gp = 1/2 and the kinetic term is 2 Tr (G - 1/2)^2
  BlockHamiltonian H0(Matrix::Zero(n, n), Matrix::Zero(n, n));
  const BlockState G = random_block_state(n, rng);
  const EntropyBoundTerms t = entropy_bound_terms(G, H0, beta);
  const Matrix D = G.matrix() - 0.5 * Matrix::Identity(2 * n, 2 * n);
  CHECK(t.kinetic_term == doctest::Approx(2.0 * (D * D).trace().real()).epsilon(1e-12));
  CHECK(t.slack() >= -1e-10);
}

TEST_CASE("lemma 2.1 inequality over random triples") {
  const SuiteReport rep = run_entropy_suite(300, 5, 2024);
  CHECK(rep.samples == 300);
  CHECK(rep.min_slack >= -1e-10);
}

TEST_CASE("operator identity defect") {
  const int n = 3;
  BlockHamiltonian H0(Matrix::Zero(n, n), Matrix::Zero(n, n));
  CHECK(operator_identity_defect(H0, 1.0) < 1e-12);  // both sides 2*identity

  Matrix A = diag2n({0.4, -1.2, 2.0});
  BlockHamiltonian Hd(A, Matrix::Zero(n, n));
  CHECK(operator_identity_defect(Hd, 0.9) < 1e-12);

  Rng rng(3);
  const BlockHamiltonian H = random_block_hamiltonian(5, rng);
  CHECK(operator_identity_defect(H, 1.7) < 1e-10);
}

TEST_CASE("klein contraction gap") {
  Rng rng(15);
  const Matrix g = random_hermitian_01(4, rng);
  CHECK(std::abs(klein_contraction_gap(g, g)) < 1e-13);

  // commuting diagonal pair reduces to the scalar inequality
  const Matrix a = diag2n({0.2, 0.7, 0.95, 0.5});
  const Matrix b = diag2n({0.4, 0.1, 0.85, 0.55});
  double want = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double da = a(i, i).real() - b(i, i).real();
    const double dq = a(i, i).real() * (1 - a(i, i).real()) -
                      b(i, i).real() * (1 - b(i, i).real());
    want += da * da - dq * dq;
  }
  CHECK(klein_contraction_gap(a, b) == doctest::Approx(want).epsilon(1e-12));
  CHECK(want >= 0.0);

  CHECK_THROWS_AS(klein_contraction_gap(diag2n({1.5, 0.5}), diag2n({0.5, 0.5})),
                  InvalidArgument);

  const SuiteReport rep = run_klein_suite(500, 6, 99);
  CHECK(rep.min_slack >= -1e-12);
}

TEST_CASE("block trace and HS chain inequalities") {
  Rng rng(8);
  const BlockState G = random_block_state(4, rng);
  CHECK(std::abs(block_trace_inequality_gap(G, G)) < 1e-13);
  CHECK(std::abs(hs_chain_gap(G, G)) < 1e-13);

  // alpha = alpha0 = 0: block-diagonal case
  const Matrix g1 = random_hermitian_01(3, rng);
  const Matrix g2 = random_hermitian_01(3, rng);
  BlockState B1(g1, Matrix::Zero(3, 3));
  BlockState B2(g2, Matrix::Zero(3, 3));
  CHECK(block_trace_inequality_gap(B1, B2) >= -1e-12);

  // gamma shared, small alpha difference
  Rng rng2(9);
  const BlockState S = random_block_state(4, rng2);
  Matrix small = S.alpha() * 0.98;
  BlockState S2(S.gamma(), small);
  CHECK(hs_chain_gap(S, S2) >= -1e-12);

  const SuiteReport bt = run_block_trace_suite(500, 4, 31);
  CHECK(bt.min_slack >= -1e-10);
  const SuiteReport hs = run_hs_chain_suite(500, 4, 32);
  CHECK(hs.min_slack >= -1e-10);
}

TEST_CASE("block state constructors validate their input") {
  CHECK_THROWS_AS(BlockState(diag2n({1.5, 0.2}), Matrix::Zero(2, 2)), InvalidArgument);
  CHECK_THROWS_AS(BlockState(Matrix::Zero(2, 2), Matrix::Zero(3, 3)), InvalidArgument);
  Matrix bad = Matrix::Zero(4, 4);
  bad(0, 0) = 0.5;
  bad(1, 1) = 0.5;
  bad(2, 2) = 0.9;  // breaks 1 - conj(gamma)
  bad(3, 3) = 0.9;
  CHECK_THROWS_AS(BlockState::from_matrix(bad), InvalidArgument);
}

TEST_CASE("compressed relative entropy profile (diagnostic)") {
  Rng rng(21);
  const BlockState G = random_block_state(3, rng);
  const BlockState Gp = random_block_state(3, rng);
  const auto profile = compressed_entropy_profile(G, Gp, 77);
  CHECK(static_cast<int>(profile.size()) == 6);
  for (double v : profile) CHECK(v >= -1e-12);
  // full-rank compression equals the plain relative entropy
  CHECK(profile.back() == doctest::Approx(relative_entropy(G, Gp)).epsilon(1e-10));
  // monotonicity in rank is reported, not asserted; count violations only
  int violations = 0;
  for (std::size_t k = 1; k < profile.size(); ++k)
    if (profile[k] < profile[k - 1] - 1e-12) ++violations;
  MESSAGE("compressed-entropy monotonicity violations: ", violations);
}

TEST_CASE("identity suite reports small defects") {
  const SuiteReport rep = run_identity_suite(100, 5, 4);
  CHECK(rep.min_slack >= -1e-10);  // slack = -defect
}
