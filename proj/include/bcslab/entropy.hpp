#pragma once

// Finite-dimensional relative entropy of BCS block states and the matrix
// inequalities behind the lower bound: the Lemma-2.1 entropy inequality, the
// operator identity ln((1-G)/G)/(1-2G) = H/tanh(H/2), Klein-type
// contractions and the Hilbert-Schmidt chain.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "bcslab/errors.hpp"
#include "bcslab/rng.hpp"

namespace bcslab::entropy {

using Matrix = Eigen::MatrixXcd;

// Generalized one-particle density matrix with the 2x2 block pattern
//   Gamma = (gamma, alpha; conj(alpha), 1 - conj(gamma)),
// gamma Hermitian, alpha symmetric (alpha^T = alpha), 0 <= Gamma <= 1.
class BlockState {
 public:
  // Assemble from blocks; the full matrix gets the pattern by construction.
  BlockState(const Matrix& gamma, const Matrix& alpha);
  // Validate a full matrix against the pattern and spectrum.
  static BlockState from_matrix(const Matrix& full, double tol = 1e-10);
  // Assemble without the spectrum eigencheck; for callers that construct
  // the blocks by functional calculus, where 0 <= Gamma <= 1 is automatic.
  static BlockState trusted(const Matrix& gamma, const Matrix& alpha);

  int half_dim() const { return n_; }
  const Matrix& matrix() const { return full_; }
  Matrix gamma() const { return full_.topLeftCorner(n_, n_); }
  Matrix alpha() const { return full_.topRightCorner(n_, n_); }

  // Largest violation of the block pattern and of 0 <= Gamma <= 1.
  double pattern_defect() const;
  double spectrum_defect() const;

 private:
  explicit BlockState(Matrix full);
  int n_ = 0;
  Matrix full_;
};

// Hermitian 2n x 2n with the (A, D; conj(D), -conj(A)) BdG block pattern,
// A Hermitian and D symmetric.
class BlockHamiltonian {
 public:
  BlockHamiltonian(const Matrix& diagonal_block, const Matrix& pairing_block);
  static BlockHamiltonian from_matrix(const Matrix& full, double tol = 1e-12);

  int half_dim() const { return n_; }
  const Matrix& matrix() const { return full_; }
  double pattern_defect() const;

 private:
  explicit BlockHamiltonian(Matrix full);
  int n_ = 0;
  Matrix full_;
};

// Gamma = (1 + e^{beta H})^{-1}; preserves the block pattern.
BlockState gibbs_block_state(const BlockHamiltonian& H, double beta);

// Tr[phi(G) - phi(Gp) - phi'(Gp)(G - Gp)], phi(x) = x ln x + (1-x) ln(1-x).
// Reference eigenvalues must be strictly inside (0,1).
double relative_entropy(const BlockState& G, const BlockState& Gp);

// Scalar inequality gap:
//   x ln(x/y) + (1-x) ln((1-x)/(1-y))
//     - ln((1-y)/y)/(1-2y) (x-y)^2 - 4/3 (x(1-x) - y(1-y))^2  >= 0.
double scalar_entropy_inequality_gap(double x, double y);

// Coefficient ln((1-y)/y)/(1-2y) = 2 artanh(1-2y)/(1-2y), series at y = 1/2.
double entropy_coefficient(double y);

struct EntropyBoundTerms {
  double lhs = 0.0;           // relative entropy H(G, Gibbs(H, beta))
  double kinetic_term = 0.0;  // Tr[(G-Gp) f(beta H) (G-Gp)], f(x) = x/tanh(x/2)
  double quartic_term = 0.0;  // 4/3 Tr[(G(1-G) - Gp(1-Gp))^2]
  double slack() const { return lhs - kinetic_term - quartic_term; }
};

EntropyBoundTerms entropy_bound_terms(const BlockState& G, const BlockHamiltonian& H,
                                      double beta);

// Operator-norm defect of ln((1-Gp)/Gp)/(1-2Gp) = beta H / tanh(beta H / 2),
// the left side evaluated from the Gibbs state's own eigendecomposition.
double operator_identity_defect(const BlockHamiltonian& H, double beta);

// Tr(g-g0)^2 - Tr(g(1-g) - g0(1-g0))^2 >= 0 for Hermitian g, g0 in [0,1].
double klein_contraction_gap(const Matrix& g, const Matrix& g0, double tol = 1e-9);

// Tr[G(1-G) - G0(1-G0)]^2 - 2 Tr[gamma(1-gamma) - gamma0(1-gamma0)
//   - alpha conj(alpha) + alpha0 conj(alpha0)]^2 >= 0.
double block_trace_inequality_gap(const BlockState& G, const BlockState& G0);

// 2 Tr(gamma-gamma0)^2 + 4/3 Tr[...]^2 - 4/5 Tr(alpha conj(alpha)
//   - alpha0 conj(alpha0))^2 >= 0.
double hs_chain_gap(const BlockState& G, const BlockState& G0);

// Random pattern-valid inputs for the randomized suites. States are Gibbs
// states of random Hamiltonians projected back to the exact pattern with
// eigenvalues clipped to [eps, 1-eps].
BlockHamiltonian random_block_hamiltonian(int n, Rng& rng, double scale = 1.0);
BlockState random_block_state(int n, Rng& rng, double eps = 1e-6);
Matrix random_hermitian_01(int n, Rng& rng, double eps = 1e-6);

// Relative entropy of compressions P G P onto the span of the first k
// vectors of a random orthonormal basis, k = 1..2n. Reported diagnostic.
std::vector<double> compressed_entropy_profile(const BlockState& G, const BlockState& Gp,
                                               std::uint64_t seed);

struct SuiteReport {
  std::string inequality_id;
  int samples = 0;
  double min_slack = 0.0;
  std::uint64_t argmin_seed = 0;
};

// Randomized suites behind the `verify` command.
SuiteReport run_entropy_suite(int samples, int dim, std::uint64_t seed);
SuiteReport run_klein_suite(int samples, int dim, std::uint64_t seed);
SuiteReport run_block_trace_suite(int samples, int dim, std::uint64_t seed);
SuiteReport run_hs_chain_suite(int samples, int dim, std::uint64_t seed);
SuiteReport run_identity_suite(int samples, int dim, std::uint64_t seed);

}  // namespace bcslab::entropy
