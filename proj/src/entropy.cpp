#include "bcslab/entropy.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace bcslab::entropy {

namespace {

Matrix hermitize(const Matrix& a) { return 0.5 * (a + a.adjoint()); }
Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

// f(M) for Hermitian M through its eigendecomposition.
Matrix matrix_function(const Matrix& m, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Eigen::VectorXd fv = es.eigenvalues();
  for (int i = 0; i < fv.size(); ++i) fv(i) = f(fv(i));
  return es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().adjoint();
}

double phi(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;  // 0 ln 0 = 0
  return x * std::log(x) + (1.0 - x) * std::log(1.0 - x);
}

// x/tanh(x/2) with the removable singularity at 0.
double xcoth_half(double x) {
  if (std::abs(x) < 1e-4) {
    const double u = 0.5 * x;
    return 2.0 * (1.0 + u * u / 3.0 - u * u * u * u / 45.0);
  }
  return x / std::tanh(0.5 * x);
}

double operator_norm_hermitian(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Relative entropy for plain Hermitian matrices with spectra in [0,1],
// reference strictly inside (0,1).
double relative_entropy_matrices(const Matrix& g, const Matrix& gp) {
  Eigen::SelfAdjointEigenSolver<Matrix> esg(g);
  Eigen::SelfAdjointEigenSolver<Matrix> esp(gp);
  const Eigen::VectorXd lg = esg.eigenvalues();
  const Eigen::VectorXd lp = esp.eigenvalues();
  if (lg.minCoeff() < -1e-10 || lg.maxCoeff() > 1.0 + 1e-10)
    throw InvalidArgument("relative_entropy: state eigenvalue outside [0,1]");
  if (lp.minCoeff() <= 0.0 || lp.maxCoeff() >= 1.0)
    throw SingularReference("relative_entropy: reference eigenvalue at {0,1}");

  double tr_phi_g = 0.0;
  for (int i = 0; i < lg.size(); ++i) tr_phi_g += phi(std::clamp(lg(i), 0.0, 1.0));
  double tr_phi_gp = 0.0;
  Eigen::VectorXd dphi(lp.size());
  for (int i = 0; i < lp.size(); ++i) {
    tr_phi_gp += phi(lp(i));
    dphi(i) = std::log(lp(i) / (1.0 - lp(i)));
  }
  const Matrix phi_prime =
      esp.eigenvectors() * dphi.asDiagonal() * esp.eigenvectors().adjoint();
  const double cross = (phi_prime * (g - gp)).trace().real();
  return tr_phi_g - tr_phi_gp - cross;
}

}  // namespace

BlockState::BlockState(Matrix full) : n_(static_cast<int>(full.rows()) / 2), full_(std::move(full)) {}

BlockState::BlockState(const Matrix& gamma, const Matrix& alpha) {
  if (gamma.rows() != gamma.cols() || alpha.rows() != alpha.cols() ||
      gamma.rows() != alpha.rows())
    throw InvalidArgument("BlockState: blocks must be square and same size");
  n_ = static_cast<int>(gamma.rows());
  const Matrix g = hermitize(gamma);
  const Matrix a = symmetrize(alpha);
  full_.resize(2 * n_, 2 * n_);
  full_.topLeftCorner(n_, n_) = g;
  full_.topRightCorner(n_, n_) = a;
  full_.bottomLeftCorner(n_, n_) = a.conjugate();
  full_.bottomRightCorner(n_, n_) = Matrix::Identity(n_, n_) - g.conjugate();
  if (spectrum_defect() > 1e-9)
    throw InvalidArgument("BlockState: spectrum outside [0,1]");
}

BlockState BlockState::trusted(const Matrix& gamma, const Matrix& alpha) {
  const int n = static_cast<int>(gamma.rows());
  const Matrix g = hermitize(gamma);
  const Matrix a = symmetrize(alpha);
  Matrix full(2 * n, 2 * n);
  full.topLeftCorner(n, n) = g;
  full.topRightCorner(n, n) = a;
  full.bottomLeftCorner(n, n) = a.conjugate();
  full.bottomRightCorner(n, n) = Matrix::Identity(n, n) - g.conjugate();
  return BlockState(std::move(full));
}

BlockState BlockState::from_matrix(const Matrix& full, double tol) {
  if (full.rows() != full.cols() || full.rows() % 2 != 0)
    throw InvalidArgument("BlockState::from_matrix: need even square matrix");
  BlockState st{Matrix(full)};
  if (st.pattern_defect() > tol)
    throw InvalidArgument("BlockState::from_matrix: block pattern violated");
  if (st.spectrum_defect() > tol)
    throw InvalidArgument("BlockState::from_matrix: spectrum outside [0,1]");
  return st;
}

double BlockState::pattern_defect() const {
  const Matrix g = gamma();
  const Matrix a = alpha();
  double d = (full_ - full_.adjoint()).cwiseAbs().maxCoeff();
  d = std::max(d, (a - a.transpose()).cwiseAbs().maxCoeff());
  d = std::max(d, (full_.bottomLeftCorner(n_, n_) - a.conjugate()).cwiseAbs().maxCoeff());
  d = std::max(d, (full_.bottomRightCorner(n_, n_) -
                   (Matrix::Identity(n_, n_) - g.conjugate()))
                      .cwiseAbs()
                      .maxCoeff());
  return d;
}

double BlockState::spectrum_defect() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(full_), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  return std::max(std::max(-lo, hi - 1.0), 0.0);
}

BlockHamiltonian::BlockHamiltonian(Matrix full)
    : n_(static_cast<int>(full.rows()) / 2), full_(std::move(full)) {}

BlockHamiltonian::BlockHamiltonian(const Matrix& diagonal_block, const Matrix& pairing_block) {
  if (diagonal_block.rows() != diagonal_block.cols() ||
      pairing_block.rows() != pairing_block.cols() ||
      diagonal_block.rows() != pairing_block.rows())
    throw InvalidArgument("BlockHamiltonian: blocks must be square and same size");
  n_ = static_cast<int>(diagonal_block.rows());
  const Matrix a = hermitize(diagonal_block);
  const Matrix d = symmetrize(pairing_block);
  full_.resize(2 * n_, 2 * n_);
  full_.topLeftCorner(n_, n_) = a;
  full_.topRightCorner(n_, n_) = d;
  full_.bottomLeftCorner(n_, n_) = d.conjugate();
  full_.bottomRightCorner(n_, n_) = -a.conjugate();
}

BlockHamiltonian BlockHamiltonian::from_matrix(const Matrix& full, double tol) {
  if (full.rows() != full.cols() || full.rows() % 2 != 0)
    throw InvalidArgument("BlockHamiltonian::from_matrix: need even square matrix");
  BlockHamiltonian h{Matrix(full)};
  if (h.pattern_defect() > tol)
    throw InvalidArgument("BlockHamiltonian::from_matrix: block pattern violated");
  return h;
}

double BlockHamiltonian::pattern_defect() const {
  const Matrix a = full_.topLeftCorner(n_, n_);
  const Matrix d = full_.topRightCorner(n_, n_);
  double defect = (full_ - full_.adjoint()).cwiseAbs().maxCoeff();
  defect = std::max(defect, (d - d.transpose()).cwiseAbs().maxCoeff());
  defect = std::max(defect,
                    (full_.bottomLeftCorner(n_, n_) - d.conjugate()).cwiseAbs().maxCoeff());
  defect = std::max(defect,
                    (full_.bottomRightCorner(n_, n_) + a.conjugate()).cwiseAbs().maxCoeff());
  return defect;
}

BlockState gibbs_block_state(const BlockHamiltonian& H, double beta) {
  if (beta <= 0.0) throw InvalidArgument("gibbs_block_state: beta must be positive");
  const double scale = std::max(1.0, H.matrix().cwiseAbs().maxCoeff());
  if (H.pattern_defect() > 1e-12 * scale)
    throw InvalidArgument("gibbs_block_state: Hamiltonian pattern defect");
  const Matrix full = matrix_function(
      hermitize(H.matrix()), [beta](double x) { return 1.0 / (1.0 + std::exp(beta * x)); });
  const int n = H.half_dim();
  // Functional calculus preserves the pattern up to rounding; rebuild it
  // exactly from the blocks. The spectrum is inside (0,1) by construction.
  return BlockState::trusted(full.topLeftCorner(n, n), full.topRightCorner(n, n));
}

double relative_entropy(const BlockState& G, const BlockState& Gp) {
  return relative_entropy_matrices(hermitize(G.matrix()), hermitize(Gp.matrix()));
}

double entropy_coefficient(double y) {
  if (!(y > 0.0 && y < 1.0))
    throw InvalidArgument("entropy_coefficient: y must be in (0,1)");
  const double t = 1.0 - 2.0 * y;
  if (std::abs(t) < 1e-4) {
    const double t2 = t * t;
    return 2.0 * (1.0 + t2 / 3.0 + t2 * t2 / 5.0);
  }
  return std::log((1.0 - y) / y) / t;
}

double scalar_entropy_inequality_gap(double x, double y) {
  if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0))
    throw InvalidArgument("scalar_entropy_inequality_gap: arguments must be in (0,1)");
  const double lhs = x * std::log(x / y) + (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
  const double quad = entropy_coefficient(y) * (x - y) * (x - y);
  const double dq = x * (1.0 - x) - y * (1.0 - y);
  return lhs - quad - (4.0 / 3.0) * dq * dq;
}

EntropyBoundTerms entropy_bound_terms(const BlockState& G, const BlockHamiltonian& H,
                                      double beta) {
  const BlockState Gp = gibbs_block_state(H, beta);
  EntropyBoundTerms out;
  out.lhs = relative_entropy(G, Gp);
  const Matrix D = hermitize(G.matrix() - Gp.matrix());
  const Matrix f = matrix_function(hermitize(H.matrix()),
                                   [beta](double x) { return xcoth_half(beta * x); });
  out.kinetic_term = (D * f * D).trace().real();
  const Matrix g1 = hermitize(G.matrix());
  const Matrix g2 = hermitize(Gp.matrix());
  const Matrix q = (g1 - g1 * g1) - (g2 - g2 * g2);
  out.quartic_term = (4.0 / 3.0) * (q * q).trace().real();
  return out;
}

double operator_identity_defect(const BlockHamiltonian& H, double beta) {
  const BlockState Gp = gibbs_block_state(H, beta);
  // Left side from the Gibbs state's own eigendecomposition.
  const Matrix lhs = matrix_function(hermitize(Gp.matrix()), [](double y) {
    return entropy_coefficient(std::clamp(y, 1e-300, 1.0 - 1e-16));
  });
  const Matrix rhs = matrix_function(hermitize(H.matrix()),
                                     [beta](double x) { return xcoth_half(beta * x); });
  return operator_norm_hermitian(lhs - rhs);
}

double klein_contraction_gap(const Matrix& g, const Matrix& g0, double tol) {
  for (const Matrix* m : {&g, &g0}) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(*m), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol || es.eigenvalues().maxCoeff() > 1.0 + tol)
      throw InvalidArgument("klein_contraction_gap: eigenvalue outside [0,1]");
  }
  const Matrix a = hermitize(g);
  const Matrix b = hermitize(g0);
  const Matrix d = a - b;
  const Matrix q = (a - a * a) - (b - b * b);
  return (d * d).trace().real() - (q * q).trace().real();
}

double block_trace_inequality_gap(const BlockState& G, const BlockState& G0) {
  const Matrix g1 = hermitize(G.matrix());
  const Matrix g2 = hermitize(G0.matrix());
  const Matrix M = (g1 - g1 * g1) - (g2 - g2 * g2);
  const double lhs = (M * M).trace().real();

  const Matrix ga = G.gamma(), gb = G0.gamma();
  const Matrix aa = G.alpha(), ab = G0.alpha();
  const Matrix X = (ga - ga * ga) - (gb - gb * gb) - aa * aa.adjoint() + ab * ab.adjoint();
  const double rhs = 2.0 * (X * X).trace().real();
  return lhs - rhs;
}

double hs_chain_gap(const BlockState& G, const BlockState& G0) {
  const Matrix ga = G.gamma(), gb = G0.gamma();
  const Matrix aa = G.alpha(), ab = G0.alpha();
  const Matrix dg = ga - gb;
  const Matrix X = (ga - ga * ga) - (gb - gb * gb) - aa * aa.adjoint() + ab * ab.adjoint();
  const Matrix Y = aa * aa.adjoint() - ab * ab.adjoint();
  const double lhs = 2.0 * (dg * dg).trace().real() + (4.0 / 3.0) * (X * X).trace().real();
  const double rhs = (4.0 / 5.0) * (Y * Y).trace().real();
  return lhs - rhs;
}

BlockHamiltonian random_block_hamiltonian(int n, Rng& rng, double scale) {
  Matrix a(n, n), d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, j) = scale * rng.complex_normal();
      d(i, j) = scale * rng.complex_normal();
    }
  return BlockHamiltonian(hermitize(a), symmetrize(d));
}

BlockState random_block_state(int n, Rng& rng, double eps) {
  Matrix a(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j < 2 * n; ++j) a(i, j) = rng.complex_normal();
  const Matrix gamma_full =
      matrix_function(hermitize(a), [](double x) { return 1.0 / (1.0 + std::exp(x)); });
  // Project to the exact block pattern (which can push the spectrum outside
  // [0,1]), then clip; clipping commutes with the pattern symmetry since
  // clip(1-x) = 1 - clip(x).
  const Matrix g = hermitize(gamma_full.topLeftCorner(n, n));
  const Matrix al = symmetrize(gamma_full.topRightCorner(n, n));
  Matrix projected(2 * n, 2 * n);
  projected.topLeftCorner(n, n) = g;
  projected.topRightCorner(n, n) = al;
  projected.bottomLeftCorner(n, n) = al.conjugate();
  projected.bottomRightCorner(n, n) = Matrix::Identity(n, n) - g.conjugate();
  const Matrix clipped = matrix_function(hermitize(projected), [eps](double x) {
    return std::clamp(x, eps, 1.0 - eps);
  });
  return BlockState(clipped.topLeftCorner(n, n), clipped.topRightCorner(n, n));
}

Matrix random_hermitian_01(int n, Rng& rng, double eps) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.complex_normal();
  return matrix_function(hermitize(a), [eps](double x) {
    return std::clamp(1.0 / (1.0 + std::exp(x)), eps, 1.0 - eps);
  });
}

std::vector<double> compressed_entropy_profile(const BlockState& G, const BlockState& Gp,
                                               std::uint64_t seed) {
  const int dim = 2 * G.half_dim();
  Rng rng(seed);
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = rng.complex_normal();
  const Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix Q = qr.householderQ();
  std::vector<double> out;
  for (int k = 1; k <= dim; ++k) {
    const Matrix Pk = Q.leftCols(k);
    const Matrix cg = Pk.adjoint() * G.matrix() * Pk;
    const Matrix cp = Pk.adjoint() * Gp.matrix() * Pk;
    out.push_back(relative_entropy_matrices(hermitize(cg), hermitize(cp)));
  }
  return out;
}

namespace {

template <typename F>
SuiteReport run_suite(const std::string& id, int samples, F&& slack_of_sample,
                      std::uint64_t seed) {
  SuiteReport rep;
  rep.inequality_id = id;
  rep.samples = samples;
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::for_sample(seed, static_cast<std::uint64_t>(s));
    const double slack = slack_of_sample(rng);
    if (slack < rep.min_slack) {
      rep.min_slack = slack;
      rep.argmin_seed = static_cast<std::uint64_t>(s);
    }
  }
  return rep;
}

}  // namespace

namespace {

// Scale beta so beta * ||H|| hits a prescribed value; keeps the Gibbs
// eigenvalues representable and the log identity well-conditioned.
double beta_for_target(const BlockHamiltonian& H, double x_max) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H.matrix(), Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  return lmax > 0.0 ? x_max / lmax : 1.0;
}

}  // namespace

SuiteReport run_entropy_suite(int samples, int dim, std::uint64_t seed) {
  return run_suite(
      "rel_entropy_lower_bound", samples,
      [dim](Rng& rng) {
        const int n = 2 + static_cast<int>(rng.uniform() * (dim - 1));
        const BlockState G = random_block_state(n, rng);
        const BlockHamiltonian H = random_block_hamiltonian(n, rng, rng.uniform(0.2, 2.0));
        const double beta = beta_for_target(H, rng.uniform(0.5, 20.0));
        return entropy_bound_terms(G, H, beta).slack();
      },
      seed);
}

SuiteReport run_klein_suite(int samples, int dim, std::uint64_t seed) {
  return run_suite(
      "klein_contraction", samples,
      [dim](Rng& rng) {
        const int n = 2 + static_cast<int>(rng.uniform() * (dim - 1));
        const Matrix g = random_hermitian_01(n, rng);
        const Matrix g0 = random_hermitian_01(n, rng);
        return klein_contraction_gap(g, g0);
      },
      seed);
}

SuiteReport run_block_trace_suite(int samples, int dim, std::uint64_t seed) {
  return run_suite(
      "block_trace", samples,
      [dim](Rng& rng) {
        const int n = 2 + static_cast<int>(rng.uniform() * (dim - 1));
        return block_trace_inequality_gap(random_block_state(n, rng),
                                          random_block_state(n, rng));
      },
      seed);
}

SuiteReport run_hs_chain_suite(int samples, int dim, std::uint64_t seed) {
  return run_suite(
      "hs_chain", samples,
      [dim](Rng& rng) {
        const int n = 2 + static_cast<int>(rng.uniform() * (dim - 1));
        return hs_chain_gap(random_block_state(n, rng), random_block_state(n, rng));
      },
      seed);
}

SuiteReport run_identity_suite(int samples, int dim, std::uint64_t seed) {
  // slack = -defect so the shared min-slack semantics apply
  return run_suite(
      "operator_identity", samples,
      [dim](Rng& rng) {
        const int n = 2 + static_cast<int>(rng.uniform() * (dim - 1));
        const BlockHamiltonian H = random_block_hamiltonian(n, rng, rng.uniform(0.2, 2.0));
        // 1-Gamma' ~ e^{-beta lambda}: past beta lambda ~ 12 the left side
        // loses the 1e-10 defect target to cancellation in 1 - Gamma'.
        const double beta = beta_for_target(H, rng.uniform(0.5, 10.0));
        return -operator_identity_defect(H, beta);
      },
      seed);
}

}  // namespace bcslab::entropy
