#include "bcslab/cert.hpp"

#include <cmath>

#include "bcslab/kernels.hpp"
#include "bcslab/rng.hpp"
#include "bcslab/tibcs.hpp"

namespace bcslab::cert {

namespace {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Minimal-image displacement of two lattice sites.
Eigen::Vector3d min_image(const BoxGrid& box, int x, int y) {
  Eigen::Vector3d d = box.position(x) - box.position(y);
  for (int k = 0; k < box.dims(); ++k) {
    while (d[k] < -0.5 * box.L()) d[k] += box.L();
    while (d[k] >= 0.5 * box.L()) d[k] -= box.L();
  }
  return d;
}

// V((x-y)/h) sampled over lattice pairs.
Eigen::MatrixXd pair_potential(const BoxGrid& box, const Potential& V, double h) {
  const int M = box.size();
  Eigen::MatrixXd out(M, M);
  for (int x = 0; x < M; ++x)
    for (int y = 0; y < M; ++y) out(x, y) = V.position(min_image(box, x, y).norm() / h);
  return out;
}

}  // namespace

double free_energy_difference(const entropy::BlockState& G,
                              const entropy::BlockState& G0w, const Potential& V,
                              double h, double beta, const BoxGrid& box,
                              const RadialProfile& alpha0) {
  const int M = box.size();
  if (G.half_dim() != M || G0w.half_dim() != M)
    throw InvalidArgument("free_energy_difference: state/box size mismatch");
  if (beta <= 0.0) throw InvalidArgument("free_energy_difference: beta must be positive");

  const double entropy_term = relative_entropy(G, G0w) / (2.0 * beta);
  if (V.is_zero()) return entropy_term;

  const decomp::BoxTransform t(box);
  // Position representation of the pair blocks.
  const CMatrix alpha_pos = t.matrix().adjoint() * G.alpha() * t.matrix();
  const CMatrix alpha0w_pos = t.matrix().adjoint() * G0w.alpha() * t.matrix();
  const CMatrix ref_pos = decomp::reference_pair_kernel(t, alpha0, h);

  const Eigen::MatrixXd vxy = pair_potential(box, V, h);
  const CMatrix d = alpha_pos - alpha0w_pos;
  const CMatrix w = alpha0w_pos - ref_pos;

  const double quadratic = (vxy.array() * d.array().abs2()).sum();
  const double linear = 2.0 * (vxy.array() * (d.array() * w.array().conjugate()).real()).sum();
  return entropy_term + quadratic + linear;
}

double gl_energy(const decomp::OrderField& psi, const Potential& W,
                 const Eigen::Matrix3d& B1, double B2, double B3) {
  const BoxGrid& box = psi.box;
  const int d = box.dims();
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B1.topLeftCorner(d, d),
                                                      Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw InvalidArgument("gl_energy: B1 must be positive definite");
  }
  const decomp::BoxTransform t(box);
  const int M = box.size();
  std::vector<CVector> grad(d);
  for (int k = 0; k < d; ++k) grad[k] = t.gradient(psi.psi, k);

  double total = 0.0;
  const double dV = box.cell_volume();
  for (int x = 0; x < M; ++x) {
    std::complex<double> gsum = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) gsum += std::conj(grad[a](x)) * B1(a, b) * grad[b](x);
    const double n2 = std::norm(psi.psi(x));
    const double wx = W.is_zero() ? 0.0 : W.position(box.position(x).norm());
    total += dV * (gsum.real() + B2 * wx * n2 + B3 * (1.0 - n2) * (1.0 - n2));
  }
  return total;
}

Certificate theorem_certificate(const entropy::BlockState& G,
                                const entropy::BlockState& G0w, const Potential& V,
                                double h, double beta, const BoxGrid& box,
                                const RadialProfile& alpha0, double c1, double c2) {
  const int M = box.size();
  if (G.half_dim() != M || G0w.half_dim() != M)
    throw InvalidArgument("theorem_certificate: state/box size mismatch");
  const decomp::BoxTransform t(box);
  const double dV = box.cell_volume();

  Certificate out;
  out.h = h;
  out.c1 = c1;
  out.c2 = c2;
  out.f_value = free_energy_difference(G, G0w, V, h, beta, box, alpha0);

  // Decomposition of the pair block in position representation.
  const CMatrix alpha_pos = t.matrix().adjoint() * G.alpha() * t.matrix();
  decomp::PairField alpha_field(box, alpha_pos, false);
  const decomp::OrderField psi = decomp::extract_psi(alpha_field, alpha0, h);
  const decomp::PairField xi = decomp::residual_xi(alpha_field, alpha0, psi, h);

  double gps = 0.0;
  for (int k = 0; k < box.dims(); ++k) gps += t.gradient(psi.psi, k).squaredNorm();
  out.grad_psi_sq = dV * gps;
  out.phi_l2_sq = dV * psi.phi().squaredNorm();

  // h-scaled H^1 norms in the momentum representation.
  auto h1_norm_sq = [&](const CMatrix& kernel_momentum) {
    double s = 0.0;
    for (int p = 0; p < M; ++p) {
      const double wp = h * box.momentum_norm(p);
      for (int q = 0; q < M; ++q) {
        const double wq = h * box.momentum_norm(q);
        s += (1.0 + wp * wp + wq * wq) * std::norm(kernel_momentum(p, q));
      }
    }
    return s;
  };
  out.xi_h1_sq = h1_norm_sq(t.matrix() * xi.values * t.matrix().adjoint());
  out.q_h1_sq = h1_norm_sq(G.gamma() - G0w.gamma());
  return out;
}

AprioriResult apriori_scaling(const AprioriConfig& cfg, const Potential& V,
                              const Potential& W, const RadialGrid& grid) {
  if (cfg.h_list.size() < 3)
    throw InvalidArgument("apriori_scaling: need at least 3 values of h");
  for (double h : cfg.h_list)
    if (!(h > 0.0 && cfg.D * h * h < 1.0))
      throw InvalidArgument("apriori_scaling: need 0 < h and D h^2 < 1");

  const auto bracket = tibcs::find_tc_bracket(V, cfg.mu, grid, 0.1);
  if (!bracket) throw BracketError("apriori_scaling: Tc = 0 for this potential");
  const double Tc = tibcs::critical_temperature(V, cfg.mu, grid, *bracket);

  AprioriResult out;
  out.Tc = Tc;
  std::vector<double> hs, xis, qs;
  for (double h : cfg.h_list) {
    const double T = Tc * (1.0 - cfg.D * h * h);
    const double beta = 1.0 / T;
    // plain damped iteration: T(h) can sit very close to Tc
    tibcs::GapSolveOptions opts;
    opts.known_tc = Tc;
    opts.max_iter = 400000;
    const tibcs::GapSolution sol = tibcs::solve_gap(T, V, cfg.mu, grid, opts);
    if (!sol.converged)
      throw NumericalError("apriori_scaling: gap solve did not converge");
    const RadialProfile delta(grid, sol.delta);
    const tibcs::TiState ti = tibcs::state_from_delta(grid, sol.delta, T, cfg.mu);
    const RadialProfile alpha0(grid, ti.alpha);

    const BoxGrid box(cfg.L, cfg.n, cfg.dims, h);
    const bdg::BdgOperator op = bdg::build_h0w(box, cfg.mu, W, delta, h);
    const entropy::BlockState G0w = bdg::reference_state(op, beta);

    // Seeded admissible direction; the h-family shares one pattern.
    Rng rng = Rng::for_sample(cfg.seed, 0);
    const entropy::BlockHamiltonian Y =
        entropy::random_block_hamiltonian(box.size(), rng, 1.0);
    const entropy::BlockHamiltonian H0 =
        entropy::BlockHamiltonian::from_matrix(op.matrix.cast<std::complex<double>>(), 1e-9);

    double eps = cfg.eps0 * std::pow(h, 1.5);
    Certificate cert;
    bool accepted = false;
    for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
      for (double sign : {1.0, -1.0}) {
        const entropy::BlockHamiltonian Hp = entropy::BlockHamiltonian::from_matrix(
            H0.matrix() + sign * eps * Y.matrix(), 1e-9);
        const entropy::BlockState G = entropy::gibbs_block_state(Hp, beta);
        const Certificate c =
            theorem_certificate(G, G0w, V, h, beta, box, alpha0, cfg.c1, cfg.c2);
        if (c.f_value <= 0.0) {
          cert = c;
          accepted = true;
          eps *= sign;
          break;
        }
      }
      if (!accepted) eps *= 0.5;
    }
    if (!accepted)
      throw FamilyViolation("apriori_scaling: no admissible amplitude with F <= 0");

    out.rows.push_back({h, T, eps, cert});
    hs.push_back(h);
    xis.push_back(std::sqrt(cert.xi_h1_sq));
    qs.push_back(std::sqrt(cert.q_h1_sq));
  }
  out.xi_fit = bdg::scaling_fit(hs, xis);
  out.q_fit = bdg::scaling_fit(hs, qs);
  return out;
}

namespace {

// On-box translation-invariant gap refinement: damped iteration of
// Delta(p) <- -(Vconv (Delta / K))(p) with Vconv the momentum matrix of
// multiplication by V(x/h).
struct BoxGap {
  Eigen::VectorXd delta;  // per momentum index
  double residual = 0.0;
  bool nontrivial = false;
};

BoxGap refine_box_gap(const BoxGrid& box, double T, const Potential& V, double mu,
                      const RadialProfile& init, double h) {
  const int M = box.size();
  Eigen::MatrixXd vconv(M, M);
  {
    // v(a) = (1/M) sum_s V(s/h) e^{-i a s), real by symmetry
    std::vector<double> vx(M);
    for (int x = 0; x < M; ++x) vx[x] = V.position(box.position(x).norm() / h);
    for (int p = 0; p < M; ++p)
      for (int q = 0; q < M; ++q) {
        double acc = 0.0;
        for (int x = 0; x < M; ++x)
          acc += vx[x] * std::cos((box.momentum(p) - box.momentum(q)).dot(box.position(x)));
        vconv(p, q) = acc / M;
      }
  }
  BoxGap out;
  out.delta.resize(M);
  for (int p = 0; p < M; ++p) out.delta(p) = init(h * box.momentum_norm(p));

  auto apply = [&](const Eigen::VectorXd& d) {
    Eigen::VectorXd alpha(M);
    for (int p = 0; p < M; ++p) {
      const double hp = h * box.momentum_norm(p);
      const double E = std::hypot(tibcs::dispersion(hp, mu), d(p));
      alpha(p) = -d(p) / (2.0 * tibcs::kt_multiplier(E, T));
    }
    return Eigen::VectorXd(-2.0 * (vconv * alpha));
  };

  for (int it = 0; it < 50000; ++it) {
    const Eigen::VectorXd g = apply(out.delta);
    out.residual = (g - out.delta).cwiseAbs().maxCoeff();
    if (out.residual < 1e-12) break;
    out.delta = out.delta + 0.5 * (g - out.delta);
  }
  out.nontrivial = out.delta.cwiseAbs().maxCoeff() > 1e-8;
  return out;
}

}  // namespace

KtvFormBound ktv_form_bound_check(const BoxGrid& box, double T, const Potential& V,
                                  double mu, const RadialProfile& delta, double h,
                                  int samples, std::uint64_t seed) {
  if (box.dims() != 1 || box.n() > 32)
    throw InvalidArgument("ktv_form_bound_check: use a 1D box with n <= 32");
  if (T <= 0.0) throw InvalidArgument("ktv_form_bound_check: T must be positive");
  const int M = box.size();

  const BoxGap gap = refine_box_gap(box, T, V, mu, delta, h);

  // Multiplier K(p) and the momentum kernel of V(x/h).
  Eigen::VectorXd K(M);
  for (int p = 0; p < M; ++p) {
    const double hp = h * box.momentum_norm(p);
    K(p) = tibcs::kt_multiplier(std::hypot(tibcs::dispersion(hp, mu), gap.delta(p)), T);
  }
  Eigen::VectorXd vx(M);
  for (int x = 0; x < M; ++x) vx(x) = V.position(box.position(x).norm() / h);
  auto vcoef = [&](int a) {  // v(freq difference index), real even
    double acc = 0.0;
    for (int x = 0; x < M; ++x)
      acc += vx(x) * std::cos(box.dk() * a * box.position(x)[0]);
    return acc / M;
  };
  std::vector<double> v(M);
  for (int a = 0; a < M; ++a) v[a] = vcoef(a);

  // Block of total momentum s: basis k with l = s - k (wrapped),
  //   LHS(k,k') = K(hk) delta + v(k-k'),  RHS diag h^2 (k_phys + l_phys)^2.
  KtvFormBound out;
  out.gap_residual = gap.residual;
  out.refined_nontrivial = gap.nontrivial;
  out.cstar = std::numeric_limits<double>::infinity();

  auto freq_phys = [&](int idx) { return box.dk() * box.freq(idx); };
  const double rhs_tol = 1e-12;

  for (int s = 0; s < M; ++s) {
    // Symmetric subspace: pairs (k, l=s-k) with k <= l in index order.
    std::vector<std::pair<int, int>> basis;  // (k, partner)
    for (int k = 0; k < M; ++k) {
      const int l = ((s - k) % M + M) % M;
      if (k <= l) basis.push_back({k, l});
    }
    const int B = static_cast<int>(basis.size());
    Eigen::MatrixXd L(B, B);
    Eigen::VectorXd R(B);
    auto lhs_entry = [&](int k, int kp) {
      const int diff = ((k - kp) % M + M) % M;
      return (k == kp ? K(k) : 0.0) + v[diff];
    };
    for (int a = 0; a < B; ++a) {
      const auto [k1, l1] = basis[a];
      const double na = k1 == l1 ? 1.0 : std::sqrt(0.5);
      R(a) = h * h * std::pow(freq_phys(k1) + freq_phys(l1), 2);
      for (int b = 0; b < B; ++b) {
        const auto [k2, l2] = basis[b];
        const double nb = k2 == l2 ? 1.0 : std::sqrt(0.5);
        // <u_a| (K_x + V_x-part acting on k-index) |u_b> in the symmetrized
        // basis u = (e_k + e_l)/sqrt(2).
        double val = 0.0;
        val += lhs_entry(k1, k2) * (l1 == l2 ? 1.0 : 0.0);
        if (l2 != k2) val += lhs_entry(k1, l2) * (l1 == k2 ? 1.0 : 0.0);
        if (l1 != k1) {
          val += lhs_entry(l1, k2) * (k1 == l2 ? 1.0 : 0.0);
          if (l2 != k2) val += lhs_entry(l1, l2) * (k1 == k2 ? 1.0 : 0.0);
        }
        L(a, b) = na * nb * val;
      }
    }
    // Project out the COM-form kernel.
    std::vector<int> keep;
    for (int a = 0; a < B; ++a)
      if (R(a) > rhs_tol) keep.push_back(a);
    if (keep.empty()) {
      // translation-invariant sector: record the LHS value on the refined
      // kernel direction alpha(p) = -delta(p)/(2K(p))
      if (s == 0) {
        Eigen::VectorXd av(B);
        for (int a = 0; a < B; ++a) {
          const auto [k1, l1] = basis[a];
          av(a) = -gap.delta(k1) / (2.0 * K(k1));
        }
        const double nrm = av.norm();
        if (nrm > 0.0) {
          av /= nrm;
          out.kernel_lhs = av.dot(L * av);
          out.kernel_rhs = 0.0;
        }
      }
      continue;
    }
    Eigen::MatrixXd Lk(keep.size(), keep.size());
    Eigen::VectorXd Rk(keep.size());
    for (std::size_t a = 0; a < keep.size(); ++a) {
      Rk(a) = R(keep[a]);
      for (std::size_t b = 0; b < keep.size(); ++b) Lk(a, b) = L(keep[a], keep[b]);
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
        Lk, Eigen::MatrixXd(Rk.asDiagonal()), Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    out.cstar = std::min(out.cstar, ges.eigenvalues().minCoeff());
  }

  // Randomized cross-check: Rayleigh ratios of symmetric fields dominate
  // the generalized eigenvalue.
  out.min_sampled_ratio = std::numeric_limits<double>::infinity();
  for (int smp = 0; smp < samples; ++smp) {
    Rng rng = Rng::for_sample(seed, smp);
    CMatrix lam(M, M);
    for (int x = 0; x < M; ++x)
      for (int y = 0; y < M; ++y) lam(x, y) = rng.complex_normal();
    CMatrix sym = lam + lam.transpose();
    // forms in the position representation
    const decomp::BoxTransform t(box);
    const CMatrix mom = t.matrix() * sym * t.matrix().transpose();
    // LHS: sum_y <col_y, (K + V_y) col_y>; build in position space
    const CMatrix Kpos =
        t.matrix().adjoint() * K.cast<std::complex<double>>().asDiagonal() * t.matrix();
    double lhs = 0.0;
    for (int y = 0; y < M; ++y) {
      const CVector col = sym.col(y);
      CVector vcol = col;
      for (int x = 0; x < M; ++x)
        vcol(x) = V.position(min_image(box, x, y).norm() / h) * col(x);
      lhs += (col.adjoint() * (Kpos * col + vcol))(0, 0).real();
    }
    // RHS: h^2 || (grad_x + grad_y) Lambda ||^2 via the momentum pairs
    double rhs = 0.0;
    for (int p = 0; p < M; ++p)
      for (int q = 0; q < M; ++q)
        rhs += h * h * std::pow(freq_phys(p) + freq_phys(q), 2) * std::norm(mom(p, q));
    if (rhs > 1e-10) out.min_sampled_ratio = std::min(out.min_sampled_ratio, lhs / rhs);
  }
  return out;
}

}  // namespace bcslab::cert
