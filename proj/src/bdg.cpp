#include "bcslab/bdg.hpp"

#include <cmath>

#include "bcslab/kernels.hpp"
#include "bcslab/tibcs.hpp"

namespace bcslab::bdg {

BdgOperator build_h0w(const BoxGrid& box, double mu, const Potential& W,
                      const RadialProfile& delta, double h) {
  const int M = box.size();
  if (2 * M > 4096)
    throw InvalidArgument("build_h0w: dense eigendecomposition capped at 2M <= 4096");
  double pmax_needed = 0.0;
  for (int i = 0; i < M; ++i) pmax_needed = std::max(pmax_needed, h * box.momentum_norm(i));
  if (pmax_needed > delta.grid().pmax())
    throw InvalidArgument("build_h0w: h * momentum beyond the gap grid (Nyquist violation)");

  const double wpref =
      h * h * std::pow(box.dk(), box.dims()) / std::pow(2.0 * M_PI, 0.5 * box.dims());

  BdgOperator op{box, mu, h, Eigen::MatrixXd::Zero(2 * M, 2 * M)};
  for (int i = 0; i < M; ++i) {
    const double hp = h * box.momentum_norm(i);
    const double k = tibcs::dispersion(hp, mu);
    const double d = delta(hp);
    op.matrix(i, i) += k;
    op.matrix(M + i, M + i) -= k;
    op.matrix(i, M + i) = d;
    op.matrix(M + i, i) = d;
  }
  if (!W.is_zero()) {
    for (int i = 0; i < M; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double w = wpref * W.fourier((box.momentum(i) - box.momentum(j)).norm());
        op.matrix(i, j) += w;
        op.matrix(j, i) += (i == j ? 0.0 : w);
        op.matrix(M + i, M + j) -= w;
        op.matrix(M + j, M + i) -= (i == j ? 0.0 : w);
      }
    }
  }
  return op;
}

entropy::BlockState reference_state(const BdgOperator& op, double beta) {
  if (beta <= 0.0) throw InvalidArgument("reference_state: beta must be positive");
  const int M = op.box.size();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (op.matrix + op.matrix.transpose()));
  Eigen::VectorXd f = es.eigenvalues();
  for (int i = 0; i < f.size(); ++i) f(i) = 1.0 / (1.0 + std::exp(beta * f(i)));
  const Eigen::MatrixXd gamma_full =
      es.eigenvectors() * f.asDiagonal() * es.eigenvectors().transpose();
  return entropy::BlockState::trusted(
      gamma_full.topLeftCorner(M, M).cast<std::complex<double>>(),
      gamma_full.topRightCorner(M, M).cast<std::complex<double>>());
}

Eigen::VectorXd ti_alpha_diagonal(const BoxGrid& box, const RadialProfile& delta,
                                  double h, double mu, double T) {
  const int M = box.size();
  Eigen::VectorXd out(M);
  for (int i = 0; i < M; ++i) {
    const double hp = h * box.momentum_norm(i);
    const double d = delta(hp);
    const double E = tibcs::quasiparticle_energy(hp, mu, d);
    out(i) = -d / (2.0 * tibcs::kt_multiplier(E, T));
  }
  return out;
}

Eigen::VectorXd ti_gamma_diagonal(const BoxGrid& box, const RadialProfile& delta,
                                  double h, double mu, double T) {
  const int M = box.size();
  Eigen::VectorXd out(M);
  for (int i = 0; i < M; ++i) {
    const double hp = h * box.momentum_norm(i);
    const double d = delta(hp);
    const double k = tibcs::dispersion(hp, mu);
    const double E = tibcs::quasiparticle_energy(hp, mu, d);
    out(i) = 0.5 * (1.0 - k / tibcs::kt_multiplier(E, T));
  }
  return out;
}

PairingNorms pairing_difference_norms(const entropy::BlockState& state,
                                      const RadialProfile& delta, double h,
                                      const BoxGrid& box, double mu, double T) {
  const int M = box.size();
  if (state.half_dim() != M)
    throw InvalidArgument("pairing_difference_norms: state/box size mismatch");

  Eigen::MatrixXcd tilde = state.alpha();
  const Eigen::VectorXd ref = ti_alpha_diagonal(box, delta, h, mu, T);
  for (int i = 0; i < M; ++i) tilde(i, i) -= ref(i);

  PairingNorms out;
  double l2sq = 0.0, h1sq = 0.0;
  for (int i = 0; i < M; ++i) {
    const double wi = h * box.momentum_norm(i);
    for (int j = 0; j < M; ++j) {
      const double wj = h * box.momentum_norm(j);
      const double a2 = std::norm(tilde(i, j));
      l2sq += a2;
      h1sq += a2 * (1.0 + wi * wi + wj * wj);
    }
  }
  out.l2 = std::sqrt(l2sq);
  out.h1 = std::sqrt(h1sq);

  // Position representation for the (1+x^2)-weighted norm.
  Eigen::MatrixXcd F(M, M);
  const double s = 1.0 / std::sqrt(static_cast<double>(M));
  for (int p = 0; p < M; ++p)
    for (int x = 0; x < M; ++x)
      F(p, x) = std::polar(s, -box.momentum(p).dot(box.position(x)));
  const Eigen::MatrixXcd pos = F.adjoint() * tilde * F;
  double wsq = 0.0;
  for (int x = 0; x < M; ++x) {
    const double wx = 1.0 + box.position(x).squaredNorm();
    for (int y = 0; y < M; ++y) {
      const double wy = 1.0 + box.position(y).squaredNorm();
      wsq += wx * wx * wy * wy * std::norm(pos(x, y));
    }
  }
  out.weighted_h2 = std::sqrt(wsq);
  return out;
}

ScalingFit scaling_fit(const std::vector<double>& h_list,
                       const std::vector<double>& norm_list) {
  if (h_list.size() < 3 || norm_list.size() != h_list.size())
    throw InvalidArgument("scaling_fit: need at least 3 matching pairs");
  const auto [slope, r2] = kernels::log_log_fit(h_list, norm_list);
  return {slope, r2};
}

BdgScalingResult bdg_scaling_study(const BoxGrid& box_template,
                                   const std::vector<double>& h_list,
                                   const Potential& W, const RadialProfile& delta,
                                   double mu, double T) {
  if (h_list.size() < 3)
    throw InvalidArgument("bdg_scaling_study: need at least 3 values of h");
  BdgScalingResult out;
  std::vector<double> hs, l2s, h1s, w2s;
  for (double h : h_list) {
    const BoxGrid box(box_template.L(), box_template.n(), box_template.dims(), h);
    const BdgOperator op = build_h0w(box, mu, W, delta, h);
    const entropy::BlockState st = reference_state(op, 1.0 / T);
    const PairingNorms norms = pairing_difference_norms(st, delta, h, box, mu, T);
    out.rows.push_back({h, norms.l2, norms.h1, norms.weighted_h2});
    hs.push_back(h);
    l2s.push_back(norms.l2);
    h1s.push_back(norms.h1);
    w2s.push_back(norms.weighted_h2);
  }
  out.fit_l2 = scaling_fit(hs, l2s);
  out.fit_h1 = scaling_fit(hs, h1s);
  out.fit_weighted = scaling_fit(hs, w2s);
  return out;
}

}  // namespace bcslab::bdg
