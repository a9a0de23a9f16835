#include "bcslab/decomp.hpp"

#include <cmath>

namespace bcslab::decomp {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

int wrap_index(int m, int n) {
  m %= n;
  return m < 0 ? m + n : m;
}

// Wrapped sum of two flat lattice indices (group addition on Z_n^d).
int add_indices(const BoxGrid& box, int a, int b) {
  const int n = box.n();
  int out = 0;
  std::vector<int> da(box.dims()), db(box.dims());
  for (int d = box.dims() - 1; d >= 0; --d) {
    da[d] = a % n;
    a /= n;
    db[d] = b % n;
    b /= n;
  }
  for (int d = 0; d < box.dims(); ++d)
    out = out * n + wrap_index(da[d] + db[d], n);
  return out;
}

}  // namespace

BoxTransform::BoxTransform(const BoxGrid& box) : box_(box) {
  const int M = box.size();
  if (M > 2048) throw InvalidArgument("BoxTransform: lattice too large for dense DFT");
  F_.resize(M, M);
  const double s = 1.0 / std::sqrt(static_cast<double>(M));
  for (int p = 0; p < M; ++p)
    for (int x = 0; x < M; ++x)
      F_(p, x) = std::polar(s, -box.momentum(p).dot(box.position(x)));
}

CVector BoxTransform::gradient(const CVector& f, int d) const {
  if (d < 0 || d >= box_.dims()) throw InvalidArgument("BoxTransform::gradient: bad axis");
  CVector c = F_ * f;
  for (int p = 0; p < box_.size(); ++p) c(p) *= kI * box_.momentum(p)[d];
  return F_.adjoint() * c;
}

PairField::PairField(const BoxGrid& b, CMatrix v, bool sym)
    : box(b), values(std::move(v)), symmetric(sym) {
  if (values.rows() != box.size() || values.cols() != box.size())
    throw InvalidArgument("PairField: matrix size does not match the box");
  if (symmetric && symmetry_defect() > 1e-12 * std::max(1.0, values.cwiseAbs().maxCoeff()))
    throw InvalidArgument("PairField: symmetric flag set but values are not");
}

Eigen::VectorXd OrderField::phi() const {
  Eigen::VectorXd out(psi.size());
  for (int i = 0; i < psi.size(); ++i) out(i) = std::norm(psi(i)) - 1.0;
  return out;
}

Eigen::VectorXd OrderField::eta() const {
  Eigen::VectorXd out(psi.size());
  for (int i = 0; i < psi.size(); ++i) out(i) = std::abs(psi(i)) - 1.0;
  return out;
}

CMatrix reference_pair_kernel(const BoxTransform& t, const RadialProfile& alpha0,
                              double h) {
  const BoxGrid& box = t.box();
  const int M = box.size();
  CVector r(M);
  for (int p = 0; p < M; ++p) r(p) = alpha0(h * box.momentum_norm(p));
  return t.matrix().adjoint() * r.asDiagonal() * t.matrix();
}

double reference_norm_sq(const BoxTransform& t, const RadialProfile& alpha0, double h) {
  const BoxGrid& box = t.box();
  double s = 0.0;
  for (int p = 0; p < box.size(); ++p) {
    const double r = alpha0(h * box.momentum_norm(p));
    s += r * r;
  }
  return s / box.size();
}

OrderField extract_psi(const PairField& alpha, const RadialProfile& alpha0, double h) {
  const BoxTransform t(alpha.box);
  const double den = reference_norm_sq(t, alpha0, h);
  if (!(den > 1e-30))
    throw DegenerateGap("extract_psi: vanishing reference profile norm");
  const CMatrix R = reference_pair_kernel(t, alpha0, h);
  // psi(y) = sum_x R(x,y) alpha(x,y) / D; R is complex-symmetric and real.
  CVector num = (R.conjugate().cwiseProduct(alpha.values)).colwise().sum().transpose();
  OrderField out{alpha.box, num / den};
  return out;
}

PairField residual_xi(const PairField& alpha, const RadialProfile& alpha0,
                      const OrderField& psi, double h) {
  const BoxTransform t(alpha.box);
  const CMatrix R = reference_pair_kernel(t, alpha0, h);
  const int M = alpha.box.size();
  if (psi.psi.size() != M) throw InvalidArgument("residual_xi: psi/box mismatch");
  CMatrix xi = alpha.values;
  for (int x = 0; x < M; ++x)
    for (int y = 0; y < M; ++y)
      xi(x, y) -= R(x, y) * 0.5 * (psi.psi(x) + psi.psi(y));
  const bool sym = alpha.symmetric;
  return PairField(alpha.box, std::move(xi), sym && alpha.symmetry_defect() < 1e-12);
}

PairField residual_xi_onesided(const PairField& alpha, const RadialProfile& alpha0,
                               const OrderField& psi, double h, bool right_slot) {
  const BoxTransform t(alpha.box);
  const CMatrix R = reference_pair_kernel(t, alpha0, h);
  const int M = alpha.box.size();
  CMatrix xi = alpha.values;
  for (int x = 0; x < M; ++x)
    for (int y = 0; y < M; ++y)
      xi(x, y) -= R(x, y) * (right_slot ? psi.psi(y) : psi.psi(x));
  return PairField(alpha.box, std::move(xi), false);
}

CMatrix com_derivative(const PairField& alpha, int d) {
  const BoxTransform t(alpha.box);
  const BoxGrid& box = alpha.box;
  if (d < 0 || d >= box.dims()) throw InvalidArgument("com_derivative: bad axis");
  // (grad_x + grad_y) on kernels: i(p_d - q_d) in the momentum representation.
  CMatrix A = t.matrix() * alpha.values * t.matrix().adjoint();
  for (int p = 0; p < box.size(); ++p)
    for (int q = 0; q < box.size(); ++q)
      A(p, q) *= kI * (box.momentum(p)[d] - box.momentum(q)[d]);
  return t.matrix().adjoint() * A * t.matrix();
}

CMatrix com_gradient(const PairField& alpha, const RadialProfile& alpha0, double h) {
  const BoxTransform t(alpha.box);
  const double den = reference_norm_sq(t, alpha0, h);
  if (!(den > 1e-30))
    throw DegenerateGap("com_gradient: vanishing reference profile norm");
  const CMatrix R = reference_pair_kernel(t, alpha0, h);
  const int M = alpha.box.size();
  CMatrix out(M, alpha.box.dims());
  for (int d = 0; d < alpha.box.dims(); ++d) {
    const CMatrix G = com_derivative(alpha, d);
    out.col(d) = (R.conjugate().cwiseProduct(G)).colwise().sum().transpose() / den;
  }
  return out;
}

GradientBound gradient_bound_gap(const PairField& alpha, const RadialProfile& alpha0,
                                 double h) {
  const BoxTransform t(alpha.box);
  const double den = reference_norm_sq(t, alpha0, h);
  if (!(den > 1e-30))
    throw DegenerateGap("gradient_bound_gap: vanishing reference profile norm");
  const double dV = alpha.box.cell_volume();

  const CMatrix grad = com_gradient(alpha, alpha0, h);
  double ng = 0.0;
  for (int d = 0; d < alpha.box.dims(); ++d) ng += com_derivative(alpha, d).squaredNorm();

  GradientBound out;
  out.lhs = dV * grad.squaredNorm();
  out.rhs = (dV / den) * ng;
  out.h3 = h * h * h;
  out.alpha0_box_l2sq = out.h3 * den / dV;
  return out;
}

std::pair<CVector, CVector> fourier_split(const BoxTransform& t, const CVector& f,
                                          double s) {
  if (!(s > 0.0)) throw InvalidArgument("fourier_split: s must be positive");
  const BoxGrid& box = t.box();
  CVector c = t.to_momentum(f);
  CVector c1 = c, c2 = c;
  for (int p = 0; p < box.size(); ++p) {
    if (box.momentum_norm(p) <= s)
      c2(p) = 0.0;
    else
      c1(p) = 0.0;
  }
  return {t.to_position(c1), t.to_position(c2)};
}

namespace {

// Continuum-normalized momentum coefficients of a scalar field:
// f_hat(p) = (2 pi)^{-d/2} L^d c_p with c_p the plain DFT coefficient.
CVector continuum_coefficients(const BoxTransform& t, const CVector& f) {
  const BoxGrid& box = t.box();
  const double scale = std::pow(box.L(), box.dims()) /
                       std::pow(2.0 * M_PI, 0.5 * box.dims()) /
                       std::sqrt(static_cast<double>(box.size()));
  return scale * t.to_momentum(f);  // F includes 1/sqrt(M); c_p needs 1/M
}

}  // namespace

SplitBounds split_bounds_report(const OrderField& psi, double s) {
  if (!(s > 0.0)) throw InvalidArgument("split_bounds_report: s must be positive");
  const BoxTransform t(psi.box);
  const BoxGrid& box = psi.box;
  const int M = box.size();
  const double dkd = std::pow(box.dk(), box.dims());
  const double dV = box.cell_volume();

  const Eigen::VectorXd eta = psi.eta();
  const CVector etac = eta.cast<std::complex<double>>();
  const CVector ehat = continuum_coefficients(t, etac);

  SplitBounds out;
  out.s = s;
  double c1sq = 0.0, grad2 = 0.0, l2hi2 = 0.0;
  for (int p = 0; p < M; ++p) {
    const double np = box.momentum_norm(p);
    const double a = std::abs(ehat(p));
    grad2 += np * np * a * a * dkd;
    if (np == 0.0) {
      out.zero_mode = a * dkd;
    } else if (np <= s) {
      out.l1_low += a * dkd;
      c1sq += dkd / (np * np);
    } else {
      l2hi2 += a * a * dkd;
    }
  }
  out.grad_eta = std::sqrt(grad2);
  out.const_l1_discrete = c1sq;
  out.const_l1_continuum = box.dims() == 3 ? 4.0 * M_PI * s : 0.0;
  out.l1_low_bound = std::sqrt(c1sq) * out.grad_eta;
  out.l2_high = std::sqrt(l2hi2);
  out.l2_high_bound = out.grad_eta / s;

  const auto [eta1, eta2] = fourier_split(t, etac, s);
  double l2 = 0.0, l4 = 0.0, l6 = 0.0;
  for (int x = 0; x < M; ++x) {
    const double a = std::abs(eta2(x));
    l2 += dV * a * a;
    l4 += dV * a * a * a * a;
    l6 += dV * std::pow(a, 6.0);
  }
  out.l4_high = std::pow(l4, 0.25);
  out.l6_high = std::pow(l6, 1.0 / 6.0);
  out.l4_interp_bound = std::pow(l2, 0.125) * std::pow(l6, 0.125);
  // ||f||_4 <= ||f||_2^{1/4} ||f||_6^{3/4}: (l2)^{1/2 * 1/4} (l6^{1/6})^{3/4}

  double gp2 = 0.0;
  for (int d = 0; d < box.dims(); ++d) gp2 += dV * t.gradient(psi.psi, d).squaredNorm();
  out.grad_psi = std::sqrt(gp2);
  return out;
}

PhiTail phi_tail_gap(const OrderField& psi, double r) {
  const BoxGrid& box = psi.box;
  if (!(r > 0.0) || r > box.nyquist())
    throw InvalidArgument("phi_tail_gap: r must be positive and at most the Nyquist momentum");
  const double s = 0.5 * r;
  const BoxTransform t(box);
  const int M = box.size();
  const double dkd = std::pow(box.dk(), box.dims());
  const double cpref = std::pow(2.0 * M_PI, -0.5 * box.dims());

  const Eigen::VectorXd eta = psi.eta();
  const CVector etac = eta.cast<std::complex<double>>();
  const CVector ehat = continuum_coefficients(t, etac);

  // Measured discrete norms of the split.
  double l1_lo = 0.0, l1_hi = 0.0, l2_hi2 = 0.0;
  for (int p = 0; p < M; ++p) {
    const double np = box.momentum_norm(p);
    const double a = std::abs(ehat(p));
    if (np <= s)
      l1_lo += a * dkd;
    else {
      l1_hi += a * dkd;
      l2_hi2 += a * a * dkd;
    }
  }
  const double l2_hi = std::sqrt(l2_hi2);

  // Tail of Phi = eta^2 + 2 eta. On B_r^c only eta2*eta2, 2 eta1*eta2 and
  // 2 eta2 survive (eta1*eta1 and eta1 live inside B_r); Young and the
  // triangle inequality give the majorant.
  const Eigen::VectorXd phi = psi.phi();
  const CVector phat = continuum_coefficients(t, phi.cast<std::complex<double>>());
  double tail2 = 0.0;
  for (int p = 0; p < M; ++p)
    if (box.momentum_norm(p) > r) tail2 += std::norm(phat(p)) * dkd;

  PhiTail out;
  out.r = r;
  out.tail = std::sqrt(tail2);
  out.bound = cpref * (l1_hi + 2.0 * l1_lo) * l2_hi + 2.0 * l2_hi;
  return out;
}

QuarticOverlap quartic_overlap(const BoxGrid& box, const Eigen::VectorXd& phi_low,
                               const RadialProfile& alpha0, double h,
                               double band_limit) {
  const int M = box.size();
  if (phi_low.size() != M) throw InvalidArgument("quartic_overlap: field/box mismatch");
  const BoxTransform t(box);
  const CVector c = t.to_momentum(phi_low.cast<std::complex<double>>()) /
                    std::sqrt(static_cast<double>(M));  // plain DFT coefficients

  const double cmax = c.cwiseAbs().maxCoeff();
  for (int p = 0; p < M; ++p)
    if (box.momentum_norm(p) > band_limit && std::abs(c(p)) > 1e-12 * std::max(1.0, cmax))
      throw InvalidArgument("quartic_overlap: field has content beyond the band limit");

  Eigen::VectorXd r2(M);
  for (int p = 0; p < M; ++p) {
    const double r = alpha0(h * box.momentum_norm(p));
    r2(p) = r * r;
  }

  QuarticOverlap out;
  // Trace path with assembled position-space matrices.
  {
    const CMatrix R = reference_pair_kernel(t, alpha0, h);
    const CMatrix A = R * phi_low.cast<std::complex<double>>().asDiagonal() * R;
    out.trace_path = (A * A).trace().real();
  }
  // Fourier path: sum_k |c_k|^2 Corr(k), Corr(k) = sum_q r^2(q) r^2(q+k).
  {
    double total = 0.0;
    double corr_inf = std::numeric_limits<double>::infinity();
    double sum_c2 = 0.0;
    for (int k = 0; k < M; ++k) {
      const double ck2 = std::norm(c(k));
      double corr = 0.0;
      for (int q = 0; q < M; ++q) corr += r2(q) * r2(add_indices(box, q, k));
      total += ck2 * corr;
      if (box.momentum_norm(k) <= band_limit) corr_inf = std::min(corr_inf, corr);
      if (ck2 > 0.0) sum_c2 += ck2;
      if (k == 0) out.corr_at_zero = corr;
    }
    out.fourier_path = total;
    out.lower_bound = (std::isfinite(corr_inf) ? corr_inf : 0.0) * sum_c2;
  }
  return out;
}

}  // namespace bcslab::decomp
