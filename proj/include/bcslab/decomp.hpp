#pragma once

// The Cooper-pair decomposition alpha = alpha0 psi + xi on a periodic box,
// its gradient identities, sharp Fourier splitting of |psi|-1, the tail
// bound for |psi|^2-1 with explicit discrete constants, and the quartic
// overlap Tr[(alpha0 Phi alpha0)^2] evaluated along two routes.
//
// Pair fields are stored as M x M matrices over (x, y) lattice pairs; the
// reference pair kernel of a radial profile r is the momentum-diagonal
// matrix R = F^dagger diag(r(h|p|)) F.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "bcslab/foundation.hpp"

namespace bcslab::decomp {

using foundation::BoxGrid;
using foundation::RadialProfile;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Unitary DFT helper for one box, F(p, x) = e^{-i p.x} / sqrt(M).
class BoxTransform {
 public:
  explicit BoxTransform(const BoxGrid& box);
  const BoxGrid& box() const { return box_; }
  const CMatrix& matrix() const { return F_; }

  CVector to_momentum(const CVector& f) const { return F_ * f; }
  CVector to_position(const CVector& c) const { return F_.adjoint() * c; }
  // Spectral gradient components of a scalar field, d = 0..dims-1.
  CVector gradient(const CVector& f, int d) const;

 private:
  BoxGrid box_;
  CMatrix F_;
};

struct PairField {
  PairField(const BoxGrid& box, CMatrix values, bool symmetric = false);

  BoxGrid box;
  CMatrix values;  // M x M over (x, y)
  bool symmetric = false;

  double symmetry_defect() const { return (values - values.transpose()).cwiseAbs().maxCoeff(); }
  double l2_norm() const { return values.norm(); }  // kernel L^2(R^{2d}) norm
};

struct OrderField {
  BoxGrid box;
  CVector psi;

  Eigen::VectorXd phi() const;  // |psi|^2 - 1
  Eigen::VectorXd eta() const;  // |psi| - 1
};

// Momentum-diagonal reference pair kernel R of the profile alpha0 at scale h.
CMatrix reference_pair_kernel(const BoxTransform& t, const RadialProfile& alpha0, double h);
// Denominator (1/M) sum_p r(h|p|)^2 of the psi projection.
double reference_norm_sq(const BoxTransform& t, const RadialProfile& alpha0, double h);

// psi(y) = sum_x R(x,y) alpha(x,y) / sum_x R(x,y)^2, computed spectrally.
OrderField extract_psi(const PairField& alpha, const RadialProfile& alpha0, double h);

// xi = alpha - R (psi(x) + psi(y))/2; also the one-sided residuals
// xi0 = alpha - R diag(psi) and xi1 = alpha - diag(psi) R with
// xi = (xi0 + xi1)/2.
PairField residual_xi(const PairField& alpha, const RadialProfile& alpha0,
                      const OrderField& psi, double h);
PairField residual_xi_onesided(const PairField& alpha, const RadialProfile& alpha0,
                               const OrderField& psi, double h, bool right_slot);

// grad psi(y) = sum_x R(x,y) [(grad_x + grad_y) alpha](x,y) / ||alpha0||^2,
// equal to the spectral gradient of extract_psi by discrete integration by
// parts whenever the pair frequencies of R alpha stay inside the Nyquist
// range (no wrap-around). Returns an M x dims matrix of components.
CMatrix com_gradient(const PairField& alpha, const RadialProfile& alpha0, double h);

// Pair-field center-of-mass derivative (grad_x + grad_y) alpha, spectral.
CMatrix com_derivative(const PairField& alpha, int d);

struct GradientBound {
  double lhs = 0.0;  // ||grad psi||^2_{L^2}
  double rhs = 0.0;  // h^3-normalized Cauchy-Schwarz majorant
  double gap() const { return rhs - lhs; }
  double h3 = 0.0;
  double alpha0_box_l2sq = 0.0;  // h^3 D / dV, the discrete ||alpha0||^2
};

// ||grad psi||^2 <= h^3 ||(grad_x+grad_y) alpha||^2 / ||alpha0||^2 as an
// exact discrete Cauchy-Schwarz statement.
GradientBound gradient_bound_gap(const PairField& alpha, const RadialProfile& alpha0,
                                 double h);

// Sharp momentum cutoff split of a scalar field, f = f1 + f2 with f1 the
// modes |p| <= s.
std::pair<CVector, CVector> fourier_split(const BoxTransform& t, const CVector& f,
                                          double s);

struct SplitBounds {
  double s = 0.0;
  double l1_low = 0.0;        // sum_{0<|p|<=s} |eta_hat| dk^d
  double zero_mode = 0.0;     // |eta_hat(0)| dk^d
  double l1_low_bound = 0.0;  // c1(s) * ||p eta_hat||
  double const_l1_discrete = 0.0;   // c1(s)^2 = sum_{0<|p|<=s} |p|^{-2} dk^d
  double const_l1_continuum = 0.0;  // 4 pi s in 3D (0 otherwise)
  double l2_high = 0.0;             // || eta_hat ||_{l2(|p|>s)}
  double l2_high_bound = 0.0;       // ||p eta_hat|| / s
  double l4_high = 0.0;             // || eta2 ||_{L^4}
  double l4_interp_bound = 0.0;     // ||eta2||_2^{1/4} ||eta2||_6^{3/4}
  double l6_high = 0.0;
  double grad_eta = 0.0;  // || p eta_hat ||_{l2}
  double grad_psi = 0.0;  // || grad psi ||_{L^2}
};

SplitBounds split_bounds_report(const OrderField& psi, double s);

struct PhiTail {
  double r = 0.0;
  double tail = 0.0;   // || Phi_hat ||_{l2(|p| > r)}
  double bound = 0.0;  // Young/triangle majorant from the s = r/2 split
  double gap() const { return bound - tail; }
};

// || Phi_hat ||_{L^2(B_r^c)} against the explicit-constant majorant built
// from the split at s = r/2; r must stay at or below the Nyquist momentum.
PhiTail phi_tail_gap(const OrderField& psi, double r);

struct QuarticOverlap {
  double trace_path = 0.0;    // Tr[(R Phi R)^2] via assembled matrices
  double fourier_path = 0.0;  // sum_k |Phi_k|^2 Corr(k) via momentum sums
  double lower_bound = 0.0;   // inf_supp Corr * sum |Phi_k|^2
  double corr_at_zero = 0.0;  // Corr(0) = sum_q r(q)^4 > 0
};

// Both evaluation routes of Tr[(alpha0 Phi alpha0)^2] for a band-limited
// real field Phi; throws if Phi has momentum content above band_limit.
QuarticOverlap quartic_overlap(const BoxGrid& box, const Eigen::VectorXd& phi_low,
                               const RadialProfile& alpha0, double h,
                               double band_limit);

}  // namespace bcslab::decomp
