#pragma once

// Matsubara-type series, their Poisson-summation closed forms, the zeta(p,q)
// kernel, and the weighted matrix-element kernels a11/a12 with norm-scaling
// estimators. c = 2*pi*T throughout.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bcslab/foundation.hpp"

namespace bcslab::kernels {

struct SeriesEval {
  double approx = 0.0;  // partial sum plus Euler-Maclaurin tail estimate
  double tail = 0.0;    // bound on |approx - exact value|
};

struct KernelEval {
  double p = 0.0;
  double q = 0.0;
  double value = 0.0;
  std::string method;  // "series(N)" or "closed-form"
  double tail_bound = 0.0;
};

// x/tanh(x/2T) = 2T + 4T sum_{n>=1} x^2/(x^2 + c^2 n^2). The partial sum is
// completed by an integral tail with midpoint correction; `tail` bounds the
// remaining error so [approx - tail, approx + tail] brackets the true value.
SeriesEval xcoth_series(double x, double T, long long N);

// Closed form of \int x^2 e^{-2 pi i k x} / ((a^2+x^2)(b^2+x^2)) dx:
// pi/(a^2-b^2) (a e^{-2 pi a|k|} - b e^{-2 pi b|k|}); limit branch for a ~ b.
double lorentzian_pair_ft(double a, double b, double k);
// Unguarded closed form (cancellation near a = b), exposed for tests.
double lorentzian_pair_ft_closed(double a, double b, double k);

// sum_{n>=1} n^2/((a^2+n^2)(b^2+n^2)) in closed form,
// -pi/(2(a+b)) + pi/(a^2-b^2) [a/(1-e^{-2 pi a}) - b/(1-e^{-2 pi b})],
// with an even-difference-quotient branch for a ~ b and a series branch for
// small a = b.
double matsubara_sum(double a, double b);
double matsubara_sum_closed(double a, double b);
// Diagonal value sum n^2/(a^2+n^2)^2 = (pi/4)[coth(pi a)/a - pi/sinh^2(pi a)].
double matsubara_sum_diagonal(double a);
// Truncated-series evaluation with bracketed tail (oracle path).
SeriesEval matsubara_sum_series(double a, double b, long long N);

enum class ZetaMethod { Series, ClosedForm };

// zeta(p,q) = sum_{n>=1} 2 c^2 n^2 / ((Ep^2 + c^2 n^2)(Eq^2 + c^2 n^2))
//           = (2/c^2) * matsubara_sum(Ep/c, Eq/c).
KernelEval zeta_kernel(double Ep, double Eq, double T,
                       ZetaMethod method = ZetaMethod::ClosedForm,
                       long long N = 100000);

// Matrix-element kernels of the first-order W-correction,
//   a11(p,q) = h^2 W_hat(p-q) [k(hp)+k(hq)] zeta(E(hp),E(hq)),
//   a12(p,q) = h^2 W_hat(p-q) [Delta(hp)-Delta(hq)] zeta(E(hp),E(hq)).
struct ATildePair {
  double a11 = 0.0;
  double a12 = 0.0;
};

ATildePair a_tilde_kernels(const Eigen::Vector3d& p, const Eigen::Vector3d& q,
                           double h, const foundation::Potential& W,
                           const foundation::RadialProfile& delta, double mu, double T);

// Dense lattice realization of the weighted kernels (1+x^2) a (1+x^2) on a
// box, position weights applied on the position-space lattice.
struct WeightedKernels {
  Eigen::MatrixXd a11;  // position representation, weighted
  Eigen::MatrixXd a12;
};

WeightedKernels assemble_weighted_kernels(const foundation::BoxGrid& box, double h,
                                          const foundation::Potential& W,
                                          const foundation::RadialProfile& delta,
                                          double mu, double T);

// Operator norm (top singular value) by power iteration on A^T A.
double operator_norm_power_iteration(const Eigen::MatrixXd& A, double rel_tol = 1e-6,
                                     int max_iter = 20000, std::uint64_t seed = 1);

struct NormScalingResult {
  std::vector<double> h_values;
  std::vector<double> norm11;
  std::vector<double> norm12;
  double e11 = 0.0;  // fitted exponent of |a11| vs h
  double e12 = 0.0;
  double r2_11 = 0.0;
  double r2_12 = 0.0;
};

// Assembles the weighted kernels for each h at fixed (delta, T), estimates
// operator norms by power iteration and fits log-norm against log-h. The h^2
// prefactor drives a11; the difference factor Delta(hp) - Delta(hq), of
// order h over the range where W_hat couples, supplies the extra power for
// a12. The profile is resampled onto a grid wide enough for h * nyquist.
NormScalingResult weighted_norm_scaling(const std::vector<double>& h_list,
                                        const foundation::BoxGrid& box,
                                        const foundation::Potential& W,
                                        const foundation::RadialProfile& delta,
                                        double mu, double T);

// Least-squares slope of log(norm) against log(h) with fit quality.
std::pair<double, double> log_log_fit(const std::vector<double>& h_values,
                                      const std::vector<double>& norms);

}  // namespace bcslab::kernels
