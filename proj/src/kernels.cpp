#include "bcslab/kernels.hpp"

#include <cmath>

#include "bcslab/rng.hpp"
#include "bcslab/tibcs.hpp"

namespace bcslab::kernels {

namespace {

// Summand of the x/tanh series: f(u) = 4T x^2 / (x^2 + c^2 u^2).
struct XcothSummand {
  double x2, c2, A;
  double operator()(double u) const { return A / (x2 + c2 * u * u); }
  double deriv(double u) const {
    const double d = x2 + c2 * u * u;
    return -A * 2.0 * c2 * u / (d * d);
  }
  double tail_integral(double a) const {
    // \int_a^inf du = (A/(c x)) (pi/2 - atan(c a / x)).
    const double x = std::sqrt(x2), c = std::sqrt(c2);
    return A / (c * x) * (M_PI / 2.0 - std::atan(c * a / x));
  }
};

double third_derivative_fd(const std::function<double(double)>& f, double u, double h) {
  return (f(u + 2 * h) - 2.0 * f(u + h) + 2.0 * f(u - h) - f(u - 2 * h)) / (2.0 * h * h * h);
}

}  // namespace

SeriesEval xcoth_series(double x, double T, long long N) {
  if (T <= 0.0) throw InvalidArgument("xcoth_series: T must be positive");
  if (N < 1) throw InvalidArgument("xcoth_series: N must be >= 1");
  SeriesEval out;
  if (x == 0.0) {
    out.approx = 2.0 * T;
    out.tail = 0.0;
    return out;
  }
  const double c = 2.0 * M_PI * T;
  XcothSummand f{x * x, c * c, 4.0 * T * x * x};
  double partial = 0.0;
  for (long long n = N; n >= 1; --n) partial += f(static_cast<double>(n));
  const double a = static_cast<double>(N) + 0.5;
  // Euler-Maclaurin midpoint form of the tail.
  const double tail_est = f.tail_integral(a) + f.deriv(a) / 24.0;
  out.approx = 2.0 * T + partial + tail_est;
  const double f3 = third_derivative_fd([&f](double u) { return f(u); }, a, 0.25);
  out.tail = 8.0 * (7.0 / 5760.0) * std::abs(f3) + 4e-16 * std::abs(out.approx);
  return out;
}

double lorentzian_pair_ft_closed(double a, double b, double k) {
  const double ak = std::abs(k);
  return M_PI / (a * a - b * b) *
         (a * std::exp(-2.0 * M_PI * a * ak) - b * std::exp(-2.0 * M_PI * b * ak));
}

double lorentzian_pair_ft(double a, double b, double k) {
  if (a <= 0.0 || b <= 0.0)
    throw InvalidArgument("lorentzian_pair_ft: a and b must be positive");
  const double ak = std::abs(k);
  if (std::abs(a - b) < 1e-6 * std::max(1.0, std::max(a, b))) {
    // N(b) = a e^{-2 pi a k} - b e^{-2 pi b k} vanishes at b = a; expand the
    // difference quotient N(b)/(a - b) to second order around b = a.
    const double m = 0.5 * (a + b);
    const double t = b - a;
    const double e = std::exp(-2.0 * M_PI * m * ak);
    const double w = 2.0 * M_PI * ak;
    const double n1 = e * (w * m - 1.0);            // N'(m)
    const double n2 = e * w * (2.0 - w * m);        // N''(m)
    const double n3 = e * w * w * (w * m - 3.0);    // N'''(m)
    // f = -[N'(m) + N''(m) t/2 + N'''(m) t^2/6] / (a + b) * pi
    return -M_PI * (n1 + 0.5 * n2 * t + n3 * t * t / 6.0) / (a + b);
  }
  return lorentzian_pair_ft_closed(a, b, k);
}

double matsubara_sum_diagonal(double a) {
  if (a <= 0.0) throw InvalidArgument("matsubara_sum_diagonal: a must be positive");
  if (a < 1e-2) {
    // pi^2/6 - (pi^4/45) a^2 + (pi^6/315) a^4 + O(a^6)
    const double a2 = a * a;
    return M_PI * M_PI / 6.0 - std::pow(M_PI, 4) / 45.0 * a2 +
           std::pow(M_PI, 6) / 315.0 * a2 * a2;
  }
  const double pa = M_PI * a;
  const double coth = 1.0 / std::tanh(pa);
  const double sh = std::sinh(pa);
  return 0.25 * M_PI * (coth / a - M_PI / (sh * sh));
}

double matsubara_sum_closed(double a, double b) {
  auto u = [](double x) { return x / (1.0 - std::exp(-2.0 * M_PI * x)); };
  return -M_PI / (2.0 * (a + b)) + M_PI * (u(a) - u(b)) / (a * a - b * b);
}

double matsubara_sum(double a, double b) {
  if (a <= 0.0 || b <= 0.0)
    throw InvalidArgument("matsubara_sum: a and b must be positive");
  const double m = 0.5 * (a + b);
  const double d = 0.5 * (a - b);
  if (std::abs(a - b) < 1e-4 * std::max(1.0, m)) {
    // Even in d; interpolate F(d) = S(m+d, m-d) through the exact diagonal
    // value and two cancellation-safe offsets.
    const double f0 = matsubara_sum_diagonal(m);
    const double D1 = 1e-3 * std::max(1.0, m);
    const double D2 = 2.0 * D1;
    const double f1 = matsubara_sum_closed(m + D1, m - D1);
    const double f2 = matsubara_sum_closed(m + D2, m - D2);
    // F(d) ~ f0 + c2 d^2 + c4 d^4
    const double r1 = (f1 - f0) / (D1 * D1);
    const double r2 = (f2 - f0) / (D2 * D2);
    const double c4 = (r2 - r1) / (D2 * D2 - D1 * D1);
    const double c2 = r1 - c4 * D1 * D1;
    return f0 + c2 * d * d + c4 * d * d * d * d;
  }
  return matsubara_sum_closed(a, b);
}

SeriesEval matsubara_sum_series(double a, double b, long long N) {
  if (a <= 0.0 || b <= 0.0)
    throw InvalidArgument("matsubara_sum_series: a and b must be positive");
  if (N < 1) throw InvalidArgument("matsubara_sum_series: N must be >= 1");
  auto f = [a, b](double u) {
    return u * u / ((a * a + u * u) * (b * b + u * u));
  };
  double partial = 0.0;
  for (long long n = N; n >= 1; --n) partial += f(static_cast<double>(n));
  const double t = static_cast<double>(N) + 0.5;
  // \int_t^inf u^2/((a^2+u^2)(b^2+u^2)) du by partial fractions.
  double integral = 0.0;
  if (std::abs(a - b) < 1e-6 * std::max(1.0, std::max(a, b))) {
    const double mm = 0.5 * (a + b);
    // pi/(4m) - atan(t/m)/(2m) = atan(m/t)/(2m), stable for m << t.
    const double first =
        mm < 1e-8 * t ? (1.0 - (mm / t) * (mm / t) / 3.0) / (2.0 * t)
                      : std::atan(mm / t) / (2.0 * mm);
    integral = first + t / (2.0 * (t * t + mm * mm));
  } else {
    integral = (a * (M_PI / 2.0 - std::atan(t / a)) - b * (M_PI / 2.0 - std::atan(t / b))) /
               (a * a - b * b);
  }
  auto fp = [a, b](double u) {
    const double da = a * a + u * u, db = b * b + u * u;
    return 2.0 * u / (da * db) - u * u * (2.0 * u * db + 2.0 * u * da) / (da * da * db * db);
  };
  SeriesEval out;
  out.approx = partial + integral + fp(t) / 24.0;
  const double f3 = third_derivative_fd(f, t, 0.25);
  out.tail = 8.0 * (7.0 / 5760.0) * std::abs(f3) + 4e-16 * std::abs(out.approx);
  return out;
}

KernelEval zeta_kernel(double Ep, double Eq, double T, ZetaMethod method, long long N) {
  if (T <= 0.0) throw InvalidArgument("zeta_kernel: T must be positive");
  if (Ep < 0.0 || Eq < 0.0) throw InvalidArgument("zeta_kernel: energies must be >= 0");
  const double c = 2.0 * M_PI * T;
  KernelEval out;
  out.p = Ep;
  out.q = Eq;
  const double A = Ep / c, B = Eq / c;
  if (method == ZetaMethod::ClosedForm) {
    out.method = "closed-form";
    out.tail_bound = 0.0;
    if (A <= 0.0 && B <= 0.0) {
      out.value = (2.0 / (c * c)) * (M_PI * M_PI / 6.0);
    } else if (A <= 0.0 || B <= 0.0) {
      // One vanishing energy: sum n^2/(n^2 (x^2+n^2)) = sum 1/(x^2+n^2).
      const double x = std::max(A, B);
      const double px = M_PI * x;
      out.value = (2.0 / (c * c)) * 0.5 * (px / std::tanh(px) - 1.0) / (x * x);
    } else {
      out.value = (2.0 / (c * c)) * matsubara_sum(A, B);
    }
    return out;
  }
  out.method = "series(" + std::to_string(N) + ")";
  double Aa = std::max(A, 1e-300), Bb = std::max(B, 1e-300);
  const SeriesEval se = matsubara_sum_series(Aa, Bb, N);
  out.value = (2.0 / (c * c)) * se.approx;
  out.tail_bound = (2.0 / (c * c)) * se.tail;
  return out;
}

ATildePair a_tilde_kernels(const Eigen::Vector3d& p, const Eigen::Vector3d& q, double h,
                           const foundation::Potential& W,
                           const foundation::RadialProfile& delta, double mu, double T) {
  const double hp = h * p.norm();
  const double hq = h * q.norm();
  const double pmax = delta.grid().pmax();
  if (hp > pmax || hq > pmax)
    throw ExtrapolationError("a_tilde_kernels: scaled momentum beyond the delta grid");
  const double dp = delta(hp);
  const double dq = delta(hq);
  const double Ep = tibcs::quasiparticle_energy(hp, mu, dp);
  const double Eq = tibcs::quasiparticle_energy(hq, mu, dq);
  const double zeta = zeta_kernel(Ep, Eq, T).value;
  const double wij = W.fourier((p - q).norm());
  ATildePair out;
  out.a11 = h * h * wij * (tibcs::dispersion(hp, mu) + tibcs::dispersion(hq, mu)) * zeta;
  out.a12 = h * h * wij * (dp - dq) * zeta;
  return out;
}

WeightedKernels assemble_weighted_kernels(const foundation::BoxGrid& box, double h,
                                          const foundation::Potential& W,
                                          const foundation::RadialProfile& delta,
                                          double mu, double T) {
  const int M = box.size();
  if (M > 2048)
    throw InvalidArgument("assemble_weighted_kernels: lattice too large for dense work");
  const double dkvol = std::pow(box.dk(), box.dims());

  // Momentum-space kernels, acting by sum_j K(p_i, p_j) f_j dk^dims.
  Eigen::MatrixXd A11(M, M), A12(M, M);
  std::vector<double> Ev(M), dv(M), kv(M);
  for (int i = 0; i < M; ++i) {
    const double hp = h * box.momentum_norm(i);
    if (hp > delta.grid().pmax())
      throw ExtrapolationError("assemble_weighted_kernels: momentum beyond delta grid");
    dv[i] = delta(hp);
    kv[i] = tibcs::dispersion(hp, mu);
    Ev[i] = tibcs::quasiparticle_energy(hp, mu, dv[i]);
  }
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double zeta = zeta_kernel(Ev[i], Ev[j], T).value;
      const double wij = W.fourier((box.momentum(i) - box.momentum(j)).norm());
      const double base = h * h * wij * zeta * dkvol;
      A11(i, j) = base * (kv[i] + kv[j]);
      A11(j, i) = A11(i, j);
      A12(i, j) = base * (dv[i] - dv[j]);
      A12(j, i) = -A12(i, j);
    }
  }

  // Unitary DFT to the position lattice, then diagonal (1+x^2) weights.
  Eigen::MatrixXcd F(M, M);
  const double s = 1.0 / std::sqrt(static_cast<double>(M));
  for (int p = 0; p < M; ++p)
    for (int x = 0; x < M; ++x) {
      const double phase = -box.momentum(p).dot(box.position(x));
      F(p, x) = std::polar(s, phase);
    }
  Eigen::VectorXd wx(M);
  for (int x = 0; x < M; ++x) wx(x) = 1.0 + box.position(x).squaredNorm();

  auto weight = [&](const Eigen::MatrixXd& A) {
    Eigen::MatrixXcd pos = F.adjoint() * A * F;
    Eigen::MatrixXcd weighted = wx.asDiagonal() * pos * wx.asDiagonal();
    return Eigen::MatrixXd(weighted.real());
  };

  WeightedKernels out;
  out.a11 = weight(A11);
  out.a12 = weight(A12);
  return out;
}

double operator_norm_power_iteration(const Eigen::MatrixXd& A, double rel_tol,
                                     int max_iter, std::uint64_t seed) {
  const int n = static_cast<int>(A.cols());
  Rng rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = A.transpose() * (A * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double next = std::sqrt(norm);
    if (it > 0 && std::abs(next - lambda) <= rel_tol * std::max(next, 1e-300)) {
      return next;
    }
    lambda = next;
    v = w;
  }
  throw NumericalError("operator_norm_power_iteration: no convergence");
}

std::pair<double, double> log_log_fit(const std::vector<double>& h_values,
                                      const std::vector<double>& norms) {
  if (h_values.size() != norms.size() || h_values.size() < 2)
    throw InvalidArgument("log_log_fit: need matching lists of size >= 2");
  const int m = static_cast<int>(h_values.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < m; ++i) {
    if (!(h_values[i] > 0.0) || !(norms[i] > 0.0))
      throw InvalidArgument("log_log_fit: values must be positive");
    const double x = std::log(h_values[i]);
    const double y = std::log(norms[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw InvalidArgument("log_log_fit: degenerate abscissae");
  const double slope = (m * sxy - sx * sy) / denom;
  const double ss_res = syy - sy * sy / m - slope * (sxy - sx * sy / m);
  const double ss_tot = syy - sy * sy / m;
  const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return {slope, r2};
}

NormScalingResult weighted_norm_scaling(const std::vector<double>& h_list,
                                        const foundation::BoxGrid& box,
                                        const foundation::Potential& W,
                                        const foundation::RadialProfile& delta,
                                        double mu, double T) {
  if (h_list.size() < 4)
    throw InvalidArgument("weighted_norm_scaling: need at least 4 values of h");
  for (double h : h_list)
    if (!(h > 0.0)) throw InvalidArgument("weighted_norm_scaling: h must be positive");

  // The scaled lattice momenta can exceed the profile grid; resample onto an
  // extended grid (zero beyond the original pmax) before assembly.
  double pscale = 0.0;
  for (int i = 0; i < box.size(); ++i) pscale = std::max(pscale, box.momentum_norm(i));
  double hmax = 0.0;
  for (double h : h_list) hmax = std::max(hmax, h);
  const foundation::RadialGrid& grid = delta.grid();
  const double pmax_ext = std::max(grid.pmax(), 1.02 * hmax * pscale);
  const foundation::RadialGrid ext(pmax_ext, grid.count());
  std::vector<double> extv(ext.count());
  for (int i = 0; i < ext.count(); ++i) extv[i] = delta(ext.node(i));
  const foundation::RadialProfile delta_ext(ext, extv);

  NormScalingResult out;
  for (double h : h_list) {
    foundation::BoxGrid bh(box.L(), box.n(), box.dims(), h);
    const WeightedKernels wk = assemble_weighted_kernels(bh, h, W, delta_ext, mu, T);
    out.h_values.push_back(h);
    out.norm11.push_back(operator_norm_power_iteration(wk.a11));
    out.norm12.push_back(operator_norm_power_iteration(wk.a12));
  }
  std::tie(out.e11, out.r2_11) = log_log_fit(out.h_values, out.norm11);
  std::tie(out.e12, out.r2_12) = log_log_fit(out.h_values, out.norm12);
  return out;
}

}  // namespace bcslab::kernels
