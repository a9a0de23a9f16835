#include "bcslab/tibcs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace bcslab::tibcs {

double dispersion(double p, double mu) { return p * p - mu; }

double quasiparticle_energy(double p, double mu, double delta_at_p) {
  const double k = dispersion(p, mu);
  return std::hypot(k, delta_at_p);
}

double kt_multiplier(double E, double T) {
  if (T <= 0.0) throw InvalidArgument("kt_multiplier: T must be positive");
  const double u = E / (2.0 * T);
  if (std::abs(u) < 1e-4) {
    // 2T u/tanh(u) = 2T (1 + u^2/3 - u^4/45 + ...)
    const double u2 = u * u;
    return 2.0 * T * (1.0 + u2 / 3.0 - u2 * u2 / 45.0);
  }
  return E / std::tanh(u);
}

namespace {

// Symmetric s-wave matrix of K_T^Delta + V: multiplication by K on the
// diagonal plus the weight-conjugated convolution kernel of V_hat.
Eigen::MatrixXd ktv_matrix(double T, const Potential& V, double mu,
                           const RadialGrid& grid, const std::vector<double>* delta) {
  const int n = grid.count();
  Eigen::MatrixXd A(n, n);
  const double pref = 1.0 / std::pow(2.0 * M_PI, 1.5);
  std::vector<double> sqw(n);
  for (int i = 0; i < n; ++i) sqw[i] = std::sqrt(grid.weight(i));
  for (int i = 0; i < n; ++i) {
    const double p = grid.node(i);
    for (int j = 0; j <= i; ++j) {
      const double q = grid.node(j);
      // g(p,q) = (2pi)^{-3/2} IV(|p-q|, p+q) / (2 p q), IV = \int s V_hat ds
      double iv = 0.0;
      {
        const double a = std::abs(p - q), b = p + q;
        const int panels = std::clamp(static_cast<int>(std::ceil((b - a) * 2.0)), 8, 64);
        const double width = (b - a) / panels;
        for (int pnl = 0; pnl < panels; ++pnl) {
          const double lo = a + pnl * width;
          static const double gl4n[4] = {-0.8611363115940526, -0.3399810435848563,
                                         0.3399810435848563, 0.8611363115940526};
          static const double gl4w[4] = {0.3478548451374538, 0.6521451548625461,
                                         0.6521451548625461, 0.3478548451374538};
          const double mid = lo + 0.5 * width, half = 0.5 * width;
          for (int k = 0; k < 4; ++k) {
            const double s = mid + half * gl4n[k];
            iv += half * gl4w[k] * s * V.fourier(s);
          }
        }
      }
      const double g = pref * iv / (2.0 * p * q);
      A(i, j) = sqw[i] * g * sqw[j];
      A(j, i) = A(i, j);
    }
  }
  for (int i = 0; i < n; ++i) {
    const double p = grid.node(i);
    const double d = delta ? (*delta)[i] : 0.0;
    A(i, i) += kt_multiplier(quasiparticle_energy(p, mu, d), T);
  }
  return A;
}

}  // namespace

double lowest_eigenvalue_ktv(double T, const Potential& V, double mu,
                             const RadialGrid& grid) {
  if (T <= 0.0) throw InvalidArgument("lowest_eigenvalue_ktv: T must be positive");
  Eigen::MatrixXd A = ktv_matrix(T, V, mu, grid, nullptr);
  const double defect = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (defect > 1e-10 * std::max(1.0, A.cwiseAbs().maxCoeff()))
    throw InternalError("lowest_eigenvalue_ktv: discretization not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double critical_temperature(const Potential& V, double mu, const RadialGrid& grid,
                            std::pair<double, double> bracket, double rel_tol) {
  double lo = bracket.first, hi = bracket.second;
  if (!(lo > 0.0 && hi > lo)) throw InvalidArgument("critical_temperature: bad bracket");
  double flo = lowest_eigenvalue_ktv(lo, V, mu, grid);
  double fhi = lowest_eigenvalue_ktv(hi, V, mu, grid);
  if (!(flo < 0.0 && fhi > 0.0))
    throw BracketError("critical_temperature: no sign change in bracket");
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    const double fm = lowest_eigenvalue_ktv(mid, V, mu, grid);
    if (fm < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<std::pair<double, double>> find_tc_bracket(const Potential& V, double mu,
                                                         const RadialGrid& grid,
                                                         double T_hint) {
  double T = std::max(T_hint, 1e-6);
  double f = lowest_eigenvalue_ktv(T, V, mu, grid);
  if (f < 0.0) {
    double hi = T;
    for (int i = 0; i < 80; ++i) {
      hi *= 2.0;
      if (lowest_eigenvalue_ktv(hi, V, mu, grid) > 0.0) return std::make_pair(T, hi);
    }
    return std::nullopt;
  }
  double lo = T;
  for (int i = 0; i < 60; ++i) {
    lo *= 0.5;
    if (lo < 1e-12) break;
    if (lowest_eigenvalue_ktv(lo, V, mu, grid) < 0.0) return std::make_pair(lo, T);
    T = lo;
  }
  return std::nullopt;
}

namespace {

std::vector<double> default_gap_init(double T, double Tc, const Potential& V, double mu,
                                     const RadialGrid& grid) {
  const int n = grid.count();
  const double amp = std::sqrt(std::max(Tc - T, 0.0) * Tc);
  try {
    Eigen::MatrixXd A = ktv_matrix(Tc, V, mu, grid, nullptr);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    Eigen::VectorXd v = es.eigenvectors().col(0);
    // Unconjugate the weights to recover a profile, fix the overall sign.
    std::vector<double> init(n);
    int imax = 0;
    for (int i = 0; i < n; ++i) {
      init[i] = v(i) / std::sqrt(grid.weight(i));
      if (std::abs(init[i]) > std::abs(init[imax])) imax = i;
    }
    const double scale = (init[imax] >= 0.0 ? 1.0 : -1.0) * amp /
                         std::max(std::abs(init[imax]), 1e-300);
    for (double& x : init) x *= scale;
    return init;
  } catch (const std::exception&) {
    return std::vector<double>(n, amp > 0.0 ? amp : 0.1);
  }
}

}  // namespace

GapSolution solve_gap(double T, const Potential& V, double mu, const RadialGrid& grid,
                      const GapSolveOptions& opts) {
  if (T <= 0.0) throw InvalidArgument("solve_gap: T must be positive");
  if (opts.tol <= 0.0) throw InvalidArgument("solve_gap: tol must be positive");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0))
    throw InvalidArgument("solve_gap: damping must be in (0,1]");
  const int n = grid.count();

  GapSolution sol;
  sol.T = T;
  sol.delta.assign(n, 0.0);

  if (V.is_zero()) {
    sol.Tc = 0.0;
    sol.converged = true;
    sol.iterations = 1;
    sol.residual = 0.0;
    return sol;
  }

  double Tc = 0.0;
  if (opts.known_tc) {
    Tc = *opts.known_tc;
  } else {
    const auto bracket = find_tc_bracket(V, mu, grid, std::max(0.05, T));
    Tc = bracket ? critical_temperature(V, mu, grid, *bracket) : 0.0;
  }
  sol.Tc = Tc;

  if (T >= Tc) {
    sol.converged = true;
    sol.iterations = 1;
    sol.residual = 0.0;
    return sol;
  }

  // G(Delta) = -2 C (Delta / (2 K(Delta))) with C the convolution matrix of
  // V_hat; alpha = -Delta/(2K) and Delta = 2 (2pi)^{-3/2} V_hat * alpha.
  const Eigen::MatrixXd C = foundation::convolution_matrix(
      [&V](double s) { return V.fourier_moment(s); }, grid);

  std::vector<double> init =
      opts.init ? *opts.init : default_gap_init(T, Tc, V, mu, grid);
  if (static_cast<int>(init.size()) != n)
    throw InvalidArgument("solve_gap: init profile size mismatch");
  double init_amp = 0.0;
  for (double x : init) init_amp = std::max(init_amp, std::abs(x));

  auto apply_G = [&](const Eigen::VectorXd& d) {
    Eigen::VectorXd alpha(n);
    for (int i = 0; i < n; ++i) {
      const double E = quasiparticle_energy(grid.node(i), mu, d(i));
      alpha(i) = -d(i) / (2.0 * kt_multiplier(E, T));
    }
    return Eigen::VectorXd(2.0 * (C * alpha));
  };

  auto iterate = [&](bool anderson, Eigen::VectorXd delta, long long& it_out,
                     double& res_out) {
    std::deque<Eigen::VectorXd> hist_x, hist_r;
    double residual = std::numeric_limits<double>::infinity();
    long long it = 0;
    for (; it < opts.max_iter; ++it) {
      Eigen::VectorXd g = apply_G(delta);
      if (!g.allFinite()) throw NumericalError("solve_gap: NaN in iteration");
      Eigen::VectorXd r = g - delta;
      residual = r.cwiseAbs().maxCoeff();
      if (residual <= opts.tol) {
        ++it;
        break;
      }

      Eigen::VectorXd damped_next = delta + opts.damping * r;
      Eigen::VectorXd next = damped_next;
      // The zero profile is also a fixed point; mix only at small relative
      // residual and reject steps that collapse toward zero. Near Tc this
      // can still slide into the zero basin; solve_gap retries undamped
      // mixing-free in that case.
      const double dmax_cur = delta.cwiseAbs().maxCoeff();
      if (anderson && residual < 1e-2 * dmax_cur &&
          static_cast<int>(hist_x.size()) >= 1) {
        const int m = static_cast<int>(hist_x.size());
        Eigen::MatrixXd dR(n, m), dX(n, m);
        for (int j = 0; j < m; ++j) {
          dR.col(j) = hist_r[j] - r;
          dX.col(j) = hist_x[j] - delta;
        }
        const Eigen::VectorXd gamma = dR.colPivHouseholderQr().solve(r);
        Eigen::VectorXd cand =
            delta + opts.damping * r - (dX + opts.damping * dR) * gamma;
        const double ref = damped_next.cwiseAbs().maxCoeff();
        bool accept = cand.allFinite() && cand.cwiseAbs().maxCoeff() > 0.25 * ref &&
                      (cand - delta).cwiseAbs().maxCoeff() < std::max(10.0 * ref, 1.0);
        if (accept) {
          // monotone safeguard: the mixed step must not grow the residual
          const Eigen::VectorXd gc = apply_G(cand);
          accept = gc.allFinite() && (gc - cand).cwiseAbs().maxCoeff() <= residual;
        }
        if (accept) {
          next = cand;
        } else {
          hist_x.clear();
          hist_r.clear();
        }
      }

      hist_x.push_front(delta);
      hist_r.push_front(r);
      while (static_cast<int>(hist_x.size()) > opts.anderson_depth) {
        hist_x.pop_back();
        hist_r.pop_back();
      }
      delta = next;
    }
    it_out = it;
    res_out = residual;
    return delta;
  };

  Eigen::VectorXd delta(n);
  for (int i = 0; i < n; ++i) delta(i) = init[i];
  long long it = 0;
  double residual = 0.0;
  Eigen::VectorXd result = iterate(opts.anderson, delta, it, residual);

  // Below Tc the mixing may have slid into the zero fixed point; the plain
  // damped iteration cannot, so redo without it.
  if (opts.anderson && T < Tc &&
      result.cwiseAbs().maxCoeff() < 1e-6 * std::max(init_amp, 1e-8)) {
    long long it2 = 0;
    result = iterate(false, delta, it2, residual);
    it += it2;
  }

  // Phase convention: Delta(p*) >= 0 at the first node of maximal magnitude.
  int imax = 0;
  for (int i = 0; i < n; ++i)
    if (std::abs(result(i)) > std::abs(result(imax))) imax = i;
  if (result(imax) < 0.0) result = -result;

  sol.iterations = it;
  sol.residual = residual;
  sol.converged = residual <= opts.tol;
  for (int i = 0; i < n; ++i) sol.delta[i] = result(i);
  return sol;
}

TiState state_from_delta(const RadialGrid& grid, const std::vector<double>& delta,
                         double T, double mu) {
  if (T <= 0.0) throw InvalidArgument("state_from_delta: T must be positive");
  if (delta.size() != static_cast<std::size_t>(grid.count()))
    throw InvalidArgument("state_from_delta: profile size mismatch");
  TiState st;
  st.grid = &grid;
  st.T = T;
  st.mu = mu;
  st.gamma.resize(grid.count());
  st.alpha.resize(grid.count());
  for (int i = 0; i < grid.count(); ++i) {
    const double p = grid.node(i);
    const double k = dispersion(p, mu);
    const double E = quasiparticle_energy(p, mu, delta[i]);
    const double kt = kt_multiplier(E, T);  // series-safe tanh(E/2T)/E = 1/kt
    st.gamma[i] = 0.5 * (1.0 - k / kt);
    st.alpha[i] = -delta[i] / (2.0 * kt);
  }
  return st;
}

TiState state_from_delta(const RadialProfile& delta, double T, double mu) {
  return state_from_delta(delta.grid(), delta.values(), T, mu);
}

double ti_free_energy(const TiState& state, double T, const Potential& V, double mu,
                      const RadialGrid& grid) {
  if (T <= 0.0) throw InvalidArgument("ti_free_energy: T must be positive");
  const int n = grid.count();
  if (state.gamma.size() != static_cast<std::size_t>(n))
    throw InvalidArgument("ti_free_energy: state size mismatch");

  double kinetic = 0.0;
  double entropy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = state.gamma[i];
    const double a = state.alpha[i];
    // 2x2 eigenvalues 1/2 +- r of (gamma, alpha; alpha, 1-gamma).
    const double r = std::hypot(g - 0.5, a);
    const double lp = 0.5 + r;
    const double lm = 0.5 - r;
    if (lp > 1.0 + 1e-9 || lm < -1e-9)
      throw InvalidState("ti_free_energy: state eigenvalue outside [0,1]");
    auto phi = [](double x) {
      if (x <= 0.0 || x >= 1.0) return 0.0;
      return x * std::log(x) + (1.0 - x) * std::log(1.0 - x);
    };
    kinetic += grid.weight(i) * dispersion(grid.node(i), mu) * g;
    // per-mode S density = -1/2 Tr_{C^2}[...] = -(phi(lp) + phi(lm))/2
    entropy += grid.weight(i) * (-0.5) * (phi(lp) + phi(lm));
  }

  double interaction = 0.0;
  if (!V.is_zero()) {
    // alpha(x) by inverse radial transform, then 4 pi \int x^2 V(x) |alpha|^2.
    const double xmax = std::max(6.0, 12.0 * std::max(V.width(), 1.0));
    RadialGrid xg(xmax, std::max(128, n));
    RadialProfile ahat(grid, state.alpha);
    double s = 0.0;
    for (int i = 0; i < xg.count(); ++i) {
      const double x = xg.node(i);
      const double ax = foundation::radial_transform(ahat, x);
      s += xg.weight(i) * V.position(x) * ax * ax;
    }
    interaction = s;
  }

  return kinetic + interaction - T * entropy;
}

ScalingFit order_parameter_scaling(const Potential& V, double mu, const RadialGrid& grid,
                                   const std::vector<double>& T_list,
                                   const GapSolveOptions& opts) {
  if (T_list.size() < 3)
    throw InvalidArgument("order_parameter_scaling: need at least 3 temperatures");

  GapSolveOptions o = opts;
  ScalingFit fit;
  double Tc = 0.0;
  {
    const auto bracket = find_tc_bracket(V, mu, grid, 0.1);
    if (!bracket) throw BracketError("order_parameter_scaling: Tc = 0 for this potential");
    Tc = critical_temperature(V, mu, grid, *bracket);
    o.known_tc = Tc;
  }

  std::vector<double> xs, ys;
  for (double T : T_list) {
    GapSolution sol = solve_gap(T, V, mu, grid, o);
    if (!sol.converged)
      throw NumericalError("order_parameter_scaling: gap solve did not converge");
    TiState st = state_from_delta(grid, sol.delta, T, mu);
    double norm2 = 0.0;
    for (int i = 0; i < grid.count(); ++i)
      norm2 += grid.weight(i) * st.alpha[i] * st.alpha[i];
    const double norm = std::sqrt(norm2);
    if (!(norm > 0.0) || T >= Tc)
      throw NumericalError("order_parameter_scaling: degenerate fit (T above Tc?)");
    fit.temperatures.push_back(T);
    fit.alpha_l2.push_back(norm);
    xs.push_back(std::log(Tc - T));
    ys.push_back(std::log(norm));
  }

  const int m = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < m; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double denom = m * sxx - sx * sx;
  fit.exponent = (m * sxy - sx * sy) / denom;
  const double ss_res = syy - sy * sy / m - fit.exponent * (sxy - sx * sy / m);
  const double ss_tot = syy - sy * sy / m;
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace bcslab::tibcs
