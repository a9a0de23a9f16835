#pragma once

// Translation-invariant BCS theory: dispersion, quasiparticle energy, the
// multiplier K_T(E) = E/tanh(E/2T), critical temperature from the lowest
// eigenvalue of K_T^0 + V in the s-wave sector, the gap-equation solver and
// the minimizing state, and the free energy functional.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bcslab/foundation.hpp"

namespace bcslab::tibcs {

using foundation::Potential;
using foundation::RadialGrid;
using foundation::RadialProfile;

// Translation-invariant BCS state: the pair (gamma_hat, alpha_hat) on a
// radial grid. Pointwise 0 <= gamma <= 1 and alpha^2 <= gamma (1 - gamma).
struct TiState {
  const RadialGrid* grid = nullptr;
  std::vector<double> gamma;
  std::vector<double> alpha;
  double T = 0.0;
  double mu = 0.0;
};

struct GapSolution {
  std::vector<double> delta;  // Delta_hat on the grid nodes
  double T = 0.0;
  double Tc = 0.0;
  double residual = 0.0;  // sup-norm of Delta - G(Delta)
  long long iterations = 0;
  bool converged = false;
};

double dispersion(double p, double mu);

// E(p) = sqrt((p^2-mu)^2 + delta^2).
double quasiparticle_energy(double p, double mu, double delta_at_p);

// E/tanh(E/2T) with the removable singularity at E=0 evaluated as 2T.
double kt_multiplier(double E, double T);

// Symmetric s-wave discretization of K_T^0 + V; smallest eigenvalue.
double lowest_eigenvalue_ktv(double T, const Potential& V, double mu,
                             const RadialGrid& grid);

// Bisection for the sign change of the lowest eigenvalue of K_T^0 + V.
double critical_temperature(const Potential& V, double mu, const RadialGrid& grid,
                            std::pair<double, double> bracket, double rel_tol = 1e-8);

// Expands an initial guess into a sign-change bracket; returns nullopt when
// the lowest eigenvalue is nonnegative all the way down to tiny T (Tc = 0).
std::optional<std::pair<double, double>> find_tc_bracket(const Potential& V, double mu,
                                                         const RadialGrid& grid,
                                                         double T_hint = 0.1);

struct GapSolveOptions {
  double damping = 0.5;
  double tol = 1e-10;
  long long max_iter = 100000;
  bool anderson = false;   // Anderson(m) mixing on top of the damped iteration
  int anderson_depth = 4;
  std::optional<double> known_tc;  // skip the bisection when already computed
  std::optional<std::vector<double>> init;  // initial profile; default from the
                                            // lowest eigenvector of K_Tc^0 + V
};

// Damped fixed-point iteration of
//   Delta(p) <- -(2pi)^{-3/2} \int V_hat(p-q) Delta(q) / K_T(E(q)) dq
// with the convolution realized as a dense spline-accurate matrix. The
// global phase is fixed by Delta(p*) >= 0 at the first node of maximal
// magnitude. For T >= Tc the zero profile is returned.
GapSolution solve_gap(double T, const Potential& V, double mu, const RadialGrid& grid,
                      const GapSolveOptions& opts = {});

// Gibbs state of H_0(p) per node: gamma = 1/2 (1 - k tanh(E/2T)/E),
// alpha = -Delta tanh(E/2T) / (2E).
TiState state_from_delta(const RadialProfile& delta, double T, double mu);
TiState state_from_delta(const RadialGrid& grid, const std::vector<double>& delta,
                         double T, double mu);

// F^ti = \int (p^2-mu) gamma dp + \int V |alpha(x)|^2 dx - T S(Gamma); the
// interaction term goes through the inverse radial transform of alpha_hat.
double ti_free_energy(const TiState& state, double T, const Potential& V, double mu,
                      const RadialGrid& grid);

struct ScalingFit {
  double exponent = 0.0;
  double r2 = 0.0;
  std::vector<double> temperatures;
  std::vector<double> alpha_l2;
};

// Solves the gap equation at each T < Tc, fits log ||alpha_0||_{L^2} against
// log(Tc - T); the expected slope is 1/2.
ScalingFit order_parameter_scaling(const Potential& V, double mu, const RadialGrid& grid,
                                   const std::vector<double>& T_list,
                                   const GapSolveOptions& opts = {});

}  // namespace bcslab::tibcs
