#pragma once

// Grids, quadrature, Fourier conventions and model potentials shared by the
// other modules. The Fourier transform is unitary, f_hat(p) =
// (2pi)^{-3/2} \int f(x) e^{-ipx} dx, so a 3D convolution carries the
// (2pi)^{-3/2} prefactor everywhere it appears.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bcslab/errors.hpp"

namespace bcslab::foundation {

// n-point Gauss-Legendre rule on [a,b]. Nodes ascending.
void gauss_legendre(int n, double a, double b,
                    std::vector<double>& nodes, std::vector<double>& weights);

// Momentum-magnitude quadrature grid. `weights` carry the full radial
// measure 4*pi*p^2*dp, so sum(weights * f(nodes)) ~ \int_{R^3} f(|p|) d^3p
// for radial f that has decayed by pmax. `weights_1d` are the bare
// Gauss-Legendre weights for plain \int_0^pmax dp integrals.
class RadialGrid {
 public:
  RadialGrid(double pmax, int count, int points_per_panel = 16);

  double pmax() const { return pmax_; }
  int count() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& weights_1d() const { return weights_1d_; }
  double node(int i) const { return nodes_[i]; }
  double weight(int i) const { return weights_[i]; }

  // \int_{R^3} f(|p|) d^3p by quadrature.
  double integrate(const std::vector<double>& values) const;
  double integrate(const std::function<double(double)>& f) const;

  bool same_as(const RadialGrid& other) const;

 private:
  double pmax_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> weights_1d_;
};

// Cubic spline with not-a-knot ends; zero beyond the last node, first
// segment extrapolated below the first node (radial profiles start at a
// small positive node).
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(const std::vector<double>& x, const std::vector<double>& y);

  double operator()(double x) const;
  // \int_a^b s * f(s) ds, exact per cubic segment (3-point Gauss).
  double integrate_moment(double a, double b) const;
  double x_max() const { return x_.empty() ? 0.0 : x_.back(); }

 private:
  double segment_value(int seg, double x) const;
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> b_, c_, d_;  // per-segment coefficients
};

// Radial function sampled on a grid; interpolable off-grid via spline.
class RadialProfile {
 public:
  RadialProfile(const RadialGrid& grid, std::vector<double> values);
  RadialProfile(const RadialGrid& grid, const std::function<double(double)>& f);

  const RadialGrid& grid() const { return *grid_; }
  const std::vector<double>& values() const { return values_; }
  double value(int i) const { return values_[i]; }
  double operator()(double p) const;  // spline; 0 beyond pmax
  const CubicSpline& spline() const { return spline_; }

  double l2_norm() const;  // sqrt(\int |f|^2 d^3p)

 private:
  const RadialGrid* grid_;
  std::vector<double> values_;
  CubicSpline spline_;
};

// Interaction or external potential with an analytic radial Fourier profile.
// Symmetric by construction, V(-x) = V(x).
class Potential {
 public:
  enum class Kind { GaussianWell, UserTable };

  static Potential gaussian(double depth, double width);
  static Potential user_table(const RadialGrid& grid, std::vector<double> fourier_values);

  Kind kind() const { return kind_; }
  double depth() const { return depth_; }
  double width() const { return width_; }

  double fourier(double p) const { return fourier_(p); }    // V_hat(p)
  double position(double r) const { return position_(r); }  // V(r)
  // Cumulative moment M(s) = \int_0^s t V_hat(t) dt (closed form for the
  // Gaussian well); the convolution kernels consume V_hat through this.
  double fourier_moment(double s) const { return moment_(s); }
  bool is_zero() const;

  // \int |V(x)|^{3/2} d^3x (closed form for the Gaussian well).
  double l32_norm() const;

 private:
  Potential() = default;
  Kind kind_ = Kind::GaussianWell;
  double depth_ = 0.0;
  double width_ = 1.0;
  std::function<double(double)> fourier_;
  std::function<double(double)> position_;
  std::function<double(double)> moment_;
};

// (2pi)^{-3/2} (f * g)(p) for radial profiles, via the 1D reduction
// (f*g)(p) = (2pi/p) \int_0^inf dq q g(q) \int_{|p-q|}^{p+q} ds s f(s).
double radial_convolution(const RadialProfile& f, const RadialProfile& g, double p);

// Same reduction with an analytic f (used by the gap solver where V_hat is
// known in closed form and the inner moment can be integrated accurately).
double radial_convolution(const std::function<double(double)>& f_exact,
                          const RadialProfile& g, double p);

// Dense matrix C with (C g)(p_i) = (2pi)^{-3/2} (f * g)(p_i) for g sampled
// on the grid, f given through its cumulative moment M(s) = \int_0^s t f dt.
// Outer quadrature panels follow the spline segments of g (split at the
// |p-q| kink), so C integrates the spline of g essentially exactly.
Eigen::MatrixXd convolution_matrix(const std::function<double(double)>& f_moment,
                                   const RadialGrid& grid);

// Spline evaluation as a linear functional of nodal values: row r with
// f(x) ~ r . values for the grid's not-a-knot spline.
Eigen::MatrixXd spline_evaluation_rows(const RadialGrid& grid,
                                       const std::vector<double>& points);

// Radial Fourier pair (self-inverse form): for a radial function f on one
// grid, returns sqrt(2/pi) (1/y) \int_0^max x f(x) sin(xy) dx evaluated at y.
double radial_transform(const RadialProfile& f, double y);
std::vector<double> radial_transform(const RadialProfile& f, const std::vector<double>& ys);

// Dual-lattice description of a periodic box of side L with n points per
// dimension; h is the microscopic ratio of the BdG scaling.
class BoxGrid {
 public:
  BoxGrid(double L, int n, int dims, double h);

  double L() const { return L_; }
  int n() const { return n_; }
  int dims() const { return dims_; }
  double h() const { return h_; }
  int size() const { return size_; }  // n^dims

  double dk() const { return 2.0 * M_PI / L_; }
  double nyquist() const { return M_PI * n_ / L_; }
  double cell_volume() const;  // (L/n)^dims

  // FFT-order integer frequency of index component m in {0..n-1}.
  int freq(int m) const { return m < n_ / 2 ? m : m - n_; }

  // Flat index -> momentum vector (zero-padded to 3 components).
  Eigen::Vector3d momentum(int flat) const;
  double momentum_norm(int flat) const { return momentum(flat).norm(); }
  // Flat index -> position vector, centered coordinates in [-L/2, L/2).
  Eigen::Vector3d position(int flat) const;

 private:
  double L_;
  int n_;
  int dims_;
  double h_;
  int size_;
};

}  // namespace bcslab::foundation
