#include "bcslab/foundation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace bcslab::foundation {

namespace {

constexpr double kTwoPiPow32 = 15.749609945722419;  // (2*pi)^{3/2}

// 8-point Gauss-Legendre on [-1,1], used for fixed inner panels.
const double kGl8Nodes[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
const double kGl8Weights[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

const double kGl3Nodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
const double kGl3Weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

}  // namespace

void gauss_legendre(int n, double a, double b,
                    std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration from the Chebyshev estimate.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double xm = 0.5 * (b + a);
    const double xl = 0.5 * (b - a);
    nodes[i] = xm - xl * x;
    nodes[n - 1 - i] = xm + xl * x;
    weights[i] = 2.0 * xl / ((1.0 - x * x) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
  std::sort(nodes.begin(), nodes.end());
}

RadialGrid::RadialGrid(double pmax, int count, int points_per_panel) : pmax_(pmax) {
  if (pmax <= 0.0) throw InvalidArgument("RadialGrid: pmax must be positive");
  if (count < 8) throw InvalidArgument("RadialGrid: count must be >= 8");
  if (points_per_panel < 2) throw InvalidArgument("RadialGrid: points_per_panel must be >= 2");

  const int npanels = std::max(1, count / points_per_panel);
  const int base = count / npanels;
  const int rem = count % npanels;
  nodes_.reserve(count);
  weights_.reserve(count);
  weights_1d_.reserve(count);
  double lo = 0.0;
  const double width = pmax / npanels;
  for (int pnl = 0; pnl < npanels; ++pnl) {
    const int k = base + (pnl < rem ? 1 : 0);
    const double hi = (pnl == npanels - 1) ? pmax : lo + width;
    std::vector<double> x, w;
    gauss_legendre(k, lo, hi, x, w);
    for (int i = 0; i < k; ++i) {
      nodes_.push_back(x[i]);
      weights_1d_.push_back(w[i]);
      weights_.push_back(4.0 * M_PI * x[i] * x[i] * w[i]);
    }
    lo = hi;
  }
}

double RadialGrid::integrate(const std::vector<double>& values) const {
  if (values.size() != nodes_.size())
    throw InvalidArgument("RadialGrid::integrate: value count mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += weights_[i] * values[i];
  return s;
}

double RadialGrid::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * f(nodes_[i]);
  return s;
}

bool RadialGrid::same_as(const RadialGrid& other) const {
  if (nodes_.size() != other.nodes_.size() || pmax_ != other.pmax_) return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i] != other.nodes_[i]) return false;
  return true;
}

CubicSpline::CubicSpline(const std::vector<double>& x, const std::vector<double>& y)
    : x_(x), y_(y) {
  const int n = static_cast<int>(x.size());
  if (n < 4) throw InvalidArgument("CubicSpline: need at least 4 knots");
  if (y.size() != x.size()) throw InvalidArgument("CubicSpline: size mismatch");

  std::vector<double> h(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    if (h[i] <= 0.0) throw InvalidArgument("CubicSpline: knots must be increasing");
  }

  // Solve for c_i = s''(x_i)/2 with not-a-knot ends.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  A(0, 0) = -h[1];
  A(0, 1) = h[0] + h[1];
  A(0, 2) = -h[0];
  for (int i = 1; i + 1 < n; ++i) {
    A(i, i - 1) = h[i - 1];
    A(i, i) = 2.0 * (h[i - 1] + h[i]);
    A(i, i + 1) = h[i];
    rhs(i) = 3.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
  }
  A(n - 1, n - 3) = -h[n - 2];
  A(n - 1, n - 2) = h[n - 3] + h[n - 2];
  A(n - 1, n - 1) = -h[n - 3];

  Eigen::VectorXd c = A.partialPivLu().solve(rhs);

  b_.resize(n - 1);
  c_.resize(n);
  d_.resize(n - 1);
  for (int i = 0; i < n; ++i) c_[i] = c(i);
  for (int i = 0; i + 1 < n; ++i) {
    b_[i] = (y[i + 1] - y[i]) / h[i] - h[i] * (2.0 * c(i) + c(i + 1)) / 3.0;
    d_[i] = (c(i + 1) - c(i)) / (3.0 * h[i]);
  }
}

double CubicSpline::segment_value(int seg, double x) const {
  const double t = x - x_[seg];
  return y_[seg] + t * (b_[seg] + t * (c_[seg] + t * d_[seg]));
}

double CubicSpline::operator()(double x) const {
  if (x_.empty()) return 0.0;
  if (x > x_.back()) return 0.0;
  if (x <= x_.front()) return segment_value(0, x);
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  int seg = static_cast<int>(it - x_.begin()) - 1;
  seg = std::min(seg, static_cast<int>(x_.size()) - 2);
  return segment_value(seg, x);
}

double CubicSpline::integrate_moment(double a, double b) const {
  if (x_.empty() || a >= b) return 0.0;
  b = std::min(b, x_.back());
  if (a >= b) return 0.0;
  const int n = static_cast<int>(x_.size());
  double total = 0.0;
  // Locate first segment containing a (segment 0 also covers x < x_0).
  int seg = 0;
  if (a > x_.front()) {
    const auto it = std::upper_bound(x_.begin(), x_.end(), a);
    seg = std::min(static_cast<int>(it - x_.begin()) - 1, n - 2);
  }
  double lo = a;
  while (lo < b && seg < n - 1) {
    const double hi = std::min(b, x_[seg + 1]);
    if (hi > lo) {
      // 3-point Gauss is exact for s * cubic (degree 4).
      const double mid = 0.5 * (lo + hi);
      const double half = 0.5 * (hi - lo);
      for (int k = 0; k < 3; ++k) {
        const double s = mid + half * kGl3Nodes[k];
        total += half * kGl3Weights[k] * s * segment_value(seg, s);
      }
    }
    lo = hi;
    ++seg;
  }
  return total;
}

RadialProfile::RadialProfile(const RadialGrid& grid, std::vector<double> values)
    : grid_(&grid), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(grid.count()))
    throw InvalidArgument("RadialProfile: value count does not match grid");
  spline_ = CubicSpline(grid.nodes(), values_);
}

RadialProfile::RadialProfile(const RadialGrid& grid, const std::function<double(double)>& f)
    : grid_(&grid) {
  values_.reserve(grid.count());
  for (double p : grid.nodes()) values_.push_back(f(p));
  spline_ = CubicSpline(grid.nodes(), values_);
}

double RadialProfile::operator()(double p) const { return spline_(p); }

double RadialProfile::l2_norm() const {
  double s = 0.0;
  for (int i = 0; i < grid_->count(); ++i)
    s += grid_->weight(i) * values_[i] * values_[i];
  return std::sqrt(std::max(0.0, s));
}

Potential Potential::gaussian(double depth, double width) {
  if (width <= 0.0) throw InvalidArgument("Potential::gaussian: width must be positive");
  Potential v;
  v.kind_ = Kind::GaussianWell;
  v.depth_ = depth;
  v.width_ = width;
  v.fourier_ = [depth, width](double p) {
    return depth * width * width * width * std::exp(-0.5 * p * p * width * width);
  };
  v.position_ = [depth, width](double r) {
    return depth * std::exp(-0.5 * r * r / (width * width));
  };
  v.moment_ = [depth, width](double s) {
    return depth * width * (1.0 - std::exp(-0.5 * s * s * width * width));
  };
  return v;
}

Potential Potential::user_table(const RadialGrid& grid, std::vector<double> fourier_values) {
  Potential v;
  v.kind_ = Kind::UserTable;
  v.depth_ = 0.0;
  v.width_ = 0.0;
  auto prof = std::make_shared<RadialProfile>(grid, std::move(fourier_values));
  v.fourier_ = [prof](double p) { return (*prof)(p); };
  v.position_ = [prof](double r) { return radial_transform(*prof, r); };
  v.moment_ = [prof](double s) { return prof->spline().integrate_moment(0.0, s); };
  return v;
}

bool Potential::is_zero() const {
  if (kind_ == Kind::GaussianWell) return depth_ == 0.0;
  return false;
}

double Potential::l32_norm() const {
  if (kind_ != Kind::GaussianWell)
    throw InvalidArgument("Potential::l32_norm: closed form only for the Gaussian well");
  const double a = 4.0 * M_PI * width_ * width_ / 3.0;
  return std::pow(std::abs(depth_), 1.5) * std::pow(a, 1.5);
}

namespace {

// Outer quadrature for \int_0^pmax dq against a splined profile: one
// 8-point Gauss panel per spline segment (the integrand is cubic there up
// to a smooth factor), with the segment containing the kink q = p split.
struct OuterRule {
  std::vector<double> q;
  std::vector<double> w;
};

OuterRule outer_rule(double p, const RadialGrid& grid) {
  OuterRule rule;
  auto add_panel = [&rule](double lo, double hi) {
    if (hi <= lo) return;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int k = 0; k < 8; ++k) {
      rule.q.push_back(mid + half * kGl8Nodes[k]);
      rule.w.push_back(half * kGl8Weights[k]);
    }
  };
  const std::vector<double>& x = grid.nodes();
  double lo = 0.0;
  for (std::size_t j = 0; j <= x.size(); ++j) {
    const double hi = j < x.size() ? x[j] : grid.pmax();
    if (hi <= lo) continue;
    if (p > lo && p < hi) {
      add_panel(lo, p);
      add_panel(p, hi);
    } else {
      add_panel(lo, hi);
    }
    lo = hi;
  }
  return rule;
}

double moment_integral_exact(const std::function<double(double)>& f, double a, double b) {
  // \int_a^b s f(s) ds with composite 8-point Gauss; panel width stays below
  // ~1/4 so unit-scale profiles are resolved to rounding.
  if (b <= a) return 0.0;
  const int panels = std::clamp(static_cast<int>(std::ceil((b - a) * 4.0)), 8, 128);
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int pnl = 0; pnl < panels; ++pnl) {
    const double lo = a + pnl * width;
    const double mid = lo + 0.5 * width;
    const double half = 0.5 * width;
    for (int k = 0; k < 8; ++k) {
      const double s = mid + half * kGl8Nodes[k];
      total += half * kGl8Weights[k] * s * f(s);
    }
  }
  return total;
}

double convolution_at_origin(const std::function<double(double)>& f,
                             const std::function<double(double)>& g, double pmax) {
  // (f*g)(0) = 4 pi \int q^2 f(q) g(q) dq.
  const int panels = 32;
  const double width = pmax / panels;
  double total = 0.0;
  for (int pnl = 0; pnl < panels; ++pnl) {
    const double lo = pnl * width;
    const double mid = lo + 0.5 * width;
    const double half = 0.5 * width;
    for (int k = 0; k < 8; ++k) {
      const double q = mid + half * kGl8Nodes[k];
      total += half * kGl8Weights[k] * q * q * f(q) * g(q);
    }
  }
  return 4.0 * M_PI * total;
}

}  // namespace

double radial_convolution(const RadialProfile& f, const RadialProfile& g, double p) {
  if (!f.grid().same_as(g.grid()))
    throw InvalidArgument("radial_convolution: profiles on different grids");
  const double pmax = f.grid().pmax();
  if (p > pmax) throw InvalidArgument("radial_convolution: p beyond pmax");
  if (p < 1e-9 * pmax) {
    return convolution_at_origin([&f](double s) { return f(s); },
                                 [&g](double s) { return g(s); }, pmax) /
           kTwoPiPow32;
  }
  const OuterRule rule = outer_rule(p, f.grid());
  double total = 0.0;
  for (std::size_t k = 0; k < rule.q.size(); ++k) {
    const double q = rule.q[k];
    const double inner = f.spline().integrate_moment(std::abs(p - q), p + q);
    total += rule.w[k] * q * g(q) * inner;
  }
  return (2.0 * M_PI / p) * total / kTwoPiPow32;
}

double radial_convolution(const std::function<double(double)>& f_exact,
                          const RadialProfile& g, double p) {
  const double pmax = g.grid().pmax();
  if (p > pmax) throw InvalidArgument("radial_convolution: p beyond pmax");
  if (p < 1e-9 * pmax) {
    return convolution_at_origin(f_exact, [&g](double s) { return g(s); }, pmax) /
           kTwoPiPow32;
  }
  const OuterRule rule = outer_rule(p, g.grid());
  double total = 0.0;
  for (std::size_t k = 0; k < rule.q.size(); ++k) {
    const double q = rule.q[k];
    const double inner = moment_integral_exact(f_exact, std::abs(p - q), p + q);
    total += rule.w[k] * q * g(q) * inner;
  }
  return (2.0 * M_PI / p) * total / kTwoPiPow32;
}

Eigen::MatrixXd spline_evaluation_rows(const RadialGrid& grid,
                                       const std::vector<double>& points) {
  const int n = grid.count();
  const std::vector<double>& x = grid.nodes();
  std::vector<double> h(n - 1);
  for (int i = 0; i + 1 < n; ++i) h[i] = x[i + 1] - x[i];

  // c-coefficients as a linear map of nodal values: solve A C = R with R the
  // rhs assembled from unit value vectors.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  A(0, 0) = -h[1];
  A(0, 1) = h[0] + h[1];
  A(0, 2) = -h[0];
  for (int i = 1; i + 1 < n; ++i) {
    A(i, i - 1) = h[i - 1];
    A(i, i) = 2.0 * (h[i - 1] + h[i]);
    A(i, i + 1) = h[i];
    R(i, i + 1) += 3.0 / h[i];
    R(i, i) += -3.0 / h[i] - 3.0 / h[i - 1];
    R(i, i - 1) += 3.0 / h[i - 1];
  }
  A(n - 1, n - 3) = -h[n - 2];
  A(n - 1, n - 2) = h[n - 3] + h[n - 2];
  A(n - 1, n - 1) = -h[n - 3];

  Eigen::MatrixXd C = A.partialPivLu().solve(R);  // n x n, rows = c_i(values)

  Eigen::MatrixXd out(points.size(), n);
  for (std::size_t m = 0; m < points.size(); ++m) {
    const double p = points[m];
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
    if (p > x.back()) {
      out.row(m) = row;
      continue;
    }
    int seg = 0;
    if (p > x.front()) {
      const auto it = std::upper_bound(x.begin(), x.end(), p);
      seg = std::min(static_cast<int>(it - x.begin()) - 1, n - 2);
    }
    const double t = p - x[seg];
    const double hseg = h[seg];
    // value = y_seg + t b + t^2 c_seg + t^3 d with
    // b = (y_{seg+1}-y_seg)/h - h(2 c_seg + c_{seg+1})/3 and
    // d = (c_{seg+1}-c_seg)/(3h).
    row(seg) += 1.0 - t / hseg;
    row(seg + 1) += t / hseg;
    const double t3h = t * t * t / (3.0 * hseg);
    row += (t * t - 2.0 * hseg * t / 3.0 - t3h) * C.row(seg);
    row += (t3h - hseg * t / 3.0) * C.row(seg + 1);
    out.row(m) = row;
  }
  return out;
}

Eigen::MatrixXd convolution_matrix(const std::function<double(double)>& f_moment,
                                   const RadialGrid& grid) {
  const int n = grid.count();
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    const double p = grid.node(i);
    const OuterRule rule = outer_rule(p, grid);
    Eigen::MatrixXd rows = spline_evaluation_rows(grid, rule.q);
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(n);
    for (std::size_t k = 0; k < rule.q.size(); ++k) {
      const double q = rule.q[k];
      const double inner = f_moment(p + q) - f_moment(std::abs(p - q));
      acc += (rule.w[k] * q * inner) * rows.row(k);
    }
    out.row(i) = (2.0 * M_PI / p) / kTwoPiPow32 * acc;
  }
  return out;
}

double radial_transform(const RadialProfile& f, double y) {
  const RadialGrid& g = f.grid();
  const double pref = std::sqrt(2.0 / M_PI);
  if (std::abs(y) < 1e-10) {
    double s = 0.0;
    for (int i = 0; i < g.count(); ++i)
      s += g.weights_1d()[i] * g.node(i) * g.node(i) * f.value(i);
    return pref * s;
  }
  double s = 0.0;
  for (int i = 0; i < g.count(); ++i) {
    const double x = g.node(i);
    s += g.weights_1d()[i] * x * f.value(i) * std::sin(x * y);
  }
  return pref * s / y;
}

std::vector<double> radial_transform(const RadialProfile& f, const std::vector<double>& ys) {
  std::vector<double> out;
  out.reserve(ys.size());
  for (double y : ys) out.push_back(radial_transform(f, y));
  return out;
}

BoxGrid::BoxGrid(double L, int n, int dims, double h) : L_(L), n_(n), dims_(dims), h_(h) {
  if (L <= 0.0) throw InvalidArgument("BoxGrid: L must be positive");
  if (n < 2 || n % 2 != 0) throw InvalidArgument("BoxGrid: n must be even and >= 2");
  if (dims < 1 || dims > 3) throw InvalidArgument("BoxGrid: dims must be 1, 2 or 3");
  if (h <= 0.0) throw InvalidArgument("BoxGrid: h must be positive");
  if (dims == 3 && n > 12)
    throw InvalidArgument("BoxGrid: 3D boxes are capped at n <= 12 per dimension");
  if (dims == 2 && n > 64)
    throw InvalidArgument("BoxGrid: 2D boxes are capped at n <= 64 per dimension");
  if (dims == 1 && n > 4096)
    throw InvalidArgument("BoxGrid: 1D boxes are capped at n <= 4096");
  size_ = 1;
  for (int d = 0; d < dims; ++d) size_ *= n;
}

double BoxGrid::cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < dims_; ++d) v *= L_ / n_;
  return v;
}

Eigen::Vector3d BoxGrid::momentum(int flat) const {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  for (int d = dims_ - 1; d >= 0; --d) {
    const int m = flat % n_;
    flat /= n_;
    p[d] = dk() * freq(m);
  }
  return p;
}

Eigen::Vector3d BoxGrid::position(int flat) const {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  const double dx = L_ / n_;
  for (int d = dims_ - 1; d >= 0; --d) {
    const int m = flat % n_;
    flat /= n_;
    x[d] = dx * (m - n_ / 2);
  }
  return x;
}

}  // namespace bcslab::foundation
