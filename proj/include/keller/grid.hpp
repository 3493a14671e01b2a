#ifndef KELLER_GRID_HPP
#define KELLER_GRID_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "keller/error.hpp"
#include "keller/tridiag.hpp"

namespace keller {

enum class GridKind { Line, Radial };

inline const char *to_string(GridKind k) { return k == GridKind::Line ? "line" : "radial"; }

/// Surface area of the unit sphere S^{d-1}; 2 for d = 1 (two endpoints).
inline double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

/// Cell-centred discretization of R (line) or of radial functions on R^d.
///
/// Line grids cover [-L, L] with nodes x_i = -L + (i + 1/2) h, h = 2L/n.
/// Radial grids cover [0, L] with nodes r_i = (i + 1/2) h, h = L/n, so no
/// node sits at the origin. Dirichlet conditions are imposed on the outer
/// cell faces. Quadrature weights are dx on the line and
/// |S^{d-1}| r^{d-1} dr radially (a d = 1 radial grid integrates even
/// functions over the whole line).
class Grid {
public:
  static constexpr std::size_t kMinNodes = 16;

  static std::shared_ptr<const Grid> line(double extent, std::size_t n) {
    return std::shared_ptr<const Grid>(new Grid(GridKind::Line, 1, extent, n));
  }

  static std::shared_ptr<const Grid> radial(int dim, double extent, std::size_t n) {
    return std::shared_ptr<const Grid>(new Grid(GridKind::Radial, dim, extent, n));
  }

  GridKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double extent() const { return extent_; }
  std::size_t size() const { return coords_.size(); }
  double spacing() const { return h_; }
  double coord(std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  /// sqrt of the quadrature weights; maps functions to the symmetric basis.
  std::span<const double> root_weights() const { return root_weights_; }

  bool same_as(const Grid &o) const {
    return kind_ == o.kind_ && dim_ == o.dim_ && size() == o.size() &&
           extent_ == o.extent_;
  }

  /// Largest angular-momentum channel the grid supports (parity for d = 1).
  bool supports_channel(int ell) const {
    if (ell < 0)
      return false;
    if (kind_ == GridKind::Line)
      return ell == 0;
    if (dim_ == 1)
      return ell <= 1;
    return true;
  }

  /// -Laplacian restricted to channel ell, written in the symmetric basis
  /// g = sqrt(w) f. Off-diagonals couple neighbouring nodes.
  linalg::SymTridiag laplacian(int ell) const {
    if (!supports_channel(ell))
      throw UnsupportedChannelError("grid: channel " + std::to_string(ell) +
                                    " unsupported on " + to_string(kind_) + " grid, d=" +
                                    std::to_string(dim_));
    const std::size_t n = size();
    const double ih2 = 1.0 / (h_ * h_);
    linalg::SymTridiag t;
    t.diag.assign(n, 2.0 * ih2);
    t.off.assign(n - 1, -ih2);

    if (kind_ == GridKind::Line) {
      t.diag.front() = 3.0 * ih2;
      t.diag.back() = 3.0 * ih2;
      return t;
    }

    switch (dim_) {
    case 1:
      // Even (ell = 0) or odd (ell = 1) reflection through the origin.
      t.diag.front() = (ell == 0 ? 1.0 : 3.0) * ih2;
      t.diag.back() = 3.0 * ih2;
      break;
    case 3:
      // In u = r f the operator is -u'' + ell(ell+1)/r^2 u with u(0) = 0.
      t.diag.front() = 3.0 * ih2;
      t.diag.back() = 3.0 * ih2;
      for (std::size_t i = 0; i < n; ++i)
        t.diag[i] += ell * (ell + 1.0) / (coords_[i] * coords_[i]);
      break;
    case 2: {
      // Flux form with face radii; zero flux through the origin.
      for (std::size_t i = 0; i < n; ++i) {
        const double r = coords_[i];
        const double rp = r + 0.5 * h_;
        const double rm = i == 0 ? 0.0 : r - 0.5 * h_;
        const double outer = (i + 1 == n) ? 2.0 * rp : rp;
        t.diag[i] = (outer + rm) * ih2 / r + double(ell * ell) / (r * r);
        if (i + 1 < n)
          t.off[i] = -rp * ih2 / std::sqrt(r * coords_[i + 1]);
      }
      break;
    }
    default:
      throw PreconditionError("grid: radial grids support d <= 3");
    }
    return t;
  }

  /// Value of a nodal function at an arbitrary coordinate by 4-point
  /// Lagrange interpolation. Outside the domain the Dirichlet ghost (odd
  /// reflection at the face) is used and the function is zero beyond it;
  /// radial grids extend evenly through the origin.
  double interpolate(std::span<const double> values, double x) const {
    const std::size_t n = size();
    double t;
    if (kind_ == GridKind::Line)
      t = (x + extent_) / h_ - 0.5;
    else
      t = std::abs(x) / h_ - 0.5;
    const double fl = std::floor(t);
    const long base = static_cast<long>(fl) - 1;
    const double s = t - fl;
    auto node = [&](long j) -> double {
      if (kind_ == GridKind::Radial && j < 0)
        j = -j - 1;
      if (j < 0)
        return j == -1 ? -values[0] : 0.0;
      if (j >= long(n))
        return j == long(n) ? -values[n - 1] : 0.0;
      return values[std::size_t(j)];
    };
    if (base + 3 < -1 || base > long(n))
      return 0.0;
    const double f0 = node(base), f1 = node(base + 1), f2 = node(base + 2),
                 f3 = node(base + 3);
    // Lagrange basis on nodes -1, 0, 1, 2 evaluated at s in [0, 1).
    const double l0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    const double l1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    const double l2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    const double l3 = (s + 1.0) * s * (s - 1.0) / 6.0;
    return l0 * f0 + l1 * f1 + l2 * f2 + l3 * f3;
  }

private:
  Grid(GridKind kind, int dim, double extent, std::size_t n)
      : kind_(kind), dim_(dim), extent_(extent) {
    if (n < kMinNodes)
      throw PreconditionError("grid: need at least 16 nodes");
    if (!(extent > 0.0) || !std::isfinite(extent))
      throw PreconditionError("grid: extent must be positive");
    if (kind == GridKind::Line && dim != 1)
      throw PreconditionError("grid: line grids are one-dimensional");
    if (kind == GridKind::Radial && (dim < 1 || dim > 3))
      throw PreconditionError("grid: radial grids support 1 <= d <= 3");
    coords_.resize(n);
    weights_.resize(n);
    root_weights_.resize(n);
    if (kind == GridKind::Line) {
      h_ = 2.0 * extent / double(n);
      for (std::size_t i = 0; i < n; ++i) {
        coords_[i] = -extent + (double(i) + 0.5) * h_;
        weights_[i] = h_;
      }
    } else {
      h_ = extent / double(n);
      const double area = sphere_area(dim);
      for (std::size_t i = 0; i < n; ++i) {
        coords_[i] = (double(i) + 0.5) * h_;
        weights_[i] = area * std::pow(coords_[i], dim - 1) * h_;
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      root_weights_[i] = std::sqrt(weights_[i]);
  }

  GridKind kind_;
  int dim_;
  double extent_;
  double h_ = 0.0;
  std::vector<double> coords_;
  std::vector<double> weights_;
  std::vector<double> root_weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Real function sampled on the nodes of a Grid.
class GridFunction {
public:
  GridFunction(GridPtr grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_)
      throw PreconditionError("GridFunction: null grid");
    if (values_.size() != grid_->size())
      throw DimensionError("GridFunction: value count does not match grid");
    for (double v : values_)
      if (!std::isfinite(v))
        throw PreconditionError("GridFunction: non-finite value");
  }

  static GridFunction zeros(GridPtr grid) {
    const std::size_t n = grid->size();
    return GridFunction(std::move(grid), std::vector<double>(n, 0.0));
  }

  /// Samples f at every node coordinate.
  template <typename F> static GridFunction sample(GridPtr grid, F &&f) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = f(grid->coord(i));
    return GridFunction(std::move(grid), std::move(v));
  }

  const GridPtr &grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::vector<double> &mutable_values() { return values_; }

  template <typename F> GridFunction map(F &&f) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = f(values_[i]);
    return GridFunction(grid_, std::move(v));
  }

  GridFunction operator+(const GridFunction &o) const {
    check(o);
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] += o.values_[i];
    return GridFunction(grid_, std::move(v));
  }
  GridFunction operator-(const GridFunction &o) const {
    check(o);
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] -= o.values_[i];
    return GridFunction(grid_, std::move(v));
  }
  GridFunction operator*(double c) const {
    return map([c](double x) { return c * x; });
  }
  friend GridFunction operator*(double c, const GridFunction &f) { return f * c; }
  GridFunction operator-() const { return *this * -1.0; }

  /// Negative part V_- = max(-V, 0).
  GridFunction negative_part() const {
    return map([](double x) { return x < 0.0 ? -x : 0.0; });
  }

  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return x == 0.0; });
  }

  void check(const GridFunction &o) const {
    if (o.grid_ != grid_ && !o.grid_->same_as(*grid_))
      throw DimensionError("GridFunction: operands live on different grids");
  }

private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// sum_i w_i f_i, the quadrature of f over R^d.
inline double integrate(const GridFunction &f) {
  const auto w = f.grid()->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += w[i] * f[i];
  return s;
}

inline double inner(const GridFunction &f, const GridFunction &g) {
  f.check(g);
  const auto w = f.grid()->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += w[i] * f[i] * g[i];
  return s;
}

inline double l2_norm(const GridFunction &f) { return std::sqrt(inner(f, f)); }

inline double lp_norm(const GridFunction &f, double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw InvalidExponentError("lp_norm: exponent must satisfy 1 <= p < inf");
  double m = 0.0;
  for (double v : f.values())
    m = std::max(m, std::abs(v));
  if (m == 0.0)
    return 0.0;
  const auto w = f.grid()->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += w[i] * std::pow(std::abs(f[i]) / m, p);
  return m * std::pow(s, 1.0 / p);
}

/// |f|^s pointwise with 0^s = 0.
inline GridFunction abs_pow(const GridFunction &f, double s) {
  return f.map([s](double x) { return x == 0.0 ? 0.0 : std::pow(std::abs(x), s); });
}

inline GridFunction pointwise_product(const GridFunction &f, const GridFunction &g) {
  f.check(g);
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = f[i] * g[i];
  return GridFunction(f.grid(), std::move(v));
}

namespace detail {

inline std::vector<double> to_symmetric(const GridFunction &f) {
  const auto rw = f.grid()->root_weights();
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = rw[i] * f[i];
  return g;
}

inline GridFunction from_symmetric(const GridPtr &grid, std::span<const double> g) {
  const auto rw = grid->root_weights();
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = g[i] / rw[i];
  return GridFunction(grid, std::move(f));
}

/// g^T T g accumulated as a sum of squared differences plus a diagonal
/// remainder, which keeps the relative rounding error at the level of the
/// result rather than of ||g||^2 / h^2.
inline double quadratic_form(const linalg::SymTridiag &t, std::span<const double> g) {
  const std::size_t n = t.size();
  double s = 0.0;
  std::vector<double> rest(t.diag);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double c = -t.off[i];
    const double dg = g[i] - g[i + 1];
    s += c * dg * dg;
    rest[i] -= c;
    rest[i + 1] -= c;
  }
  for (std::size_t i = 0; i < n; ++i)
    s += rest[i] * g[i] * g[i];
  return s;
}

} // namespace detail

/// -Laplacian in channel ell applied to f: on radial grids
/// -f'' - (d-1)/r f' + ell(ell+d-2)/r^2 f, on line grids -f''.
inline GridFunction laplacian_apply(const GridFunction &f, int ell = 0) {
  const auto t = f.grid()->laplacian(ell);
  const auto g = detail::to_symmetric(f);
  return detail::from_symmetric(f.grid(), linalg::apply(t, g));
}

/// Discrete Dirichlet form <f, -Lap f>, i.e. int |grad f|^2 consistent
/// with the Laplacian's boundary closures.
inline double kinetic_energy(const GridFunction &f, int ell = 0) {
  return detail::quadratic_form(f.grid()->laplacian(ell), detail::to_symmetric(f));
}

/// int |grad f|^2 by forward difference quotients on interior cell faces.
/// The half cells between the outermost nodes and the domain edge take the
/// quotient of the nearest face, which keeps constants gradient-free and the
/// rule second order. The radial origin needs no such term.
inline double gradient_norm_squared(const GridFunction &f) {
  const Grid &g = *f.grid();
  const double h = g.spacing();
  double s = 0.0;
  const double area = g.kind() == GridKind::Line ? 1.0 : sphere_area(g.dim());
  const std::size_t last = f.size() - 2;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const double dq = (f[i + 1] - f[i]) / h;
    double face_w = h;
    if (g.kind() == GridKind::Radial)
      face_w = area * std::pow(g.coord(i) + 0.5 * h, g.dim() - 1) * h;
    if (i == last)
      face_w *= g.kind() == GridKind::Radial ? 1.0 + 0.5 * std::pow(g.extent() / (g.coord(i) + 0.5 * h), g.dim() - 1)
                                             : 1.5;
    else if (i == 0 && g.kind() == GridKind::Line)
      face_w *= 1.5;
    s += face_w * dq * dq;
  }
  return s;
}

inline double h1_norm(const GridFunction &f) {
  const double l2 = l2_norm(f);
  return std::sqrt(l2 * l2 + gradient_norm_squared(f));
}

/// ||f - g||_{H^1} with difference-quotient gradients.
inline double h1_distance(const GridFunction &f, const GridFunction &g) {
  return h1_norm(f - g);
}

inline double h1_inner(const GridFunction &f, const GridFunction &g) {
  const double a = h1_norm(f + g);
  const double b = h1_norm(f - g);
  return 0.25 * (a * a - b * b);
}

/// f(x - shift) on a line grid by interpolation (zero outside the box).
inline GridFunction translate(const GridFunction &f, double shift) {
  if (f.grid()->kind() != GridKind::Line)
    throw UnsupportedShiftError("translate: only line grids support translations");
  const Grid &g = *f.grid();
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = g.interpolate(f.values(), g.coord(i) - shift);
  return GridFunction(f.grid(), std::move(v));
}

/// Even extension of a function on a radial d = 1 grid to the line grid
/// with the same spacing (2n nodes on [-L, L]).
inline GridFunction mirror_to_line(const GridFunction &f) {
  const Grid &g = *f.grid();
  if (g.kind() != GridKind::Radial || g.dim() != 1)
    throw PreconditionError("mirror_to_line: needs a radial d = 1 grid");
  const std::size_t n = f.size();
  auto line = Grid::line(g.extent(), 2 * n);
  std::vector<double> v(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    v[n + j] = f[j];
    v[n - 1 - j] = f[j];
  }
  return GridFunction(line, std::move(v));
}

/// Even and odd parts of a line-grid function, as functions on the radial
/// d = 1 grid with the same spacing.
inline std::pair<GridFunction, GridFunction> parity_split(const GridFunction &f,
                                                          const GridPtr &half) {
  const Grid &g = *f.grid();
  if (g.kind() != GridKind::Line || half->kind() != GridKind::Radial || half->dim() != 1 ||
      2 * half->size() != g.size() || half->extent() != g.extent())
    throw DimensionError("parity_split: grids do not match");
  const std::size_t n = half->size();
  std::vector<double> e(n), o(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 0.5 * (f[n + j] + f[n - 1 - j]);
    o[j] = 0.5 * (f[n + j] - f[n - 1 - j]);
  }
  return {GridFunction(half, std::move(e)), GridFunction(half, std::move(o))};
}

/// Centred-difference derivative along the coordinate. On radial grids the
/// function is continued evenly through the origin; the outermost nodes use
/// second-order one-sided differences, so no boundary value is assumed.
inline GridFunction derivative(const GridFunction &f) {
  const Grid &g = *f.grid();
  const std::size_t n = f.size();
  const double h = g.spacing();
  std::vector<double> v(n);
  for (std::size_t i = 1; i + 1 < n; ++i)
    v[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  if (g.kind() == GridKind::Radial)
    v[0] = (f[1] - f[0]) / (2.0 * h);
  else
    v[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  v[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return GridFunction(f.grid(), std::move(v));
}

/// f(x - k h) by whole-node shift with zero fill.
inline GridFunction shift_nodes(const GridFunction &f, long k) {
  const long n = long(f.size());
  std::vector<double> v(f.size(), 0.0);
  for (long i = 0; i < n; ++i) {
    const long j = i - k;
    if (j >= 0 && j < n)
      v[std::size_t(i)] = f[std::size_t(j)];
  }
  return GridFunction(f.grid(), std::move(v));
}

} // namespace keller

#endif // KELLER_GRID_HPP
