#ifndef KELLER_TRIDIAG_HPP
#define KELLER_TRIDIAG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "keller/error.hpp"

namespace keller::linalg {

/// Real symmetric tridiagonal matrix. off[i] couples rows i and i+1.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }

  void add_diagonal(std::span<const double> v) {
    for (std::size_t i = 0; i < diag.size(); ++i)
      diag[i] += v[i];
  }
  void shift(double s) {
    for (double &d : diag)
      d += s;
  }
};

/// Optional positive rank-one term alpha * u u^T added to a SymTridiag.
struct RankOne {
  double alpha = 0.0;
  std::vector<double> u;

  bool active() const { return alpha != 0.0 && !u.empty(); }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline std::vector<double> apply(const SymTridiag &t, std::span<const double> x) {
  const std::size_t n = t.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = t.diag[i] * x[i];
    if (i > 0)
      s += t.off[i - 1] * x[i - 1];
    if (i + 1 < n)
      s += t.off[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

inline std::vector<double> apply(const SymTridiag &t, const RankOne &r,
                                 std::span<const double> x) {
  std::vector<double> y = apply(t, x);
  if (r.active()) {
    const double c = r.alpha * dot(r.u, x);
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] += c * r.u[i];
  }
  return y;
}

/// Spectral enclosure [lo, hi] by Gershgorin discs.
inline std::pair<double, double> gershgorin(const SymTridiag &t) {
  const std::size_t n = t.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0)
      r += std::abs(t.off[i - 1]);
    if (i + 1 < n)
      r += std::abs(t.off[i]);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  return {lo, hi};
}

inline double max_abs_entry(const SymTridiag &t) {
  double m = 0.0;
  for (double d : t.diag)
    m = std::max(m, std::abs(d));
  for (double o : t.off)
    m = std::max(m, std::abs(o));
  return m;
}

/// Solves (T - mu I) x = b by Gaussian elimination with partial pivoting
/// (the dgtsv scheme). Exact zero pivots are nudged so that the call also
/// serves inverse iteration at a converged shift.
inline std::vector<double> solve_shifted(const SymTridiag &t, double mu,
                                         std::span<const double> rhs) {
  const std::size_t n = t.size();
  std::vector<double> x(rhs.begin(), rhs.end());
  if (n == 0)
    return x;
  std::vector<double> d(n), dl(n > 1 ? n - 1 : 0), du(n > 1 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i)
    d[i] = t.diag[i] - mu;
  for (std::size_t i = 0; i + 1 < n; ++i)
    dl[i] = du[i] = t.off[i];

  const double tiny = std::numeric_limits<double>::epsilon() *
                      std::max(1.0, max_abs_entry(t) + std::abs(mu));
  auto guard = [tiny](double &p) {
    if (std::abs(p) < tiny)
      p = std::copysign(tiny, p == 0.0 ? 1.0 : p);
  };

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const bool last = (i + 2 == n);
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      guard(d[i]);
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      x[i + 1] -= fact * x[i];
      dl[i] = 0.0;
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (!last) {
        dl[i] = du[i + 1];
        du[i + 1] = -fact * dl[i];
      }
      du[i] = temp;
      const double bi = x[i];
      x[i] = x[i + 1];
      x[i + 1] = bi - fact * x[i + 1];
    }
  }
  guard(d[n - 1]);
  x[n - 1] /= d[n - 1];
  if (n > 1)
    x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
  for (std::size_t k = n; k-- > 2;) {
    const std::size_t i = k - 2;
    x[i] = (x[i] - du[i] * x[i + 1] - dl[i] * x[i + 2]) / d[i];
  }
  return x;
}

/// Solves (T + alpha u u^T - mu I) x = b via Sherman-Morrison.
inline std::vector<double> solve_shifted(const SymTridiag &t, const RankOne &r,
                                         double mu, std::span<const double> rhs) {
  std::vector<double> y = solve_shifted(t, mu, rhs);
  if (!r.active())
    return y;
  const std::vector<double> z = solve_shifted(t, mu, r.u);
  const double denom = 1.0 + r.alpha * dot(r.u, z);
  const double c = r.alpha * dot(r.u, y) / denom;
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] -= c * z[i];
  return y;
}

/// Number of eigenvalues of T strictly below mu (Sturm sequence).
inline std::size_t sturm_count(const SymTridiag &t, double mu) {
  const std::size_t n = t.size();
  const double pivmin = std::numeric_limits<double>::min() *
                        std::max(1.0, max_abs_entry(t) * max_abs_entry(t));
  std::size_t count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double o2 = i > 0 ? t.off[i - 1] * t.off[i - 1] : 0.0;
    d = (t.diag[i] - mu) - (i > 0 ? o2 / d : 0.0);
    if (std::abs(d) < pivmin)
      d = -pivmin;
    if (d < 0.0)
      ++count;
  }
  return count;
}

/// Number of eigenvalues of T + alpha u u^T (alpha > 0) strictly below mu.
/// Inertia of the bordered matrix [[T - mu, u], [u^T, -1/alpha]] read off
/// through both Schur complements.
inline std::size_t sturm_count(const SymTridiag &t, const RankOne &r, double mu) {
  const std::size_t base = sturm_count(t, mu);
  if (!r.active())
    return base;
  const std::vector<double> z = solve_shifted(t, mu, r.u);
  const double s = 1.0 / r.alpha + dot(r.u, z);
  return base + (s > 0.0 ? 1 : 0) - 1;
}

/// The k smallest eigenvalues of T (+ rank-one term), by bisection on the
/// Sturm count. Accurate to a few ulps of the spectral radius.
inline std::vector<double> lowest_eigenvalues(const SymTridiag &t, const RankOne &r,
                                              std::size_t k) {
  auto [lo0, hi0] = gershgorin(t);
  if (r.active())
    hi0 += r.alpha * dot(r.u, r.u);
  const double scale = std::max({1.0, std::abs(lo0), std::abs(hi0)});
  const double abs_tol = 4.0 * std::numeric_limits<double>::epsilon() * scale;
  k = std::min(k, t.size());
  std::vector<double> eigs;
  eigs.reserve(k);
  double lo_floor = lo0 - 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    double lo = lo_floor;
    double hi = hi0 + 1.0;
    for (int it = 0; it < 200 && hi - lo > abs_tol; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (sturm_count(t, r, mid) >= j + 1)
        hi = mid;
      else
        lo = mid;
    }
    eigs.push_back(0.5 * (lo + hi));
    lo_floor = lo;
  }
  return eigs;
}

/// Eigenvector for a known (converged) eigenvalue by inverse iteration,
/// orthogonalized against previously found vectors `against`.
inline std::vector<double>
eigenvector_at(const SymTridiag &t, const RankOne &r, double eig,
               const std::vector<std::vector<double>> &against = {}) {
  const std::size_t n = t.size();
  const double scale = std::max(1.0, max_abs_entry(t));
  const double mu = eig - 64.0 * std::numeric_limits<double>::epsilon() * scale;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = 1.0 + 0.1 * std::sin(0.37 * static_cast<double>(i) + 0.11);
  auto orthonormalize = [&](std::vector<double> &v) {
    for (const auto &a : against) {
      const double c = dot(a, v);
      for (std::size_t i = 0; i < n; ++i)
        v[i] -= c * a[i];
    }
    const double nv = norm2(v);
    for (double &e : v)
      e /= nv;
  };
  orthonormalize(x);
  for (int it = 0; it < 4; ++it) {
    x = solve_shifted(t, r, mu, x);
    orthonormalize(x);
  }
  return x;
}

} // namespace keller::linalg

#endif // KELLER_TRIDIAG_HPP
