#ifndef KELLER_STABILITY_HPP
#define KELLER_STABILITY_HPP

// Eigenvalue deficit C - |lambda(V)| / ||V_-||_p^{p/gamma} and the distance
// of V to the manifold of optimal potentials b^2 W(b(x - a)).

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "keller/error.hpp"
#include "keller/grid.hpp"
#include "keller/groundstate.hpp"
#include "keller/holder.hpp"
#include "keller/measure.hpp"
#include "keller/spectral.hpp"

namespace keller::stability {

using groundstate::Exponents;
using groundstate::GroundState;

/// Distances below this make empirical_c meaningless.
inline constexpr double kMinDistance = 1e-6;

enum class Branch { Low, High };

inline const char *to_string(Branch b) { return b == Branch::Low ? "low" : "high"; }

/// p <= 2 uses the L^p distance of the potentials, p > 2 the distance of
/// their duals in L^{q/2}. At p = 2 the two coincide.
inline Branch branch_for(const Exponents &e) { return e.p <= 2.0 ? Branch::Low : Branch::High; }

inline Exponents checked_exponents(double gamma, int d, const GroundState &gs) {
  const Exponents e = groundstate::exponents_from_gamma(gamma, d);
  if (d != gs.d || std::abs(e.q - gs.q) > 1e-12 * gs.q)
    throw InvalidExponentError("stability: (gamma, d) does not match the ground state");
  return e;
}

inline double negative_norm(const GridFunction &V, const Exponents &e) {
  const double s = lp_norm(V.negative_part(), e.p);
  if (s == 0.0)
    throw DegenerateInputError("stability: V_- vanishes identically");
  return s;
}

/// The sharp constant as attained on the grid of V. With s = ||V_-||_p and
/// F_s the minimum of ||grad psi||^2 - s ||psi||_q^2 over unit psi on that
/// grid, every discrete V obeys |lambda(V)| <= -F_s, and -F_s / s^{p/gamma}
/// is the continuum constant up to O(h^2). Using the discrete value keeps the
/// deficit nonnegative at the level of rounding.
struct DiscreteConstant {
  double C = 0.0;
  double coupling = 0.0;
  double F = 0.0;
  GroundState state;
};

/// Radial grid carrying the ground state that matches V's grid: the same grid
/// for radial V, the half-line with the same spacing for line V.
inline GridPtr matching_radial_grid(const GridPtr &g) {
  if (g->kind() == GridKind::Radial)
    return g;
  if (g->size() % 2 != 0)
    throw PreconditionError("stability: line grids need an even node count");
  return Grid::radial(1, g->extent(), g->size() / 2);
}

inline DiscreteConstant discrete_constant(const GridPtr &vgrid, double s, const GroundState &gs,
                                          double tol = groundstate::kDefaultTol) {
  const GridPtr rg = matching_radial_grid(vgrid);
  // Seed with the dilation of gs.Q that solves the coupled continuum problem.
  const double b = std::pow(s, 1.0 / (2.0 - 2.0 * gs.theta()));
  std::vector<double> start(rg->size());
  for (std::size_t i = 0; i < start.size(); ++i)
    start[i] = gs.grid()->interpolate(gs.Q.values(), b * rg->coord(i));
  DiscreteConstant dc{0.0, s, 0.0,
                      groundstate::detail::solve(gs.q, gs.d, rg, tol, s, &start)};
  dc.F = dc.state.E;
  dc.C = -dc.F / std::pow(s, 1.0 / (1.0 - gs.theta()));
  return dc;
}

/// |lambda(V)| / (int V_-^p)^{1/gamma}.
inline double eigenvalue_ratio(const GridFunction &V, const Exponents &e, double lambda) {
  return std::abs(std::min(0.0, lambda)) / std::pow(negative_norm(V, e), e.p / e.gamma);
}

inline double deficit(const GridFunction &V, double gamma, int d, const GroundState &gs) {
  const Exponents e = checked_exponents(gamma, d, gs);
  const double s = negative_norm(V, e);
  const DiscreteConstant dc = discrete_constant(V.grid(), s, gs);
  return dc.C - eigenvalue_ratio(V, e, spectral::lambda_of_potential(V));
}

namespace detail {

inline double lp_distance(std::span<const double> a, std::span<const double> b,
                          std::span<const double> w, double p) {
  double s = 0.0;
  if (p == 2.0) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double t = a[i] - b[i];
      s += w[i] * t * t;
    }
    return std::sqrt(s);
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    s += w[i] * std::pow(std::abs(a[i] - b[i]), p);
  return std::pow(s, 1.0 / p);
}

inline double lp(std::span<const double> a, std::span<const double> w, double p) {
  std::vector<double> z(a.size(), 0.0);
  return lp_distance(a, z, w, p);
}

/// Everything the translation search needs, fixed once per V.
struct Matcher {
  const GroundState *gs = nullptr;
  GridPtr grid;
  double b = 1.0;
  double exponent = 1.0; ///< 1 for the low branch, 2/(q-2) for the high one
  double norm_exp = 2.0; ///< p or q/2
  std::vector<double> target; ///< V_-^exponent / its norm
  double wscale = 1.0;        ///< b^2 ||Q||_q^{2-q}

  /// W_-^exponent at distance r from the centre, before normalization.
  double profile(double r) const {
    const double qv = std::max(0.0, gs->grid()->interpolate(gs->Q.values(), b * r));
    const double w = wscale * std::pow(qv, gs->q - 2.0);
    return exponent == 1.0 ? w : std::pow(w, exponent);
  }

  std::vector<double> candidate(double a) const {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = profile(std::abs(grid->coord(i) - a));
    return v;
  }

  double distance(const std::vector<double> &cand) const {
    const double nc = lp(cand, grid->weights(), norm_exp);
    if (nc == 0.0)
      return std::numeric_limits<double>::infinity();
    std::vector<double> c(cand);
    for (double &x : c)
      x /= nc;
    return lp_distance(target, c, grid->weights(), norm_exp);
  }

  double at(double a) const { return distance(candidate(a)); }
};

inline Matcher make_matcher(const GridFunction &V, const Exponents &e, const GroundState &gs,
                            Branch br) {
  Matcher m;
  m.gs = &gs;
  m.grid = V.grid();
  const double s = negative_norm(V, e);
  // ||W_b||_p = b^{2 - d/p} ||W_1||_p and ||W_1||_p = 1 by construction.
  m.b = std::pow(s, e.p / (2.0 * e.p - e.d));
  m.wscale = m.b * m.b * std::pow(gs.norm_q, 2.0 - gs.q);
  if (br == Branch::Low) {
    m.exponent = 1.0;
    m.norm_exp = e.p;
  } else {
    m.exponent = 2.0 / (e.q - 2.0);
    m.norm_exp = e.q / 2.0;
  }
  const GridFunction vm = V.negative_part();
  m.target.resize(vm.size());
  for (std::size_t i = 0; i < vm.size(); ++i)
    m.target[i] = m.exponent == 1.0 ? vm[i] : std::pow(vm[i], m.exponent);
  const double nt = lp(m.target, m.grid->weights(), m.norm_exp);
  for (double &x : m.target)
    x /= nt;
  return m;
}

/// Minimizes m.at(a): coarse scan over shifts of 4 cells, then successive
/// parabolic refinement around the best scan point.
inline std::pair<double, double> search_shift(const Matcher &m) {
  const Grid &g = *m.grid;
  const long n = long(g.size());
  const double h = g.spacing();
  // Candidate at node offset k reuses one profile sampled on an extended index range.
  std::vector<double> ext(std::size_t(3 * n));
  for (long j = -n; j < 2 * n; ++j)
    ext[std::size_t(j + n)] = m.profile(std::abs(-g.extent() + (double(j) + 0.5) * h));
  // The profile centred at 0 sits at x = 0; shift k moves it to k h.
  // Node i of the shifted candidate reads the centred profile at x_i - k h = x_{i-k}.
  double best_a = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> cand(static_cast<std::size_t>(n));
  const long kmax = n / 2 - 1;
  for (long k = -kmax; k <= kmax; k += 4) {
    for (long i = 0; i < n; ++i)
      cand[std::size_t(i)] = ext[std::size_t(i - k + n)];
    const double dk = m.distance(cand);
    if (dk < best) {
      best = dk;
      best_a = double(k) * h;
    }
  }
  // Successive parabolic interpolation on a shrinking bracket.
  double step = 4.0 * h;
  for (int it = 0; it < 8; ++it) {
    const double fl = m.at(best_a - step), fc = m.at(best_a), fr = m.at(best_a + step);
    best = fc;
    const double denom = fl - 2.0 * fc + fr;
    double next = best_a;
    if (denom > 0.0) {
      next = best_a + 0.5 * step * (fl - fr) / denom;
      next = std::clamp(next, best_a - step, best_a + step);
    } else if (fl < fc || fr < fc) {
      next = fl < fr ? best_a - step : best_a + step;
    }
    const double fn = m.at(next);
    if (fn < best) {
      best = fn;
      best_a = next;
    }
    step *= 0.25;
  }
  return {best_a, best};
}

} // namespace detail

struct ManifoldDistance {
  double distance = 0.0;
  double a = 0.0;
  double b = 1.0;
  Branch branch = Branch::Low;
};

/// Normalized distance of V to the optimal potentials on the given branch;
/// b is fixed by norm matching, a is searched on line grids and 0 otherwise.
inline ManifoldDistance branch_distance(const GridFunction &V, double gamma, int d,
                                        const GroundState &gs, Branch br) {
  const Exponents e = checked_exponents(gamma, d, gs);
  const detail::Matcher m = detail::make_matcher(V, e, gs, br);
  ManifoldDistance out;
  out.branch = br;
  out.b = m.b;
  if (V.grid()->kind() == GridKind::Line) {
    const auto [a, dist] = detail::search_shift(m);
    out.a = a;
    out.distance = dist;
  } else {
    out.distance = m.at(0.0);
  }
  return out;
}

inline ManifoldDistance distance_to_manifold(const GridFunction &V, double gamma, int d,
                                             const GroundState &gs) {
  return branch_distance(V, gamma, d, gs,
                         branch_for(groundstate::exponents_from_gamma(gamma, d)));
}

struct TransCheck {
  double lhs = 0.0; ///< p^{-1} (||V - W||_p / 2)^{p-1}, unit-normalized
  double rhs = 0.0; ///< ||V^{p-1} - W^{p-1}||_{p'}, unit-normalized
  bool holds = false;
};

/// The two distances compared at one matched W.
inline TransCheck trans_check(const GridFunction &V, const Exponents &e, const GroundState &gs,
                              double a, double b) {
  const Grid &g = *V.grid();
  const GridFunction W = groundstate::optimal_potential(gs, V.grid(), b, a);
  std::vector<double> v(g.size()), w(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = std::max(0.0, -V[i]);
    w[i] = std::max(0.0, -W[i]);
  }
  const auto wt = g.weights();
  const double nv = detail::lp(v, wt, e.p), nw = detail::lp(w, wt, e.p);
  std::vector<double> dv(v.size()), dw(w.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] /= nv;
    w[i] /= nw;
    dv[i] = std::pow(v[i], e.p - 1.0);
    dw[i] = std::pow(w[i], e.p - 1.0);
  }
  TransCheck t;
  t.lhs = std::pow(0.5 * detail::lp_distance(v, w, wt, e.p), e.p - 1.0) / e.p;
  t.rhs = detail::lp_distance(dv, dw, wt, e.p / (e.p - 1.0));
  t.holds = t.lhs <= t.rhs + 1e-12;
  return t;
}

struct StabilityReport {
  double gamma = 0.0;
  int d = 1;
  double p = 0.0;
  double q = 0.0;
  double lambda = 0.0;
  double ratio = 0.0;
  double C = 0.0; ///< sharp constant on this grid
  double deficit = 0.0;
  Branch branch = Branch::Low;
  double distance = 0.0;
  double matched_a = 0.0;
  double matched_b = 1.0;
  std::optional<double> empirical_c; ///< deficit / (C distance^2); unset when distance < 1e-6
  std::optional<double> transfer_distance; ///< inf_a ||V_- - W_-||_p / ||V_-||_p, for p >= 2
  std::optional<double> transfer_c; ///< deficit / (C transfer^{2 gamma + d - 2})
  TransCheck trans;
};

inline StabilityReport stability_report(const GridFunction &V, double gamma, int d,
                                        const GroundState &gs) {
  const Exponents e = checked_exponents(gamma, d, gs);
  StabilityReport r;
  r.gamma = gamma;
  r.d = d;
  r.p = e.p;
  r.q = e.q;
  r.lambda = spectral::lambda_of_potential(V);
  r.ratio = eigenvalue_ratio(V, e, r.lambda);
  r.C = discrete_constant(V.grid(), negative_norm(V, e), gs).C;
  r.deficit = r.C - r.ratio;

  const ManifoldDistance md = distance_to_manifold(V, gamma, d, gs);
  r.branch = md.branch;
  r.distance = md.distance;
  r.matched_a = md.a;
  r.matched_b = md.b;
  if (r.distance >= kMinDistance)
    r.empirical_c = r.deficit / (r.C * r.distance * r.distance);

  if (e.p >= 2.0) {
    const ManifoldDistance td =
        md.branch == Branch::Low ? md : branch_distance(V, gamma, d, gs, Branch::Low);
    r.transfer_distance = td.distance;
    if (td.distance >= kMinDistance)
      r.transfer_c = r.deficit / (r.C * std::pow(td.distance, 2.0 * gamma + d - 2.0));
  }
  r.trans = trans_check(V, e, gs, r.matched_a, r.matched_b);
  return r;
}

struct Decomposition {
  double e_part = 0.0; ///< (E_s[psi] - F_s) / s^{p/gamma}
  double h_part = 0.0; ///< s^{1 - p/gamma} H[psi, V_-/s]
  double deficit = 0.0;
};

inline MeasurePtr measure_of(const Grid &g) {
  return std::make_shared<const WeightedMeasure>(
      std::vector<double>(g.weights().begin(), g.weights().end()));
}

/// Splits the deficit of V <= 0 through its ground state psi. With
/// s = ||V_-||_p and U = V_-/s of unit dual norm,
///   lambda = E_s[psi] + s H[psi, U],   E_s[psi] = ||grad psi||^2 - s ||psi||_q^2,
/// and subtracting the discrete minimum F_s of E_s gives
///   deficit = (E_s[psi] - F_s)/s^{p/gamma} + s^{1-p/gamma} H[psi, U],
/// both terms nonnegative. At s = 1 these are gns_energy(psi) + C' and
/// h_functional(psi, U).
inline Decomposition deficit_decomposition(const GridFunction &V, const GridFunction &psi,
                                           double gamma, int d, const GroundState &gs) {
  const Exponents e = checked_exponents(gamma, d, gs);
  psi.check(V);
  const GridFunction Vt = -V.negative_part();
  const double s = negative_norm(V, e);
  if (std::abs(inner(psi, psi) - 1.0) > 1e-10)
    throw PreconditionError("deficit_decomposition: psi must have unit L^2 norm");
  const spectral::EigenPair ep = spectral::lowest_eigenpair(Vt);
  if (!(ep.lambda < 0.0))
    throw PreconditionError("deficit_decomposition: -V_- has no bound state");
  const double rq = spectral::rayleigh_quotient(psi, Vt);
  if (std::abs(rq - ep.lambda) > 1e-8 * std::max(1.0, std::abs(ep.lambda)))
    throw PreconditionError("deficit_decomposition: psi is not the ground state of -V_-");

  const DiscreteConstant dc = discrete_constant(V.grid(), s, gs);
  const double scale = std::pow(s, e.p / e.gamma);
  const double nq = lp_norm(psi, e.q);
  const double es = kinetic_energy(psi) - s * nq * nq;

  const MeasurePtr mu = measure_of(*V.grid());
  std::vector<double> pv(psi.values().begin(), psi.values().end());
  std::vector<double> uv(V.size());
  for (std::size_t i = 0; i < uv.size(); ++i)
    uv[i] = std::max(0.0, -V[i]) / s;
  const double H = holder::h_functional(MeasFunction::real(mu, pv), MeasFunction::real(mu, uv),
                                        e.q);
  Decomposition out;
  out.e_part = (es - dc.F) / scale;
  out.h_part = s * H / scale;
  out.deficit = dc.C - std::abs(rq) / scale;
  return out;
}

} // namespace keller::stability

#endif // KELLER_STABILITY_HPP
