#ifndef KELLER_GROUNDSTATE_HPP
#define KELLER_GROUNDSTATE_HPP

// The GNS-type minimization problem
//   -C' = inf { int |grad psi|^2 - ||psi||_q^2 : ||psi||_2 = 1 },
// its minimizer Q, the Euler-Lagrange multiplier E = -C', and the sharp
// constants derived from it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "keller/error.hpp"
#include "keller/grid.hpp"
#include "keller/spectral.hpp"
#include "keller/tridiag.hpp"

namespace keller::groundstate {

inline constexpr double kDefaultTol = 1e-10;

/// Exponent bookkeeping: p = gamma + d/2 is dual to q/2, and theta is the
/// GNS interpolation exponent.
struct Exponents {
  double gamma = 0.0;
  int d = 1;
  double p = 0.0;
  double q = 0.0;
  double theta = 0.0;
};

inline void validate_q(double q, int d) {
  if (d < 1)
    throw InvalidExponentError("dimension must be >= 1");
  const bool ok = q > 2.0 && std::isfinite(q) && (d <= 2 || q < 2.0 * d / (d - 2.0));
  if (!ok)
    throw InvalidExponentError("q = " + std::to_string(q) + " outside the admissible range for d = " +
                               std::to_string(d));
}

inline Exponents exponents_from_gamma(double gamma, int d) {
  if (d < 1)
    throw InvalidExponentError("dimension must be >= 1");
  const bool ok = std::isfinite(gamma) && (d == 1 ? gamma > 0.5 : gamma > 0.0);
  if (!ok)
    throw InvalidExponentError("gamma = " + std::to_string(gamma) +
                               " outside the admissible range for d = " + std::to_string(d));
  Exponents e;
  e.gamma = gamma;
  e.d = d;
  e.p = gamma + 0.5 * d;
  e.q = 2.0 * e.p / (e.p - 1.0);
  e.theta = d * (e.q - 2.0) / (2.0 * e.q);
  return e;
}

inline Exponents exponents_from_q(double q, int d) {
  validate_q(q, d);
  const double p = q / (q - 2.0);
  Exponents e = exponents_from_gamma(p - 0.5 * d, d);
  e.q = q;
  return e;
}

/// int |grad psi|^2 - ||psi||_q^2 (radial channel on radial grids).
inline double gns_energy(const GridFunction &psi, double q) {
  if (psi.is_zero())
    throw DegenerateInputError("gns_energy: psi is identically zero");
  const double nq = lp_norm(psi, q);
  return kinetic_energy(psi) - nq * nq;
}

/// (int |grad psi|^2)^theta (int psi^2)^{1-theta} / ||psi||_q^2.
inline double gns_quotient(const GridFunction &psi, double q, int d) {
  const double theta = d * (q - 2.0) / (2.0 * q);
  const double nq = lp_norm(psi, q);
  if (nq == 0.0)
    throw DegenerateInputError("gns_quotient: psi is identically zero");
  return std::pow(kinetic_energy(psi), theta) * std::pow(inner(psi, psi), 1.0 - theta) /
         (nq * nq);
}

/// Optimizing the dilation psi -> b^{d/2} psi(b x) in the energy gives
///   C' = (1 - theta) theta^{theta/(1-theta)} S^{-1/(1-theta)};
/// this inverts it for S.
inline double sharp_gns_constant(double c_prime, double theta) {
  return std::pow((1.0 - theta) * std::pow(theta, theta / (1.0 - theta)) / c_prime,
                  1.0 - theta);
}

inline double c_prime_from_gns(double s, double theta) {
  return (1.0 - theta) * std::pow(theta, theta / (1.0 - theta)) *
         std::pow(s, -1.0 / (1.0 - theta));
}

struct GroundState {
  GridFunction Q;   ///< radial, positive, unit L^2
  double E = 0.0;   ///< Euler-Lagrange multiplier
  double q = 0.0;
  int d = 1;
  double norm_q = 0.0;
  double C_prime = 0.0;
  double S = 0.0;
  double el_residual = 0.0;
  /// Strength s of the nonlinearity, -Lap Q - s ||Q||_q^{2-q} Q^{q-1} = E Q.
  /// Always 1 for solve_ground_state.
  double coupling = 1.0;
  /// Q has not decayed to 1e-8 Q(0) at the outer node.
  bool domain_warning = false;
  int flow_steps = 0;
  int newton_steps = 0;

  const GridPtr &grid() const { return Q.grid(); }
  double theta() const { return d * (q - 2.0) / (2.0 * q); }
};

namespace detail {

struct State {
  std::vector<double> f; // nodal values
  double nq = 0.0;       // ||f||_q
  double kinetic = 0.0;
  double energy = 0.0;   // kinetic - s nq^2 (for unit mass)
};

inline double weighted_lq(std::span<const double> f, std::span<const double> w, double q) {
  double m = 0.0;
  for (double v : f)
    m = std::max(m, std::abs(v));
  if (m == 0.0)
    return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += w[i] * std::pow(std::abs(f[i]) / m, q);
  return m * std::pow(s, 1.0 / q);
}

inline void normalize_mass(std::vector<double> &f, std::span<const double> w) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    m += w[i] * f[i] * f[i];
  const double s = 1.0 / std::sqrt(m);
  for (double &v : f)
    v *= s;
}

/// ||(-Lap - s c |f|^{q-2} - E) f||_2 with E the Rayleigh multiplier.
inline double el_residual(const Grid &grid, const linalg::SymTridiag &lap,
                          std::span<const double> f, double q, double s, double nq,
                          double E) {
  const auto rw = grid.root_weights();
  const std::size_t n = f.size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = rw[i] * f[i];
  auto lg = linalg::apply(lap, g);
  const double c = s * std::pow(nq, 2.0 - q);
  double r2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double nl = c * std::pow(std::abs(f[i]), q - 2.0);
    const double ri = lg[i] - nl * g[i] - E * g[i];
    r2 += ri * ri;
  }
  return std::sqrt(r2);
}

inline State evaluate(const Grid &grid, std::vector<double> f, double q, double s) {
  State st;
  st.f = std::move(f);
  st.nq = weighted_lq(st.f, grid.weights(), q);
  std::vector<double> g(st.f.size());
  const auto rw = grid.root_weights();
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = rw[i] * st.f[i];
  st.kinetic = keller::detail::quadratic_form(grid.laplacian(0), g);
  st.energy = st.kinetic - s * st.nq * st.nq;
  return st;
}

/// Solves the coupled problem on a radial grid, starting from `start`
/// (nodal values) or from a Gaussian.
inline GroundState solve(double q, int d, const GridPtr &grid, double tol, double coupling,
                         const std::vector<double> *start) {
  validate_q(q, d);
  if (grid->kind() != GridKind::Radial)
    throw PreconditionError("solve_ground_state: needs a radial grid");
  if (grid->dim() != d)
    throw DimensionError("solve_ground_state: grid dimension differs from d");
  if (!(tol > 0.0))
    throw PreconditionError("solve_ground_state: tol must be positive");
  if (!(coupling > 0.0))
    throw PreconditionError("solve_ground_state: coupling must be positive");

  const std::size_t n = grid->size();
  const auto w = grid->weights();
  const auto rw = grid->root_weights();
  const auto lap = grid->laplacian(0);
  const double s = coupling;

  std::vector<double> f(n);
  if (start) {
    if (start->size() != n)
      throw DimensionError("solve_ground_state: initial guess has wrong length");
    for (std::size_t i = 0; i < n; ++i)
      f[i] = std::abs((*start)[i]);
  } else {
    // The Gaussian of optimal width. For psi = pi^{-d/4} e^{-r^2/2} dilated
    // by b, E(b) = b^2 d/2 - s b^{2 theta} N, minimal at b^{2-2theta} = 2 s theta N / d.
    const double theta = d * (q - 2.0) / (2.0 * q);
    const double lq = -0.25 * d * q * std::log(std::numbers::pi) +
                      0.5 * d * std::log(2.0 * std::numbers::pi / q);
    const double N = std::exp(2.0 * lq / q);
    const double b = std::pow(2.0 * s * theta * N / d, 1.0 / (2.0 - 2.0 * theta));
    for (std::size_t i = 0; i < n; ++i) {
      const double r = b * grid->coord(i);
      f[i] = std::exp(-0.5 * r * r);
    }
  }
  normalize_mass(f, w);
  State st = evaluate(*grid, f, q, s);

  GroundState out{GridFunction::zeros(grid)};
  out.q = q;
  out.d = d;
  out.coupling = s;

  // Phase 1: normalized gradient flow, backward Euler in the linear part
  // with the nonlinear potential frozen over each step.
  // Hand over to Newton once the residual is small relative to the energy
  // scale, which can be tiny in d = 3.
  const double switch_tol = 1e-3;
  double tau = 1.0;
  const double tau_max = 1e8;
  int flow_steps = 0;
  double res = el_residual(*grid, lap, st.f, q, s, st.nq, st.energy);
  while (res > switch_tol * std::abs(st.energy) && flow_steps < 20000) {
    const double c = s * std::pow(st.nq, 2.0 - q);
    std::vector<double> pot(n);
    double vmin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pot[i] = -c * std::pow(std::abs(st.f[i]), q - 2.0);
      vmin = std::min(vmin, pot[i]);
    }
    auto t = lap;
    t.add_diagonal(pot);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i)
      rhs[i] = rw[i] * st.f[i] / tau;
    // (S + W - vmin + 1/tau) g* = g / tau
    const auto gnew = linalg::solve_shifted(t, vmin - 1.0 / tau, rhs);
    std::vector<double> fnew(n);
    for (std::size_t i = 0; i < n; ++i)
      fnew[i] = gnew[i] / rw[i];
    normalize_mass(fnew, w);
    State trial = evaluate(*grid, std::move(fnew), q, s);
    ++flow_steps;
    if (trial.energy <= st.energy + 1e-14 * std::abs(st.energy)) {
      st = std::move(trial);
      tau = std::min(tau * 2.0, tau_max);
      res = el_residual(*grid, lap, st.f, q, s, st.nq, st.energy);
    } else {
      tau *= 0.5;
      if (tau < 1e-12)
        throw StepSizeError("solve_ground_state: gradient-flow step collapsed");
    }
  }
  if (st.nq < 1e-300)
    throw StepSizeError("solve_ground_state: iterate collapsed to zero");

  // Phase 2: Newton on (EL equation, mass constraint) in the unknowns (Q, E).
  // The Jacobian is the linearized operator L plus the rank-one term from
  // differentiating ||Q||_q, bordered by the constraint.
  double E = st.energy;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = rw[i] * st.f[i];

  auto residual_vec = [&](const std::vector<double> &gv, double Ev, double &nq_out,
                          double &norm_out) {
    std::vector<double> fv(n);
    for (std::size_t i = 0; i < n; ++i)
      fv[i] = gv[i] / rw[i];
    nq_out = weighted_lq(fv, w, q);
    const double c = s * std::pow(nq_out, 2.0 - q);
    auto r = linalg::apply(lap, gv);
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] -= c * std::pow(std::abs(fv[i]), q - 2.0) * gv[i] + Ev * gv[i];
      r2 += r[i] * r[i];
    }
    const double mass_defect = 0.5 * (linalg::dot(gv, gv) - 1.0);
    norm_out = std::sqrt(r2 + mass_defect * mass_defect);
    r.push_back(mass_defect);
    return r;
  };

  const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                       linalg::max_abs_entry(lap) * std::sqrt(double(n));
  int newton_steps = 0;
  double nq = 0.0, rnorm = 0.0;
  auto F = residual_vec(g, E, nq, rnorm);
  double best = rnorm;
  int stalled = 0;
  while (rnorm > tol) {
    if (newton_steps >= 60 || (rnorm <= std::max(tol, floor) && stalled >= 2))
      break;
    std::vector<double> f_now(n);
    for (std::size_t i = 0; i < n; ++i)
      f_now[i] = g[i] / rw[i];
    const double c = s * std::pow(nq, 2.0 - q);
    const double alpha = s * (q - 2.0) * std::pow(nq, 2.0 - 2.0 * q);
    auto ht = lap;
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = std::abs(f_now[i]);
      ht.diag[i] += -(q - 1.0) * c * std::pow(a, q - 2.0) - E;
      u[i] = rw[i] * std::pow(a, q - 2.0) * f_now[i];
    }
    std::vector<double> mF(n);
    for (std::size_t i = 0; i < n; ++i)
      mF[i] = -F[i];
    const double F2 = F[n];
    const auto va = linalg::solve_shifted(ht, 0.0, mF);
    const auto vb = linalg::solve_shifted(ht, 0.0, u);
    const auto vc = linalg::solve_shifted(ht, 0.0, g);
    // [1 + alpha u.b, -u.c; -alpha g.b, g.c] [s; dE] = [u.a; -F2 - g.a]
    const double m11 = 1.0 + alpha * linalg::dot(u, vb), m12 = -linalg::dot(u, vc);
    const double m21 = -alpha * linalg::dot(g, vb), m22 = linalg::dot(g, vc);
    const double r1 = linalg::dot(u, va), r2 = -F2 - linalg::dot(g, va);
    const double det = m11 * m22 - m12 * m21;
    const double proj = (r1 * m22 - m12 * r2) / det;
    const double dE = (m11 * r2 - m21 * r1) / det;
    std::vector<double> dg(n);
    for (std::size_t i = 0; i < n; ++i)
      dg[i] = va[i] - alpha * proj * vb[i] + dE * vc[i];

    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      std::vector<double> gt(n);
      for (std::size_t i = 0; i < n; ++i)
        gt[i] = g[i] + step * dg[i];
      double nqt = 0.0, rt = 0.0;
      auto Ft = residual_vec(gt, E + step * dE, nqt, rt);
      if (rt < rnorm || (rt <= std::max(tol, floor) * 1.5)) {
        g = std::move(gt);
        E += step * dE;
        F = std::move(Ft);
        nq = nqt;
        rnorm = rt;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++newton_steps;
    if (!accepted)
      ++stalled;
    if (rnorm < 0.5 * best)
      stalled = 0;
    else
      ++stalled;
    best = std::min(best, rnorm);
  }

  // Final state: renormalize, sign-fix and take E as the Rayleigh quotient
  // of Q under -Lap - s ||Q||_q^{2-q} Q^{q-2}.
  std::vector<double> fq(n);
  for (std::size_t i = 0; i < n; ++i)
    fq[i] = g[i] / rw[i];
  normalize_mass(fq, w);
  if (fq[0] < 0.0)
    for (double &v : fq)
      v = -v;
  const State fin = evaluate(*grid, fq, q, s);
  out.E = fin.energy;
  out.norm_q = fin.nq;
  out.el_residual = el_residual(*grid, lap, fin.f, q, s, fin.nq, fin.energy);
  out.flow_steps = flow_steps;
  out.newton_steps = newton_steps;
  if (out.el_residual > std::max(tol, floor)) {
    throw ConvergenceError("solve_ground_state: Euler-Lagrange residual " +
                               std::to_string(out.el_residual) + " above tolerance",
                           fin.f, out.el_residual);
  }
  if (!(out.E < 0.0))
    throw ConvergenceError("solve_ground_state: non-negative energy, no bound profile", fin.f,
                           out.el_residual);
  out.domain_warning = std::abs(fin.f[n - 1]) > 1e-8 * std::abs(fin.f[0]);
  out.Q = GridFunction(grid, fin.f);
  const double theta = out.theta();
  out.C_prime = -out.E / std::pow(s, 1.0 / (1.0 - theta));
  out.S = sharp_gns_constant(out.C_prime, theta);
  return out;
}

} // namespace detail

/// Minimizer Q of the GNS energy on a radial grid, with its multiplier E and
/// the derived constants C' = -E and S.
inline GroundState solve_ground_state(double q, int d, const GridPtr &grid,
                                      double tol = kDefaultTol) {
  return detail::solve(q, d, grid, tol, 1.0, nullptr);
}

/// Q evaluated at |x| for every node of `target` (interpolated; exact on
/// shared nodes).
inline GridFunction profile_on(const GroundState &gs, const GridPtr &target, double shift = 0.0) {
  const Grid &src = *gs.grid();
  if (target->kind() == GridKind::Radial && shift != 0.0)
    throw UnsupportedShiftError("profile_on: radial grids admit no shift");
  if (target->dim() != gs.d)
    throw DimensionError("profile_on: dimension mismatch");
  std::vector<double> v(target->size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = src.interpolate(gs.Q.values(), std::abs(target->coord(i) - shift));
  return GridFunction(target, std::move(v));
}

/// Ground state of the problem with nonlinearity strength `coupling` on the
/// grid of `like`, seeded with the dilation of `like.Q` that is exact in the
/// continuum.
inline GroundState solve_coupled(const GroundState &like, double coupling,
                                 double tol = kDefaultTol) {
  const double theta = like.theta();
  const double b = std::pow(coupling / like.coupling, 1.0 / (2.0 - 2.0 * theta));
  const Grid &grid = *like.grid();
  std::vector<double> start(grid.size());
  for (std::size_t i = 0; i < start.size(); ++i)
    start[i] = grid.interpolate(like.Q.values(), b * grid.coord(i));
  return detail::solve(like.q, like.d, like.grid(), tol, coupling, &start);
}

struct KellerParameters {
  double amplitude = 0.0; ///< Q(0)
  double kappa = 0.0;     ///< inverse width
  double power = 0.0;     ///< 2/(q-2)
  double E = 0.0;         ///< -kappa^2 power^2
  double norm_q = 0.0;
};

namespace detail {
/// int_R sech^s(x) dx = sqrt(pi) Gamma(s/2) / Gamma((s+1)/2).
inline double sech_power_integral(double s) {
  return std::sqrt(std::numbers::pi) * std::exp(std::lgamma(0.5 * s) - std::lgamma(0.5 * (s + 1.0)));
}
} // namespace detail

/// Closed-form one-dimensional minimizer Q(x) = A sech^{2/(q-2)}(kappa x).
///
/// With alpha = 2/(q-2), u = sech^alpha(kappa x) solves
///   -u'' - alpha(alpha+1) kappa^2 u^{q-1} = -alpha^2 kappa^2 u.
/// Because ||A u||_q^{2-q} A^{q-2} does not depend on A, the Euler-Lagrange
/// equation fixes kappa alone through
///   (kappa / I(q alpha))^{(q-2)/q} = alpha (alpha+1) kappa^2,
/// and int Q^2 = 1 then fixes A^2 = kappa / I(2 alpha), where I(s) is the
/// integral of sech^s over the line.
inline KellerParameters keller_parameters(double q) {
  if (!(q > 2.0) || !std::isfinite(q))
    throw InvalidExponentError("keller_profile: requires q > 2");
  const double alpha = 2.0 / (q - 2.0);
  const double iq = detail::sech_power_integral(q * alpha);
  const double i2 = detail::sech_power_integral(2.0 * alpha);
  KellerParameters k;
  k.power = alpha;
  k.kappa = std::pow(alpha * (alpha + 1.0) * std::pow(iq, (q - 2.0) / q), -q / (q + 2.0));
  k.amplitude = std::sqrt(k.kappa / i2);
  k.E = -alpha * alpha * k.kappa * k.kappa;
  k.norm_q = k.amplitude * std::pow(iq / k.kappa, 1.0 / q);
  return k;
}

inline double keller_profile(double q, double x) {
  const KellerParameters k = keller_parameters(q);
  return k.amplitude * std::pow(1.0 / std::cosh(k.kappa * x), k.power);
}

/// W(x) = -b^2 Q(b(x - a))^{q-2} / ||Q||_q^{q-2} sampled on `target`.
inline GridFunction optimal_potential(const GroundState &gs, const GridPtr &target, double b,
                                      double a = 0.0) {
  if (!(b > 0.0))
    throw PreconditionError("optimal_potential: scale b must be positive");
  if (target->kind() == GridKind::Radial && a != 0.0)
    throw UnsupportedShiftError("optimal_potential: radial grids admit no shift");
  if (target->dim() != gs.d)
    throw DimensionError("optimal_potential: dimension mismatch");
  const Grid &src = *gs.grid();
  const double scale = b * b * std::pow(gs.norm_q, 2.0 - gs.q);
  std::vector<double> v(target->size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = b * std::abs(target->coord(i) - a);
    const double qv = std::max(0.0, src.interpolate(gs.Q.values(), r));
    v[i] = -scale * std::pow(qv, gs.q - 2.0);
  }
  return GridFunction(target, std::move(v));
}

struct KellerConstant {
  double via_energy = 0.0;    ///< C' = -E
  double via_potential = 0.0; ///< eigenvalue ratio at W = optimal_potential(gs, 1, 0)
  double mismatch = 0.0;      ///< relative difference of the two routes
  double lambda_W = 0.0;
};

inline KellerConstant keller_constant(double gamma, int d, const GroundState &gs) {
  const Exponents e = exponents_from_gamma(gamma, d);
  if (d != gs.d || std::abs(e.q - gs.q) > 1e-12 * gs.q)
    throw InvalidExponentError("keller_constant: (gamma, d) does not match the ground state");
  KellerConstant k;
  k.via_energy = -gs.E;
  const GridFunction W = optimal_potential(gs, gs.grid(), 1.0);
  k.lambda_W = spectral::lowest_eigenpair(W).lambda;
  const double np = lp_norm(W.negative_part(), e.p);
  k.via_potential = std::abs(std::min(0.0, k.lambda_W)) / std::pow(np, e.p / e.gamma);
  k.mismatch = std::abs(k.via_energy - k.via_potential) / k.via_energy;
  return k;
}

struct VirialCheck {
  double norm_q = 0.0;
  double predicted = 0.0;
  double mismatch = 0.0;
};

/// Pairing the Euler-Lagrange equation with Q gives T - s||Q||_q^2 = E
/// (T the kinetic energy); pairing it with x.grad Q (Pohozaev) gives
///   -(d-2)/2 T + s (d/q) ||Q||_q^2 = -(d/2) E.
/// Eliminating T: s ||Q||_q^2 (1 - theta) = -E. See docs/virial.md.
inline VirialCheck virial_norm_check(const GroundState &gs) {
  VirialCheck v;
  v.norm_q = gs.norm_q;
  v.predicted = std::sqrt(-gs.E / (gs.coupling * (1.0 - gs.theta())));
  v.mismatch = std::abs(v.norm_q - v.predicted) / v.predicted;
  return v;
}

} // namespace keller::groundstate

#endif // KELLER_GROUNDSTATE_HPP
