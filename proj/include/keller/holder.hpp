#ifndef KELLER_HOLDER_HPP
#define KELLER_HOLDER_HPP

// Hoelder's inequality with remainder and the uniform-convexity estimates
// behind it, on finite discrete measure spaces.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "keller/measure.hpp"

namespace keller::holder {

/// Tolerance on the unit-norm preconditions of every routine in this header.
inline constexpr double kUnitNormTol = 1e-10;

/// Pairings smaller than this in modulus are treated as zero when fixing the phase.
inline constexpr double kPhaseCutoff = 1e-14;

inline void require_unit(const MeasFunction &f, double p, const char *what) {
  const double n = lp_norm(f, p);
  if (std::abs(n - 1.0) > kUnitNormTol)
    throw PreconditionError(std::string(what) + ": expected unit L^" + std::to_string(p) +
                            " norm, got " + std::to_string(n));
}

struct HolderReport {
  double lhs = 0.0;     ///< |int f g|
  double deficit = 0.0; ///< 1 - |int f g|
  double bound_dual = 0.0;
  double bound_primal = 0.0;
  double theta = 0.0; ///< phase with e^{i theta} int f g >= 0, in [0, 2 pi)
};

/// Phase that rotates the pairing onto the nonnegative real axis.
inline double aligning_phase(complex pair) {
  if (std::abs(pair) < kPhaseCutoff)
    return 0.0;
  double theta = -std::arg(pair);
  if (theta < 0.0)
    theta += 2.0 * std::numbers::pi;
  if (theta >= 2.0 * std::numbers::pi)
    theta -= 2.0 * std::numbers::pi;
  return theta;
}

/// Both remainder terms of Hoelder's inequality for unit f in L^p, unit g in
/// L^{p'}, p >= 2. Each bound is a lower bound for the deficit.
inline HolderReport holder_report(const MeasFunction &f, const MeasFunction &g, double p) {
  if (!(p >= 2.0) || !std::isfinite(p))
    throw InvalidExponentError("holder_report: requires p >= 2");
  require_same_measure(f, g);
  const double pc = conjugate_exponent(p);
  require_unit(f, p, "holder_report(f)");
  require_unit(g, pc, "holder_report(g)");

  HolderReport r;
  const complex pair = pairing(f, g);
  r.lhs = std::abs(pair);
  r.deficit = 1.0 - r.lhs;
  r.theta = aligning_phase(pair);
  const complex phase = std::polar(1.0, r.theta);

  const double d1 = lp_norm(duality_map(f, p) - g * phase, pc);
  r.bound_dual = (pc - 1.0) / 4.0 * d1 * d1;
  const double d2 = lp_norm(f * phase - duality_map(g, pc), p);
  r.bound_primal = std::pow(d2, p) / (p * std::pow(2.0, p - 1.0));
  return r;
}

namespace detail {

inline void require_admissible_weight(const MeasFunction &psi, const MeasFunction &U,
                                      double q) {
  if (!(q > 2.0) || !std::isfinite(q))
    throw InvalidExponentError("Hoelder gap functional: requires q > 2");
  require_same_measure(psi, U);
  if (!U.is_real_nonnegative())
    throw PreconditionError("Hoelder gap functional: U must be real and nonnegative");
  require_unit(U, q / (q - 2.0), "Hoelder gap functional(U)");
  if (psi.is_zero())
    throw DegenerateInputError("Hoelder gap functional: psi is identically zero");
}

} // namespace detail

/// ||psi||_q^2 - int U |psi|^2 for U >= 0 with unit L^{q/(q-2)} norm.
inline double h_functional(const MeasFunction &psi, const MeasFunction &U, double q) {
  detail::require_admissible_weight(psi, U, q);
  const double nq = lp_norm(psi, q);
  const auto w = psi.measure()->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i)
    s += w[i] * U[i].real() * std::norm(psi[i]);
  return nq * nq - s;
}

enum class RemainderBranch { PowerQMinus2, Square };

struct RemainderBounds {
  double bound = 0.0; ///< lower bound B on the gap functional
  double h = 0.0;     ///< the gap functional itself
  RemainderBranch branch = RemainderBranch::PowerQMinus2;
  /// At q = 4 both estimates apply; this holds the squared-branch value.
  std::optional<double> square_branch_at_four;
};

inline double remainder_power_branch(const MeasFunction &psi, const MeasFunction &U,
                                     double q) {
  const double nq = lp_norm(psi, q);
  const MeasFunction lifted = psi.abs_pow(q - 2.0) * complex(std::pow(nq, 2.0 - q));
  const double d = lp_norm(lifted - U, q / (q - 2.0));
  return nq * nq * d * d / (2.0 * (q - 2.0));
}

inline double remainder_square_branch(const MeasFunction &psi, const MeasFunction &U,
                                      double q) {
  const double nq = lp_norm(psi, q);
  const MeasFunction sq = psi.abs_pow(2.0) * complex(1.0 / (nq * nq));
  const double d = lp_norm(sq - U.abs_pow(2.0 / (q - 2.0)), q / 2.0);
  return (q - 2.0) / 8.0 * nq * nq * d * d;
}

/// Lower bounds on the gap functional: the |psi|^{q-2} branch for q >= 4 and
/// the |psi|^2 branch for 2 < q < 4.
inline RemainderBounds remainder_bounds(const MeasFunction &psi, const MeasFunction &U,
                                        double q) {
  RemainderBounds r;
  r.h = h_functional(psi, U, q);
  if (q >= 4.0) {
    r.branch = RemainderBranch::PowerQMinus2;
    r.bound = remainder_power_branch(psi, U, q);
    if (q == 4.0)
      r.square_branch_at_four = remainder_square_branch(psi, U, q);
  } else {
    r.branch = RemainderBranch::Square;
    r.bound = remainder_square_branch(psi, U, q);
  }
  return r;
}

struct ConvexityGap {
  double gap = 0.0;         ///< 1 - ||(u+v)/2||_p
  double lower_bound = 0.0; ///< modulus-of-convexity lower bound
};

/// Uniform convexity of L^p at unit vectors u, v: 2-uniform for p <= 2,
/// p-uniform (Clarkson) for p >= 2.
inline ConvexityGap uniform_convexity_gap(const MeasFunction &u, const MeasFunction &v,
                                          double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw InvalidExponentError("uniform_convexity_gap: requires p > 1");
  require_same_measure(u, v);
  require_unit(u, p, "uniform_convexity_gap(u)");
  require_unit(v, p, "uniform_convexity_gap(v)");
  ConvexityGap r;
  r.gap = 1.0 - lp_norm((u + v) * complex(0.5), p);
  const double d = lp_norm(u - v, p);
  if (p <= 2.0)
    r.lower_bound = (p - 1.0) / 8.0 * d * d;
  else
    r.lower_bound = std::pow(d, p) / (p * std::pow(2.0, p));
  return r;
}

struct TwoSided {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Hoelder continuity of the duality map: Lipschitz for p >= 2,
/// order p-1 for 1 < p <= 2.
inline TwoSided duality_continuity_check(const MeasFunction &f, const MeasFunction &g,
                                         double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw InvalidExponentError("duality_continuity_check: requires p > 1");
  require_same_measure(f, g);
  if (f.is_zero() || g.is_zero())
    throw DegenerateInputError("duality_continuity_check: zero input");
  const double pc = conjugate_exponent(p);
  TwoSided r;
  r.lhs = lp_norm(duality_map(f, p) - duality_map(g, p), pc);
  const double rel = lp_norm(f - g, p) / (lp_norm(f, p) + lp_norm(g, p));
  if (p >= 2.0)
    r.rhs = 4.0 * (p - 1.0) * rel;
  else
    r.rhs = 2.0 * std::pow(pc * rel, p - 1.0);
  return r;
}

struct PowerComparison {
  TwoSided squares;                 ///< |f|^2 / ||f||_q^2 differences in L^{q/2}
  std::optional<TwoSided> powers;   ///< |f|^{q-2} differences in L^{q/(q-2)}, q >= 4
};

/// Lipschitz-type comparisons of normalized powers of f and g against ||f - g||_q.
inline PowerComparison power_comparison_check(const MeasFunction &f, const MeasFunction &g,
                                              double q) {
  if (!(q >= 2.0) || !std::isfinite(q))
    throw InvalidExponentError("power_comparison_check: requires q >= 2");
  require_same_measure(f, g);
  if (f.is_zero() || g.is_zero())
    throw DegenerateInputError("power_comparison_check: zero input");
  const double nf = lp_norm(f, q);
  const double ng = lp_norm(g, q);
  const double nmax = std::max(nf, ng);
  const double dist = lp_norm(f - g, q);

  PowerComparison r;
  const MeasFunction sf = f.abs_pow(2.0) * complex(1.0 / (nf * nf));
  const MeasFunction sg = g.abs_pow(2.0) * complex(1.0 / (ng * ng));
  r.squares.lhs = nmax * lp_norm(sf - sg, q / 2.0);
  r.squares.rhs = 4.0 * dist;
  if (q >= 4.0) {
    const MeasFunction pf = f.abs_pow(q - 2.0) * complex(std::pow(nf, 2.0 - q));
    const MeasFunction pg = g.abs_pow(q - 2.0) * complex(std::pow(ng, 2.0 - q));
    r.powers = TwoSided{nmax * lp_norm(pf - pg, q / (q - 2.0)), 4.0 * (q - 2.0) * dist};
  }
  return r;
}

struct SharpnessPoint {
  double delta = 0.0;
  double pairing = 0.0;  ///< int f g = (1 - delta)^{1/p}
  double distance_p = 0.0; ///< ||f - D_{p'}(g)||_p^p
  double ratio = 0.0;    ///< (1 - int f g) / ||f - D_{p'}(g)||_p^p
};

/// The extremal family on [0, 1]: f = 1 and g = (1-delta)^{-1/p'} on
/// [0, 1-delta], zero after. Discretized with n midpoint cells; n * delta
/// must be an integer so that the cut falls on a cell face.
inline SharpnessPoint sharpness_family(double p, double delta, std::size_t n) {
  if (!(p >= 2.0))
    throw InvalidExponentError("sharpness_family: requires p >= 2");
  const double cut = delta * static_cast<double>(n);
  if (!(delta > 0.0 && delta < 1.0) || std::abs(cut - std::round(cut)) > 1e-9)
    throw PreconditionError("sharpness_family: n * delta must be a positive integer");
  const std::size_t support = n - static_cast<std::size_t>(std::llround(cut));
  const double pc = conjugate_exponent(p);
  auto mu = WeightedMeasure::midpoint(0.0, 1.0, n);
  std::vector<double> gv(n, 0.0);
  const double level = std::pow(1.0 - delta, -1.0 / pc);
  for (std::size_t i = 0; i < support; ++i)
    gv[i] = level;
  const MeasFunction f = MeasFunction::constant(mu, 1.0);
  const MeasFunction g = MeasFunction::real(mu, gv);
  SharpnessPoint s;
  s.delta = delta;
  s.pairing = pairing(f, g).real();
  s.distance_p = std::pow(lp_norm(f - duality_map(g, pc), p), p);
  s.ratio = (1.0 - s.pairing) / s.distance_p;
  return s;
}

} // namespace keller::holder

#endif // KELLER_HOLDER_HPP
