#ifndef KELLER_HOLDER_FUZZ_HPP
#define KELLER_HOLDER_FUZZ_HPP

// Randomized verification of the Hoelder-remainder and uniform-convexity
// inequalities on small discrete measure spaces.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "keller/holder.hpp"
#include "keller/measure.hpp"
#include "keller/random.hpp"

namespace keller::holder {

inline const std::vector<double> &fuzz_exponents() {
  static const std::vector<double> ps{2.0, 2.5, 3.0, 4.0, 6.0};
  return ps;
}

/// One inequality family: how often it was checked, how often it failed, and
/// how close to equality it came (largest bound/value or lhs/rhs seen).
struct CheckStats {
  long checked = 0;
  long violations = 0;
  double tightest = 0.0;
  std::string first_violation;
};

struct FuzzReport {
  std::map<std::string, CheckStats> checks;
  long samples = 0;
  std::vector<SharpnessPoint> sharpness;

  long violations() const {
    long v = 0;
    for (const auto &[name, s] : checks)
      v += s.violations;
    return v;
  }
};

namespace detail {

class Sampler {
public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  MeasurePtr measure() {
    std::uniform_int_distribution<int> size(2, 48);
    std::uniform_real_distribution<double> w(0.05, 2.0);
    std::vector<double> ws(std::size_t(size(rng_)));
    for (double &x : ws)
      x = w(rng_);
    return std::make_shared<const WeightedMeasure>(std::move(ws));
  }

  /// Smoothed-noise complex function: real and imaginary parts are moving
  /// averages of standard normals over a random window. A quarter of the
  /// samples are real, and a few entries are zeroed to hit the support edges.
  MeasFunction function(const MeasurePtr &mu, bool allow_complex = true) {
    std::uniform_real_distribution<double> unit;
    const std::size_t n = mu->size();
    const bool real = !allow_complex || unit(rng_) < 0.25;
    const auto width =
        std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, n / 4))(rng_);
    const auto re = random::smoothed_noise(rng_, n, width);
    const auto im = real ? std::vector<double>(n, 0.0) : random::smoothed_noise(rng_, n, width);
    std::vector<complex> v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = unit(rng_) < 0.05 ? complex{} : complex(re[i], im[i]);
    if (std::all_of(v.begin(), v.end(), [](complex z) { return z == complex{}; }))
      v.front() = 1.0;
    return MeasFunction(mu, std::move(v));
  }

  /// Perturbation of `base` of relative size drawn over several decades, to
  /// probe the inequalities near equality.
  MeasFunction near(const MeasFunction &base) {
    std::uniform_real_distribution<double> decade(-6.0, 0.0);
    const double eps = std::pow(10.0, decade(rng_));
    const MeasFunction noise = function(base.measure());
    const double scale = eps * lp_norm(base, 2.0) / std::max(1e-300, lp_norm(noise, 2.0));
    return base + noise * complex(scale);
  }

  bool coin(double p) { return std::uniform_real_distribution<double>()(rng_) < p; }
  double pick(const std::vector<double> &v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng_)];
  }

private:
  random::Rng rng_;
};

inline MeasFunction normalized(const MeasFunction &f, double p) {
  return f * complex(1.0 / lp_norm(f, p));
}

} // namespace detail

/// Runs `samples` random trials. Every trial picks p (from `ps`), a random
/// measure and random functions, and checks each applicable inequality at
/// absolute tolerance `tol`. The sharpness family is evaluated once per p.
inline FuzzReport fuzz_holder(long samples, std::uint64_t seed, const std::vector<double> &ps,
                              double tol = 1e-10) {
  FuzzReport rep;
  detail::Sampler rnd(seed);

  auto lower = [&](const std::string &name, double value, double bound) {
    CheckStats &s = rep.checks[name];
    ++s.checked;
    if (value > 0.0)
      s.tightest = std::max(s.tightest, bound / value);
    if (value < bound - tol) {
      if (s.violations++ == 0)
        s.first_violation = "sample " + std::to_string(rep.samples) + ": value " +
                            std::to_string(value) + " < bound " + std::to_string(bound);
    }
  };
  auto upper = [&](const std::string &name, double lhs, double rhs) { lower(name, rhs, lhs); };

  for (long k = 0; k < samples; ++k) {
    rep.samples = k;
    const double p = rnd.pick(ps);
    const double pc = conjugate_exponent(p);
    const MeasurePtr mu = rnd.measure();

    // Hoelder with remainder: unit f in L^p, unit g in L^{p'}.
    const MeasFunction f = detail::normalized(rnd.function(mu), p);
    MeasFunction graw = rnd.coin(0.5) ? rnd.near(duality_map(f, p)) : rnd.function(mu);
    if (rnd.coin(0.5))
      graw = graw * std::polar(1.0, 2.0 * std::numbers::pi * (k % 7) / 7.0);
    const MeasFunction g = detail::normalized(graw, pc);
    const HolderReport hr = holder_report(f, g, p);
    lower("holder_dual_gap", hr.deficit, hr.bound_dual);
    lower("holder_primal_gap", hr.deficit, hr.bound_primal);

    // Uniform convexity of L^{p'} (p' <= 2) and of L^p.
    {
      const MeasFunction u = detail::normalized(rnd.function(mu), pc);
      const MeasFunction v = detail::normalized(rnd.coin(0.5) ? rnd.near(u) : rnd.function(mu), pc);
      const ConvexityGap cg = uniform_convexity_gap(u, v, pc);
      lower("convexity_dual", cg.gap, cg.lower_bound);
    }
    {
      const MeasFunction u = detail::normalized(rnd.function(mu), p);
      const MeasFunction v = detail::normalized(rnd.coin(0.5) ? rnd.near(u) : rnd.function(mu), p);
      const ConvexityGap cg = uniform_convexity_gap(u, v, p);
      lower("convexity_primal", cg.gap, cg.lower_bound);
    }

    // Continuity of the duality maps.
    {
      const MeasFunction a = rnd.function(mu);
      const MeasFunction b = rnd.coin(0.5) ? rnd.near(a) : rnd.function(mu);
      const TwoSided n1 = duality_continuity_check(a, b, pc);
      upper("duality_continuity_dual", n1.lhs, n1.rhs);
      const TwoSided n2 = duality_continuity_check(a, b, p);
      upper("duality_continuity_primal", n2.lhs, n2.rhs);
    }

    // Power comparisons at q1 = 2p >= 4 and q2 = 2p' <= 4.
    const double q1 = 2.0 * p, q2 = 2.0 * pc;
    for (const double q : {q1, q2}) {
      const MeasFunction a = rnd.function(mu);
      const MeasFunction b = rnd.coin(0.5) ? rnd.near(a) : rnd.function(mu);
      const PowerComparison pcmp = power_comparison_check(a, b, q);
      upper("square_lipschitz", pcmp.squares.lhs, pcmp.squares.rhs);
      if (pcmp.powers)
        upper("power_lipschitz", pcmp.powers->lhs, pcmp.powers->rhs);
    }

    // The gap functional and its remainder bounds.
    for (const double q : {q1, q2}) {
      if (!(q > 2.0))
        continue;
      const MeasFunction psi = rnd.function(mu);
      MeasFunction Uraw = rnd.function(mu, false).abs_pow(1.0);
      if (rnd.coin(0.5)) {
        // Near the optimal weight |psi|^{q-2} / ||psi||_q^{q-2}.
        const MeasFunction opt = psi.abs_pow(q - 2.0);
        Uraw = rnd.near(opt).abs_pow(1.0);
      }
      if (Uraw.is_zero())
        continue;
      const MeasFunction U = detail::normalized(Uraw, q / (q - 2.0));
      const RemainderBounds rb = remainder_bounds(psi, U, q);
      lower("gap_nonnegative", rb.h, 0.0);
      if (q >= 4.0)
        lower("gap_power_branch", rb.h, remainder_power_branch(psi, U, q));
      if (q <= 4.0)
        lower("gap_square_branch", rb.h, remainder_square_branch(psi, U, q));
    }
  }
  rep.samples = samples;
  for (const double p : ps)
    rep.sharpness.push_back(sharpness_family(p, 1e-3, 10000));
  return rep;
}

/// (1 - int f g) / ||f - D_{p'} g||_p^p lies in (0, 1.1/p] for the extremal family.
inline bool sharpness_ok(const SharpnessPoint &s, double p) {
  return s.ratio > 0.0 && s.ratio <= 1.1 / p;
}

} // namespace keller::holder

#endif // KELLER_HOLDER_FUZZ_HPP
