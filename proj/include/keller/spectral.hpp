#ifndef KELLER_SPECTRAL_HPP
#define KELLER_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "keller/error.hpp"
#include "keller/grid.hpp"
#include "keller/tridiag.hpp"

namespace keller::spectral {

inline constexpr double kDefaultTol = 1e-10;
inline constexpr int kIterationCap = 10000;

struct EigenPair {
  double lambda = 0.0;
  GridFunction psi;     ///< unit L^2, positive at its largest-modulus node
  double residual = 0.0; ///< ||(-Lap + V) psi - lambda psi||_2
  int iterations = 0;
};

/// Symmetric-basis matrix of -Lap_ell + V.
inline linalg::SymTridiag schrodinger_operator(const GridFunction &V, int ell = 0) {
  auto t = V.grid()->laplacian(ell);
  t.add_diagonal(V.values());
  return t;
}

/// (int |grad psi|^2 + int V psi^2) / int psi^2 in channel ell.
inline double rayleigh_quotient(const GridFunction &psi, const GridFunction &V, int ell = 0) {
  psi.check(V);
  const double mass = inner(psi, psi);
  if (mass == 0.0)
    throw DegenerateInputError("rayleigh_quotient: psi is identically zero");
  const double pot = inner(pointwise_product(psi, V), psi);
  return (kinetic_energy(psi, ell) + pot) / mass;
}

/// Smallest eigenvalue of the discretized -Lap_ell + V with its eigenvector.
///
/// Shift-and-invert iteration: the shift starts below min V (so the first
/// steps are plain inverse iteration towards the ground state) and moves to
/// the Rayleigh quotient once Sturm counts certify that the residual
/// interval around it isolates the lowest eigenvalue.
inline EigenPair lowest_eigenpair(const GridFunction &V, int ell = 0,
                                  double tol = kDefaultTol) {
  if (!(tol > 0.0))
    throw PreconditionError("lowest_eigenpair: tol must be positive");
  const GridPtr &grid = V.grid();
  const auto t = schrodinger_operator(V, ell);
  const std::size_t n = t.size();

  const double vmin = *std::min_element(V.values().begin(), V.values().end());
  double shift = vmin - 0.1 * (1.0 + std::abs(vmin));

  std::vector<double> x(n, 1.0);
  auto normalize = [](std::vector<double> &v) {
    const double nv = linalg::norm2(v);
    for (double &e : v)
      e /= nv;
  };
  normalize(x);

  std::vector<double> best = x;
  double best_res = std::numeric_limits<double>::infinity();
  double best_mu = 0.0;
  int stalled = 0;
  // Below the rounding floor the residual stops decreasing; accept it there.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                       linalg::max_abs_entry(t) * std::sqrt(double(n));

  for (int it = 1; it <= kIterationCap; ++it) {
    x = linalg::solve_shifted(t, shift, x);
    normalize(x);
    const auto tx = linalg::apply(t, x);
    const double mu = linalg::dot(x, tx);
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      r2 += (tx[i] - mu * x[i]) * (tx[i] - mu * x[i]);
    const double res = std::sqrt(r2);

    if (res < best_res) {
      stalled = (best_res - res < 0.5 * best_res) ? stalled + 1 : 0;
      best_res = res;
      best = x;
      best_mu = mu;
    } else {
      ++stalled;
    }

    const bool done = res <= tol || (best_res <= std::max(tol, floor) && stalled >= 3);
    if (done) {
      auto imax = std::max_element(best.begin(), best.end(), [](double a, double b) {
        return std::abs(a) < std::abs(b);
      });
      if (*imax < 0.0)
        for (double &e : best)
          e = -e;
      return EigenPair{best_mu, detail::from_symmetric(grid, best), best_res, it};
    }

    if (linalg::sturm_count(t, mu - res) == 0 && linalg::sturm_count(t, mu + res) == 1)
      shift = mu;
  }
  const auto psi = detail::from_symmetric(grid, best);
  throw ConvergenceError("lowest_eigenpair: no convergence within iteration cap",
                         std::vector<double>(psi.values().begin(), psi.values().end()),
                         best_res);
}

/// lambda(V) with the convention lambda(V) <= 0: a positive discrete ground
/// energy (box confinement with no bound state) is clamped to 0.
inline double lambda_of_potential(const GridFunction &V, double tol = kDefaultTol) {
  return std::min(0.0, lowest_eigenpair(V, 0, tol).lambda);
}

/// The k lowest eigenvalues of -Lap_ell + V by Sturm bisection.
inline std::vector<double> lowest_eigenvalues(const GridFunction &V, int ell, std::size_t k) {
  return linalg::lowest_eigenvalues(schrodinger_operator(V, ell), {}, k);
}

} // namespace keller::spectral

#endif // KELLER_SPECTRAL_HPP
