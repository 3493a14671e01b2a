#ifndef KELLER_TESTS_ORACLES_HPP
#define KELLER_TESTS_ORACLES_HPP

// Reference values computed without the library: hand-derived closed forms
// and a standalone shooting integrator.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// Q(x) = A sech(kx) in -Q'' - c Q^3 = E Q, c = ||Q||_4^{-2}, int Q^2 = 1:
//   int sech^2 = 2  => A^2 = k/2,
//   int sech^4 = 4/3 => ||Q||_4^4 = A^4 (4/3)/k = k/3,
//   sech'' = sech - 2 sech^3 => 2 k^2 = c A^2 = (k/3)^{-1/2} k/2  => k^3 = 3/16.
inline double sech_k() { return std::cbrt(3.0 / 16.0); }
inline double sech_amplitude() { return std::sqrt(sech_k() / 2.0); }
inline double sech_norm4() { return std::pow(sech_k() / 3.0, 0.25); }
inline double sech_energy() { return -sech_k() * sech_k(); }
inline double sech_profile(double x) { return sech_amplitude() / std::cosh(sech_k() * x); }

/// (3/16)^{2/3}: |lambda| = 1 for -2 sech^2 and int (2 sech^2)^2 = 16/3, so
/// C = 1 / (16/3)^{(1/2)(4/3)}.
inline double keller_c_line() { return 1.0 / std::pow(16.0 / 3.0, 2.0 / 3.0); }

/// Ground energy of -d^2 - nu(nu+1) sech^2: -nu^2.
inline double poschl_teller(double depth) {
  const double nu = 0.5 * (std::sqrt(1.0 + 4.0 * depth) - 1.0);
  return -nu * nu;
}

/// Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)> &f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i)
    s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Radial shooting for -R'' - (2/r) R' + R = R^3 in d = 3: bisection on R(0)
/// for the decaying positive solution, RK4 in r. Returns the profile on
/// [0, rmax] with step dr and P = int R^4 d^3x.
struct Shooting {
  double R0 = 0.0;
  double P = 0.0;
  double dr = 0.0;
  std::vector<double> R;
};

inline Shooting shoot_cubic_3d(double rmax = 12.0, double dr = 1e-3) {
  auto integrate = [&](double a, std::vector<double> *keep) {
    // Series start avoids the 1/r singularity: R = a + a(1 - a^2) r^2 / 6.
    double r = dr, u = a + a * (1 - a * a) * dr * dr / 6.0, v = a * (1 - a * a) * dr / 3.0;
    if (keep) {
      keep->assign(1, a);
      keep->push_back(u);
    }
    auto rhs = [](double rr, double uu, double vv) {
      return std::pair<double, double>{vv, -2.0 / rr * vv + uu - uu * uu * uu};
    };
    const int steps = int(rmax / dr);
    for (int i = 1; i < steps; ++i) {
      const auto [k1u, k1v] = rhs(r, u, v);
      const auto [k2u, k2v] = rhs(r + dr / 2, u + dr / 2 * k1u, v + dr / 2 * k1v);
      const auto [k3u, k3v] = rhs(r + dr / 2, u + dr / 2 * k2u, v + dr / 2 * k2v);
      const auto [k4u, k4v] = rhs(r + dr, u + dr * k3u, v + dr * k3v);
      u += dr / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
      v += dr / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
      r += dr;
      if (keep)
        keep->push_back(u);
      if (u < 0.0)
        return -1; // overshoot: crossed zero
      if (v > 0.0)
        return 1; // undershoot: turned back up
    }
    return 0;
  };
  double lo = 3.0, hi = 6.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (integrate(mid, nullptr) < 0 ? hi : lo) = mid;
  }
  Shooting s;
  s.R0 = 0.5 * (lo + hi);
  s.dr = dr;
  integrate(s.R0, &s.R);
  // Cut at the last monotone point before the tail peels off.
  std::size_t cut = s.R.size();
  for (std::size_t i = 1; i < s.R.size(); ++i)
    if (s.R[i] < 1e-6 || s.R[i] > s.R[i - 1]) {
      cut = i;
      break;
    }
  s.R.resize(cut);
  double P = 0.0;
  for (std::size_t i = 0; i + 1 < s.R.size(); ++i) {
    const double r0 = i * dr, r1 = r0 + dr;
    P += 0.5 * dr * (std::pow(s.R[i], 4) * r0 * r0 + std::pow(s.R[i + 1], 4) * r1 * r1);
  }
  s.P = 4.0 * std::numbers::pi * P;
  return s;
}

} // namespace oracle

#endif // KELLER_TESTS_ORACLES_HPP
