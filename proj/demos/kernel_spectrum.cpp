// Low spectrum of the linearized operator at Q, channel by channel, for a
// few (q, d). Kernel modes sit at the rounding level or drift like h^2;
// everything else is separated by a clear gap. The kernel tolerance scales
// like 1/h^2 while the cubic 3D gap is only about |E| = 1.8e-4, so that case
// runs at h = 0.75, about 1% of its length scale.

#include <cstdio>

#include "keller/hessian.hpp"

using namespace keller;

int main() {
  struct Case {
    double q;
    int d;
    double L;
    std::size_t n;
  };
  for (const Case c : {Case{4.0, 1, 30.0, 1200}, Case{6.0, 1, 30.0, 1200}, Case{4.0, 3, 1500.0, 2000},
                       Case{3.0, 2, 300.0, 4000}}) {
    const auto gs = groundstate::solve_ground_state(c.q, c.d, Grid::radial(c.d, c.L, c.n));
    const auto rep = hessian::kernel_report(gs, 4);
    std::printf("q = %g, d = %d: kernel dimension %d (expected %d), E = %.8f\n", c.q, c.d, rep.kernel_dim,
                rep.expected_dim, gs.E);
    for (const auto &ch : rep.channels) {
      std::printf("  %s %d (x%d):", c.d == 1 ? "sector" : "ell", ch.ell, ch.multiplicity);
      for (double e : ch.eigs)
        std::printf(" %12.4e", e);
      std::printf("   tol %.1e\n", ch.tol_kernel);
    }
    for (const auto &a : rep.anomalies)
      std::printf("  anomaly: %s\n", a.c_str());
  }
}
