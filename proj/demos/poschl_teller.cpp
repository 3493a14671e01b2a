// Ground energies of the Poeschl-Teller wells -nu(nu+1) sech^2 against the
// exact -nu^2, at three resolutions. The error drops by 4 per halving of h.

#include <cmath>
#include <cstdio>

#include "keller/corpus.hpp"
#include "keller/spectral.hpp"

using namespace keller;

int main() {
  std::printf("%6s %8s %14s %12s %8s\n", "nu", "n", "lambda", "error", "ratio");
  for (double nu : {0.5, 1.0, 2.0, 3.0}) {
    const double exact = -nu * nu;
    double prev = 0.0;
    for (std::size_t n : {1000, 2000, 4000, 8000}) {
      const auto V = GridFunction::sample(Grid::line(20.0, n),
                                          [nu](double x) { return -nu * (nu + 1.0) * corpus::sech2(x); });
      const double lambda = spectral::lowest_eigenpair(V).lambda;
      const double err = std::abs(lambda - exact);
      if (prev > 0.0)
        std::printf("%6.2f %8zu %14.10f %12.3e %8.3f\n", nu, n, lambda, err, prev / err);
      else
        std::printf("%6.2f %8zu %14.10f %12.3e %8s\n", nu, n, lambda, err, "-");
      prev = err;
    }
  }
}
