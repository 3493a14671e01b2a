// Stability sweep over V = -2 sech^2(x) (1 + eps cos x) at gamma = 3/2.
// The deficit grows like the squared distance to the optimal potentials, so
// the last column stays roughly flat in eps.

#include <cstdio>

#include "keller/corpus.hpp"

using namespace keller;

int main() {
  const auto gs = groundstate::solve_ground_state(4.0, 1, Grid::radial(1, 40.0, 16000));
  std::vector<corpus::Entry> family;
  for (const auto &e : corpus::line_corpus())
    if (e.family == "cosine")
      family.push_back(e);
  const corpus::SweepSpec spec{1.5, 1, Grid::line(40.0, 8000)};
  const auto rows = corpus::sweep(family, spec, gs);

  std::printf("%7s %13s %12s %12s %12s %12s\n", "eps", "lambda", "deficit", "distance", "shift", "c");
  for (const auto &r : rows) {
    const auto &rep = r.report;
    std::printf("%7.3f %13.9f %12.4e %12.4e %12.4e %12.5f\n", r.param, rep.lambda, rep.deficit, rep.distance,
                rep.matched_a, rep.empirical_c.value_or(0.0));
  }
  const auto s = corpus::summarize(rows);
  std::printf("min c = %.5f at %s\n", s.min_empirical_c.value_or(0.0), s.min_empirical_c_at.c_str());
}
