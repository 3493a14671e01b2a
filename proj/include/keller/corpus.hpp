#ifndef KELLER_CORPUS_HPP
#define KELLER_CORPUS_HPP

// Potential families for stability sweeps, and the sweep driver itself.

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "keller/groundstate.hpp"
#include "keller/spectral.hpp"
#include "keller/stability.hpp"

namespace keller::corpus {

/// A potential given by a continuum shape v(x); the sweep samples
/// V(x) = b^2 v(b (x - a)), so scale and translation variants are exact.
struct Entry {
  std::string family;
  double param = 0.0;
  std::function<double(double)> shape;

  GridFunction sample(const GridPtr &grid, double b = 1.0, double a = 0.0) const {
    if (grid->kind() == GridKind::Radial && a != 0.0)
      throw UnsupportedShiftError("corpus: radial grids admit no shift");
    return GridFunction::sample(grid, [&](double x) { return b * b * shape(b * (x - a)); });
  }
};

inline double sech2(double x) {
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}

/// Sixty one-dimensional sech^2 potentials in four families of fifteen.
inline std::vector<Entry> line_corpus() {
  std::vector<Entry> out;
  for (double c : {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 7.0, 8.0})
    out.push_back({"depth", c, [c](double x) { return -c * sech2(x); }});
  for (double w : {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.4, 1.6, 1.75, 1.9, 2.0})
    out.push_back({"width", w, [w](double x) { return -2.0 * sech2(x / w); }});
  for (int k = 0; k < 15; ++k) {
    const double eps = 0.05 + 0.025 * k;
    out.push_back({"cosine", eps, [eps](double x) { return -2.0 * sech2(x) * (1.0 + eps * std::cos(x)); }});
  }
  for (int k = 1; k <= 15; ++k) {
    const double s = 0.25 * k;
    out.push_back({"two-bump", s, [s](double x) { return -2.0 * (sech2(x - s) + sech2(x + s)); }});
  }
  return out;
}

/// Twenty radial wells in three dimensions. The modulated family perturbs the
/// optimal potential at scale 6, so it needs the ground state for (q, d).
inline std::vector<Entry> radial_corpus(const groundstate::GroundState &gs) {
  std::vector<Entry> out;
  for (double D : {5.0, 6.0, 7.0, 8.0, 9.0, 10.0})
    out.push_back({"gaussian", D, [D](double r) { return -D * std::exp(-r * r); }});

  const auto Q = std::make_shared<const groundstate::GroundState>(gs);
  const double b = 6.0;
  const double scale = b * b * std::pow(gs.norm_q, 2.0 - gs.q);
  auto W = [Q, b, scale](double r) {
    const double qv = std::max(0.0, Q->grid()->interpolate(Q->Q.values(), b * std::abs(r)));
    return -scale * std::pow(qv, Q->q - 2.0);
  };
  for (double eps : {0.05, 0.1, 0.2, 0.3, 0.4})
    out.push_back({"modulated", eps, [W, eps](double r) { return W(r) * (1.0 + eps * std::cos(2.0 * r)); }});
  for (double D : {4.0, 6.0, 8.0, 10.0})
    out.push_back({"sech2", D, [D](double r) { return -D * sech2(r); }});
  for (double D : {4.0, 6.0, 8.0, 10.0})
    out.push_back({"exponential", D, [D](double r) { return -D * std::exp(-std::abs(r)); }});
  out.push_back({"optimal", b, W});
  return out;
}

struct Row {
  std::string family;
  double param = 0.0;
  stability::StabilityReport report;
  std::optional<stability::Decomposition> decomposition; ///< set when lambda < 0
};

struct SweepSpec {
  double gamma = 1.5;
  int d = 1;
  GridPtr grid;
  double b = 1.0; ///< dilation applied to every entry
  double a = 0.0; ///< translation applied to every entry (line grids)
};

inline Row evaluate(const Entry &e, const SweepSpec &spec, const groundstate::GroundState &gs) {
  Row row;
  row.family = e.family;
  row.param = e.param;
  const GridFunction V = e.sample(spec.grid, spec.b, spec.a);
  row.report = stability::stability_report(V, spec.gamma, spec.d, gs);
  if (row.report.lambda < 0.0) {
    const GridFunction Vt = -V.negative_part();
    const spectral::EigenPair ep = spectral::lowest_eigenpair(Vt);
    row.decomposition = stability::deficit_decomposition(V, ep.psi, spec.gamma, spec.d, gs);
  }
  return row;
}

/// Evaluates every entry, in parallel when `threads` > 1. Rows come back in
/// corpus order whatever the completion order.
inline std::vector<Row> sweep(const std::vector<Entry> &entries, const SweepSpec &spec,
                              const groundstate::GroundState &gs, unsigned threads = 0) {
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<Row> rows(entries.size());
  if (threads == 1) {
    for (std::size_t i = 0; i < entries.size(); ++i)
      rows[i] = evaluate(entries[i], spec, gs);
    return rows;
  }
  std::vector<std::future<void>> jobs;
  for (unsigned t = 0; t < threads; ++t)
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t i = t; i < entries.size(); i += threads)
        rows[i] = evaluate(entries[i], spec, gs);
    }));
  for (auto &j : jobs)
    j.get();
  return rows;
}

struct Summary {
  std::size_t size = 0;
  stability::Branch branch = stability::Branch::Low;
  std::optional<double> min_empirical_c;
  std::string min_empirical_c_at;
  double min_deficit = std::numeric_limits<double>::infinity();
  bool trans_all = true;
  double min_part = std::numeric_limits<double>::infinity(); ///< smallest decomposition term
  double max_identity_error = 0.0; ///< |e_part + h_part - deficit|, worst row
};

inline std::string label(const Row &r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s(%g)", r.family.c_str(), r.param);
  return buf;
}

inline Summary summarize(const std::vector<Row> &rows) {
  Summary s;
  s.size = rows.size();
  for (const Row &r : rows) {
    s.branch = r.report.branch;
    s.min_deficit = std::min(s.min_deficit, r.report.deficit);
    s.trans_all = s.trans_all && r.report.trans.holds;
    if (r.report.empirical_c && (!s.min_empirical_c || *r.report.empirical_c < *s.min_empirical_c)) {
      s.min_empirical_c = r.report.empirical_c;
      s.min_empirical_c_at = label(r);
    }
    if (r.decomposition) {
      const auto &dc = *r.decomposition;
      s.min_part = std::min({s.min_part, dc.e_part, dc.h_part});
      s.max_identity_error =
          std::max(s.max_identity_error, std::abs(dc.e_part + dc.h_part - r.report.deficit));
    }
  }
  return s;
}

/// Agreement of two reports of the same potential after a dilation or a
/// translation: relative 2% with absolute floors on quantities that vanish on
/// the optimizer manifold.
struct Invariance {
  double deficit_dev = 0.0;
  double distance_dev = 0.0;
  double c_dev = 0.0;
  bool ok = true;
};

inline bool close(double x, double y, double rel, double floor) {
  return std::abs(x - y) <= rel * std::max(std::abs(x), std::abs(y)) + floor;
}

inline Invariance compare(const stability::StabilityReport &x, const stability::StabilityReport &y,
                          double rel = 0.02) {
  Invariance v;
  auto dev = [](double a, double b) {
    const double m = std::max(std::abs(a), std::abs(b));
    return m > 0.0 ? std::abs(a - b) / m : 0.0;
  };
  v.deficit_dev = dev(x.deficit, y.deficit);
  v.distance_dev = dev(x.distance, y.distance);
  v.ok = close(x.deficit, y.deficit, rel, 1e-8 * x.C) &&
         close(x.distance, y.distance, rel, stability::kMinDistance) &&
         close(x.ratio, y.ratio, rel, 0.0) && x.trans.holds == y.trans.holds;
  if (x.empirical_c && y.empirical_c) {
    v.c_dev = dev(*x.empirical_c, *y.empirical_c);
    v.ok = v.ok && close(*x.empirical_c, *y.empirical_c, rel, 0.0);
  } else if (x.empirical_c.has_value() != y.empirical_c.has_value()) {
    // One side sits just below the distance cutoff; both must then be tiny.
    v.ok = v.ok && std::max(x.distance, y.distance) < 10.0 * stability::kMinDistance;
  }
  return v;
}

} // namespace keller::corpus

#endif // KELLER_CORPUS_HPP
