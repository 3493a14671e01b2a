#ifndef KELLER_MEASURE_HPP
#define KELLER_MEASURE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "keller/error.hpp"

namespace keller {

using complex = std::complex<double>;

/// Finite discrete measure space: n atoms with strictly positive masses.
class WeightedMeasure {
public:
  explicit WeightedMeasure(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty())
      throw PreconditionError("WeightedMeasure: need at least one point");
    for (double w : weights_)
      if (!(w > 0.0) || !std::isfinite(w))
        throw PreconditionError("WeightedMeasure: weights must be positive and finite");
  }

  /// n atoms of mass total/n each.
  static std::shared_ptr<const WeightedMeasure> uniform(std::size_t n, double total = 1.0) {
    return std::make_shared<const WeightedMeasure>(
        std::vector<double>(n, total / static_cast<double>(n)));
  }

  /// Midpoint-rule discretization of Lebesgue measure on [a, b].
  static std::shared_ptr<const WeightedMeasure> midpoint(double a, double b, std::size_t n) {
    return uniform(n, b - a);
  }

  std::size_t size() const { return weights_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  double total_mass() const {
    double s = 0.0;
    for (double w : weights_)
      s += w;
    return s;
  }

private:
  std::vector<double> weights_;
};

using MeasurePtr = std::shared_ptr<const WeightedMeasure>;

/// Complex-valued function on a WeightedMeasure.
class MeasFunction {
public:
  MeasFunction(MeasurePtr mu, std::vector<complex> values)
      : mu_(std::move(mu)), values_(std::move(values)) {
    if (!mu_)
      throw PreconditionError("MeasFunction: null measure");
    if (values_.size() != mu_->size())
      throw DimensionError("MeasFunction: value count does not match measure size");
    for (const complex &v : values_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw PreconditionError("MeasFunction: non-finite value");
  }

  static MeasFunction real(MeasurePtr mu, const std::vector<double> &values) {
    return MeasFunction(std::move(mu), std::vector<complex>(values.begin(), values.end()));
  }

  static MeasFunction constant(MeasurePtr mu, complex c) {
    const std::size_t n = mu->size();
    return MeasFunction(std::move(mu), std::vector<complex>(n, c));
  }

  const MeasurePtr &measure() const { return mu_; }
  std::size_t size() const { return values_.size(); }
  const complex &operator[](std::size_t i) const { return values_[i]; }
  std::span<const complex> values() const { return values_; }

  bool is_zero() const {
    for (const complex &v : values_)
      if (v != complex{})
        return false;
    return true;
  }

  bool is_real_nonnegative() const {
    for (const complex &v : values_)
      if (v.imag() != 0.0 || v.real() < 0.0)
        return false;
    return true;
  }

  template <typename F> MeasFunction map(F &&f) const {
    std::vector<complex> out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i)
      out[i] = f(values_[i]);
    return MeasFunction(mu_, std::move(out));
  }

  MeasFunction operator*(complex c) const {
    return map([c](complex v) { return c * v; });
  }
  friend MeasFunction operator*(complex c, const MeasFunction &f) { return f * c; }

  MeasFunction operator+(const MeasFunction &o) const { return zip(o, std::plus<>{}); }
  MeasFunction operator-(const MeasFunction &o) const { return zip(o, std::minus<>{}); }

  /// |f|^s pointwise (real-valued result), with 0^s = 0.
  MeasFunction abs_pow(double s) const {
    return map([s](complex v) {
      const double a = std::abs(v);
      return complex(a == 0.0 ? 0.0 : std::pow(a, s), 0.0);
    });
  }

private:
  template <typename Op> MeasFunction zip(const MeasFunction &o, Op op) const {
    if (o.mu_ != mu_)
      throw DimensionError("MeasFunction: operands live on different measures");
    std::vector<complex> out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i)
      out[i] = op(values_[i], o.values_[i]);
    return MeasFunction(mu_, std::move(out));
  }

  MeasurePtr mu_;
  std::vector<complex> values_;
};

inline void require_same_measure(const MeasFunction &f, const MeasFunction &g) {
  if (f.measure() != g.measure())
    throw DimensionError("operands live on different measures");
}

/// p' with 1/p + 1/p' = 1.
inline double conjugate_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw InvalidExponentError("conjugate exponent needs 1 < p < inf");
  return p / (p - 1.0);
}

inline double lp_norm(const MeasFunction &f, double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw InvalidExponentError("lp_norm: exponent must satisfy 1 <= p < inf, got " +
                               std::to_string(p));
  const auto w = f.measure()->weights();
  // Scale by the max modulus so large p neither overflows nor underflows.
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    m = std::max(m, std::abs(f[i]));
  if (m == 0.0)
    return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += w[i] * std::pow(std::abs(f[i]) / m, p);
  return m * std::pow(s, 1.0 / p);
}

/// Bilinear pairing sum_i w_i f_i g_i (no conjugation).
inline complex pairing(const MeasFunction &f, const MeasFunction &g) {
  require_same_measure(f, g);
  const auto w = f.measure()->weights();
  complex s{};
  for (std::size_t i = 0; i < f.size(); ++i)
    s += w[i] * f[i] * g[i];
  return s;
}

/// D_p(f) = ||f||_p^{1-p} |f|^{p-2} conj(f); zero wherever f vanishes.
inline MeasFunction duality_map(const MeasFunction &f, double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw InvalidExponentError("duality_map: exponent must satisfy 1 < p < inf");
  const double nf = lp_norm(f, p);
  if (nf == 0.0)
    throw DegenerateInputError("duality_map: f is identically zero");
  return f.map([nf, p](complex v) {
    const double a = std::abs(v);
    if (a == 0.0)
      return complex{};
    // (a/nf)^{p-1} * conj(v)/a keeps the magnitudes in range.
    return std::pow(a / nf, p - 1.0) * std::conj(v) / a;
  });
}

} // namespace keller

#endif // KELLER_MEASURE_HPP
