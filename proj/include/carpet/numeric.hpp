#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace carpet {

// Neumaier-compensated accumulator; deterministic for a fixed add order.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// |d|^p with optional epsilon smoothing: (d^2 + eps^2)^{p/2}
inline double power_abs(double d, double p, double eps = 0.0) {
  if (eps == 0.0) {
    const double a = std::abs(d);
    if (p == 2.0) return a * a;
    if (p == 3.0) return a * a * a;
    if (a == 0.0) return 0.0;
    return std::pow(a, p);
  }
  const double s = d * d + eps * eps;
  if (p == 2.0) return s;
  return std::pow(s, 0.5 * p);
}

// d/dd of power_abs: p * d * (d^2+eps^2)^{p/2-1}; the eps=0 kink contributes 0
inline double power_abs_deriv(double d, double p, double eps = 0.0) {
  if (eps == 0.0) {
    if (d == 0.0) return 0.0;
    const double a = std::abs(d);
    if (p == 2.0) return 2.0 * d;
    if (p == 3.0) return 3.0 * d * a;
    return p * std::copysign(std::pow(a, p - 1.0), d);
  }
  const double s = d * d + eps * eps;
  if (p == 2.0) return 2.0 * d;
  return p * d * std::pow(s, 0.5 * p - 1.0);
}

inline double weighted_mean(const std::vector<double>& f, const std::vector<std::int32_t>& subset,
                            const std::vector<double>& weights) {
  CompensatedSum num, den;
  for (size_t k = 0; k < subset.size(); ++k) {
    const double w = weights.empty() ? 1.0 : weights[k];
    num.add(w * f[static_cast<size_t>(subset[k])]);
    den.add(w);
  }
  return num.value() / den.value();
}

}  // namespace carpet
