#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace testing {

// Fixed seeds so every property run is reproducible.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::vector<double> coefficients(std::size_t n, double scale) {
    std::vector<double> c(n);
    for (auto& x : c) x = uniform(-scale, scale);
    return c;
  }

 private:
  std::mt19937_64 rng_;
};

// Composite Simpson rule with n (even) intervals.
template <typename F>
double simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

// Bounded solution of u + u' = v for v = cos(w t) and v = sin(w t).
inline double damped_cos(double w, double x) {
  return (std::cos(w * x) + w * std::sin(w * x)) / (1.0 + w * w);
}
inline double damped_sin(double w, double x) {
  return (std::sin(w * x) - w * std::cos(w * x)) / (1.0 + w * w);
}

// For a polynomial p the antiderivative of e^{t} p(t) is e^{t} Q(t) with
// Q = p - p' + p'' - ...
inline double alternating_derivative_sum(const std::vector<double>& c, double t) {
  std::vector<double> d = c;
  double q = 0.0;
  double sign = 1.0;
  while (!d.empty()) {
    double p = 0.0;
    for (std::size_t k = d.size(); k-- > 0;) p = p * t + d[k];
    q += sign * p;
    sign = -sign;
    std::vector<double> next;
    for (std::size_t k = 1; k < d.size(); ++k) next.push_back(static_cast<double>(k) * d[k]);
    d = std::move(next);
  }
  return q;
}

inline double poly(const std::vector<double>& c, double t) {
  double p = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) p = p * t + c[k];
  return p;
}

// Bounded solution for p clamped to [lo, hi], at lo <= x <= hi.
inline double damped_clamped_poly(const std::vector<double>& c, double lo, double x) {
  return alternating_derivative_sum(c, x) - std::exp(lo - x) * alternating_derivative_sum(c, lo) +
         std::exp(lo - x) * poly(c, lo);
}

}  // namespace testing
