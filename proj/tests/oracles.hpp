#pragma once

// Independent reference implementations used as test oracles. None of these
// call into the library under test.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// Plain bisection on [a, b]; f(a) and f(b) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double a, double b,
                     int iterations = 200) {
  double fa = f(a);
  if (fa == 0.0) return a;
  if (f(b) == 0.0) return b;
  for (int i = 0; i < iterations; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Series motor, written out again from the equations:
//   l di/dt = v - r i - k i w,  j dw/dt = k i^2 - b w - tl
struct SeriesMotor {
  double r, l, k, j, b;
};

inline std::array<double, 2> series_rhs(const SeriesMotor& m, double v, double tl,
                                        const std::array<double, 2>& x) {
  const double i = x[0];
  const double w = x[1];
  return {(v - m.r * i - m.k * i * w) / m.l, (m.k * i * i - m.b * w - tl) / m.j};
}

inline std::array<double, 2> rk4(const SeriesMotor& m, double v, double tl,
                                 std::array<double, 2> x, double h, long steps) {
  auto axpy = [](const std::array<double, 2>& a, double s, const std::array<double, 2>& d) {
    return std::array<double, 2>{a[0] + s * d[0], a[1] + s * d[1]};
  };
  for (long n = 0; n < steps; ++n) {
    const auto k1 = series_rhs(m, v, tl, x);
    const auto k2 = series_rhs(m, v, tl, axpy(x, h / 2, k1));
    const auto k3 = series_rhs(m, v, tl, axpy(x, h / 2, k2));
    const auto k4 = series_rhs(m, v, tl, axpy(x, h, k3));
    for (int c = 0; c < 2; ++c) x[c] += h / 6 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
  }
  return x;
}

// Forward pass of a one-hidden-layer tanh network with a linear output.
// w1 is hidden x in, w2 is out x hidden, both row-major.
inline std::vector<double> two_layer_forward(const std::vector<double>& w1,
                                             const std::vector<double>& b1,
                                             const std::vector<double>& w2,
                                             const std::vector<double>& b2,
                                             const std::vector<double>& x) {
  const std::size_t in = x.size();
  const std::size_t hidden = b1.size();
  std::vector<double> h(hidden);
  for (std::size_t r = 0; r < hidden; ++r) {
    long double acc = b1[r];
    for (std::size_t c = 0; c < in; ++c) acc += static_cast<long double>(w1[r * in + c]) * x[c];
    h[r] = std::tanh(static_cast<double>(acc));
  }
  std::vector<double> y(b2.size());
  for (std::size_t r = 0; r < y.size(); ++r) {
    long double acc = b2[r];
    for (std::size_t c = 0; c < hidden; ++c) acc += static_cast<long double>(w2[r * hidden + c]) * h[c];
    y[r] = static_cast<double>(acc);
  }
  return y;
}

inline double tri(double x, double a, double b, double c) {
  if (x == b) return 1.0;
  if (x <= a || x >= c) return 0.0;
  return x < b ? (x - a) / (b - a) : (c - x) / (c - b);
}

// Takagi-Sugeno with triangular antecedents: rule i is
// (tri params per input, consequent c0..cn).
struct TriRule {
  std::vector<std::array<double, 3>> sets;
  std::vector<double> c;
};

inline double ts(const std::vector<TriRule>& rules, const std::vector<double>& x) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& rule : rules) {
    double w = 1.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
      w *= tri(x[d], rule.sets[d][0], rule.sets[d][1], rule.sets[d][2]);
    }
    double y = rule.c[0];
    for (std::size_t d = 0; d < x.size(); ++d) y += rule.c[d + 1] * x[d];
    num += w * y;
    den += w;
  }
  return num / den;
}

// Magnitude and phase (of a sin-referenced fundamental) of harmonic n by
// direct trapezoid-free sum over whole periods.
inline std::array<double, 2> harmonic(const std::vector<double>& x, double dt, double f) {
  double s = 0.0;
  double c = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ph = 2.0 * std::numbers::pi * f * dt * static_cast<double>(i);
    s += x[i] * std::sin(ph);
    c += x[i] * std::cos(ph);
  }
  s *= 2.0 / static_cast<double>(x.size());
  c *= 2.0 / static_cast<double>(x.size());
  return {std::hypot(s, c), std::atan2(c, s)};
}

}  // namespace oracle
