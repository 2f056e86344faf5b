#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace eem {

template <int N>
struct GaussLegendre {
  std::array<double, N> x{}, w{};

  GaussLegendre() {
    for (int i = 0; i < N; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= N; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }

  static const GaussLegendre& get() {
    static const GaussLegendre g;
    return g;
  }
};

// Composite 16-point rule on [a, b] with `panels` equal panels.
template <typename F>
auto gl_integrate(F&& f, double a, double b, int panels = 4) {
  const auto& g = GaussLegendre<16>::get();
  using R = decltype(f(a));
  R s = f(a) * 0.0;
  const double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * w, r = 0.5 * w;
    for (int i = 0; i < 16; ++i) s += (g.w[i] * r) * f(c + r * g.x[i]);
  }
  return s;
}

}  // namespace eem
