#pragma once

#include <random>

// Seeded parameter draws shared by the property tests.
struct Draws {
  std::mt19937_64 g;
  explicit Draws(unsigned long long seed = 7) : g(seed) {}
  double u(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }
  int i(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }
};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
