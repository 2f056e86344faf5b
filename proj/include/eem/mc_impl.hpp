#pragma once

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

namespace eem {

namespace detail {

struct BlockSum {
  double sum = 0.0;
  double sumsq = 0.0;
  long n = 0;
};

}  // namespace detail

template <typename F>
MCEstimate run_mc(F&& f, const BatchConfig& cfg) {
  if (cfg.n_paths < 2) throw ParameterError("mc: n_paths must be >= 2");
  if (cfg.workers < 1) throw ParameterError("mc: workers must be >= 1");
  if (cfg.block < 1) throw ParameterError("mc: block must be >= 1");
  const long n = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
  const long nb = (n + cfg.block - 1) / cfg.block;
  std::vector<detail::BlockSum> blocks(nb);

  auto run_block = [&](long b) {
    detail::BlockSum s;
    const long lo = b * cfg.block, hi = std::min(n, lo + cfg.block);
    for (long i = lo; i < hi; ++i) {
      double x;
      if (cfg.antithetic) {
        NormalStream up{CounterRng(cfg.seed, static_cast<std::uint64_t>(i)), 1.0};
        NormalStream dn{CounterRng(cfg.seed, static_cast<std::uint64_t>(i)), -1.0};
        x = 0.5 * (f(up) + f(dn));
      } else {
        NormalStream z{CounterRng(cfg.seed, static_cast<std::uint64_t>(i)), 1.0};
        x = f(z);
      }
      s.sum += x;
      s.sumsq += x * x;
      ++s.n;
    }
    blocks[b] = s;
  };

  const int w = static_cast<int>(std::min<long>(cfg.workers, std::max<long>(nb, 1)));
  if (w <= 1) {
    for (long b = 0; b < nb; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < w; ++k)
      pool.emplace_back([&, k] {
        for (long b = k; b < nb; b += w) run_block(b);
      });
    for (auto& th : pool) th.join();
  }

  double sum = 0.0, sumsq = 0.0;
  for (const auto& b : blocks) {
    sum += b.sum;
    sumsq += b.sumsq;
  }
  MCEstimate e;
  e.n_samples = n;
  e.n_paths = cfg.antithetic ? 2 * n : n;
  e.mean = sum / n;
  const double var = std::max(sumsq / n - e.mean * e.mean, 0.0) * n / (n - 1.0);
  e.standard_error = std::sqrt(var / n);
  return e;
}

}  // namespace eem
