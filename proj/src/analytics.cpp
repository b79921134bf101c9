#include "stablelab/analytics.hpp"

#include "stablelab/parallel.hpp"
#include "stablelab/quadrature.hpp"
#include "stablelab/stability.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

namespace stablelab {

namespace {

template <std::size_t Dim>
struct BatchMoments {
  std::uint64_t count = 0;
  std::array<double, Dim> mean{};
  std::array<double, Dim> m2{};

  void add(const std::array<double, Dim>& v) {
    ++count;
    for (std::size_t d = 0; d < Dim; ++d) {
      const double delta = v[d] - mean[d];
      mean[d] += delta / static_cast<double>(count);
      m2[d] += delta * (v[d] - mean[d]);
    }
  }

  void merge(const BatchMoments& o) {
    if (o.count == 0) return;
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double total = na + nb;
    for (std::size_t d = 0; d < Dim; ++d) {
      const double delta = o.mean[d] - mean[d];
      mean[d] += delta * nb / total;
      m2[d] += o.m2[d] + delta * delta * na * nb / total;
    }
    count += o.count;
  }
};

// Each batch draws from its own stream, and batches are merged in index
// order, so the estimate does not depend on the thread count.
template <std::size_t Dim, class Sampler>
std::array<EstimateWithError, Dim> run_monte_carlo(std::uint64_t samples, const SeedSpec& seed,
                                                   const std::string& label, const McOptions& opts,
                                                   Sampler&& sampler) {
  if (samples < 2) throw std::invalid_argument("Monte Carlo needs at least 2 samples");
  const std::uint64_t batch = std::max<std::uint64_t>(1, opts.batch_size);
  const std::uint64_t batches = (samples + batch - 1) / batch;
  std::vector<BatchMoments<Dim>> parts(batches);
  parallel_for(batches, opts.threads, [&](std::uint64_t b) {
    Stream rng(seed, label + "/batch/" + std::to_string(b));
    const std::uint64_t lo = b * batch;
    const std::uint64_t hi = std::min(samples, lo + batch);
    std::array<double, Dim> v{};
    for (std::uint64_t i = lo; i < hi; ++i) {
      sampler(rng, v);
      parts[b].add(v);
    }
  });
  BatchMoments<Dim> total;
  for (const auto& p : parts) total.merge(p);
  std::array<EstimateWithError, Dim> out;
  const double n = static_cast<double>(total.count);
  for (std::size_t d = 0; d < Dim; ++d) {
    const double var = total.m2[d] / (n - 1);
    out[d] = {total.mean[d], std::sqrt(std::max(0.0, var) / n), total.count};
  }
  return out;
}

void fill_uniform(Stream& rng, Eigen::Ref<Eigen::MatrixXd> m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform();
  }
}

void require_positive(int v, const char* name) {
  if (v < 1) throw std::invalid_argument(std::string(name) + " must be >= 1");
}

// Integrand in u = log(1/(1-z)) for rho_k; u^{k-1} e^{-u} / z becomes
// u^{k-1} / expm1(u), expanded as u^{k-2}(1 - u/2 + u^2/12) near 0.
double rho_integrand_u(int k, double u) {
  if (u > 700) return 0.0;
  const double z = -std::expm1(-u);
  double ratio;  // u^{k-1} / expm1(u)
  if (u < 1e-4) {
    ratio = std::pow(u, k - 2) * (1.0 - u / 2.0 + u * u / 12.0);
  } else {
    ratio = std::pow(u, k - 1) / std::expm1(u);
  }
  return std::exp(z / 2.0) * ratio / std::tgamma(static_cast<double>(k));
}

}  // namespace

double constant_c_r(int r) {
  if (r < 2) throw std::invalid_argument("c_r is defined for r >= 2");
  if (r == 2) {
    std::clog << "warning: c_2 is formally 0\n";
    return 0.0;
  }
  // (r-1)! * F_{r-1}(x) at integer x is an integer; take the difference
  // before the single division.
  const int m = r - 1;
  auto scaled_cdf = [m](int x) -> long double {
    if (x >= m) {
      long double f = 1;
      for (int j = 2; j <= m; ++j) f *= j;
      return f;
    }
    long double sum = 0;
    long double binom = 1;
    for (int j = 0; j <= x; ++j) {
      const long double term = binom * std::pow(static_cast<long double>(x - j), m);
      sum += (j % 2 == 0) ? term : -term;
      binom = binom * (m - j) / (j + 1);
    }
    return sum;
  };
  long double factorial = 1;
  for (int j = 2; j <= m; ++j) factorial *= j;
  return static_cast<double>((scaled_cdf(2) - scaled_cdf(1)) / factorial);
}

double constant_rho_k(int k, double tolerance) {
  if (k < 2) throw std::invalid_argument("rho_k is defined for k >= 2");
  if (!(tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
  // Map u in [0, inf) to t in [0, 1): u = t / (1 - t).
  auto f = [k](double t) {
    const double one_minus = 1.0 - t;
    const double u = t / one_minus;
    return rho_integrand_u(k, u) / (one_minus * one_minus);
  };
  const auto res = integrate_adaptive<double>(f, 0.0, 1.0, tolerance * std::numbers::e);
  return res.value / std::numbers::e;
}

double constant_r_k(int k) {
  if (k < 2) throw std::invalid_argument("r_k is defined for k >= 2");
  return 1.0 / (std::exp(2.0) * std::tgamma(static_cast<double>(k)));
}

EstimateWithError mc_knuth_Pn(int n, std::uint64_t samples, const SeedSpec& seed, const McOptions& opts) {
  require_positive(n, "n");
  auto est = run_monte_carlo<1>(samples, seed, "mc/knuth/" + std::to_string(n), opts,
                                [n](Stream& rng, std::array<double, 1>& v) {
                                  Eigen::VectorXd x(n), y(n);
                                  fill_uniform(rng, x);
                                  fill_uniform(rng, y);
                                  v[0] = knuth_integrand(x, y);
                                });
  return est[0];
}

std::array<EstimateWithError, 3> mc_F_integrals(int n, int k1, int k2, std::uint64_t samples, const SeedSpec& seed,
                                                const McOptions& opts) {
  require_positive(n, "n");
  require_positive(k1, "k1");
  require_positive(k2, "k2");
  const std::string label =
      "mc/F/" + std::to_string(n) + "/" + std::to_string(k1) + "/" + std::to_string(k2);
  return run_monte_carlo<3>(samples, seed, label, opts, [=](Stream& rng, std::array<double, 3>& v) {
    Eigen::MatrixXd x(n, k1), y(n, k2);
    fill_uniform(rng, x);
    fill_uniform(rng, y);
    const Eigen::Array3d f = stability_integrands(x, y);
    // Equality holds in exact arithmetic for total orders; allow roundoff.
    const double slack = 1e-12;
    if (f(2) > f(1) * (1 + slack) + slack || f(1) > f(0) * (1 + slack) + slack) {
      throw std::logic_error("integrand ordering F3 <= F2 <= F1 violated");
    }
    v = {f(0), f(1), f(2)};
  });
}

EstimateWithError mc_F_integral(StabilityIntegrand which, int n, int k1, int k2, std::uint64_t samples,
                                const SeedSpec& seed, const McOptions& opts) {
  return mc_F_integrals(n, k1, k2, samples, seed, opts)[static_cast<int>(which)];
}

EstimateWithError mc_cyclic_lower_integrand(int r, int n, std::uint64_t samples, const SeedSpec& seed,
                                            const McOptions& opts, std::uint64_t max_tuples) {
  if (r < 3) throw std::invalid_argument("r must be >= 3");
  require_positive(n, "n");
  if (std::pow(static_cast<double>(n), r) > static_cast<double>(max_tuples)) {
    throw CapExceeded("n^r index tuples exceed the integrand cap");
  }
  auto est = run_monte_carlo<1>(samples, seed, "mc/cyclic/" + std::to_string(r) + "/" + std::to_string(n), opts,
                                [=](Stream& rng, std::array<double, 1>& v) {
                                  Eigen::MatrixXd x(n, r);
                                  fill_uniform(rng, x);
                                  v[0] = cyclic_lower_integrand(x);
                                });
  return est[0];
}

EstimateWithError mc_irwin_hall_interval(int terms, double a, double b, std::uint64_t samples, const SeedSpec& seed,
                                         const McOptions& opts) {
  require_positive(terms, "terms");
  auto est = run_monte_carlo<1>(samples, seed, "mc/irwin_hall/" + std::to_string(terms), opts,
                                [=](Stream& rng, std::array<double, 1>& v) {
                                  double t = 0;
                                  for (int i = 0; i < terms; ++i) t += rng.uniform();
                                  v[0] = (t >= a && t <= b) ? 1.0 : 0.0;
                                });
  return est[0];
}

}  // namespace stablelab
