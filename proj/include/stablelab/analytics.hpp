// Densities, constants and Monte Carlo estimators of the stable-matching
// integral representations.
//
// The integrands are free functions over Eigen expressions and are
// templated on the scalar type; the estimators sample them in double.
#pragma once

#include "stablelab/core.hpp"
#include "stablelab/rng.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace stablelab {

struct EstimateWithError {
  double value = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
};

// --- densities ----------------------------------------------------------------

/// Density of a product of k independent uniforms: log^{k-1}(1/z) / (k-1)!.
template <class Scalar>
Scalar density_product_uniforms(int k, Scalar z) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(z > 0) || z > 1) throw std::domain_error("density_product_uniforms needs z in (0, 1]");
  using std::log;
  using std::pow;
  using std::tgamma;
  if (k == 1) return Scalar(1);
  return pow(-log(z), Scalar(k - 1)) / tgamma(Scalar(k));
}

/// Density of one minus a product of k uniforms; equals the product density
/// at 1 - z.
template <class Scalar>
Scalar density_one_minus_product(int k, Scalar z) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(z >= 0) || z >= 1) throw std::domain_error("density_one_minus_product needs z in [0, 1)");
  using std::log1p;
  using std::pow;
  using std::tgamma;
  if (k == 1) return Scalar(1);
  return pow(-log1p(-z), Scalar(k - 1)) / tgamma(Scalar(k));
}

/// CDF of the sum of r independent uniforms.
template <class Scalar>
Scalar irwin_hall_cdf(int r, Scalar x) {
  if (r < 1) throw std::invalid_argument("r must be >= 1");
  if (x <= 0) return Scalar(0);
  if (x >= r) return Scalar(1);
  using std::floor;
  using std::pow;
  const int top = static_cast<int>(floor(x));
  Scalar sum = 0;
  Scalar binom = 1;  // C(r, j)
  for (int j = 0; j <= top; ++j) {
    const Scalar term = binom * pow(x - Scalar(j), Scalar(r));
    sum += (j % 2 == 0) ? term : -term;
    binom = binom * Scalar(r - j) / Scalar(j + 1);
  }
  Scalar factorial = 1;
  for (int j = 2; j <= r; ++j) factorial *= j;
  const Scalar value = sum / factorial;
  return value < 0 ? Scalar(0) : value > 1 ? Scalar(1) : value;
}

// --- constants ------------------------------------------------------------

/// Probability that a sum of r-1 uniforms lands in [1, 2]; exact rational
/// evaluation. Returns 0 (with a warning on std::clog) for r = 2.
double constant_c_r(int r);

/// e^{-1} * integral_0^1 e^{z/2} z^{-1} log^{k-1}((1-z)^{-1}) / (k-1)! dz,
/// to absolute error `tolerance`. Throws QuadratureError on non-convergence.
double constant_rho_k(int k, double tolerance = 1e-12);

/// 1 / (e^2 (k-1)!).
double constant_r_k(int k);

// --- integrands -----------------------------------------------------------

/// Product over i != j of (1 - deficit(i, j)), accumulated in log space.
/// Returns exactly 0 as soon as one factor is non-positive.
template <class Derived>
typename Derived::Scalar off_diagonal_complement_product(const Eigen::MatrixBase<Derived>& deficit) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  using std::log1p;
  Scalar log_sum = 0;
  for (Eigen::Index i = 0; i < deficit.rows(); ++i) {
    for (Eigen::Index j = 0; j < deficit.cols(); ++j) {
      if (i == j) continue;
      const Scalar d = deficit(i, j);
      if (d >= 1) return Scalar(0);
      log_sum += log1p(-d);
    }
  }
  return exp(log_sum);
}

/// prod_{i != j} (1 - x_i y_j).
template <class DX, class DY>
typename DX::Scalar knuth_integrand(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
  return off_diagonal_complement_product(x * y.transpose());
}

/// The conditional-probability products for weak, strong and super
/// stability of a fixed matching, given the matched pairs' points
/// (x: n x k1, y: n x k2). Always ordered super <= strong <= weak.
template <class DX, class DY>
Eigen::Array<typename DX::Scalar, 3, 1> stability_integrands(const Eigen::MatrixBase<DX>& x,
                                                             const Eigen::MatrixBase<DY>& y) {
  using Scalar = typename DX::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  // p: probability a fresh point is strictly better; q: not strictly worse.
  const Vec px = x.rowwise().prod();
  const Vec py = y.rowwise().prod();
  const Vec qx = (Scalar(1) - (Scalar(1) - x.array()).rowwise().prod()).matrix();
  const Vec qy = (Scalar(1) - (Scalar(1) - y.array()).rowwise().prod()).matrix();
  Eigen::Array<Scalar, 3, 1> out;
  out(0) = off_diagonal_complement_product(px * py.transpose());
  out(1) = off_diagonal_complement_product(px * qy.transpose() + qx * py.transpose() - px * py.transpose());
  out(2) = off_diagonal_complement_product(qx * qy.transpose());
  return out;
}

/// prod over cyclically-distinct index tuples (i_1 != i_2 != ... != i_r != i_1)
/// of (1 - prod_s x(i_s, s)); x is n x r.
template <class Derived>
typename Derived::Scalar cyclic_lower_integrand(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  using std::log1p;
  const auto n = static_cast<int>(x.rows());
  const auto r = static_cast<int>(x.cols());
  std::vector<int> idx(r, 0);
  Scalar log_sum = 0;
  for (;;) {
    bool admissible = true;
    for (int s = 0; s < r && admissible; ++s) admissible = idx[s] != idx[(s + 1) % r];
    if (admissible) {
      Scalar prod = 1;
      for (int s = 0; s < r; ++s) prod *= x(idx[s], s);
      if (prod >= 1) return Scalar(0);
      log_sum += log1p(-prod);
    }
    int s = r - 1;
    while (s >= 0 && ++idx[s] == n) idx[s--] = 0;
    if (s < 0) break;
  }
  return exp(log_sum);
}

// --- Monte Carlo estimators -------------------------------------------------

struct McOptions {
  int threads = 1;
  std::uint64_t batch_size = 4096;  // fixed batches keep results independent of threads
};

/// Plain Monte Carlo estimate of Knuth's P(n).
EstimateWithError mc_knuth_Pn(int n, std::uint64_t samples, const SeedSpec& seed, const McOptions& opts = {});

enum class StabilityIntegrand { F1 = 0, F2 = 1, F3 = 2 };

/// One of the three stability probabilities of a fixed matching
/// (F1 weak, F2 strong, F3 super); multiply by n! for the expected count.
EstimateWithError mc_F_integral(StabilityIntegrand which, int n, int k1, int k2, std::uint64_t samples,
                                const SeedSpec& seed, const McOptions& opts = {});

/// All three from the same sample points. Throws std::logic_error if the
/// pathwise ordering F3 <= F2 <= F1 fails at any sample.
std::array<EstimateWithError, 3> mc_F_integrals(int n, int k1, int k2, std::uint64_t samples, const SeedSpec& seed,
                                                const McOptions& opts = {});

/// Lower-bound integrand for the probability that a cyclic matching is
/// weakly stable. Throws CapExceeded when n^r exceeds max_tuples.
EstimateWithError mc_cyclic_lower_integrand(int r, int n, std::uint64_t samples, const SeedSpec& seed,
                                            const McOptions& opts = {}, std::uint64_t max_tuples = 512);

/// P(a <= U_1 + ... + U_terms <= b) by sampling.
EstimateWithError mc_irwin_hall_interval(int terms, double a, double b, std::uint64_t samples, const SeedSpec& seed,
                                         const McOptions& opts = {});

}  // namespace stablelab
