// Globally adaptive 15-point Gauss-Kronrod quadrature.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace stablelab {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class Scalar>
struct QuadratureResult {
  Scalar value;
  Scalar error;
  int intervals;
};

namespace detail {

template <class Scalar, class F>
std::pair<Scalar, Scalar> gauss_kronrod15(F& f, Scalar a, Scalar b) {
  static constexpr std::array<long double, 8> xgk = {
      0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
      0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
      0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
      0.207784955007898467600689403773245L, 0.0L};
  static constexpr std::array<long double, 8> wgk = {
      0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
      0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
      0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
      0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
  static constexpr std::array<long double, 4> wg = {
      0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
      0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

  const Scalar center = (a + b) / 2;
  const Scalar half = (b - a) / 2;
  const Scalar fc = f(center);
  Scalar kronrod = fc * static_cast<Scalar>(wgk[7]);
  Scalar gauss = fc * static_cast<Scalar>(wg[3]);
  for (int i = 0; i < 7; ++i) {
    const Scalar dx = half * static_cast<Scalar>(xgk[i]);
    const Scalar sum = f(center - dx) + f(center + dx);
    kronrod += static_cast<Scalar>(wgk[i]) * sum;
    if (i % 2 == 1) gauss += static_cast<Scalar>(wg[i / 2]) * sum;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integrates f over [a, b] until the summed error estimate is at most
/// `abs_tolerance`; throws QuadratureError after `max_intervals` splits.
template <class Scalar, class F>
QuadratureResult<Scalar> integrate_adaptive(F f, Scalar a, Scalar b, Scalar abs_tolerance,
                                            int max_intervals = 4000) {
  struct Piece {
    Scalar a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  std::vector<Piece> heap;
  Scalar running_error = 0;
  auto push = [&](Scalar lo, Scalar hi) {
    auto [v, e] = detail::gauss_kronrod15<Scalar>(f, lo, hi);
    heap.push_back({lo, hi, v, e});
    std::push_heap(heap.begin(), heap.end());
    running_error += e;
  };
  push(a, b);
  for (int count = 1;; ++count) {
    if (running_error <= abs_tolerance) {
      // The running sum drifts; confirm against a fresh sum.
      Scalar total = 0;
      Scalar error = 0;
      for (const auto& p : heap) {
        total += p.value;
        error += p.error;
      }
      running_error = error;
      if (error <= abs_tolerance) return {total, error, count};
    }
    if (count >= max_intervals) {
      throw QuadratureError("quadrature did not reach the requested tolerance");
    }
    std::pop_heap(heap.begin(), heap.end());
    const Piece worst = heap.back();
    heap.pop_back();
    running_error -= worst.error;
    const Scalar mid = (worst.a + worst.b) / 2;
    push(worst.a, mid);
    push(mid, worst.b);
  }
}

}  // namespace stablelab
