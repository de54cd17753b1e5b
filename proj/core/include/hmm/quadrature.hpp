#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace hmm {

struct QuadratureOptions {
  double rel_tol = 1e-6;
  double abs_tol = 1e-13;
  std::size_t max_intervals = 4000;
};

template <std::size_t N>
struct QuadratureResult {
  std::array<double, N> value{};
  std::array<double, N> error{};
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for Kronrod nodes 1, 3, 5, 7.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t N>
struct Interval {
  double a, b;
  std::array<double, N> value;
  std::array<double, N> error;
  double priority;
  bool operator<(const Interval& o) const { return priority < o.priority; }
};

template <std::size_t N, class F>
Interval<N> kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<std::array<double, N>, 15> fx;
  fx[0] = f(center);
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    fx[1 + 2 * j] = f(center - dx);
    fx[2 + 2 * j] = f(center + dx);
  }

  Interval<N> out{a, b, {}, {}, 0.0};
  for (std::size_t c = 0; c < N; ++c) {
    const double fc = fx[0][c];
    double kronrod = kKronrodWeights[7] * fc;
    double gauss = kGaussWeights[3] * fc;
    double abs_sum = std::abs(kronrod);
    for (std::size_t j = 0; j < 7; ++j) {
      const double pair = fx[1 + 2 * j][c] + fx[2 + 2 * j][c];
      kronrod += kKronrodWeights[j] * pair;
      abs_sum += kKronrodWeights[j] * (std::abs(fx[1 + 2 * j][c]) + std::abs(fx[2 + 2 * j][c]));
      if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(fc - mean);
    for (std::size_t j = 0; j < 7; ++j)
      asc += kKronrodWeights[j] * (std::abs(fx[1 + 2 * j][c] - mean) + std::abs(fx[2 + 2 * j][c] - mean));

    double err = std::abs((kronrod - gauss) * half);
    const double resasc = asc * std::abs(half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double resabs = abs_sum * std::abs(half);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
      err = std::max(50.0 * eps * resabs, err);

    out.value[c] = kronrod * half;
    out.error[c] = err;
    out.priority += err;
  }
  return out;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of a vector-valued integrand
/// `f(x) -> std::array<double, N>` over [a, b]. The interval with the largest
/// summed error is bisected until every component meets
/// err <= max(abs_tol, rel_tol |I|) or max_intervals is reached.
template <std::size_t N, class F>
QuadratureResult<N> integrate_adaptive(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  QuadratureResult<N> res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  std::priority_queue<detail::Interval<N>> heap;
  auto first = detail::kronrod15<N>(f, a, b);
  res.value = first.value;
  res.error = first.error;
  res.evaluations = 15;
  res.intervals = 1;
  heap.push(first);

  auto done = [&] {
    for (std::size_t c = 0; c < N; ++c)
      if (res.error[c] > std::max(opt.abs_tol, opt.rel_tol * std::abs(res.value[c]))) return false;
    return true;
  };

  while (!done()) {
    if (res.intervals >= opt.max_intervals) {
      res.converged = false;
      return res;
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval cannot be split further in double precision.
      res.converged = false;
      return res;
    }
    auto left = detail::kronrod15<N>(f, worst.a, mid);
    auto right = detail::kronrod15<N>(f, mid, worst.b);
    for (std::size_t c = 0; c < N; ++c) {
      res.value[c] += left.value[c] + right.value[c] - worst.value[c];
      res.error[c] += left.error[c] + right.error[c] - worst.error[c];
    }
    res.evaluations += 30;
    ++res.intervals;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum from the leaves so the result does not carry update round-off.
  std::array<double, N> value{}, error{};
  std::vector<detail::Interval<N>> leaves;
  leaves.reserve(heap.size());
  while (!heap.empty()) {
    leaves.push_back(heap.top());
    heap.pop();
  }
  std::sort(leaves.begin(), leaves.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  for (const auto& leaf : leaves)
    for (std::size_t c = 0; c < N; ++c) {
      value[c] += leaf.value[c];
      error[c] += leaf.error[c];
    }
  res.value = value;
  res.error = error;
  res.converged = true;
  return res;
}

}  // namespace hmm
