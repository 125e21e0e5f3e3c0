#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <vector>

namespace zerodist::quadrature {

template <class Value>
struct Result {
  Value value{};
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class Value>
struct Segment {
  double a, b;
  Value value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class Value>
double magnitude(const Value& v) {
  using std::abs;
  return abs(v);
}

template <class Value, class F>
Segment<Value> gauss_kronrod_15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const Value fc = f(center);
  Value kronrod = fc * kronrod_weights[7];
  Value gauss = fc * gauss_weights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kronrod_nodes[i];
    const Value sum = f(center - dx) + f(center + dx);
    kronrod += sum * kronrod_weights[i];
    if (i % 2 == 1) gauss += sum * gauss_weights[i / 2];
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, magnitude(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b]:
/// the interval with the largest error estimate is bisected until the total
/// estimate falls below max(abs_tol, rel_tol * |I|) or max_intervals is hit.
template <class Value, class F>
Result<Value> integrate(const F& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                        int max_intervals = 2000) {
  std::priority_queue<detail::Segment<Value>> heap;
  auto first = detail::gauss_kronrod_15<Value>(f, a, b);
  Value total = first.value;
  double error = first.error;
  heap.push(first);
  int intervals = 1;
  while (error > std::max(abs_tol, rel_tol * detail::magnitude(total))) {
    if (intervals >= max_intervals || !std::isfinite(error)) {
      return {total, error, intervals, false};
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gauss_kronrod_15<Value>(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_15<Value>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum to shed the drift of the incremental updates.
  Value sum{};
  double err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {sum, err, intervals, true};
}

/// Composite Simpson rule on `intervals` (rounded up to even) subintervals.
template <class F>
double simpson(const F& f, double a, double b, int intervals) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

}  // namespace zerodist::quadrature
