#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace zerodist::poly {

template <class Scalar>
using Coefficients = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// p(z) and p'(z) by Horner; coefficients lowest degree first.
template <class Scalar>
std::pair<std::complex<Scalar>, std::complex<Scalar>> horner(const Coefficients<Scalar>& c,
                                                             std::complex<Scalar> z) {
  std::complex<Scalar> p = c[c.size() - 1];
  std::complex<Scalar> dp = 0;
  for (Eigen::Index k = c.size() - 2; k >= 0; --k) {
    dp = dp * z + p;
    p = p * z + c[k];
  }
  return {p, dp};
}

/// sum_k |c_k| |z|^k: the magnitude floor for rounding error in p(z).
template <class Scalar>
Scalar absolute_value_bound(const Coefficients<Scalar>& c, Scalar radius) {
  Scalar s = 0;
  for (Eigen::Index k = c.size() - 1; k >= 0; --k) s = s * radius + std::abs(c[k]);
  return s;
}

/// Drops trailing coefficients below threshold * max|c_k|.
template <class Scalar>
Coefficients<Scalar> trim(const Coefficients<Scalar>& c, Scalar threshold) {
  const Scalar scale = c.cwiseAbs().maxCoeff();
  Eigen::Index size = c.size();
  while (size > 1 && std::abs(c[size - 1]) <= threshold * scale) --size;
  return c.head(size);
}

/// Newton step p/p' evaluated stably for any |z|: for |z| > 1 the reversed
/// polynomial q(y) = y^d p(1/y) is used so degree-d powers never overflow.
template <class Scalar>
std::complex<Scalar> newton_ratio(const Coefficients<Scalar>& c,
                                  const Coefficients<Scalar>& reversed,
                                  std::complex<Scalar> z) {
  using C = std::complex<Scalar>;
  if (std::abs(z) <= Scalar(1)) {
    const auto [p, dp] = horner(c, z);
    return p / dp;
  }
  const Eigen::Index degree = c.size() - 1;
  const C y = Scalar(1) / z;
  const auto [q, dq] = horner(reversed, y);
  // p'/p = y (d - y q'/q)
  return Scalar(1) / (y * (static_cast<Scalar>(degree) - y * dq / q));
}

/// |p(z)| / sum |c_k||z|^k, evaluated in 1/z for |z| > 1.
template <class Scalar>
Scalar backward_error(const Coefficients<Scalar>& c, const Coefficients<Scalar>& reversed,
                      std::complex<Scalar> z) {
  const Scalar r = std::abs(z);
  if (r <= 1) return std::abs(horner(c, z).first) / absolute_value_bound(c, r);
  const std::complex<Scalar> y = Scalar(1) / z;
  return std::abs(horner(reversed, y).first) / absolute_value_bound(reversed, Scalar(1) / r);
}

/// Starting points on circles read off the upper convex hull of
/// (k, log|c_k|), one circle per hull edge (the Newton polygon). Expects
/// c_0 != 0.
template <class Scalar>
std::vector<std::complex<Scalar>> initial_guesses(const Coefficients<Scalar>& c) {
  const int degree = static_cast<int>(c.size()) - 1;
  std::vector<int> hull;
  std::vector<Scalar> logs(c.size());
  for (int k = 0; k <= degree; ++k)
    logs[k] = std::abs(c[k]) > 0 ? std::log(std::abs(c[k])) : -std::numeric_limits<Scalar>::infinity();
  for (int k = 0; k <= degree; ++k) {
    if (!std::isfinite(logs[k])) continue;
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2];
      const int b = hull.back();
      // remove b if it lies on or below the segment a -> k
      if ((logs[b] - logs[a]) * (k - a) <= (logs[k] - logs[a]) * (b - a))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(k);
  }
  std::vector<std::complex<Scalar>> guesses;
  guesses.reserve(degree);
  const Scalar offset = 0.4;
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const int lo = hull[h];
    const int hi = hull[h + 1];
    const int count = hi - lo;
    const Scalar radius = std::exp((logs[lo] - logs[hi]) / count);
    for (int i = 0; i < count; ++i) {
      const Scalar angle = 2 * std::numbers::pi_v<Scalar> * i / count + offset + Scalar(0.7) * h;
      guesses.push_back(std::polar(radius, angle));
    }
  }
  return guesses;
}

template <class Scalar>
struct AberthResult {
  std::vector<std::complex<Scalar>> roots;
  int iterations = 0;
  bool converged = false;
  Scalar worst_backward_error = 0;  // max |p(z)| / sum |c_k||z|^k
};

/// Ehrlich-Aberth simultaneous iteration (Gauss-Seidel updates). The
/// leading coefficient must be nonzero. Exact zero low-order coefficients
/// are deflated as roots at the origin. A root is frozen once its backward
/// error reaches a few units of roundoff times the degree.
template <class Scalar>
AberthResult<Scalar> aberth(const Coefficients<Scalar>& coefficients, int max_iterations = 500) {
  using C = std::complex<Scalar>;
  AberthResult<Scalar> result;
  Eigen::Index origin_roots = 0;
  while (origin_roots + 1 < coefficients.size() && coefficients[origin_roots] == C(0))
    ++origin_roots;
  const Coefficients<Scalar> c = coefficients.tail(coefficients.size() - origin_roots);
  const Coefficients<Scalar> reversed = c.reverse();
  const int degree = static_cast<int>(c.size()) - 1;
  auto& z = result.roots;
  if (degree < 1) {
    z.assign(origin_roots, C(0));
    result.converged = true;
    return result;
  }
  z = initial_guesses(c);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar stop = 4 * eps * (degree + 1);
  std::vector<bool> done(degree, false);
  auto backward = [&](C x) { return backward_error(c, reversed, x); };
  for (int iter = 1; iter <= max_iterations; ++iter) {
    result.iterations = iter;
    int active = 0;
    for (int i = 0; i < degree; ++i) {
      if (done[i]) continue;
      if (backward(z[i]) <= stop) {
        done[i] = true;
        continue;
      }
      ++active;
      const C ratio = newton_ratio(c, reversed, z[i]);
      C repulsion = 0;
      for (int j = 0; j < degree; ++j)
        if (j != i) repulsion += Scalar(1) / (z[i] - z[j]);
      const C step = ratio / (Scalar(1) - ratio * repulsion);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[i] -= step;
      if (std::abs(step) <= eps * std::abs(z[i])) done[i] = true;
    }
    if (active == 0) {
      result.converged = true;
      break;
    }
  }
  for (const C& x : z) result.worst_backward_error = std::max(result.worst_backward_error, backward(x));
  if (!result.converged) result.converged = result.worst_backward_error <= stop;
  z.insert(z.end(), origin_roots, C(0));
  return result;
}

}  // namespace zerodist::poly
