#include "zerodist/lemmas.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "zerodist/error.hpp"
#include "zerodist/quadrature.hpp"

namespace zerodist {

namespace {

// 1/(4 sinh^2(t/2)) = e^{-|t|} / (1 - e^{-|t|})^2, the second derivative of
// -log|1 - e^t|.
double inverse_sinh_squared(double t) {
  const double a = std::abs(t);
  const double d = std::expm1(-a);
  return std::exp(-a) / (d * d);
}

// Mean and variance of j under p_j proportional to e^{jx}, j = 0..n; used
// where (n + 1)|x| < 1 so the weights stay within [e^-1, e].
std::pair<double, double> tilted_moments(int n, double x) {
  double z = 0.0, first = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double w = std::exp(j * x);
    z += w;
    first += j * w;
  }
  const double mean = first / z;
  double var = 0.0;
  for (int j = 0; j <= n; ++j) var += std::exp(j * x) * (j - mean) * (j - mean);
  return {mean, var / z};
}

void require_n(int n) {
  if (n < 1) throw Error(ErrorKind::invalid_config, "n must be at least 1");
}

double grid_probe(int n, const std::function<double(Complex)>& phi, double half_width, int points,
                  const std::optional<Expr>& g) {
  const double h = 2 * half_width / (points - 1);
  auto node = [&](int i, int j) { return Complex(-half_width + i * h, -half_width + j * h); };
  std::vector<double> f(static_cast<std::size_t>(points) * points);
  for (int j = 0; j < points; ++j)
    for (int i = 0; i < points; ++i) {
      const Complex z = node(i, j);
      const Complex gz = g ? eval(*g, z) : z;
      f[static_cast<std::size_t>(j) * points + i] = log_geometric_sum(n, std::norm(gz));
    }
  auto at = [&](int i, int j) { return f[static_cast<std::size_t>(j) * points + i]; };
  double total = 0.0;
  for (int j = 1; j + 1 < points; ++j)
    for (int i = 1; i + 1 < points; ++i) {
      const double p = phi(node(i, j));
      if (p == 0.0) continue;
      // h^2 cancels against the stencil's 1/h^2.
      const double lap = at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - 4 * at(i, j);
      total += lap * p;
    }
  return total / (4 * std::numbers::pi * n);
}

}  // namespace

double kernel_1d(int n, double x) {
  require_n(n);
  const double m = n + 1.0;
  if (m * std::abs(x) < 1.0) return tilted_moments(n, x).second / n;
  const double value = inverse_sinh_squared(x) - m * m * inverse_sinh_squared(m * x);
  return std::max(0.0, value) / n;
}

double kernel_1d_cumulative(int n, double x) {
  require_n(n);
  const double m = n + 1.0;
  if (m * std::abs(x) < 1.0) return tilted_moments(n, x).first / n;
  return (m / -std::expm1(-m * x) - 1.0 / -std::expm1(-x)) / n;
}

double lemma1_pair(const KernelProbe& probe) {
  require_n(probe.n);
  const double outside = 1.0 - (kernel_1d_cumulative(probe.n, probe.b) -
                                kernel_1d_cumulative(probe.n, probe.a));
  if (outside > 1e-4) {
    std::ostringstream os;
    os << "kernel mass " << outside << " lies outside [" << probe.a << ", " << probe.b << "]";
    throw Error(ErrorKind::quadrature_domain_too_small, os.str());
  }
  if (!probe.phi) return 0.0;
  // Simpson in u with x = c sinh(u), c = 1/(n+1): uniform nodes in u put
  // spacing ~c at the kernel's core and ~|x| du in its 1/x^2 tails.
  const double c = 1.0 / (probe.n + 1.0);
  auto integrand = [&](double u) {
    const double x = c * std::sinh(u);
    return kernel_1d(probe.n, x) * probe.phi(x) * c * std::cosh(u);
  };
  return quadrature::simpson(integrand, std::asinh(probe.a / c), std::asinh(probe.b / c),
                             probe.intervals);
}

double radial_derivative(int n, double r) {
  require_n(n);
  if (!(r > 0.0)) throw Error(ErrorKind::domain_error, "radius must be positive");
  if (r == 1.0) return 1.0;
  const double m = n + 1.0;
  if (std::abs(2 * m * std::log(r)) < 1.0) {
    double sum = 0.0, deriv = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double w = std::pow(r, 2 * k);
      sum += w;
      deriv += 2.0 * k * w / r;
    }
    return deriv / sum / n;
  }
  const double tail = 2 * r / (1 - r * r);
  if (r < 1.0) return (-(2 * m) * std::pow(r, 2 * n + 1) / -std::expm1(2 * m * std::log(r)) + tail) / n;
  return ((2 * m) / (r * -std::expm1(-2 * m * std::log(r))) + tail) / n;
}

double log_geometric_sum(int n, double s) {
  if (s == 0.0) return 0.0;
  const double l = std::log(s);
  const double m = n + 1.0;
  if (l == 0.0) return std::log(m);
  if (l < 0.0) return std::log(std::expm1(m * l) / std::expm1(l));
  return n * l + std::log(std::expm1(-m * l) / std::expm1(-l));
}

double lemma2_circle_probe(int n, const std::function<double(Complex)>& phi, const ProbeGrid& grid,
                           const std::optional<Expr>& g) {
  require_n(n);
  if (grid.points < 5) throw Error(ErrorKind::invalid_config, "probe grid needs at least 5 points per side");
  const double coarse = grid_probe(n, phi, grid.half_width, grid.points, g);
  const double fine = grid_probe(n, phi, grid.half_width, 2 * grid.points - 1, g);
  if (std::abs(fine - coarse) > 0.05 * std::max(std::abs(fine), 1e-12)) {
    std::ostringstream os;
    os << "halving the spacing moved the probe from " << coarse << " to " << fine;
    throw Error(ErrorKind::grid_too_coarse, os.str());
  }
  return fine;
}

double LemmaRow::gap() const { return std::abs(value - target); }

void write_csv(std::ostream& out, const std::vector<LemmaRow>& rows) {
  out << "lemma,n,parameter,value,target,gap\n";
  out.precision(17);
  for (const auto& r : rows)
    out << r.lemma << ',' << r.n << ',' << r.parameter << ',' << r.value << ',' << r.target << ','
        << r.gap() << '\n';
}

}  // namespace zerodist
