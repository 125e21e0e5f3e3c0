#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zerodist/basis.hpp"

namespace zerodist {

/// (1/n) d^2/dx^2 log sum_{j=0}^n e^{jx}. Nonnegative, integrates to 1.
double kernel_1d(int n, double x);

/// (1/n) d/dx log sum_{j=0}^n e^{jx}, the kernel's antiderivative.
double kernel_1d_cumulative(int n, double x);

struct KernelProbe {
  int n = 1;
  double a = -10.0, b = 10.0;
  int intervals = 8192;  // composite Simpson panels, even
  std::function<double(double)> phi;
};

/// Simpson quadrature of kernel_1d(n, .) phi over [a, b], on nodes graded
/// toward the origin at the kernel's 1/n scale. Throws
/// ErrorKind::quadrature_domain_too_small when the kernel mass outside
/// [a, b] exceeds 1e-4.
double lemma1_pair(const KernelProbe& probe);

/// (1/n) d/dr log sum_{k=0}^n r^{2k}; exactly 1 at r = 1.
double radial_derivative(int n, double r);

/// Square window [-half_width, half_width]^2 with `points` nodes per side.
struct ProbeGrid {
  double half_width = 2.0;
  int points = 401;
};

/// (1/n)(1/4 pi) sum over interior nodes of Delta_h F(z) phi(z) h^2, where
/// F = log sum_{k=0}^n |g(z)|^{2k} and Delta_h is the five-point Laplacian;
/// g is the identity when no expression is given. The value on the given
/// grid is compared with the grid of half the spacing, which is returned;
/// throws ErrorKind::grid_too_coarse when they differ by more than 5%.
double lemma2_circle_probe(int n, const std::function<double(Complex)>& phi, const ProbeGrid& grid,
                           const std::optional<Expr>& g = std::nullopt);

/// log sum_{k=0}^n s^k for s >= 0 without overflow.
double log_geometric_sum(int n, double s);

struct LemmaRow {
  std::string lemma;
  int n = 0;
  double parameter = 0.0;
  double value = 0.0;
  double target = 0.0;
  double gap() const;
};

/// CSV rows: lemma,n,parameter,value,target,gap.
void write_csv(std::ostream& out, const std::vector<LemmaRow>& rows);

}  // namespace zerodist
