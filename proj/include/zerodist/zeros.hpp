#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zerodist/ensemble.hpp"

namespace zerodist {

struct Zero {
  Complex location;
  int multiplicity = 1;
  double residual = 0.0;     // |G(location)|
  bool near_origin = false;  // |z| < 1e-12 r; excluded from counting measures
};

enum class ZeroMethod { polynomial, argument_principle };

/// Zeros of one sample inside the open disk |z| < radius.
struct ZeroSet {
  std::vector<Zero> zeros;
  double radius = 0.0;
  ZeroMethod method = ZeroMethod::polynomial;
  double residual = 0.0;  // max |G(z*)| over reported zeros
  double scale = 0.0;     // max |G| sampled on |z| = radius
  int disk_count = -1;    // argument-principle count on the boundary; -1 if unchecked

  int total_multiplicity() const;
};

/// Closed axis-aligned rectangle [x0, x1] x [y0, y1].
struct Box {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  Complex center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(Complex z, double slack = 0.0) const {
    return z.real() >= x0 - slack && z.real() <= x1 + slack && z.imag() >= y0 - slack &&
           z.imag() <= y1 + slack;
  }
};

/// Returns (G(z), G'(z)).
using AnalyticFunction = std::function<std::pair<Complex, Complex>(Complex)>;

AnalyticFunction as_analytic(const SampledFunction& sample);
AnalyticFunction as_analytic(const Eigen::VectorXcd& coefficients);

/// Monomial coefficients of G_n when every basis function is a polynomial,
/// otherwise std::nullopt. Throws ErrorKind::degree_overflow past max_degree.
std::optional<Eigen::VectorXcd> to_polynomial(const SampledFunction& sample,
                                              int max_degree = 10000);

/// All roots by Ehrlich-Aberth, kept when |z| < r. Roots closer than
/// 1e-8 r are merged into one zero with multiplicity. Throws
/// ErrorKind::nonconvergence (with the worst residual) after 500 sweeps
/// and ErrorKind::degenerate for the zero polynomial.
ZeroSet find_zeros_polynomial(const Eigen::VectorXcd& coefficients, double r, double tol);

struct CountOptions {
  double quadrature_tolerance = 1e-6;  // absolute, per contour piece
  int max_intervals = 4000;
  int max_dilations = 8;
  std::uint64_t seed = 0;  // stream for the random dilation factors
};

/// Winding number (1/2 pi i) \oint G'/G dz around the box, by adaptive
/// Gauss-Kronrod on each edge. If a zero sits on (or numerically at) the
/// boundary the box is dilated by a random factor in [1e-6, 1e-5] and
/// retried. Throws boundary_zero_unresolvable / quadrature_nonconvergence.
int count_zeros_argument(const AnalyticFunction& g, const Box& box,
                         const CountOptions& options = {});
int count_zeros_argument(const SampledFunction& sample, const Box& box,
                         const CountOptions& options = {});

/// Count on the circle |z| = radius. On boundary trouble the radius shrinks
/// by a random factor in [1e-6, 1e-5]; the radius actually used is returned.
std::pair<int, double> count_zeros_disk(const AnalyticFunction& g, double radius,
                                        const CountOptions& options = {});

/// Quadtree subdivision of the disk's bounding square driven by
/// argument-principle counts, with Newton polishing in terminal boxes.
/// Throws ErrorKind::count_mismatch (listing boxes) if the subdivision total
/// disagrees with the whole-disk count.
ZeroSet find_zeros_entire(const SampledFunction& sample, double r, double tol,
                          const CountOptions& options = {});

/// Polynomial path when the basis is polynomial, else the subdivision path;
/// either way the multiplicity total is cross-checked against the disk count.
ZeroSet find_zeros(const SampledFunction& sample, double r, double tol = 1e-10,
                   const CountOptions& options = {});

/// Symmetric Hausdorff distance between two zero multisets (multiplicities
/// expanded). Infinite when exactly one side is empty.
double hausdorff_distance(const ZeroSet& a, const ZeroSet& b);

/// CSV rows: re,im,multiplicity,residual.
void write_csv(std::ostream& out, const ZeroSet& zeros);

}  // namespace zerodist
