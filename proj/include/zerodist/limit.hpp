#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "zerodist/basis.hpp"
#include "zerodist/test_function.hpp"
#include "zerodist/zeros.hpp"

namespace zerodist {

/// Gate 2/x for x > 1, 1 at x = 1, 0 below.
double xi(double x);

/// Density of the absolutely continuous part with respect to area:
/// |f| xi(|f|) Q / (2 pi), i.e. Q/pi where S > 1 and 0 where S < 1.
/// Throws ErrorKind::domain_error where S = 0.
double ac_density(const BasisSystem& basis, Complex z);

struct CurveSegment {
  Complex a, b;  // oriented so the argument form is nonnegative
  double weight = 0.0;
  bool degenerate = false;  // a cell corner had |f'| < 1e-8
  int component = -1;
};

enum class CurveNormalization { two_pi, paper_literal };

/// Marching squares on S - 1 over resolution x resolution cells. Nodes with
/// S < 1 are inside; segments keep the inside on their left.
std::vector<CurveSegment> extract_level_curve(const BasisSystem& basis, const Box& window,
                                              int resolution);

/// Per segment with midpoint zeta and chord tau:
/// |sum_j Im(conj(f_j(zeta)) f_j'(zeta) tau)| / (2 pi), the 1/(2 pi) dropped
/// for paper_literal. Components are reoriented so their signed total is
/// nonnegative; degenerate segments weigh 0.
std::vector<CurveSegment> curve_weights(std::vector<CurveSegment> segments,
                                        const BasisSystem& basis,
                                        CurveNormalization normalization = CurveNormalization::two_pi);

struct LimitMeasure {
  std::shared_ptr<const BasisSystem> basis;
  Box window;
  double r = 0.0;
  int resolution = 0;
  CurveNormalization normalization = CurveNormalization::two_pi;
  Eigen::MatrixXd density;  // cell-centre ac density, density(iy, ix)
  std::vector<CurveSegment> curve;

  double cell_width() const { return window.width() / resolution; }
  double cell_height() const { return window.height() / resolution; }
  Complex cell_center(int ix, int iy) const;
  double curve_mass() const;
};

LimitMeasure build_limit(std::shared_ptr<const BasisSystem> basis, const Box& window, double r,
                         int resolution,
                         CurveNormalization normalization = CurveNormalization::two_pi);

/// Integral of log(r/|z|) phi against the limit measure over |z| < r.
/// Throws ErrorKind::window_too_small unless the window covers the closed disk.
double limit_pairing(const LimitMeasure& limit, const TestFunction& phi, double r);

/// Integral of phi against the limit measure itself, over the window; n times
/// this predicts the expected number of zeros weighted by phi.
double limit_mass(const LimitMeasure& limit, const std::function<double(Complex)>& phi);

/// log(r/|z|)-weighted limit mass of every bin of the grid.
std::vector<double> limit_bin_masses(const LimitMeasure& limit, const BinGrid& grid);

/// CSV dumps: x,y,density and x0,y0,x1,y1,weight,degenerate.
void write_density_csv(std::ostream& out, const LimitMeasure& limit);
void write_curve_csv(std::ostream& out, const LimitMeasure& limit);

/// Curve plus a scatter of zero locations, in window coordinates.
void write_svg(std::ostream& out, const LimitMeasure& limit, std::span<const Complex> zeros);

}  // namespace zerodist
