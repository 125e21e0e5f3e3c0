#pragma once

#include <string>

#include "zerodist/basis.hpp"

namespace zerodist {

/// Bounded test function on the plane, supported in |z| <= radius.
struct TestFunction {
  enum class Kind { constant, radial_bump, sector, annulus, gaussian };

  Kind kind = Kind::constant;
  double radius = 1.0;  // support radius
  double a = 0.0;       // sector: start angle; annulus: inner radius
  double b = 0.0;       // sector: end angle;   annulus: outer radius
  Complex center = 0.0;
  double sigma = 1.0;

  static TestFunction constant(double radius);
  /// exp(1 - 1/(1 - (|z|/radius)^2)), equal to 1 at the origin.
  static TestFunction radial_bump(double radius);
  /// Indicator of arg z in [theta0, theta1) (mod 2 pi) within |z| < radius.
  static TestFunction sector(double theta0, double theta1, double radius);
  /// Indicator of inner <= |z| < outer, clipped to |z| < radius.
  static TestFunction annulus(double inner, double outer, double radius);
  /// exp(-|z - center|^2 / (2 sigma^2)) truncated to |z| < radius.
  static TestFunction gaussian(Complex center, double sigma, double radius);

  double operator()(Complex z) const;
  std::string name() const;
};

/// Annular-sector grid over 0 < |z| < radius.
struct BinGrid {
  int radial = 40;
  int angular = 24;
  double radius = 1.0;

  int size() const { return radial * angular; }
  /// Flat index radial_bin * angular + angular_bin, or -1 outside the disk.
  int index(Complex z) const;
};

}  // namespace zerodist
