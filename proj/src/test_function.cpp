#include "zerodist/test_function.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace zerodist {

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

double wrap_angle(double theta) {
  theta = std::fmod(theta, two_pi);
  return theta < 0 ? theta + two_pi : theta;
}

}  // namespace

TestFunction TestFunction::constant(double radius) {
  TestFunction f;
  f.kind = Kind::constant;
  f.radius = radius;
  return f;
}

TestFunction TestFunction::radial_bump(double radius) {
  TestFunction f;
  f.kind = Kind::radial_bump;
  f.radius = radius;
  return f;
}

TestFunction TestFunction::sector(double theta0, double theta1, double radius) {
  TestFunction f;
  f.kind = Kind::sector;
  f.a = theta0;
  f.b = theta1;
  f.radius = radius;
  return f;
}

TestFunction TestFunction::annulus(double inner, double outer, double radius) {
  TestFunction f;
  f.kind = Kind::annulus;
  f.a = inner;
  f.b = outer;
  f.radius = radius;
  return f;
}

TestFunction TestFunction::gaussian(Complex center, double sigma, double radius) {
  TestFunction f;
  f.kind = Kind::gaussian;
  f.center = center;
  f.sigma = sigma;
  f.radius = radius;
  return f;
}

double TestFunction::operator()(Complex z) const {
  const double m = std::abs(z);
  if (!(m < radius)) return 0.0;
  switch (kind) {
    case Kind::constant:
      return 1.0;
    case Kind::radial_bump: {
      const double t = m / radius;
      return std::exp(1.0 - 1.0 / (1.0 - t * t));
    }
    case Kind::sector: {
      const double width = b - a;
      if (width >= two_pi) return 1.0;
      return wrap_angle(std::arg(z) - a) < width ? 1.0 : 0.0;
    }
    case Kind::annulus:
      return m >= a && m < b ? 1.0 : 0.0;
    case Kind::gaussian:
      return std::exp(-std::norm(z - center) / (2 * sigma * sigma));
  }
  return 0.0;
}

std::string TestFunction::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::constant: os << "constant(r=" << radius << ")"; break;
    case Kind::radial_bump: os << "radial_bump(r=" << radius << ")"; break;
    case Kind::sector: os << "sector(" << a << "," << b << ";r=" << radius << ")"; break;
    case Kind::annulus: os << "annulus(" << a << "," << b << ";r=" << radius << ")"; break;
    case Kind::gaussian:
      os << "gaussian(" << center.real() << "," << center.imag() << ";s=" << sigma
         << ";r=" << radius << ")";
      break;
  }
  return os.str();
}

int BinGrid::index(Complex z) const {
  const double m = std::abs(z);
  if (!(m > 0.0 && m < radius)) return -1;
  const int ri = std::min(radial - 1, static_cast<int>(m / radius * radial));
  const int ai = std::min(angular - 1, static_cast<int>(wrap_angle(std::arg(z)) / two_pi * angular));
  return ri * angular + ai;
}

}  // namespace zerodist
