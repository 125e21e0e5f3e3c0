#include <cmath>
#include <random>

#include "doctest.h"
#include "zerodist/basis.hpp"
#include "zerodist/error.hpp"
#include "zerodist/parse.hpp"

using namespace zerodist;
using namespace std::complex_literals;

namespace {

const Expr z = Expr::variable();

Expr c(Complex v) { return Expr::constant(v); }

// Random trees over the full grammar, kept shallow so values stay moderate
// on |z| <= 2.
Expr random_expr(std::mt19937_64& gen, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  switch (pick(gen)) {
    case 0: return c({u(gen), u(gen)});
    case 1: return z;
    case 2: return random_expr(gen, depth - 1) + random_expr(gen, depth - 1);
    case 3: return random_expr(gen, depth - 1) * random_expr(gen, depth - 1);
    case 4: return Expr::power(random_expr(gen, depth - 1), std::uniform_int_distribution<int>(0, 3)(gen));
    default: return Expr::exp(c(0.5 * u(gen)) * random_expr(gen, depth - 1));
  }
}

std::vector<Complex> random_points(std::mt19937_64& gen, int count, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<Complex> out;
  while (static_cast<int>(out.size()) < count) {
    const Complex p(u(gen), u(gen));
    if (std::abs(p) <= radius) out.push_back(p);
  }
  return out;
}

}  // namespace

TEST_CASE("eval follows each node kind") {
  CHECK(eval(z, 2.0 + 1i) == 2.0 + 1i);
  CHECK(eval(Expr::exp(z), 0.0) == Complex(1.0));
  CHECK(std::abs(eval(z * z + c(1.0), 1i)) == doctest::Approx(0.0));
  CHECK(eval(Expr::power(z + c(1.0), 3), 1.0) == Complex(8.0));
}

TEST_CASE("eval reports overflow with the offending point") {
  const Expr big = Expr::exp(Expr::exp(z));
  try {
    eval(big, 10.0);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::evaluation_overflow);
    CHECK(std::string(e.what()).find("z=10") != std::string::npos);
  }
}

TEST_CASE("differentiate examples") {
  CHECK(eval(differentiate(Expr::power(z, 2)), 3.0) == Complex(6.0));
  CHECK(eval(differentiate(Expr::exp(c(2.0) * z)), 0.0) == Complex(2.0));
  CHECK(differentiate(c(5.0 + 2i)).is_constant(0.0));
  CHECK(differentiate(z).is_constant(1.0));
}

TEST_CASE("differentiate agrees with central differences on random trees") {
  std::mt19937_64 gen(20240611);
  for (int trial = 0; trial < 200; ++trial) {
    const Expr e = random_expr(gen, 3);
    const auto points = random_points(gen, 100, 2.0);
    CHECK_MESSAGE(derivative_check(e, points, 1e-6) <= 1e-6, e.to_string());
  }
}

TEST_CASE("norm_squared examples") {
  CHECK(norm_squared(BasisSystem({z}), 2.0) == doctest::Approx(4.0));
  CHECK(norm_squared(BasisSystem({z, c(1.0)}), 1i) == doctest::Approx(2.0));
  CHECK(norm_squared(BasisSystem({Expr::exp(z)}), 1.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
}

TEST_CASE("laplacian_log_norm examples") {
  CHECK(laplacian_log_norm(BasisSystem({z}), 0.7 - 0.2i) == 0.0);
  CHECK(laplacian_log_norm(BasisSystem({Expr::exp(z)}), 1.5 + 3i) == 0.0);
  const BasisSystem pair({z, c(1.0)});
  CHECK(laplacian_log_norm(pair, 0.0) == doctest::Approx(1.0));
  for (const Complex p : {0.5 + 0.5i, Complex(1.0), -1.3 + 0.2i}) {
    const double s = 1.0 + std::norm(p);
    CHECK(laplacian_log_norm(pair, p) == doctest::Approx(1.0 / (s * s)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(laplacian_log_norm(BasisSystem({z, z * z}), 0.0), Error);
}

TEST_CASE("laplacian_log_norm is nonnegative and vanishes for a single function") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 50; ++trial) {
    const BasisSystem multi({random_expr(gen, 2), random_expr(gen, 2), random_expr(gen, 2)});
    const BasisSystem single({random_expr(gen, 3)});
    for (const Complex p : random_points(gen, 20, 2.0)) {
      if (norm_squared(multi, p) > 0) CHECK(laplacian_log_norm(multi, p) >= -1e-12);
      if (norm_squared(single, p) > 1e-6) CHECK(laplacian_log_norm(single, p) <= 1e-10);
    }
  }
}

TEST_CASE("polynomial coefficients of basis expressions") {
  const auto p = polynomial_coefficients(Expr::power(z + c(1.0), 2) + c(2i) * z);
  REQUIRE(p.has_value());
  REQUIRE(p->size() == 3);
  CHECK((*p)[0] == Complex(1.0));
  CHECK((*p)[1] == 2.0 + 2i);
  CHECK((*p)[2] == Complex(1.0));
  CHECK_FALSE(polynomial_coefficients(Expr::exp(z)).has_value());
  CHECK(polynomial_coefficients(Expr::exp(c(0.0)) * z).has_value());
  CHECK_THROWS_AS(polynomial_coefficients(Expr::power(z, 20000)), Error);
  CHECK(BasisSystem({z, c(1.0)}).is_polynomial());
  CHECK_FALSE(BasisSystem({z, Expr::exp(z)}).is_polynomial());
}

TEST_CASE("parser reads the basis mini-language") {
  CHECK(eval(parse_expression("z"), 3.0 + 1i) == 3.0 + 1i);
  CHECK(eval(parse_expression("2+3i"), 0.0) == 2.0 + 3i);
  CHECK(eval(parse_expression("(1+i)*z^2 + exp(2*z)"), 0.0) == Complex(1.0));
  CHECK(std::abs(eval(parse_expression("z^3 - 1"), std::polar(1.0, 2 * M_PI / 3))) < 1e-15);
  CHECK(eval(parse_expression("2z"), 1.5) == Complex(3.0));
  CHECK(eval(parse_expression("-z + 1e-3"), 1.0) == Complex(-0.999));
  CHECK(eval(parse_expression("exp(z)"), 1.0) == Complex(std::exp(1.0)));

  const BasisSystem kac = parse_basis("z\n");
  CHECK(kac.size() == 1);
  const BasisSystem pair = parse_basis("# a comment\nz\n\n1\n");
  CHECK(pair.size() == 2);
}

TEST_CASE("parse errors name line and column") {
  try {
    parse_basis("z\nz + * 2\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parse_error);
    CHECK(std::string(e.what()).find("line 2, column 5") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_expression("exp z"), Error);
  CHECK_THROWS_AS(parse_expression("z^-1"), Error);
  CHECK_THROWS_AS(parse_expression("(z"), Error);
  CHECK_THROWS_AS(parse_expression("w"), Error);
  CHECK_THROWS_AS(parse_basis("# nothing\n"), Error);
}

TEST_CASE("printed expressions parse back to the same function") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Expr e = random_expr(gen, 3);
    const Expr back = parse_expression(e.to_string());
    for (const Complex p : random_points(gen, 5, 1.5)) {
      const Complex a = eval(e, p);
      CHECK_MESSAGE(std::abs(a - eval(back, p)) <= 1e-12 * (1.0 + std::abs(a)), e.to_string());
    }
  }
}
