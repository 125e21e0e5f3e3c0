#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "zerodist/error.hpp"
#include "zerodist/limit.hpp"
#include "zerodist/parse.hpp"

using namespace zerodist;
using namespace std::complex_literals;

namespace {

std::shared_ptr<const BasisSystem> basis_of(const char* text) {
  return std::make_shared<const BasisSystem>(parse_basis(text));
}

double arclength(const std::vector<CurveSegment>& segments) {
  double total = 0.0;
  for (const auto& s : segments) total += std::abs(s.b - s.a);
  return total;
}

const Box square2{-2, 2, -2, 2};

}  // namespace

TEST_CASE("xi gate") {
  CHECK(xi(2.0) == 1.0);
  CHECK(xi(1.0) == 1.0);
  CHECK(xi(0.5) == 0.0);
  CHECK(xi(0.0) == 0.0);
  CHECK(xi(4.0) == 0.5);
}

TEST_CASE("ac_density examples") {
  const auto kac = basis_of("z");
  for (const Complex z : {0.3 + 0i, 1.5 - 2i, -0.1 + 0.9i}) CHECK(ac_density(*kac, z) == 0.0);
  const auto pair = basis_of("z\n1");
  CHECK(ac_density(*pair, 1.0) == doctest::Approx(1.0 / (4 * std::numbers::pi)).epsilon(1e-14));
  CHECK(ac_density(*pair, 0.1) == doctest::Approx(1.0 / std::numbers::pi / (1.01 * 1.01)).epsilon(1e-14));
  CHECK(ac_density(*pair, 0.1) == doctest::Approx(0.3120).epsilon(1e-3));
  CHECK_THROWS_AS(ac_density(*kac, 0.0), Error);
}

TEST_CASE("ac_density gate and formula on a grid") {
  const auto basis = basis_of("z\n0.5*exp(z)\n0.3");
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) {
      const Complex z(-2 + 0.1 * i, -2 + 0.1 * j);
      const double s = norm_squared(*basis, z);
      const double d = ac_density(*basis, z);
      if (s < 1) CHECK(d == 0.0);
      if (s > 1) CHECK(std::abs(d - laplacian_log_norm(*basis, z) / std::numbers::pi) <= 1e-12);
      CHECK(d >= 0.0);
    }
}

TEST_CASE("unit circle from f = z") {
  const auto kac = basis_of("z");
  const auto raw = extract_level_curve(*kac, square2, 512);
  CHECK(std::abs(arclength(raw) - 2 * std::numbers::pi) < 0.01 * 2 * std::numbers::pi);
  for (const auto& s : raw) {
    CHECK(std::abs(std::abs(s.a) - 1.0) < 1e-3);
    CHECK_FALSE(s.degenerate);
    CHECK(s.component == 0);
  }
  const auto weighted = curve_weights(raw, *kac);
  double total = 0.0;
  for (const auto& s : weighted) {
    CHECK(s.weight >= 0.0);
    total += s.weight;
  }
  CHECK(std::abs(total - 1.0) < 0.01);
  // Counter-clockwise orientation: positive cross product about the origin.
  for (const auto& s : weighted) CHECK((std::conj(s.a) * s.b).imag() > 0.0);

  const auto literal = curve_weights(raw, *kac, CurveNormalization::paper_literal);
  double literal_total = 0.0;
  for (const auto& s : literal) literal_total += s.weight;
  CHECK(literal_total == doctest::Approx(2 * std::numbers::pi * total).epsilon(1e-12));
}

TEST_CASE("vertical line from f = exp(z)") {
  const auto e = basis_of("exp(z)");
  const Box window{-1, 1, -4, 4};
  const auto segments = curve_weights(extract_level_curve(*e, window, 64), *e);
  REQUIRE_FALSE(segments.empty());
  double weight = 0.0;
  for (const auto& s : segments) {
    CHECK(std::abs(s.a.real()) < 1e-9);
    CHECK(std::abs(s.b.real()) < 1e-9);
    // The line runs through grid nodes where S - 1 is roundoff; crumbs there
    // have no length and no weight.
    if (std::abs(s.b - s.a) > 1e-12) CHECK(s.b.imag() > s.a.imag());
    CHECK(s.weight == doctest::Approx(std::abs(s.b - s.a) / (2 * std::numbers::pi)).epsilon(1e-9));
    weight += s.weight;
  }
  CHECK(arclength(segments) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(weight == doctest::Approx(8.0 / (2 * std::numbers::pi)).epsilon(1e-9));
}

TEST_CASE("level set of f = (z, 1) is a point, not a curve") {
  const auto pair = basis_of("z\n1");
  for (int res : {16, 17, 64, 255}) {
    for (const auto& s : extract_level_curve(*pair, square2, res)) CHECK(s.degenerate);
  }
  CHECK(extract_level_curve(*pair, square2, 64).empty());
}

TEST_CASE("degenerate cells are flagged and weigh zero") {
  // f = z^2: the unit circle traversed twice in argument, f' = 2z away from 0.
  const auto sq = basis_of("z^2");
  const auto ok = curve_weights(extract_level_curve(*sq, square2, 128), *sq);
  for (const auto& s : ok) CHECK_FALSE(s.degenerate);
  double total = 0.0;
  for (const auto& s : ok) total += s.weight;
  CHECK(total == doctest::Approx(2.0).epsilon(0.01));

  // f = 1 + z^3 has f'(0) = 0 and S(0) = 1, so the curve passes a critical point.
  const auto flat = basis_of("1 + z^3");
  const auto segs = curve_weights(extract_level_curve(*flat, square2, 64), *flat);
  bool saw_degenerate = false;
  for (const auto& s : segs) {
    if (s.degenerate) {
      saw_degenerate = true;
      CHECK(s.weight == 0.0);
      CHECK(std::abs(0.5 * (s.a + s.b)) < 0.2);
    } else {
      CHECK(s.weight >= 0.0);
    }
  }
  CHECK(saw_degenerate);

  CHECK(curve_weights({{1.0, 1.0, 0.0, false, 0}}, *sq)[0].weight == 0.0);
}

TEST_CASE("limit pairing examples") {
  const auto kac = basis_of("z");
  const auto limit = build_limit(kac, square2, 2.0, 512);
  CHECK(limit.density.cwiseAbs().maxCoeff() == 0.0);
  CHECK(limit_pairing(limit, TestFunction::constant(2.0), 2.0) ==
        doctest::Approx(std::log(2.0)).epsilon(0.01));
  CHECK(limit_pairing(limit, TestFunction::constant(0.5), 2.0) == 0.0);
  CHECK(limit_pairing(limit, TestFunction::sector(0, std::numbers::pi / 6, 2.0), 2.0) ==
        doctest::Approx(std::log(2.0) / 12).epsilon(0.02));

  const auto small = build_limit(kac, {-1.5, 1.5, -2, 2}, 2.0, 64);
  try {
    limit_pairing(small, TestFunction::constant(2.0), 2.0);
    FAIL("expected window-too-small");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::window_too_small);
  }
}

TEST_CASE("limit pairing self-convergence for f = (z, 1)") {
  const auto pair = basis_of("z\n1");
  const double coarse = limit_pairing(build_limit(pair, square2, 2.0, 128), TestFunction::constant(2.0), 2.0);
  const double fine = limit_pairing(build_limit(pair, square2, 2.0, 512), TestFunction::constant(2.0), 2.0);
  CHECK(std::abs(coarse - fine) <= 0.02 * fine);
  // Radial closed form: 2 int_0^2 t log(2/t) / (1 + t^2)^2 dt = log(5)/2.
  CHECK(fine == doctest::Approx(std::log(5.0) / 2).epsilon(2e-3));
}

TEST_CASE("limit mass predicts zero counts on the exponential curve") {
  const auto e = basis_of("exp(z)");
  const auto limit = build_limit(e, {-1, 1, -4, 4}, 1.0, 256);
  const double band = limit_mass(limit, [](Complex z) {
    const double y = std::abs(z.imag());
    return y >= 1 && y <= 2 ? 1.0 : 0.0;
  });
  CHECK(band == doctest::Approx(2.0 / (2 * std::numbers::pi)).epsilon(1e-2));
}

TEST_CASE("limit dumps") {
  const auto kac = basis_of("z");
  const auto limit = build_limit(kac, square2, 2.0, 16);
  std::ostringstream density, curve, svg;
  write_density_csv(density, limit);
  write_curve_csv(curve, limit);
  const Complex pts[2] = {0.5, 1i};
  write_svg(svg, limit, pts);
  const std::string d = density.str(), c = curve.str();
  CHECK(d.rfind("x,y,density\n", 0) == 0);
  CHECK(std::count(d.begin(), d.end(), '\n') == 1 + 16 * 16);
  CHECK(c.rfind("x0,y0,x1,y1,weight,degenerate\n", 0) == 0);
  CHECK(std::count(c.begin(), c.end(), '\n') == 1 + static_cast<long>(limit.curve.size()));
  CHECK(svg.str().find("<svg") == 0);
  CHECK(svg.str().find("<circle") != std::string::npos);
}
