#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "zerodist/ensemble.hpp"
#include "zerodist/error.hpp"
#include "zerodist/parse.hpp"

using namespace zerodist;
using namespace std::complex_literals;

namespace {

std::shared_ptr<const BasisSystem> basis_of(const char* text) {
  return std::make_shared<const BasisSystem>(parse_basis(text));
}

}  // namespace

TEST_CASE("count_terms") {
  CHECK(count_terms(2, 3) == 15);
  for (int n = 0; n < 20; ++n) CHECK(count_terms(1, n) == static_cast<std::uint64_t>(n + 1));
  CHECK(count_terms(3, 0) == 1);
  CHECK(count_terms(2, 63) == ~std::uint64_t{0});
  CHECK_THROWS_AS(count_terms(2, 64), Error);
  CHECK_THROWS_AS(count_terms(0, 3), Error);
}

TEST_CASE("reduced representation term counts and weights") {
  const EnsembleSpec pair{basis_of("z\n1\n"), 3, 1};
  const auto tmpl = reduced_representation(pair);
  CHECK(tmpl.terms().size() == 10);
  CHECK(count_reduced_terms(2, 3) == 10);
  for (const auto& t : tmpl.terms()) {
    if (t.indices == std::vector<int>{1, 2}) CHECK(t.weight == doctest::Approx(std::sqrt(2.0)));
    if (t.indices == std::vector<int>{1, 1, 2}) CHECK(t.weight == doctest::Approx(std::sqrt(3.0)));
    CHECK(t.coefficient == Complex(0.0));
  }
  const EnsembleSpec kac{basis_of("z"), 7, 1};
  const auto k = reduced_representation(kac);
  CHECK(k.terms().size() == 8);
  for (const auto& t : k.terms()) CHECK(t.weight == 1.0);
  CHECK(count_reduced_terms(3, 4) == 35);
  const std::vector<int> alpha{2, 1, 1};
  CHECK(multinomial(alpha) == 12.0);
}

TEST_CASE("full sampler shapes") {
  const EnsembleSpec kac{basis_of("z"), 1, 42};
  const auto g = sample_full(kac, 0);
  REQUIRE(g.terms().size() == 2);
  CHECK(g.terms()[0].indices.empty());
  CHECK(g.terms()[1].indices == std::vector<int>{1});
  const Complex a0 = g.terms()[0].coefficient;
  const Complex a1 = g.terms()[1].coefficient;
  CHECK(std::abs(g.value(0.3 + 0.1i) - (a0 + a1 * (0.3 + 0.1i))) < 1e-15);

  const EnsembleSpec pair0{basis_of("z\n1"), 0, 42};
  CHECK(sample_full(pair0, 3).terms().size() == 1);

  const EnsembleSpec pair{basis_of("z\n1"), 3, 42};
  CHECK(sample_full(pair, 0).terms().size() == 15);
  const EnsembleSpec huge{basis_of("z\n1\nz^2"), 13, 42};
  try {
    sample_full(huge, 0);
    FAIL("expected a budget error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::term_budget_exceeded);
  }
}

TEST_CASE("complex Gaussian moments") {
  const EnsembleSpec spec{basis_of("z"), 0, 9};
  constexpr int draws = 100000;
  Complex mean = 0.0;
  double second = 0.0, fourth = 0.0;
  Complex pseudo = 0.0;
  for (int t = 0; t < draws; ++t) {
    const Complex a = sample_full(spec, t).terms()[0].coefficient;
    mean += a;
    second += std::norm(a);
    fourth += std::norm(a) * std::norm(a);
    pseudo += a * a;
  }
  mean /= draws;
  second /= draws;
  fourth /= draws;
  pseudo /= draws;
  // Var(Re a) = 1/2, so se(Re mean) = sqrt(0.5 / draws); Var|a|^2 = 1.
  const double se_mean = std::sqrt(0.5 / draws);
  CHECK(std::abs(mean.real()) < 4 * se_mean);
  CHECK(std::abs(mean.imag()) < 4 * se_mean);
  CHECK(std::abs(second - 1.0) < 4 * std::sqrt((fourth - second * second) / draws));
  CHECK(std::abs(pseudo) < 4 * std::sqrt(1.0 / draws) * 1.5);
}

TEST_CASE("sampling is deterministic per (seed, trial)") {
  const EnsembleSpec spec{basis_of("z\n1"), 4, 1234};
  const auto a = sample_reduced(spec, 17);
  const auto b = sample_reduced(spec, 17);
  const auto other = sample_reduced(spec, 18);
  REQUIRE(a.terms().size() == b.terms().size());
  bool differs = false;
  for (std::size_t i = 0; i < a.terms().size(); ++i) {
    CHECK(a.terms()[i].coefficient == b.terms()[i].coefficient);
    differs |= a.terms()[i].coefficient != other.terms()[i].coefficient;
  }
  CHECK(differs);
}

TEST_CASE("eval_G and its derivative") {
  const auto kac = basis_of("z");
  const SampledFunction g(kac, 1, SamplerForm::full, {{1.0, {}, 1.0}, {-1.0, {1}, 1.0}});
  const auto [v, d] = g.value_and_derivative(1.0);
  CHECK(std::abs(v) == 0.0);
  CHECK(d == Complex(-1.0));

  const SampledFunction zero(kac, 2, SamplerForm::full, {{0.0, {}, 1.0}, {0.0, {1}, 1.0}, {0.0, {1, 1}, 1.0}});
  CHECK(zero.value(0.4 - 2i) == Complex(0.0));

  // Derivative against central differences at 50 random points.
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (const char* text : {"z\n1", "z^2 + 1\nexp(z)", "exp(0.5*z)\nz\n2i"}) {
    const EnsembleSpec spec{basis_of(text), 4, 5};
    for (auto form : {SamplerForm::full, SamplerForm::reduced}) {
      const auto sample = zerodist::sample(spec, 0, form);
      for (int i = 0; i < 50; ++i) {
        const Complex p(u(gen), u(gen));
        const double h = 1e-6;
        const Complex fd = (sample.value(p + h) - sample.value(p - h)) / (2 * h);
        const Complex exact = sample.value_and_derivative(p).second;
        CHECK(std::abs(exact - fd) <= 1e-6 * (1.0 + std::abs(exact)));
      }
    }
  }
}

TEST_CASE("covariance kernel") {
  const auto kac = basis_of("z");
  CHECK(covariance({kac, 2}, 1.0, 1.0) == Complex(3.0));
  CHECK(covariance({kac, 2}, 2.0, 0.0) == Complex(1.0));
  const auto pair = basis_of("z\n1");
  CHECK(std::abs(covariance({pair, 1}, 1i, 1i) - 3.0) < 1e-15);

  // Hermitian, and the diagonal is sum_k S^k.
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const auto mixed = basis_of("z\nexp(z)\n0.5");
  const CovarianceKernel kernel{mixed, 6};
  for (int i = 0; i < 30; ++i) {
    const Complex p(u(gen), u(gen));
    const Complex q(u(gen), u(gen));
    const Complex kpq = covariance(kernel, p, q);
    const Complex kqp = covariance(kernel, q, p);
    CHECK(std::abs(kpq - std::conj(kqp)) <= 1e-12 * std::abs(kpq));
    const double s = norm_squared(*mixed, p);
    double diag = 0.0;
    for (int k = 0; k <= 6; ++k) diag += std::pow(s, k);
    const Complex kpp = covariance(kernel, p, p);
    CHECK(kpp.imag() == 0.0);
    CHECK(std::abs(kpp.real() - diag) <= 1e-12 * diag);
    CHECK(kpp.real() >= 1.0);
  }
}

TEST_CASE("full and reduced samplers share the covariance kernel") {
  const auto pair = basis_of("z\n1");
  const EnsembleSpec spec{pair, 3, 2024};
  const CovarianceKernel kernel{pair, 3};
  const Complex z = 0.7, w = -0.2 + 0.4i;
  const Complex target = covariance(kernel, z, w);
  constexpr int draws = 20000;
  for (auto form : {SamplerForm::full, SamplerForm::reduced}) {
    Complex mean = 0.0;
    double sq = 0.0;
    for (int t = 0; t < draws; ++t) {
      const auto g = sample(spec, t, form);
      const Complex x = g.value(z) * std::conj(g.value(w));
      mean += x;
      sq += std::norm(x);
    }
    mean /= draws;
    const double se = std::sqrt((sq / draws - std::norm(mean)) / draws);
    CHECK(std::abs(mean - target) < 4 * se);
  }
}

TEST_CASE("sample CSV") {
  const SampledFunction g(basis_of("z\n1"), 2, SamplerForm::reduced,
                          {{1.0 + 2i, {}, 1.0}, {0.5, {1, 2}, std::sqrt(2.0)}});
  std::ostringstream os;
  write_csv(os, g);
  const std::string csv = os.str();
  CHECK(csv.rfind("alpha,weight,coeff_re,coeff_im\n", 0) == 0);
  CHECK(csv.find("\n,1,1,2\n") != std::string::npos);
  CHECK(csv.find("\n1-2,1.4142135623730951,0.5,0\n") != std::string::npos);
}
