#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "zerodist/basis.hpp"

namespace zerodist {

/// The random function G_n = sum over words (j_1..j_nu), nu = 0..n, of
/// a_{j_1..j_nu} f_{j_1} ... f_{j_nu}, with iid standard complex Gaussian a.
struct EnsembleSpec {
  std::shared_ptr<const BasisSystem> basis;
  int n = 0;
  std::uint64_t seed = 0;

  std::size_t ell() const { return basis->size(); }
};

enum class SamplerForm { full, reduced };

/// full: one term per ordered word; reduced: one per multiset, weighted by
/// sqrt(multinomial). Both forms have the same covariance kernel.
struct Term {
  Complex coefficient;
  std::vector<int> indices;  // 1-based basis indices; empty for a_0
  double weight = 1.0;
};

class SampledFunction {
 public:
  SampledFunction(std::shared_ptr<const BasisSystem> basis, int n, SamplerForm form,
                  std::vector<Term> terms);

  const BasisSystem& basis() const { return *basis_; }
  std::shared_ptr<const BasisSystem> basis_ptr() const { return basis_; }
  int n() const { return n_; }
  SamplerForm form() const { return form_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// Distinct monomials f^e after merging terms with equal exponent vectors.
  struct Monomial {
    std::vector<int> exponents;  // length l
    Complex coefficient;         // sum of coefficient * weight
  };
  const std::vector<Monomial>& monomials() const { return monomials_; }

  Complex value(Complex z) const;
  /// (G(z), G'(z)) by the product rule on cached basis derivatives.
  std::pair<Complex, Complex> value_and_derivative(Complex z) const;

  /// Sum over monomials of |coefficient|; a scale for "identically zero" tests.
  double coefficient_scale() const;

 private:
  void check_finite(Complex value, Complex z) const;

  std::shared_ptr<const BasisSystem> basis_;
  int n_;
  SamplerForm form_;
  std::vector<Term> terms_;
  std::vector<Monomial> monomials_;
};

/// N_{l,n} = 1 + l + ... + l^n. Throws ErrorKind::count_overflow past 2^64.
std::uint64_t count_terms(std::uint64_t ell, int n);

/// Number of multisets of size <= n over l symbols.
std::uint64_t count_reduced_terms(std::uint64_t ell, int n);

/// multinomial(nu; alpha) = nu! / prod alpha_j!, as a double.
double multinomial(std::span<const int> alpha);

inline constexpr std::uint64_t full_term_budget = 1'000'000;

/// One coefficient per ordered word. Throws ErrorKind::term_budget_exceeded
/// when N_{l,n} > full_term_budget.
SampledFunction sample_full(const EnsembleSpec& spec, std::uint64_t trial);

/// The reduced template: one zero-coefficient term per multiset.
SampledFunction reduced_representation(const EnsembleSpec& spec);

/// reduced_representation with coefficients drawn for the given trial.
SampledFunction sample_reduced(const EnsembleSpec& spec, std::uint64_t trial);

SampledFunction sample(const EnsembleSpec& spec, std::uint64_t trial,
                       SamplerForm form = SamplerForm::reduced);

/// K(z, w) = E[G(z) conj(G(w))] = sum_{k=0}^n <f(z), f(w)>^k.
struct CovarianceKernel {
  std::shared_ptr<const BasisSystem> basis;
  int n = 0;
};

Complex covariance(const CovarianceKernel& kernel, Complex z, Complex w);

/// CSV rows: alpha,weight,coeff_re,coeff_im (alpha dash-joined, 1-based).
void write_csv(std::ostream& out, const SampledFunction& sample);

}  // namespace zerodist
