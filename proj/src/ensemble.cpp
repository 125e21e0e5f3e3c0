#include "zerodist/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "zerodist/error.hpp"
#include "zerodist/rng.hpp"

namespace zerodist {
namespace {

std::vector<int> exponents_of(const std::vector<int>& indices, std::size_t ell) {
  std::vector<int> e(ell, 0);
  for (int j : indices) ++e[static_cast<std::size_t>(j - 1)];
  return e;
}

// Visits all multisets of size nu over {1..ell} as nondecreasing index lists.
template <class Visit>
void for_each_multiset(std::size_t ell, int nu, std::vector<int>& prefix, int min_index,
                       Visit&& visit) {
  if (static_cast<int>(prefix.size()) == nu) {
    visit(prefix);
    return;
  }
  for (int j = min_index; j <= static_cast<int>(ell); ++j) {
    prefix.push_back(j);
    for_each_multiset(ell, nu, prefix, j, visit);
    prefix.pop_back();
  }
}

template <class Visit>
void for_each_word(std::size_t ell, int nu, std::vector<int>& prefix, Visit&& visit) {
  if (static_cast<int>(prefix.size()) == nu) {
    visit(prefix);
    return;
  }
  for (int j = 1; j <= static_cast<int>(ell); ++j) {
    prefix.push_back(j);
    for_each_word(ell, nu, prefix, visit);
    prefix.pop_back();
  }
}

void check_spec(const EnsembleSpec& spec) {
  if (!spec.basis) throw Error(ErrorKind::invalid_config, "ensemble has no basis");
  if (spec.n < 0) throw Error(ErrorKind::invalid_config, "degree cap n must be >= 0");
}

}  // namespace

SampledFunction::SampledFunction(std::shared_ptr<const BasisSystem> basis, int n,
                                 SamplerForm form, std::vector<Term> terms)
    : basis_(std::move(basis)), n_(n), form_(form), terms_(std::move(terms)) {
  std::map<std::vector<int>, Complex> merged;
  for (const auto& t : terms_) merged[exponents_of(t.indices, basis_->size())] += t.coefficient * t.weight;
  monomials_.reserve(merged.size());
  for (auto& [e, c] : merged) monomials_.push_back({e, c});
}

void SampledFunction::check_finite(Complex value, Complex z) const {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    std::ostringstream os;
    os << "G_n overflowed at z=" << z;
    throw Error(ErrorKind::evaluation_overflow, os.str());
  }
}

Complex SampledFunction::value(Complex z) const {
  const std::size_t ell = basis_->size();
  std::vector<Complex> f(ell);
  basis_->evaluate(z, f);
  // powers[j * (n+1) + k] = f_j^k
  const std::size_t stride = static_cast<std::size_t>(n_) + 1;
  std::vector<Complex> powers(ell * stride);
  for (std::size_t j = 0; j < ell; ++j) {
    powers[j * stride] = 1.0;
    for (std::size_t k = 1; k < stride; ++k) powers[j * stride + k] = powers[j * stride + k - 1] * f[j];
  }
  Complex sum = 0.0;
  for (const auto& m : monomials_) {
    Complex term = m.coefficient;
    for (std::size_t j = 0; j < ell; ++j) term *= powers[j * stride + static_cast<std::size_t>(m.exponents[j])];
    sum += term;
  }
  check_finite(sum, z);
  return sum;
}

std::pair<Complex, Complex> SampledFunction::value_and_derivative(Complex z) const {
  const std::size_t ell = basis_->size();
  std::vector<Complex> f(ell);
  std::vector<Complex> df(ell);
  basis_->evaluate(z, f, df);
  const std::size_t stride = static_cast<std::size_t>(n_) + 1;
  std::vector<Complex> powers(ell * stride);
  for (std::size_t j = 0; j < ell; ++j) {
    powers[j * stride] = 1.0;
    for (std::size_t k = 1; k < stride; ++k) powers[j * stride + k] = powers[j * stride + k - 1] * f[j];
  }
  Complex value = 0.0;
  Complex deriv = 0.0;
  for (const auto& m : monomials_) {
    Complex product = m.coefficient;
    for (std::size_t j = 0; j < ell; ++j) product *= powers[j * stride + static_cast<std::size_t>(m.exponents[j])];
    value += product;
    for (std::size_t j = 0; j < ell; ++j) {
      const int e = m.exponents[j];
      if (e == 0) continue;
      Complex partial = m.coefficient * static_cast<double>(e) *
                        powers[j * stride + static_cast<std::size_t>(e - 1)] * df[j];
      for (std::size_t i = 0; i < ell; ++i)
        if (i != j) partial *= powers[i * stride + static_cast<std::size_t>(m.exponents[i])];
      deriv += partial;
    }
  }
  check_finite(value, z);
  check_finite(deriv, z);
  return {value, deriv};
}

double SampledFunction::coefficient_scale() const {
  double s = 0.0;
  for (const auto& m : monomials_) s += std::abs(m.coefficient);
  return s;
}

std::uint64_t count_terms(std::uint64_t ell, int n) {
  if (ell < 1 || n < 0) throw Error(ErrorKind::domain_error, "count_terms needs l >= 1, n >= 0");
  std::uint64_t total = 1;
  std::uint64_t power = 1;
  for (int nu = 1; nu <= n; ++nu) {
    if (__builtin_mul_overflow(power, ell, &power) || __builtin_add_overflow(total, power, &total))
      throw Error(ErrorKind::count_overflow,
                  "N_{l,n} exceeds 2^64 for l=" + std::to_string(ell) + ", n=" + std::to_string(n));
  }
  return total;
}

std::uint64_t count_reduced_terms(std::uint64_t ell, int n) {
  // sum_{nu=0}^n C(nu+l-1, l-1) = C(n+l, l)
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= ell; ++i) {
    std::uint64_t next = 0;
    if (__builtin_mul_overflow(c, static_cast<std::uint64_t>(n) + i, &next))
      throw Error(ErrorKind::count_overflow, "reduced term count exceeds 2^64");
    c = next / i;
  }
  return c;
}

double multinomial(std::span<const int> alpha) {
  double result = 1.0;
  int total = 0;
  for (int a : alpha) {
    // multiply by C(total + a, a)
    for (int i = 1; i <= a; ++i) result = result * static_cast<double>(total + i) / i;
    total += a;
  }
  return result;
}

SampledFunction sample_full(const EnsembleSpec& spec, std::uint64_t trial) {
  check_spec(spec);
  const std::uint64_t count = count_terms(spec.ell(), spec.n);
  if (count > full_term_budget)
    throw Error(ErrorKind::term_budget_exceeded,
                "N_{l,n}=" + std::to_string(count) + " exceeds the full-form budget of " +
                    std::to_string(full_term_budget) + " terms; use the reduced sampler");
  std::vector<Term> terms;
  terms.reserve(count);
  std::vector<int> prefix;
  std::uint64_t index = 0;
  for (int nu = 0; nu <= spec.n; ++nu) {
    for_each_word(spec.ell(), nu, prefix, [&](const std::vector<int>& word) {
      terms.push_back({rng::complex_gaussian(spec.seed, trial, index++), word, 1.0});
    });
  }
  return SampledFunction(spec.basis, spec.n, SamplerForm::full, std::move(terms));
}

SampledFunction reduced_representation(const EnsembleSpec& spec) {
  check_spec(spec);
  std::vector<Term> terms;
  terms.reserve(count_reduced_terms(spec.ell(), spec.n));
  std::vector<int> prefix;
  for (int nu = 0; nu <= spec.n; ++nu) {
    for_each_multiset(spec.ell(), nu, prefix, 1, [&](const std::vector<int>& multiset) {
      const auto alpha = exponents_of(multiset, spec.ell());
      terms.push_back({0.0, multiset, std::sqrt(multinomial(alpha))});
    });
  }
  return SampledFunction(spec.basis, spec.n, SamplerForm::reduced, std::move(terms));
}

SampledFunction sample_reduced(const EnsembleSpec& spec, std::uint64_t trial) {
  const SampledFunction tmpl = reduced_representation(spec);
  std::vector<Term> terms = tmpl.terms();
  for (std::size_t i = 0; i < terms.size(); ++i)
    terms[i].coefficient = rng::complex_gaussian(spec.seed, trial, i);
  return SampledFunction(spec.basis, spec.n, SamplerForm::reduced, std::move(terms));
}

SampledFunction sample(const EnsembleSpec& spec, std::uint64_t trial, SamplerForm form) {
  return form == SamplerForm::full ? sample_full(spec, trial) : sample_reduced(spec, trial);
}

Complex covariance(const CovarianceKernel& kernel, Complex z, Complex w) {
  const std::size_t ell = kernel.basis->size();
  std::vector<Complex> fz(ell);
  std::vector<Complex> fw(ell);
  kernel.basis->evaluate(z, fz);
  kernel.basis->evaluate(w, fw);
  Complex inner = 0.0;
  for (std::size_t j = 0; j < ell; ++j) inner += fz[j] * std::conj(fw[j]);
  if (z == w) inner = inner.real();  // exact real diagonal
  Complex sum = 0.0;
  Complex power = 1.0;
  for (int k = 0; k <= kernel.n; ++k) {
    sum += power;
    power *= inner;
  }
  if (!std::isfinite(sum.real()) || !std::isfinite(sum.imag()))
    throw Error(ErrorKind::evaluation_overflow, "covariance kernel overflowed");
  return sum;
}

void write_csv(std::ostream& out, const SampledFunction& sample) {
  const auto old_precision = out.precision(17);
  out << "alpha,weight,coeff_re,coeff_im\n";
  for (const auto& t : sample.terms()) {
    for (std::size_t i = 0; i < t.indices.size(); ++i) out << (i ? "-" : "") << t.indices[i];
    out << ',' << t.weight << ',' << t.coefficient.real() << ',' << t.coefficient.imag() << '\n';
  }
  out.precision(old_precision);
}

}  // namespace zerodist
