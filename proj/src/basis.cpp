#include "zerodist/basis.hpp"

#include <cmath>
#include <sstream>

#include "zerodist/error.hpp"

namespace zerodist {

struct Expr::Node {
  Kind kind;
  Complex value{};
  int exponent = 0;
  std::optional<Expr> lhs;
  std::optional<Expr> rhs;
};

namespace {

Complex integer_power(Complex base, int exponent) {
  Complex result(1.0, 0.0);
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

bool finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

std::string format_point(Complex z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

Eigen::VectorXcd poly_multiply(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(a.size() + b.size() - 1);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] == Complex(0.0)) continue;
    out.segment(i, b.size()) += a[i] * b;
  }
  return out;
}

}  // namespace

Expr Expr::constant(Complex value) {
  return Expr(std::make_shared<const Node>(Node{Kind::constant, value, 0, {}, {}}));
}

Expr Expr::variable() {
  return Expr(std::make_shared<const Node>(Node{Kind::variable, {}, 0, {}, {}}));
}

Expr Expr::sum(Expr lhs, Expr rhs) {
  if (lhs.is_constant(0.0)) return rhs;
  if (rhs.is_constant(0.0)) return lhs;
  if (lhs.kind() == Kind::constant && rhs.kind() == Kind::constant)
    return constant(lhs.value() + rhs.value());
  return Expr(std::make_shared<const Node>(
      Node{Kind::sum, {}, 0, std::move(lhs), std::move(rhs)}));
}

Expr Expr::product(Expr lhs, Expr rhs) {
  if (lhs.is_constant(0.0) || rhs.is_constant(0.0)) return constant(0.0);
  if (lhs.is_constant(1.0)) return rhs;
  if (rhs.is_constant(1.0)) return lhs;
  if (lhs.kind() == Kind::constant && rhs.kind() == Kind::constant)
    return constant(lhs.value() * rhs.value());
  return Expr(std::make_shared<const Node>(
      Node{Kind::product, {}, 0, std::move(lhs), std::move(rhs)}));
}

Expr Expr::power(Expr base, int exponent) {
  if (exponent < 0)
    throw Error(ErrorKind::domain_error, "negative exponent in basis expression");
  if (exponent == 0) return constant(1.0);
  if (exponent == 1) return base;
  if (base.kind() == Kind::constant) return constant(integer_power(base.value(), exponent));
  return Expr(std::make_shared<const Node>(
      Node{Kind::power, {}, exponent, std::move(base), {}}));
}

Expr Expr::exp(Expr arg) {
  if (arg.kind() == Kind::constant) return constant(std::exp(arg.value()));
  return Expr(std::make_shared<const Node>(Node{Kind::exp, {}, 0, std::move(arg), {}}));
}

Expr::Kind Expr::kind() const { return node_->kind; }
Complex Expr::value() const { return node_->value; }
int Expr::exponent() const { return node_->exponent; }
const Expr& Expr::lhs() const { return *node_->lhs; }
const Expr& Expr::rhs() const { return *node_->rhs; }

bool Expr::is_constant(Complex c) const {
  return node_->kind == Kind::constant && node_->value == c;
}

Complex Expr::evaluate_unchecked(Complex z) const {
  switch (node_->kind) {
    case Kind::constant: return node_->value;
    case Kind::variable: return z;
    case Kind::sum: return lhs().evaluate_unchecked(z) + rhs().evaluate_unchecked(z);
    case Kind::product: return lhs().evaluate_unchecked(z) * rhs().evaluate_unchecked(z);
    case Kind::power: return integer_power(lhs().evaluate_unchecked(z), node_->exponent);
    case Kind::exp: return std::exp(lhs().evaluate_unchecked(z));
  }
  return {};
}

std::string Expr::to_string() const {
  switch (node_->kind) {
    case Kind::constant: {
      std::ostringstream os;
      os.precision(17);
      const Complex c = node_->value;
      if (c.imag() == 0.0) {
        os << c.real();
      } else if (c.real() == 0.0) {
        os << c.imag() << "i";
      } else {
        os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
      }
      return os.str();
    }
    case Kind::variable: return "z";
    case Kind::sum: return "(" + lhs().to_string() + "+" + rhs().to_string() + ")";
    case Kind::product: return lhs().to_string() + "*" + rhs().to_string();
    case Kind::power: {
      const bool wrap = lhs().kind() != Kind::variable && lhs().kind() != Kind::exp;
      return (wrap ? "(" + lhs().to_string() + ")" : lhs().to_string()) + "^" +
             std::to_string(node_->exponent);
    }
    case Kind::exp: return "exp(" + lhs().to_string() + ")";
  }
  return {};
}

Expr operator+(Expr lhs, Expr rhs) { return Expr::sum(std::move(lhs), std::move(rhs)); }
Expr operator*(Expr lhs, Expr rhs) { return Expr::product(std::move(lhs), std::move(rhs)); }

Complex eval(const Expr& expr, Complex z) {
  const Complex value = expr.evaluate_unchecked(z);
  if (!finite(value))
    throw Error(ErrorKind::evaluation_overflow,
                "non-finite value of " + expr.to_string() + " at z=" + format_point(z));
  return value;
}

Expr differentiate(const Expr& expr) {
  using Kind = Expr::Kind;
  switch (expr.kind()) {
    case Kind::constant: return Expr::constant(0.0);
    case Kind::variable: return Expr::constant(1.0);
    case Kind::sum: return differentiate(expr.lhs()) + differentiate(expr.rhs());
    case Kind::product:
      return differentiate(expr.lhs()) * expr.rhs() + expr.lhs() * differentiate(expr.rhs());
    case Kind::power: {
      const int k = expr.exponent();
      return Expr::constant(static_cast<double>(k)) * Expr::power(expr.lhs(), k - 1) *
             differentiate(expr.lhs());
    }
    case Kind::exp: return expr * differentiate(expr.lhs());
  }
  return Expr::constant(0.0);
}

std::optional<Eigen::VectorXcd> polynomial_coefficients(const Expr& expr, int max_degree) {
  using Kind = Expr::Kind;
  auto check_degree = [max_degree](long long degree) {
    if (degree > max_degree)
      throw Error(ErrorKind::degree_overflow, "expanded degree " + std::to_string(degree) +
                                                  " exceeds " + std::to_string(max_degree));
  };
  switch (expr.kind()) {
    case Kind::constant: return Eigen::VectorXcd::Constant(1, expr.value());
    case Kind::variable: {
      Eigen::VectorXcd p(2);
      p << 0.0, 1.0;
      return p;
    }
    case Kind::sum: {
      auto a = polynomial_coefficients(expr.lhs(), max_degree);
      if (!a) return std::nullopt;
      auto b = polynomial_coefficients(expr.rhs(), max_degree);
      if (!b) return std::nullopt;
      if (a->size() < b->size()) std::swap(a, b);
      a->head(b->size()) += *b;
      return a;
    }
    case Kind::product: {
      auto a = polynomial_coefficients(expr.lhs(), max_degree);
      if (!a) return std::nullopt;
      auto b = polynomial_coefficients(expr.rhs(), max_degree);
      if (!b) return std::nullopt;
      check_degree(a->size() + b->size() - 2);
      return poly_multiply(*a, *b);
    }
    case Kind::power: {
      auto base = polynomial_coefficients(expr.lhs(), max_degree);
      if (!base) return std::nullopt;
      check_degree(static_cast<long long>(base->size() - 1) * expr.exponent());
      Eigen::VectorXcd result = Eigen::VectorXcd::Constant(1, 1.0);
      for (int i = 0; i < expr.exponent(); ++i) result = poly_multiply(result, *base);
      return result;
    }
    case Kind::exp: return std::nullopt;  // constant arguments were folded at construction
  }
  return std::nullopt;
}

BasisSystem::BasisSystem(std::vector<Expr> functions) : functions_(std::move(functions)) {
  if (functions_.empty())
    throw Error(ErrorKind::domain_error, "a basis system needs at least one function");
  derivatives_.reserve(functions_.size());
  for (const auto& f : functions_) derivatives_.push_back(differentiate(f));

  std::vector<Eigen::VectorXcd> polys;
  for (const auto& f : functions_) {
    auto p = polynomial_coefficients(f);
    if (!p) return;
    polys.push_back(std::move(*p));
  }
  polynomials_ = std::move(polys);
}

void BasisSystem::evaluate(Complex z, std::span<Complex> values,
                           std::span<Complex> derivs) const {
  for (std::size_t j = 0; j < functions_.size(); ++j) {
    values[j] = eval(functions_[j], z);
    if (!derivs.empty()) derivs[j] = eval(derivatives_[j], z);
  }
}

std::string BasisSystem::to_string() const {
  std::string out;
  for (const auto& f : functions_) out += f.to_string() + "\n";
  return out;
}

double norm_squared(const BasisSystem& basis, Complex z) {
  double s = 0.0;
  for (const auto& f : basis.functions()) s += std::norm(eval(f, z));
  return s;
}

double derivative_norm(const BasisSystem& basis, Complex z) {
  double s = 0.0;
  for (const auto& d : basis.derivatives()) s += std::norm(eval(d, z));
  return std::sqrt(s);
}

double laplacian_log_norm(const BasisSystem& basis, Complex z) {
  const std::size_t ell = basis.size();
  std::vector<Complex> f(ell);
  std::vector<Complex> df(ell);
  basis.evaluate(z, f, df);
  double s = 0.0;
  for (const Complex v : f) s += std::norm(v);
  if (s == 0.0)
    throw Error(ErrorKind::domain_error,
                "log|f| is singular at a common zero z=" + format_point(z));
  // Lagrange's identity: S sum|f'|^2 - |sum f' conj f|^2
  //                    = sum_{i<j} |f_i f_j' - f_j f_i'|^2,
  // which is free of cancellation and vanishes identically when l = 1.
  double numerator = 0.0;
  for (std::size_t i = 0; i < ell; ++i)
    for (std::size_t j = i + 1; j < ell; ++j) numerator += std::norm(f[i] * df[j] - f[j] * df[i]);
  return numerator / (s * s);
}

double derivative_check(const Expr& expr, std::span<const Complex> points, double h) {
  const Expr d = differentiate(expr);
  double worst = 0.0;
  for (const Complex z : points) {
    const Complex exact = eval(d, z);
    const Complex fd = (eval(expr, z + h) - eval(expr, z - h)) / (2.0 * h);
    worst = std::max(worst, std::abs(exact - fd) / (1.0 + std::abs(exact)));
  }
  return worst;
}

}  // namespace zerodist
