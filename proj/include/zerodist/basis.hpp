#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace zerodist {

using Complex = std::complex<double>;

// Immutable expression tree over {constant, z, +, *, ^k, exp}. Every tree the
// grammar can build is an entire function of z.
class Expr {
 public:
  enum class Kind { constant, variable, sum, product, power, exp };

  static Expr constant(Complex value);
  static Expr variable();
  static Expr sum(Expr lhs, Expr rhs);
  static Expr product(Expr lhs, Expr rhs);
  static Expr power(Expr base, int exponent);
  static Expr exp(Expr arg);

  Kind kind() const;
  Complex value() const;    // constant nodes only
  int exponent() const;     // power nodes only
  const Expr& lhs() const;  // sum/product lhs, power base, exp argument
  const Expr& rhs() const;  // sum/product rhs

  bool is_constant(Complex c) const;

  // Raw recursive evaluation; may return a non-finite value.
  Complex evaluate_unchecked(Complex z) const;

  std::string to_string() const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator+(Expr lhs, Expr rhs);
Expr operator*(Expr lhs, Expr rhs);

/// Evaluates an expression at a finite point. Throws
/// ErrorKind::evaluation_overflow (naming z) if the result is not finite.
Complex eval(const Expr& expr, Complex z);

/// Exact derivative by the sum, product, power and chain rules, with
/// constant folding of the trivial 0/1 cases so trees stay small.
Expr differentiate(const Expr& expr);

/// Monomial coefficients (lowest degree first) when the expression is a
/// polynomial in z; std::nullopt as soon as a non-constant exp appears.
/// Throws ErrorKind::degree_overflow past max_degree.
std::optional<Eigen::VectorXcd> polynomial_coefficients(const Expr& expr,
                                                        int max_degree = 10000);

/// The fixed basis f_1..f_l together with cached exact derivatives.
class BasisSystem {
 public:
  explicit BasisSystem(std::vector<Expr> functions);

  std::size_t size() const { return functions_.size(); }
  const std::vector<Expr>& functions() const { return functions_; }
  const std::vector<Expr>& derivatives() const { return derivatives_; }

  // Polynomial coefficients per function, or nullopt if any is not polynomial.
  const std::optional<std::vector<Eigen::VectorXcd>>& polynomials() const {
    return polynomials_;
  }
  bool is_polynomial() const { return polynomials_.has_value(); }

  // Fills values[j] = f_j(z) and, if non-empty, derivs[j] = f_j'(z).
  // Throws evaluation_overflow on non-finite output.
  void evaluate(Complex z, std::span<Complex> values,
                std::span<Complex> derivs = {}) const;

  std::string to_string() const;

 private:
  std::vector<Expr> functions_;
  std::vector<Expr> derivatives_;
  std::optional<std::vector<Eigen::VectorXcd>> polynomials_;
};

/// S(z) = sum_j |f_j(z)|^2.
double norm_squared(const BasisSystem& basis, Complex z);

/// Q(z) = d_z d_zbar log S(z)
///      = (S * sum|f_j'|^2 - |sum f_j' conj(f_j)|^2) / S^2  >= 0.
/// The planar density of (i/2pi) ddbar log|f| is Q/(2pi).
/// Throws ErrorKind::domain_error where S(z) = 0.
double laplacian_log_norm(const BasisSystem& basis, Complex z);

/// |f'(z)| = (sum_j |f_j'(z)|^2)^{1/2}.
double derivative_norm(const BasisSystem& basis, Complex z);

/// max over points of |d(z) - fd(z)| / (1 + |d(z)|), where d is the symbolic
/// derivative and fd the central difference (e(z+h) - e(z-h)) / 2h.
double derivative_check(const Expr& expr, std::span<const Complex> points,
                        double h = 1e-6);

}  // namespace zerodist
