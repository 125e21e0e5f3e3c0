#include "zerodist/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <ostream>
#include <sstream>

#include "zerodist/error.hpp"
#include "zerodist/polynomial.hpp"
#include "zerodist/quadrature.hpp"
#include "zerodist/rng.hpp"

namespace zerodist {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

bool finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

std::string describe(const Box& b) {
  std::ostringstream os;
  os.precision(12);
  os << "[" << b.x0 << "," << b.x1 << "]x[" << b.y0 << "," << b.y1 << "]";
  return os.str();
}

// \int G'/G dz along the straight segment a -> b; nullopt when the adaptive
// rule does not converge (a zero on or extremely near the segment).
std::optional<Complex> segment_integral(const AnalyticFunction& g, Complex a, Complex b,
                                        const CountOptions& options) {
  const Complex direction = b - a;
  auto integrand = [&](double t) -> Complex {
    const auto [value, deriv] = g(a + t * direction);
    if (value == Complex(0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
    return deriv / value * direction;
  };
  const auto result = quadrature::integrate<Complex>(integrand, 0.0, 1.0,
                                                     options.quadrature_tolerance, 0.0,
                                                     options.max_intervals);
  if (!result.converged || !finite(result.value)) return std::nullopt;
  return result.value;
}

std::optional<Complex> arc_integral(const AnalyticFunction& g, double radius, double theta0,
                                    double theta1, const CountOptions& options) {
  auto integrand = [&](double theta) -> Complex {
    const Complex z = std::polar(radius, theta);
    const auto [value, deriv] = g(z);
    if (value == Complex(0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
    return deriv / value * Complex(0.0, 1.0) * z;
  };
  const auto result = quadrature::integrate<Complex>(integrand, theta0, theta1,
                                                     options.quadrature_tolerance, 0.0,
                                                     options.max_intervals);
  if (!result.converged || !finite(result.value)) return std::nullopt;
  return result.value;
}

// Rounds (1/2 pi i) * integral to an integer; nullopt if further than 0.25
// from one.
std::optional<int> to_count(Complex integral) {
  const double winding = integral.imag() / two_pi;
  const double rounded = std::round(winding);
  if (std::abs(winding - rounded) > 0.25 || std::abs(integral.real()) > 0.25 * two_pi)
    return std::nullopt;
  return static_cast<int>(rounded);
}

// Newton's estimate |G/G'| of the distance to the nearest zero, sampled
// along the boundary; a tiny value means a zero sits on the contour.
bool boundary_is_clear(const AnalyticFunction& g, const Box& box) {
  const double size = std::max(box.width(), box.height());
  constexpr int samples = 8;
  const Complex corners[4] = {{box.x0, box.y0}, {box.x1, box.y0}, {box.x1, box.y1}, {box.x0, box.y1}};
  for (int e = 0; e < 4; ++e) {
    const Complex a = corners[e];
    const Complex b = corners[(e + 1) % 4];
    for (int i = 0; i < samples; ++i) {
      const auto [value, deriv] = g(a + (b - a) * (static_cast<double>(i) / samples));
      if (value == Complex(0.0)) return false;
      if (std::abs(value) < 1e-10 * size * std::abs(deriv)) return false;
    }
  }
  return true;
}

std::optional<int> try_count(const AnalyticFunction& g, const Box& box,
                             const CountOptions& options) {
  if (!boundary_is_clear(g, box)) return std::nullopt;
  const Complex corners[4] = {{box.x0, box.y0}, {box.x1, box.y0}, {box.x1, box.y1}, {box.x0, box.y1}};
  Complex total = 0.0;
  for (int e = 0; e < 4; ++e) {
    const auto piece = segment_integral(g, corners[e], corners[(e + 1) % 4], options);
    if (!piece) return std::nullopt;
    total += *piece;
  }
  return to_count(total);
}

struct BoxCount {
  int count;
  Box box;
};

BoxCount count_with_dilation(const AnalyticFunction& g, const Box& box,
                             const CountOptions& options) {
  if (auto c = try_count(g, box, options)) return {*c, box};
  const Complex center = box.center();
  for (int attempt = 0; attempt < options.max_dilations; ++attempt) {
    const double u = rng::uniform(options.seed, 0x626f78, static_cast<std::uint64_t>(attempt));
    const double factor = 1.0 + 1e-6 + 9e-6 * u;
    const Box dilated{center.real() - 0.5 * box.width() * factor,
                      center.real() + 0.5 * box.width() * factor,
                      center.imag() - 0.5 * box.height() * factor,
                      center.imag() + 0.5 * box.height() * factor};
    if (auto c = try_count(g, dilated, options)) return {*c, dilated};
  }
  throw Error(ErrorKind::boundary_zero_unresolvable,
              "no zero-free boundary found for box " + describe(box));
}

struct NewtonResult {
  Complex z;
  bool converged;
};

NewtonResult newton(const AnalyticFunction& g, Complex z, int multiplicity, double size) {
  const Complex start = z;
  for (int iter = 0; iter < 100; ++iter) {
    const auto [value, deriv] = g(z);
    if (value == Complex(0.0)) return {z, true};
    if (deriv == Complex(0.0)) return {z, false};
    const Complex step = static_cast<double>(multiplicity) * value / deriv;
    z -= step;
    if (!finite(z) || std::abs(z - start) > 10.0 * size) return {z, false};
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) return {z, true};
  }
  // Converged to roundoff without meeting the strict step test.
  const auto [value, deriv] = g(z);
  const Complex step = value / deriv;
  return {z, std::abs(step) <= 1e-10 * std::max(1.0, std::abs(z))};
}

std::vector<Zero> merge_clusters(std::vector<Zero> zeros, double distance) {
  std::vector<Zero> merged;
  std::vector<bool> used(zeros.size(), false);
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    if (used[i]) continue;
    Zero cluster = zeros[i];
    Complex sum = zeros[i].location * static_cast<double>(zeros[i].multiplicity);
    used[i] = true;
    for (std::size_t j = i + 1; j < zeros.size(); ++j) {
      if (used[j] || std::abs(zeros[j].location - zeros[i].location) >= distance) continue;
      used[j] = true;
      cluster.multiplicity += zeros[j].multiplicity;
      sum += zeros[j].location * static_cast<double>(zeros[j].multiplicity);
    }
    cluster.location = sum / static_cast<double>(cluster.multiplicity);
    merged.push_back(cluster);
  }
  return merged;
}

double max_on_circle(const AnalyticFunction& g, double radius, int samples) {
  double m = 0.0;
  for (int i = 0; i < samples; ++i)
    m = std::max(m, std::abs(g(std::polar(radius, two_pi * i / samples)).first));
  return m;
}

void finalize(ZeroSet& set, const AnalyticFunction& g, double tol) {
  set.residual = 0.0;
  for (auto& z : set.zeros) {
    z.residual = std::abs(g(z.location).first);
    z.near_origin = std::abs(z.location) < 1e-12 * set.radius;
    set.residual = std::max(set.residual, z.residual);
  }
  if (set.residual > tol * set.scale) {
    std::ostringstream os;
    os << "residual " << set.residual << " exceeds tol*scale = " << tol * set.scale;
    throw Error(ErrorKind::nonconvergence, os.str());
  }
  std::sort(set.zeros.begin(), set.zeros.end(), [](const Zero& a, const Zero& b) {
    return a.location.real() != b.location.real() ? a.location.real() < b.location.real()
                                                  : a.location.imag() < b.location.imag();
  });
}

}  // namespace

int ZeroSet::total_multiplicity() const {
  int total = 0;
  for (const auto& z : zeros) total += z.multiplicity;
  return total;
}

AnalyticFunction as_analytic(const SampledFunction& sample) {
  return [&sample](Complex z) { return sample.value_and_derivative(z); };
}

AnalyticFunction as_analytic(const Eigen::VectorXcd& coefficients) {
  return [&coefficients](Complex z) { return poly::horner<double>(coefficients, z); };
}

std::optional<Eigen::VectorXcd> to_polynomial(const SampledFunction& sample, int max_degree) {
  const auto& polys = sample.basis().polynomials();
  if (!polys) return std::nullopt;
  const std::size_t ell = polys->size();
  long long degree = 0;
  for (const auto& m : sample.monomials()) {
    long long d = 0;
    for (std::size_t j = 0; j < ell; ++j) d += static_cast<long long>(m.exponents[j]) * ((*polys)[j].size() - 1);
    degree = std::max(degree, d);
  }
  if (degree > max_degree)
    throw Error(ErrorKind::degree_overflow, "expanded degree " + std::to_string(degree) +
                                                " exceeds " + std::to_string(max_degree));

  auto multiply = [](const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(a.size() + b.size() - 1);
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (a[i] != Complex(0.0)) out.segment(i, b.size()) += a[i] * b;
    return out;
  };
  // powers[j][k] = p_j^k
  std::vector<std::vector<Eigen::VectorXcd>> powers(ell);
  for (std::size_t j = 0; j < ell; ++j) {
    powers[j].push_back(Eigen::VectorXcd::Constant(1, 1.0));
    for (int k = 1; k <= sample.n(); ++k) powers[j].push_back(multiply(powers[j].back(), (*polys)[j]));
  }
  Eigen::VectorXcd result = Eigen::VectorXcd::Zero(degree + 1);
  for (const auto& m : sample.monomials()) {
    Eigen::VectorXcd term = Eigen::VectorXcd::Constant(1, m.coefficient);
    for (std::size_t j = 0; j < ell; ++j)
      if (m.exponents[j] > 0) term = multiply(term, powers[j][m.exponents[j]]);
    result.head(term.size()) += term;
  }
  return result;
}

ZeroSet find_zeros_polynomial(const Eigen::VectorXcd& coefficients, double r, double tol) {
  if (coefficients.size() == 0 || coefficients.cwiseAbs().maxCoeff() == 0.0)
    throw Error(ErrorKind::degenerate, "the zero polynomial has no isolated zeros");
  const Eigen::VectorXcd c = poly::trim<double>(coefficients, 1e-14);
  ZeroSet set;
  set.radius = r;
  set.method = ZeroMethod::polynomial;
  const auto g = as_analytic(c);
  set.scale = max_on_circle(g, r, std::max<int>(256, 4 * static_cast<int>(c.size())));
  if (c.size() == 1) return set;

  const auto result = poly::aberth<double>(c, 500);
  if (!result.converged) {
    std::ostringstream os;
    os << "Ehrlich-Aberth did not converge in 500 sweeps; worst backward error "
       << result.worst_backward_error;
    throw Error(ErrorKind::nonconvergence, os.str());
  }
  std::vector<Zero> inside;
  for (const Complex z : result.roots)
    if (std::abs(z) < r) inside.push_back({z, 1, 0.0, false});
  set.zeros = merge_clusters(std::move(inside), 1e-8 * r);
  finalize(set, g, tol);
  return set;
}

int count_zeros_argument(const AnalyticFunction& g, const Box& box, const CountOptions& options) {
  return count_with_dilation(g, box, options).count;
}

int count_zeros_argument(const SampledFunction& sample, const Box& box,
                         const CountOptions& options) {
  return count_zeros_argument(as_analytic(sample), box, options);
}

std::pair<int, double> count_zeros_disk(const AnalyticFunction& g, double radius,
                                        const CountOptions& options) {
  constexpr int arcs = 8;
  for (int attempt = 0; attempt <= options.max_dilations; ++attempt) {
    double rho = radius;
    if (attempt > 0) {
      const double u = rng::uniform(options.seed, 0x6469736b, static_cast<std::uint64_t>(attempt));
      rho = radius * (1.0 - 1e-6 - 9e-6 * u);
    }
    Complex total = 0.0;
    bool ok = true;
    for (int a = 0; a < arcs && ok; ++a) {
      const auto piece = arc_integral(g, rho, two_pi * a / arcs, two_pi * (a + 1) / arcs, options);
      if (!piece) ok = false;
      else total += *piece;
    }
    if (!ok) continue;
    if (const auto count = to_count(total)) return {*count, rho};
  }
  std::ostringstream os;
  os << "no zero-free circle found near radius " << radius;
  throw Error(ErrorKind::boundary_zero_unresolvable, os.str());
}

ZeroSet find_zeros_entire(const SampledFunction& sample, double r, double tol,
                          const CountOptions& options) {
  const auto g = as_analytic(sample);
  ZeroSet set;
  set.radius = r;
  set.method = ZeroMethod::argument_principle;
  set.scale = max_on_circle(g, r, 256);
  if (!(set.scale > 1e-13 * sample.coefficient_scale()))
    throw Error(ErrorKind::degenerate, "G_n is numerically identically zero on |z| = r");

  const auto [disk_count, rho] = count_zeros_disk(g, r, options);
  set.disk_count = disk_count;
  if (disk_count == 0) return set;

  const double min_side = 1e-3 * r;
  std::vector<Zero> found;
  std::vector<Box> failed;
  std::deque<BoxCount> queue;
  {
    const double half = rho * (1.0 + 1e-7);
    queue.push_back(count_with_dilation(g, {-half, half, -half, half}, options));
  }
  std::uint64_t split_index = 0;
  auto outside_disk = [rho](const Box& b) {
    const double dx = std::max({b.x0, 0.0, -b.x1});
    const double dy = std::max({b.y0, 0.0, -b.y1});
    return dx * dx + dy * dy >= rho * rho;
  };

  while (!queue.empty()) {
    const BoxCount item = queue.front();
    queue.pop_front();
    if (item.count == 0 || outside_disk(item.box)) continue;
    const double side = std::max(item.box.width(), item.box.height());
    const bool terminal = side < min_side;
    if (item.count == 1 || terminal) {
      const auto nr = newton(g, item.box.center(), item.count, side);
      if (nr.converged && item.box.contains(nr.z, 1e-9 * side)) {
        found.push_back({nr.z, item.count, 0.0, false});
        continue;
      }
      if (terminal) {
        found.push_back({item.box.center(), item.count, 0.0, false});
        continue;
      }
    }
    // Split at a jittered interior point; retry new split lines until every
    // child count succeeds and the children account for the parent count.
    bool split = false;
    for (int attempt = 0; attempt < 8 && !split; ++attempt) {
      const double ux = rng::uniform(options.seed, 0x73706c74, 2 * split_index);
      const double uy = rng::uniform(options.seed, 0x73706c74, 2 * split_index + 1);
      ++split_index;
      const Box& b = item.box;
      const double mx = b.x0 + b.width() * (0.5 + 0.1 * (ux - 0.5));
      const double my = b.y0 + b.height() * (0.5 + 0.1 * (uy - 0.5));
      const Box children[4] = {{b.x0, mx, b.y0, my}, {mx, b.x1, b.y0, my},
                               {b.x0, mx, my, b.y1}, {mx, b.x1, my, b.y1}};
      std::vector<BoxCount> counted;
      int sum = 0;
      for (const Box& child : children) {
        const auto c = try_count(g, child, options);
        if (!c) break;
        counted.push_back({*c, child});
        sum += *c;
      }
      if (counted.size() == 4 && sum == item.count) {
        for (const auto& c : counted) queue.push_back(c);
        split = true;
      }
    }
    if (!split) failed.push_back(item.box);
  }

  if (!failed.empty()) {
    std::string boxes;
    for (const auto& b : failed) boxes += " " + describe(b);
    throw Error(ErrorKind::count_mismatch, "subdivision could not resolve boxes:" + boxes);
  }

  std::vector<Zero> inside;
  for (const auto& z : found)
    if (std::abs(z.location) < rho) inside.push_back(z);
  set.zeros = merge_clusters(std::move(inside), 1e-8 * r);
  if (set.total_multiplicity() != disk_count) {
    std::string boxes;
    for (const auto& z : set.zeros) {
      std::ostringstream os;
      os << " (" << z.location.real() << "," << z.location.imag() << ")x" << z.multiplicity;
      boxes += os.str();
    }
    throw Error(ErrorKind::count_mismatch,
                "subdivision found " + std::to_string(set.total_multiplicity()) +
                    " zeros but the disk count is " + std::to_string(disk_count) + ":" + boxes);
  }
  finalize(set, g, tol);
  return set;
}

ZeroSet find_zeros(const SampledFunction& sample, double r, double tol,
                   const CountOptions& options) {
  if (const auto coefficients = to_polynomial(sample)) {
    const auto g = as_analytic(*coefficients);
    const auto [disk_count, rho] = count_zeros_disk(g, r, options);
    ZeroSet set = find_zeros_polynomial(*coefficients, rho, tol);
    set.radius = r;
    set.disk_count = disk_count;
    if (set.total_multiplicity() != disk_count)
      throw Error(ErrorKind::count_mismatch,
                  "polynomial path found " + std::to_string(set.total_multiplicity()) +
                      " zeros but the disk count is " + std::to_string(disk_count));
    return set;
  }
  return find_zeros_entire(sample, r, tol, options);
}

double hausdorff_distance(const ZeroSet& a, const ZeroSet& b) {
  auto expand = [](const ZeroSet& s) {
    std::vector<Complex> out;
    for (const auto& z : s.zeros) out.insert(out.end(), z.multiplicity, z.location);
    return out;
  };
  const auto pa = expand(a);
  const auto pb = expand(b);
  if (pa.empty() && pb.empty()) return 0.0;
  if (pa.empty() || pb.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](const std::vector<Complex>& from, const std::vector<Complex>& to) {
    double worst = 0.0;
    for (const Complex p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Complex q : to) best = std::min(best, std::abs(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(pa, pb), directed(pb, pa));
}

void write_csv(std::ostream& out, const ZeroSet& zeros) {
  const auto old_precision = out.precision(17);
  out << "re,im,multiplicity,residual\n";
  for (const auto& z : zeros.zeros)
    out << z.location.real() << ',' << z.location.imag() << ',' << z.multiplicity << ','
        << z.residual << '\n';
  out.precision(old_precision);
}

}  // namespace zerodist
