#include "zerodist/limit.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "zerodist/error.hpp"

namespace zerodist {

namespace {

constexpr double two_pi = 2 * std::numbers::pi;
constexpr double degenerate_threshold = 1e-8;

// Density with common zeros of the basis (S = 0) mapped to 0; S < 1 near them.
double safe_density(const BasisSystem& basis, Complex z) {
  return norm_squared(basis, z) < 1.0 ? 0.0 : ac_density(basis, z);
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

double signed_form(const BasisSystem& basis, const CurveSegment& s) {
  const Complex mid = 0.5 * (s.a + s.b);
  const Complex tau = s.b - s.a;
  std::vector<Complex> f(basis.size()), df(basis.size());
  basis.evaluate(mid, f, df);
  double total = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) total += (std::conj(f[j]) * df[j] * tau).imag();
  return total;
}

// Visits (point, area) samples over the cells meeting |z| < r. Cells crossing
// the circle or touching the origin's neighbourhood are refined.
template <class Visit>
void visit_area(const LimitMeasure& limit, double r, Visit&& visit) {
  const int n = limit.resolution;
  const double hx = limit.cell_width(), hy = limit.cell_height();
  const double diag = std::hypot(hx, hy);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double x0 = limit.window.x0 + ix * hx, y0 = limit.window.y0 + iy * hy;
      const double near_x = std::max({x0, 0.0, -(x0 + hx)}), near_y = std::max({y0, 0.0, -(y0 + hy)});
      const double far_x = std::max(std::abs(x0), std::abs(x0 + hx));
      const double far_y = std::max(std::abs(y0), std::abs(y0 + hy));
      const double nearest = std::hypot(near_x, near_y), farthest = std::hypot(far_x, far_y);
      if (nearest >= r) continue;
      const Complex c = limit.cell_center(ix, iy);
      if (farthest < r && nearest > diag) {
        visit(c, limit.density(iy, ix), hx * hy);
        continue;
      }
      const int k = nearest <= diag ? 32 : 16;
      const double area = hx * hy / (k * k);
      for (int sy = 0; sy < k; ++sy)
        for (int sx = 0; sx < k; ++sx) {
          const Complex p(x0 + (sx + 0.5) * hx / k, y0 + (sy + 0.5) * hy / k);
          if (std::abs(p) < r) visit(p, safe_density(*limit.basis, p), area);
        }
    }
  }
}

void require_disk(const LimitMeasure& limit, double r) {
  const Box& w = limit.window;
  const double slack = 1e-12 * r;
  if (w.x0 > -r + slack || w.x1 < r - slack || w.y0 > -r + slack || w.y1 < r - slack)
    throw Error(ErrorKind::window_too_small,
                "window does not contain the closed disk of radius " + std::to_string(r));
}

}  // namespace

double xi(double x) {
  if (x > 1.0) return 2.0 / x;
  return x == 1.0 ? 1.0 : 0.0;
}

double ac_density(const BasisSystem& basis, Complex z) {
  const double s = norm_squared(basis, z);
  if (s == 0.0) throw Error(ErrorKind::domain_error, "basis vanishes identically at z");
  if (s < 1.0) return 0.0;
  const double modulus = std::sqrt(s);
  return modulus * xi(modulus) * laplacian_log_norm(basis, z) / two_pi;
}

std::vector<CurveSegment> extract_level_curve(const BasisSystem& basis, const Box& window,
                                              int resolution) {
  if (resolution < 16)
    throw Error(ErrorKind::invalid_config, "curve resolution must be at least 16 per side");
  const int n = resolution;
  const int stride = n + 1;
  const double hx = window.width() / n, hy = window.height() / n;
  auto node = [&](int i, int j) { return Complex(window.x0 + i * hx, window.y0 + j * hy); };

  std::vector<double> v(stride * stride);
  std::vector<char> flat(stride * stride);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const Complex p = node(i, j);
      v[j * stride + i] = norm_squared(basis, p) - 1.0;
      flat[j * stride + i] = derivative_norm(basis, p) < degenerate_threshold;
    }
  auto value = [&](int i, int j) { return v[j * stride + i]; };
  auto inside = [&](int i, int j) { return value(i, j) < 0.0; };
  auto horizontal = [&](int i, int j) { return 2 * (j * stride + i); };
  auto vertical = [&](int i, int j) { return 2 * (j * stride + i) + 1; };

  std::vector<CurveSegment> segments;
  std::vector<std::pair<int, int>> edges;  // edge ids of each segment's endpoints
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      // Corners counter-clockwise from bottom-left; edge k joins corner k to k+1.
      const int ci[4] = {i, i + 1, i + 1, i}, cj[4] = {j, j, j + 1, j + 1};
      const int edge_id[4] = {horizontal(i, j), vertical(i + 1, j), horizontal(i, j + 1),
                              vertical(i, j)};
      bool in[4];
      for (int k = 0; k < 4; ++k) in[k] = inside(ci[k], cj[k]);
      if (in[0] == in[1] && in[1] == in[2] && in[2] == in[3]) continue;

      Complex point[4];
      int exits[2], entries[2], n_exit = 0, n_entry = 0;
      for (int k = 0; k < 4; ++k) {
        const int m = (k + 1) % 4;
        if (in[k] == in[m]) continue;
        const double vp = value(ci[k], cj[k]), vq = value(ci[m], cj[m]);
        const double t = vp / (vp - vq);
        point[k] = node(ci[k], cj[k]) + t * (node(ci[m], cj[m]) - node(ci[k], cj[k]));
        if (in[k]) exits[n_exit++] = k;
        else entries[n_entry++] = k;
      }
      bool degenerate = false;
      for (int k = 0; k < 4; ++k) degenerate |= flat[cj[k] * stride + ci[k]] != 0;

      // Pair each exit with the next entry counter-clockwise when the cell
      // centre is inside, else with the previous one.
      const bool center_inside =
          n_exit == 2 && 0.25 * (value(i, j) + value(i + 1, j) + value(i + 1, j + 1) + value(i, j + 1)) < 0.0;
      for (int e = 0; e < n_exit; ++e) {
        const int from = exits[e];
        int to = entries[0];
        if (n_exit == 2) {
          auto ccw_gap = [](int a, int b) { return (b - a + 4) % 4; };
          const int next = ccw_gap(from, entries[0]) < ccw_gap(from, entries[1]) ? entries[0] : entries[1];
          const int prev = next == entries[0] ? entries[1] : entries[0];
          to = center_inside ? next : prev;
        }
        segments.push_back({point[from], point[to], 0.0, degenerate, -1});
        edges.emplace_back(edge_id[from], edge_id[to]);
      }
    }
  }

  // Connected components through shared edge crossings.
  std::unordered_map<int, int> slot;
  for (const auto& [a, b] : edges) {
    slot.emplace(a, static_cast<int>(slot.size()));
    slot.emplace(b, static_cast<int>(slot.size()));
  }
  UnionFind uf(slot.size());
  for (const auto& [a, b] : edges) uf.unite(slot[a], slot[b]);
  std::unordered_map<int, int> label;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const int root = uf.find(slot[edges[s].first]);
    segments[s].component = label.emplace(root, static_cast<int>(label.size())).first->second;
  }
  return segments;
}

std::vector<CurveSegment> curve_weights(std::vector<CurveSegment> segments,
                                        const BasisSystem& basis,
                                        CurveNormalization normalization) {
  const double scale = normalization == CurveNormalization::two_pi ? 1.0 / two_pi : 1.0;
  std::vector<double> signed_value(segments.size());
  std::unordered_map<int, double> component_total;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    signed_value[s] = segments[s].degenerate ? 0.0 : signed_form(basis, segments[s]);
    if (segments[s].component >= 0) component_total[segments[s].component] += signed_value[s];
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    auto& seg = segments[s];
    const double total =
        seg.component >= 0 ? component_total[seg.component] : signed_value[s];
    if (total < 0.0) std::swap(seg.a, seg.b);
    seg.weight = seg.degenerate ? 0.0 : scale * std::abs(signed_value[s]);
  }
  return segments;
}

Complex LimitMeasure::cell_center(int ix, int iy) const {
  return {window.x0 + (ix + 0.5) * cell_width(), window.y0 + (iy + 0.5) * cell_height()};
}

double LimitMeasure::curve_mass() const {
  double total = 0.0;
  for (const auto& s : curve) total += s.weight;
  return total;
}

LimitMeasure build_limit(std::shared_ptr<const BasisSystem> basis, const Box& window, double r,
                         int resolution, CurveNormalization normalization) {
  LimitMeasure limit;
  limit.basis = std::move(basis);
  limit.window = window;
  limit.r = r;
  limit.resolution = resolution;
  limit.normalization = normalization;
  limit.curve = curve_weights(extract_level_curve(*limit.basis, window, resolution), *limit.basis,
                              normalization);
  limit.density.resize(resolution, resolution);
  for (int iy = 0; iy < resolution; ++iy)
    for (int ix = 0; ix < resolution; ++ix)
      limit.density(iy, ix) = safe_density(*limit.basis, limit.cell_center(ix, iy));
  return limit;
}

double limit_pairing(const LimitMeasure& limit, const TestFunction& phi, double r) {
  require_disk(limit, r);
  double total = 0.0;
  visit_area(limit, r, [&](Complex p, double density, double area) {
    if (density != 0.0) total += density * std::log(r / std::abs(p)) * phi(p) * area;
  });
  for (const auto& s : limit.curve) {
    const Complex mid = 0.5 * (s.a + s.b);
    if (s.weight != 0.0 && std::abs(mid) < r) total += s.weight * std::log(r / std::abs(mid)) * phi(mid);
  }
  return total;
}

double limit_mass(const LimitMeasure& limit, const std::function<double(Complex)>& phi) {
  double total = 0.0;
  const double area = limit.cell_width() * limit.cell_height();
  for (int iy = 0; iy < limit.resolution; ++iy)
    for (int ix = 0; ix < limit.resolution; ++ix)
      if (limit.density(iy, ix) != 0.0) total += limit.density(iy, ix) * area * phi(limit.cell_center(ix, iy));
  for (const auto& s : limit.curve)
    if (s.weight != 0.0) total += s.weight * phi(0.5 * (s.a + s.b));
  return total;
}

std::vector<double> limit_bin_masses(const LimitMeasure& limit, const BinGrid& grid) {
  const double r = grid.radius;
  require_disk(limit, r);
  std::vector<double> bins(grid.size(), 0.0);
  visit_area(limit, r, [&](Complex p, double density, double area) {
    const int b = grid.index(p);
    if (density != 0.0 && b >= 0) bins[b] += density * std::log(r / std::abs(p)) * area;
  });
  for (const auto& s : limit.curve) {
    const Complex mid = 0.5 * (s.a + s.b);
    const int b = grid.index(mid);
    if (s.weight != 0.0 && b >= 0) bins[b] += s.weight * std::log(r / std::abs(mid));
  }
  return bins;
}

void write_density_csv(std::ostream& out, const LimitMeasure& limit) {
  out << "x,y,density\n";
  out.precision(17);
  for (int iy = 0; iy < limit.resolution; ++iy)
    for (int ix = 0; ix < limit.resolution; ++ix) {
      const Complex c = limit.cell_center(ix, iy);
      out << c.real() << ',' << c.imag() << ',' << limit.density(iy, ix) << '\n';
    }
}

void write_curve_csv(std::ostream& out, const LimitMeasure& limit) {
  out << "x0,y0,x1,y1,weight,degenerate\n";
  out.precision(17);
  for (const auto& s : limit.curve)
    out << s.a.real() << ',' << s.a.imag() << ',' << s.b.real() << ',' << s.b.imag() << ','
        << s.weight << ',' << (s.degenerate ? 1 : 0) << '\n';
}

void write_svg(std::ostream& out, const LimitMeasure& limit, std::span<const Complex> zeros) {
  const Box& w = limit.window;
  const double size = 600.0;
  const double scale = size / std::max(w.width(), w.height());
  auto x = [&](Complex z) { return (z.real() - w.x0) * scale; };
  auto y = [&](Complex z) { return (w.y1 - z.imag()) * scale; };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w.width() * scale
      << "\" height=\"" << w.height() * scale << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const Complex z : zeros)
    out << "<circle cx=\"" << x(z) << "\" cy=\"" << y(z) << "\" r=\"1.5\" fill=\"#1f77b4\" fill-opacity=\"0.5\"/>\n";
  for (const auto& s : limit.curve)
    out << "<line x1=\"" << x(s.a) << "\" y1=\"" << y(s.a) << "\" x2=\"" << x(s.b) << "\" y2=\""
        << y(s.b) << "\" stroke=\"" << (s.degenerate ? "#999999" : "#d62728") << "\" stroke-width=\"1.5\"/>\n";
  out << "</svg>\n";
}

}  // namespace zerodist
