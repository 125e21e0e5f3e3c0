#include "zerodist/measures.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "zerodist/error.hpp"
#include "zerodist/rng.hpp"

namespace zerodist {

namespace {

struct TrialStats {
  double total = 0.0;
  double count = 0.0;
  std::vector<double> pairings;
  std::vector<double> bins;
  std::vector<Atom> atoms;
};

struct Accumulator {
  double sum = 0.0, sum_sq = 0.0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
  }
  Estimate finish(int m) const {
    if (m == 0) return {};
    const double mean = sum / m;
    if (m == 1) return {mean, 0.0};
    const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1));
    return {mean, std::sqrt(var / m)};
  }
};

TrialStats trial_stats(const WeightedPointMeasure& measure, const MonteCarloOptions& options,
                       const BinGrid& grid) {
  TrialStats t;
  t.total = measure.total_mass();
  for (const auto& a : measure.atoms) t.count += a.multiplicity;
  for (const auto& phi : options.test_functions) t.pairings.push_back(pair(measure, phi));
  t.bins.assign(grid.size(), 0.0);
  for (const auto& a : measure.atoms) {
    const int b = grid.index(a.location);
    if (b >= 0) t.bins[b] += a.weight;
  }
  if (options.keep_atoms) t.atoms = measure.atoms;
  return t;
}

}  // namespace

double WeightedPointMeasure::total_mass() const {
  double total = 0.0;
  for (const auto& a : atoms) total += a.weight;
  return total;
}

WeightedPointMeasure normalized_counting_measure(const ZeroSet& zeros, int n) {
  if (n <= 0) throw Error(ErrorKind::degenerate, "normalization needs n >= 1");
  WeightedPointMeasure m;
  m.r = zeros.radius;
  m.n = n;
  for (const auto& z : zeros.zeros) {
    const double modulus = std::abs(z.location);
    if (z.near_origin || !(modulus > 0.0) || !(modulus < zeros.radius)) continue;
    m.atoms.push_back({z.location, z.multiplicity * std::log(zeros.radius / modulus) / n, z.multiplicity});
  }
  return m;
}

double pair(const WeightedPointMeasure& measure, const std::function<double(Complex)>& phi) {
  double total = 0.0;
  for (const auto& a : measure.atoms) total += a.weight * phi(a.location);
  return total;
}

AggregatedMeasure monte_carlo_expectation(const EnsembleSpec& spec, double r, int trials,
                                          const MonteCarloOptions& options) {
  if (trials < 1) throw Error(ErrorKind::invalid_config, "at least one trial is required");
  if (!(r > 0.0)) throw Error(ErrorKind::invalid_config, "radius must be positive");
  BinGrid grid = options.grid;
  grid.radius = r;

  std::vector<std::optional<TrialStats>> results(trials);
  std::vector<std::string> errors(trials);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int t = next++; t < trials; t = next++) {
      try {
        const auto g = sample(spec, static_cast<std::uint64_t>(t), options.form);
        CountOptions count;
        count.seed = rng::key(spec.seed, static_cast<std::uint64_t>(t), 0, 0x7a65726f);
        const ZeroSet zeros = find_zeros(g, r, options.tolerance, count);
        results[t] = trial_stats(normalized_counting_measure(zeros, spec.n), options, grid);
      } catch (const std::exception& e) {
        errors[t] = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min(options.workers, trials));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  AggregatedMeasure agg;
  agg.n = spec.n;
  agg.r = r;
  agg.seed = spec.seed;
  agg.requested = trials;
  agg.grid = grid;
  for (const auto& phi : options.test_functions) agg.names.push_back(phi.name());

  Accumulator total, count;
  std::vector<Accumulator> pairings(options.test_functions.size()), bins(grid.size());
  for (int t = 0; t < trials; ++t) {
    if (!results[t]) {
      agg.failures.push_back({static_cast<std::uint64_t>(t), errors[t]});
      continue;
    }
    const TrialStats& s = *results[t];
    ++agg.trials;
    total.add(s.total);
    count.add(s.count);
    for (std::size_t k = 0; k < pairings.size(); ++k) pairings[k].add(s.pairings[k]);
    for (std::size_t b = 0; b < bins.size(); ++b) bins[b].add(s.bins[b]);
    if (options.keep_atoms) agg.atoms.push_back({static_cast<std::uint64_t>(t), s.atoms});
  }
  const double rate = static_cast<double>(agg.failures.size()) / trials;
  if (rate > options.max_failure_rate) {
    std::ostringstream os;
    os << agg.failures.size() << " of " << trials << " trials failed; first: trial "
       << agg.failures.front().trial << ": " << agg.failures.front().message;
    throw Error(ErrorKind::trial_failure_rate, os.str());
  }
  agg.total_mass = total.finish(agg.trials);
  agg.zero_count = count.finish(agg.trials);
  for (const auto& p : pairings) agg.pairings.push_back(p.finish(agg.trials));
  for (const auto& b : bins) agg.bins.push_back(b.finish(agg.trials));
  return agg;
}

Comparison compare(const AggregatedMeasure& empirical, const LimitMeasure& theoretical,
                   const std::vector<TestFunction>& test_functions) {
  const double r = empirical.r;
  const Box& w = theoretical.window;
  if (std::abs(theoretical.r - r) > 1e-12 * r || w.x0 > -r || w.x1 < r || w.y0 > -r || w.y1 < r)
    throw Error(ErrorKind::window_mismatch, "limit measure radius/window does not match the aggregate");
  if (test_functions.size() != empirical.pairings.size())
    throw Error(ErrorKind::window_mismatch, "test-function list differs from the aggregate's");

  Comparison c;
  for (std::size_t k = 0; k < test_functions.size(); ++k) {
    PairingComparison p;
    p.name = test_functions[k].name();
    p.empirical = empirical.pairings[k].mean;
    p.se = empirical.pairings[k].se;
    p.theoretical = limit_pairing(theoretical, test_functions[k], r);
    p.gap = std::abs(p.empirical - p.theoretical);
    p.gap_se = p.se > 0 ? p.gap / p.se : (p.gap > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    c.pairings.push_back(p);
  }
  c.theoretical_bins = limit_bin_masses(theoretical, empirical.grid);
  for (std::size_t b = 0; b < c.theoretical_bins.size(); ++b)
    c.discrepancy += std::abs(empirical.bins[b].mean - c.theoretical_bins[b]);
  return c;
}

AggregatedMeasure theoretical_aggregate(const LimitMeasure& limit, const BinGrid& grid,
                                        const std::vector<TestFunction>& test_functions) {
  AggregatedMeasure agg;
  agg.r = limit.r;
  agg.grid = grid;
  agg.grid.radius = limit.r;
  agg.requested = agg.trials = 1;
  agg.total_mass = {limit_pairing(limit, TestFunction::constant(limit.r), limit.r), 0.0};
  for (const auto& phi : test_functions) {
    agg.names.push_back(phi.name());
    agg.pairings.push_back({limit_pairing(limit, phi, limit.r), 0.0});
  }
  for (const double m : limit_bin_masses(limit, agg.grid)) agg.bins.push_back({m, 0.0});
  return agg;
}

void write_atoms_csv(std::ostream& out, const AggregatedMeasure& aggregate) {
  out << "trial,re,im,weight\n";
  out.precision(17);
  for (const auto& t : aggregate.atoms)
    for (const auto& a : t.atoms)
      out << t.trial << ',' << a.location.real() << ',' << a.location.imag() << ',' << a.weight << '\n';
}

}  // namespace zerodist
