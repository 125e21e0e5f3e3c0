#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "zerodist/ensemble.hpp"
#include "zerodist/limit.hpp"
#include "zerodist/test_function.hpp"
#include "zerodist/zeros.hpp"

namespace zerodist {

struct Atom {
  Complex location;
  double weight = 0.0;  // multiplicity * log(r/|z|) / n
  int multiplicity = 1;
};

/// Z(r, G_n) = (1/n) sum over zeros 0 < |z| < r of log(r/|z|) delta_z.
struct WeightedPointMeasure {
  std::vector<Atom> atoms;
  double r = 0.0;
  int n = 0;

  double total_mass() const;
};

/// Throws ErrorKind::degenerate for n = 0. Origin-flagged zeros are skipped.
WeightedPointMeasure normalized_counting_measure(const ZeroSet& zeros, int n);

double pair(const WeightedPointMeasure& measure, const std::function<double(Complex)>& phi);

/// Mean and standard error of a per-trial quantity.
struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

struct MonteCarloOptions {
  BinGrid grid;  // grid.radius is overwritten with r
  std::vector<TestFunction> test_functions;
  SamplerForm form = SamplerForm::reduced;
  double tolerance = 1e-10;
  int workers = 1;
  bool keep_atoms = false;
  double max_failure_rate = 0.02;
};

struct TrialFailure {
  std::uint64_t trial;
  std::string message;
};

struct TrialAtoms {
  std::uint64_t trial;
  std::vector<Atom> atoms;
};

struct AggregatedMeasure {
  int n = 0;
  double r = 0.0;
  std::uint64_t seed = 0;
  int requested = 0;  // trials attempted
  int trials = 0;     // trials that succeeded
  std::vector<TrialFailure> failures;
  BinGrid grid;
  Estimate total_mass;
  Estimate zero_count;  // with multiplicity, 0 < |z| < r
  std::vector<std::string> names;
  std::vector<Estimate> pairings;  // one per test function
  std::vector<Estimate> bins;      // grid.size() entries
  std::vector<TrialAtoms> atoms;   // successful trials, when kept
};

/// Samples trials 0..trials-1 concurrently, reduces per-trial statistics in
/// trial order. Throws ErrorKind::trial_failure_rate above the failure limit.
AggregatedMeasure monte_carlo_expectation(const EnsembleSpec& spec, double r, int trials,
                                          const MonteCarloOptions& options = {});

struct PairingComparison {
  std::string name;
  double empirical = 0.0;
  double se = 0.0;
  double theoretical = 0.0;
  double gap = 0.0;     // |empirical - theoretical|
  double gap_se = 0.0;  // gap / se, infinite when se = 0 and gap > 0
};

struct Comparison {
  std::vector<PairingComparison> pairings;
  std::vector<double> theoretical_bins;
  double discrepancy = 0.0;  // sum over bins |empirical - theoretical|
};

/// Throws ErrorKind::window_mismatch unless the radii agree and the limit
/// window covers the disk.
Comparison compare(const AggregatedMeasure& empirical, const LimitMeasure& theoretical,
                   const std::vector<TestFunction>& test_functions);

/// The limit measure expressed as a zero-variance aggregate on the same grid.
AggregatedMeasure theoretical_aggregate(const LimitMeasure& limit, const BinGrid& grid,
                                        const std::vector<TestFunction>& test_functions);

/// CSV rows: trial,re,im,weight.
void write_atoms_csv(std::ostream& out, const AggregatedMeasure& aggregate);

}  // namespace zerodist
