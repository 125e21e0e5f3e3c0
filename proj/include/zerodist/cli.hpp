#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "zerodist/ensemble.hpp"
#include "zerodist/limit.hpp"
#include "zerodist/measures.hpp"

namespace zerodist::cli {

inline constexpr const char* version = "zerodist 0.1.0";

/// Run configuration. JSON schema (all keys optional except the basis):
///   basis_file | basis       path to a basis file, or inline basis text
///   n | n_sweep              degree, or strictly increasing list of degrees
///   r, trials, seed, workers, tolerance, sampler ("reduced" | "full")
///   resolution, window [x0, x1, y0, y1], bins [radial, angular]
///   curve_normalization      "two-pi" | "paper-literal"
///   test_functions           [{"kind": "constant" | "radial_bump" | "sector"
///                              | "annulus" | "gaussian", ...}]
///   output_dir, dump_zeros, svg, lemma_n
struct RunConfig {
  std::string basis_file;
  std::string basis_text;
  std::vector<int> n_values{300};
  double r = 2.0;
  int trials = 50;
  std::uint64_t seed = 1;
  int workers = 1;
  double tolerance = 1e-10;
  SamplerForm form = SamplerForm::reduced;
  int resolution = 256;
  std::optional<Box> window;  // defaults to [-r, r]^2
  BinGrid grid;
  CurveNormalization normalization = CurveNormalization::two_pi;
  nlohmann::json test_functions = nlohmann::json::array();
  std::string output_dir = "zerodist-out";
  bool dump_zeros = false;
  bool svg = false;
  std::vector<int> lemma_n{10, 100, 1000};

  Box effective_window() const;
  std::vector<TestFunction> functions() const;
  std::shared_ptr<const BasisSystem> load_basis() const;
};

/// Validates and fills defaults. `default_workers` seeds the worker count
/// when the document has none.
RunConfig parse_config(const nlohmann::json& document, int default_workers = 1);
nlohmann::json to_json(const RunConfig& config);

TestFunction parse_test_function(const nlohmann::json& spec, double r);

nlohmann::json to_json(const AggregatedMeasure& aggregate);
AggregatedMeasure aggregate_from_json(const nlohmann::json& document);

/// Each writes its artifacts plus manifest.json into config.output_dir and
/// returns the report document (also written as report.json).
nlohmann::json run_simulate(const RunConfig& config);
nlohmann::json run_limit(const RunConfig& config);
nlohmann::json run_compare(const RunConfig& config);
nlohmann::json run_lemmas(const RunConfig& config);
nlohmann::json run_roots(const RunConfig& config);

/// Entry point: `zerodist <simulate|limit|compare|lemmas|roots> CONFIG [overrides]`.
/// Failures print a JSON error record to stderr and return nonzero.
int main(int argc, char** argv);

}  // namespace zerodist::cli
