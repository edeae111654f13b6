#pragma once

// Config-driven batch runner behind the `smoothnorm` executable: parses a run
// configuration, builds the approximating norm and runs verification suites,
// producing a structured report plus flat CSV tables.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smoothnorm/boundary.hpp"
#include "smoothnorm/equiv.hpp"
#include "smoothnorm/error.hpp"
#include "smoothnorm/spaces.hpp"

namespace smoothnorm {

/// Malformed or incomplete configuration; maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct BudgetConfig {
  std::size_t approx = 1000;
  std::size_t claim2d = 1000;  // per net point
  std::size_t localdep_points = 50;
  std::size_t localdep_perturbations = 20;
  std::size_t boundary = 256;
  std::size_t tensor = 200;
  std::size_t tensor_m = 2000;  // sampled boundary of Y in the product check
  std::size_t equiv = 200;
};

struct ToleranceConfig {
  double approx = 1e-9;
  double claim2d = 1e-7;
  double boundary = 1e-9;
  double richardson = 1e-5;
  double tensor = 1e-12;
  double product = 1e-4;
  double equiv = 1e-9;
};

struct SmoothConfig {
  std::vector<Vector> points;  // flattened coefficients of X (x) Y
  std::vector<Vector> directions;
  std::vector<double> steps{1e-3, 1e-4};
  double kink_floor = 1e-3;
};

struct DecompositionConfig {
  enum class Type { coordinate, explicit_pieces, pipeline };
  Type type = Type::coordinate;
  std::vector<Piece> pieces;
  ClosureOracle closure;
  PipelineOptions pipeline;
  std::size_t pipeline_samples = 500;
};

struct RunConfig {
  std::string name;
  std::optional<ModelSpace> space;
  std::optional<ModelSpace> factor;  // scalar when absent
  DecompositionConfig decomposition;
  double epsilon = 0.0;
  std::optional<std::uint64_t> seed;
  BudgetConfig budgets;
  ToleranceConfig tolerances;
  SmoothConfig smooth;
  std::size_t tensor_y_dim = 2;
  std::vector<std::string> suites;  // empty means all
};

/// Suite names in execution order, without "all".
const std::vector<std::string>& suite_names();

/// Parses the JSON configuration text; throws ConfigError with a diagnostic.
RunConfig parse_config(std::string_view text, std::string name = "config");
RunConfig load_config(const std::filesystem::path& path);

struct RunOptions {
  std::vector<std::string> suites;  // overrides the config when nonempty; "all" allowed
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  std::optional<double> tol;  // overrides the approx tolerance
};

struct Table {
  std::string name;  // file name
  std::string csv;
};

struct RunResult {
  std::string report;  // JSON, deterministic given (config, seed)
  std::vector<Table> tables;
  std::map<std::string, bool> suite_pass;
  std::map<std::string, double> seconds;  // wall time per suite (not in the report)
  bool pass = false;
};

/// Throws ConfigError for an unknown suite or a missing seed.
RunResult run_suites(const RunConfig& config, const RunOptions& options);

/// Writes report.json, timing.json and the tables into dir (created if missing).
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

}  // namespace smoothnorm
