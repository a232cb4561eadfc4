#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "osgm/optimizers.hpp"
#include "osgm/problems.hpp"

namespace osgm {

// Sparse dataset in the LIBSVM convention: one sample per line, a real label
// followed by 1-based index:value pairs with strictly increasing indices.
struct SparseDataset {
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> labels;
  int n_features = 0;
};

// Tolerant of blank lines, extra whitespace, and '#' comments.  Throws
// ParseError carrying the 1-based line number for malformed pairs,
// non-increasing indices, or unparsable numbers.
SparseDataset parse_libsvm(const std::string& text);

// g17 formatting throughout, so serialize/parse round-trips byte-stably.
std::string serialize_libsvm(const SparseDataset& ds);

SpMat to_sparse_matrix(const SparseDataset& ds);

// Labels collapsed to +-1 by sign (zero maps to +1).
Vec binarized_labels(const SparseDataset& ds);

// Deterministic synthetic datasets. kind is one of quadratic | logistic |
// svm | lasso.  Quadratic encodes a factor A with spectrum(A'A) spaced
// geometrically over [1, kappa] exactly and labels A*xhat, so the realized
// condition number matches the target and the least-squares optimum is 0.
SparseDataset generate_synthetic(const std::string& kind, int n, int m,
                                 double kappa, unsigned long long seed);

// Ridge weight used for the classification objectives built from datasets.
inline constexpr double kDatasetReg = 1e-2;

// Builds the smooth objective a dataset encodes.  kind quadratic -> least
// squares (fstar computed by direct solve); logistic / svm -> regularized
// classification losses on sign labels.  lasso is composite, see below.
Objective dataset_objective(const std::string& kind, const SparseDataset& ds);

// Lasso phi = (1/2)||Ax-y||^2 + w||x||_1 with the conventional weight
// w = 0.1 * ||A'y||_inf derived from the data.
CompositeObjective dataset_composite(const SparseDataset& ds);

struct SyntheticSpec {
  int n = 0;
  int m = 0;
  double kappa = 0;
  unsigned long long seed = 0;
};

struct InstanceSpec {
  std::string name;
  std::string kind;       // quadratic | logistic | svm | lasso
  std::string path;       // dataset file; empty -> generate from synthetic
  SyntheticSpec synthetic;
};

struct AlgorithmSpec {
  std::string name;
  // Grid tokens: a number, "1/L", or "default". Empty -> default_grid(name).
  std::vector<std::string> grid;
};

struct ExperimentConfig {
  std::vector<InstanceSpec> instances;
  std::vector<AlgorithmSpec> algorithms;
  long budget = 1000;
  double tol = 1e-3;
  unsigned long long seed = 1;
  std::string out_dir;  // empty -> no trace files written
};

// JSON mirror of ExperimentConfig (field names match the struct members).
ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

// Per-algorithm stepsize grids: {"1/L"} for the fixed-step baselines,
// momentum {0.1,0.5,0.9,0.99} for gd-hb, {1/L,1e-3,...,10} for adam and
// adagrad, {"default"} for the online-scaled methods.
std::vector<std::string> default_grid(const std::string& algorithm);

// All algorithm names dispatch_run accepts.
std::vector<std::string> known_algorithms();

// Resolves a grid token against a problem's smoothness constant. "default"
// becomes NaN, which run configs interpret as "use the built-in default".
double resolve_grid_token(const std::string& token, double L);

// One run of a named algorithm: the token lands in lr, momentum, or the
// learning-rate slot that algorithm tunes.
RunTrace dispatch_run(const std::string& algorithm, const Objective& obj,
                      RunConfig cfg, const std::string& grid_token);

struct RunRecord {
  std::string instance;
  std::string algorithm;
  std::string grid;  // winning grid token
  bool solved = false;
  long oracles = 0;
  double final_f = std::numeric_limits<double>::quiet_NaN();
  double final_gnorm_inf = std::numeric_limits<double>::quiet_NaN();
  std::string error;  // nonempty -> instance could not be run
};

struct StatsTable {
  std::vector<RunRecord> records;  // sorted by (instance, algorithm)
  std::map<std::string, int> solved_count;

  std::string to_csv() const;       // full per-record table
  std::string summary_csv() const;  // algorithm,solved
};

// Runs every algorithm (x grid entry) on every instance from one shared
// starting point per instance, reports the best grid entry per pair, and
// writes trace CSVs under cfg.out_dir when set.  Instance failures (missing
// dataset, unsupported problem class) become per-record errors; the
// experiment continues.
StatsTable run_experiment(const ExperimentConfig& cfg);

// The 9-instance desk-scale benchmark: quadratics kappa in {10,100,1000} and
// three logistic + three svm datasets, all m=200 n=20, budget 1000,
// tol 1e-3.
ExperimentConfig default_suite();

std::string load_text_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& content);

}  // namespace osgm
