// Reproducible trial harness: generators + checkers + algorithms, with
// JSONL / JSON / CSV persistence.
//
// A trial is a pure function of (model parameters, SeedSpec), so records
// replay bit-exactly and aggregation is independent of the thread count.
#pragma once

#include "stablelab/analytics.hpp"
#include "stablelab/serialize.hpp"
#include "stablelab/stability.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stablelab {

enum class Model { BipartiteStrict, CyclicStrict, BipartitePoset };

std::string to_string(Model m);
Model parse_model(std::string_view text);

struct ModelParams {
  Model model = Model::BipartiteStrict;
  int n = 1;
  int r = 3;   // cyclic only
  int k1 = 1;  // poset only
  int k2 = 1;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

Json to_json(const ModelParams& p);
ModelParams params_from_json(Model model, const Json& params);
AnyInstance generate(const ModelParams& p, const SeedSpec& seed);

struct ExperimentOptions {
  EnumerationCap cap;
  int threads = 1;
  bool record_timing = false;  // wall time breaks byte-identical replay
  int cyclic_threshold = 0;    // 0: strict majority
  bool keep_partner = false;
};

struct TrialRecord {
  ModelParams params;
  SeedSpec seed;
  std::optional<std::uint64_t> instance_index;  // exhaustive sweeps
  std::string instance_hash;
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t matchings_examined = 0;
  std::optional<std::uint64_t> total_proposals;
  std::map<std::string, EstimateWithError> mc_estimates;  // Monte Carlo mode
  std::optional<double> wall_time_ms;
};

Json to_json(const TrialRecord& r);

struct QuantityStats {
  double mean = 0;
  double std_error = 0;
  double min = 0;
  double max = 0;
  std::uint64_t samples = 0;
};

struct ProportionStats {
  double value = 0;
  double std_error = 0;  // binomial
};

struct ExperimentSummary {
  std::string experiment;
  ModelParams params;
  std::uint64_t trials = 0;
  std::map<std::string, QuantityStats> quantities;
  std::map<std::string, ProportionStats> solvable_fraction;
  Json extra = Json::object();
};

Json to_json(const ExperimentSummary& s);

struct ExperimentResult {
  ExperimentSummary summary;
  std::vector<TrialRecord> records;
};

QuantityStats quantity_stats(const std::vector<double>& values);

/// Notion names: "weak", "strong", "super" (bipartite); "weak", "strong" (cyclic).
std::vector<TrialRecord> run_trials(const ModelParams& params, const std::vector<std::string>& notions,
                                    std::uint64_t trials, const SeedSpec& seed, const ExperimentOptions& opts);

/// Every instance of a strict model, each with equal weight; (n!)^{2n}
/// bipartite or (n!)^{rn} cyclic instances.
std::vector<TrialRecord> run_exhaustive(const ModelParams& params, const std::vector<std::string>& notions,
                                        const ExperimentOptions& opts);

/// Mean count per notion ("count_<notion>") and solvable fractions.
ExperimentSummary summarize(const std::string& experiment, const ModelParams& params,
                            const std::vector<TrialRecord>& records);

ExperimentResult estimate_expected_count(const ModelParams& params, const std::string& notion, std::uint64_t trials,
                                         const SeedSpec& seed, const ExperimentOptions& opts = {});
ExperimentResult estimate_solvable_fraction(const ModelParams& params, const std::string& notion,
                                            std::uint64_t trials, const SeedSpec& seed,
                                            const ExperimentOptions& opts = {});

/// Exact mean over all instances, as numerator / denominator.
struct ExactMean {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;
  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};
ExactMean exhaustive_expected_count(const ModelParams& params, const std::string& notion,
                                    const ExperimentOptions& opts = {});

/// Coupled (k_base, k_base) -> (k_base + 1, k_base) instances; counts per
/// trial are "base_weak", "coupled_weak", "base_super", "coupled_super".
/// summary.extra carries "weak_violations", "super_violations" and, for
/// k_base = 1, "strict_mismatches" against the sorted-list strict model.
ExperimentResult monotonicity_experiment(int n, int k_base, std::uint64_t trials, const SeedSpec& seed,
                                         const ExperimentOptions& opts = {});

/// Weakly stable cyclic counts; summary.extra carries c_r, the reference
/// c_r (n log n / 2)^{r-1} and the ratio of the mean to it.
ExperimentResult cyclic_expectation_experiment(int r, int n, std::uint64_t trials, const SeedSpec& seed,
                                               const ExperimentOptions& opts = {});

/// Gale-Shapley proposal counts on uniform strict instances.
ExperimentResult proposal_experiment(int n, std::uint64_t trials, const SeedSpec& seed,
                                     const ExperimentOptions& opts = {});

/// n! times the Monte Carlo stability integrals (bipartite models only).
ExperimentResult mc_expected_count(const ModelParams& params, std::uint64_t samples, const SeedSpec& seed,
                                   const ExperimentOptions& opts = {});

// --- manifests ------------------------------------------------------------

/// {"experiment", "name", "model", "params", "notions", "trials",
///  "master_seed", "caps", "exhaustive", "mc", "samples", "threshold",
///  "record_timing"}
struct Manifest {
  std::string experiment = "expected_count";
  std::string name;
  ModelParams params;
  int k_base = 1;  // monotonicity only
  std::vector<std::string> notions = {"weak"};
  std::uint64_t trials = 100;
  std::uint64_t master_seed = 0;
  EnumerationCap caps;
  bool exhaustive = false;
  bool mc = false;
  std::uint64_t samples = 100000;
  int threshold = 0;
  bool keep_partner = false;
  bool record_timing = false;
};

Manifest manifest_from_json(const Json& j);
Json to_json(const Manifest& m);

ExperimentResult run_manifest(const Manifest& m, int threads);

struct ManifestOutputs {
  std::string jsonl_path;
  std::string summary_path;
  std::string csv_path;  // empty unless requested
  std::string jsonl_hash;
  std::string summary_hash;
};

/// Writes <name>.jsonl, <name>.summary.json and optionally <name>.csv.
ManifestOutputs write_outputs(const Manifest& m, const ExperimentResult& result, const std::string& out_dir,
                              bool csv);

std::string records_jsonl(const std::vector<TrialRecord>& records);
std::string records_csv(const std::vector<TrialRecord>& records);
std::string summary_csv(const ExperimentSummary& s);

}  // namespace stablelab
