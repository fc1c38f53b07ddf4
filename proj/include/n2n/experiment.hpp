#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "n2n/connectivity.hpp"
#include "n2n/dataset.hpp"
#include "n2n/network.hpp"
#include "n2n/trainer.hpp"

namespace n2n {

enum class Method { Baseline, RP, CSP, N2NSkipRP, N2NSkipCSP };

Method method_from_string(const std::string& s);
std::string method_to_string(Method m);
bool method_uses_density(Method m);
bool method_uses_skips(Method m);

struct AnalysisConfig {
    double t = 1.5;            // diffusion time for signature distances
    double k_percent = 0.1;    // share of nonzero-indexed eigenvalues in alpha
    double threshold = 0.97;   // saturation threshold
    bool weighted = true;      // |w| adjacency vs binary
    std::vector<double> t_grid;

    // Configured grid, or the default geometric grid 1e-2..1e3 (8 pts/decade).
    std::vector<double> grid() const;
};

struct DatasetConfig {
    std::string type = "blobs";  // "blobs" or "csv"
    std::size_t classes = 4;
    std::size_t dim = 100;
    std::size_t per_class = 200;
    double spread = 0.35;
    std::uint64_t seed = 7;
    std::string path;  // csv only
};

Dataset make_dataset(const DatasetConfig& cfg);

struct ExperimentConfig {
    std::string name = "experiment";
    std::vector<std::size_t> layer_dims = {100, 64, 32, 16, 4};
    std::size_t span = 2;
    Method method = Method::Baseline;
    double density = 0.1;
    double split_ratio = 0.5;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    HyperParams hp;
    DatasetConfig dataset;
    AnalysisConfig analysis;

    void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

struct RunResult {
    Method method = Method::Baseline;
    double density = 1.0;  // effective target (1.0 for baseline)
    std::uint64_t seed = 0;
    double density_achieved = 1.0;
    double test_accuracy = 0.0;
    double train_accuracy = 0.0;
    double train_loss = 0.0;
    double f_distance = 0.0;         // Eq. 6 vs the trained per-seed reference
    double saturation_time = 0.0;    // +inf when never saturated on the grid
    double ref_saturation_time = 0.0;
    std::string dir;  // run directory, relative to the experiment root
};

struct ExperimentReport {
    std::string name;
    nlohmann::json config;  // echo of the base config
    std::vector<RunResult> runs;
};

// Dense trained reference per seed, shared across every cell of a sweep.
struct ReferenceEntry {
    Network net;
    History history;
    Spectrum spectrum;
    ScreeCurve scree;
    HeatSignature signature;
    double saturation = 0.0;
    double test_accuracy = 0.0;
    double train_accuracy = 0.0;
    double train_loss = 0.0;
};

class ReferenceCache {
public:
    ReferenceCache(const ExperimentConfig& cfg, const Dataset& data) : cfg_(cfg), data_(data) {}
    const ReferenceEntry& at(std::uint64_t seed);

private:
    const ExperimentConfig& cfg_;
    const Dataset& data_;
    std::map<std::uint64_t, ReferenceEntry> entries_;
};

// Runs method x density x seeds under out_root/<name>/, writes per-run
// artifacts (checkpoint.json, history.csv, scree.csv, metrics.json) and a
// manifest.json, and returns the report. Baseline collapses to one density.
ExperimentReport run_sweep(const ExperimentConfig& base, const std::vector<Method>& methods,
                           const std::vector<double>& densities, const std::string& out_root);

// Single-cell convenience wrapper: cfg.method at cfg.density.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& out_root);

nlohmann::json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& doc);
ExperimentReport load_manifest(const std::string& path);

// Runs of one (method, density) cell, with the same config/base.
ExperimentReport extract_cell(const ExperimentReport& report, Method method, double density);

struct SeedDelta {
    std::uint64_t seed = 0;
    double acc_delta = 0.0;  // a - b
    double f_delta = 0.0;    // a - b (negative: a closer to the reference)
    double sat_delta = 0.0;  // a - b (both-infinite counts as a tie, 0)
    double f_ratio = 0.0;    // f_a / f_b (infinity when f_b == 0 < f_a, 1 when both 0)
};

struct ComparisonSummary {
    std::string label_a, label_b;
    std::vector<SeedDelta> per_seed;
    std::size_t acc_a_wins = 0;       // acc_delta > 0
    std::size_t f_a_wins = 0;         // f_delta < 0
    std::size_t sat_a_not_worse = 0;  // sat_a <= sat_b (inf vs inf ties)
    double mean_acc_a = 0.0, mean_acc_b = 0.0;
};

// Paired per-seed comparison of two single-cell reports sharing the same
// dataset descriptor, network shape, and seed list.
ComparisonSummary compare(const ExperimentReport& a, const ExperimentReport& b);

nlohmann::json comparison_to_json(const ComparisonSummary& summary);

// Output root: N2NSKIP_OUT env var when set, otherwise "out".
std::string default_out_root();

// Deterministic per-stage seed so that adding or skipping one pipeline stage
// never disturbs another stage's draws.
std::uint64_t stage_seed(std::uint64_t seed, std::uint64_t tag);

inline constexpr std::uint64_t kStageNet = 1;
inline constexpr std::uint64_t kStagePrune = 2;
inline constexpr std::uint64_t kStageSkip = 3;
inline constexpr std::uint64_t kStageTrain = 4;

}  // namespace n2n
