#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eegbench/classifiers.hpp"
#include "eegbench/features.hpp"
#include "eegbench/split.hpp"
#include "eegbench/wrapper.hpp"

namespace eegbench {

// Six groups followed by the across-group selection.
inline constexpr int kFeatureSets = 7;
inline constexpr int kBestOfAll = 6;

std::string feature_set_name(int set);   // "Statistic" ... "Wavelet", "best-of-all"
std::string feature_set_title(int set);  // "Group 1 (Statistic)" ... "Best of all groups"
int feature_set_from_name(std::string_view name);

struct EvaluationConfig {
    double split_ratio = 2.0 / 3.0;
    SplitMode split_mode = SplitMode::Stratified;
    bool drop_overlapping = false;

    void validate() const;
};

struct BenchmarkConfig {
    EvaluationConfig evaluation;
    SelectionConfig selection;
    std::vector<ClassifierSpec> classifiers;
    std::uint64_t seed = 0;
    int jobs = 1;
};

// Raw features of one dataset, and where each trial came from.
struct PreparedDataset {
    std::string name;
    FeatureMatrix matrix;
    std::vector<TrialSpan> spans;  // empty disables overlap dropping
};

// Classifier-independent state of one dataset: split, train-row z-score, per-group shortlists.
struct DatasetContext {
    std::string name;
    std::uint64_t seed = 0;
    SplitPlan plan;
    FeatureMatrix matrix;  // normalized
    std::array<std::vector<Index>, 6> shortlists;
    std::array<std::string, 6> shortlist_errors;
};

// Runs fn(0..n-1) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

std::uint64_t dataset_seed(std::uint64_t global, std::string_view dataset);

// Shortlists are skipped when `with_shortlists` is false (scoring stored selections only).
DatasetContext prepare_dataset(const PreparedDataset& d, const BenchmarkConfig& cfg, bool with_shortlists = true);

struct CellResult {
    std::string dataset;
    std::string classifier;
    std::string feature_set;
    std::optional<double> accuracy;  // percent on the held-out rows
    std::string error;
    SelectionRecord selection;

    bool operator==(const CellResult&) const = default;
};

// Selection for every feature set of one (dataset, classifier) pair.
std::vector<SelectionRecord> select_cell(const DatasetContext& ctx, const ClassifierSpec& spec,
                                         const BenchmarkConfig& cfg);
// Held-out accuracy of each stored selection. Fitted models go to `models` when given
// (empty entries for failed cells).
std::vector<CellResult> score_cell(const DatasetContext& ctx, const ClassifierSpec& spec,
                                   std::span<const SelectionRecord> selections, std::uint64_t seed,
                                   std::vector<std::optional<TrainedModel>>* models = nullptr);
std::vector<CellResult> evaluate_cell(const DatasetContext& ctx, const ClassifierSpec& spec,
                                      const BenchmarkConfig& cfg);

// Seed for the final model of a cell.
std::uint64_t cell_seed(const DatasetContext& ctx, const ClassifierSpec& spec);

struct AggregateCell {
    std::optional<double> mean;
    double stddev = 0;  // population
    int n = 0;
    bool operator==(const AggregateCell&) const = default;
};

struct AggregateRow {
    std::string classifier;
    std::array<AggregateCell, kFeatureSets> sets;
    int best = -1;  // among the six groups
    int second = -1;
    std::optional<double> best_minus_second;
    std::optional<double> best_of_all_minus_best_group;
    bool operator==(const AggregateRow&) const = default;
};

struct DeltaSummary {
    std::optional<double> mean;
    double stddev = 0;
    int n = 0;
    bool operator==(const DeltaSummary&) const = default;
};

struct BenchmarkReport {
    std::vector<std::string> datasets;
    std::vector<std::string> classifiers;
    std::vector<CellResult> cells;  // dataset-major, then classifier, then feature set
    std::vector<AggregateRow> rows;
    DeltaSummary best_minus_second;
    DeltaSummary best_of_all_minus_best_group;
    // Same, ignoring classifiers whose across-group accuracy fell below their best group.
    DeltaSummary best_of_all_gain_only;
    // Classifier -> descriptor family -> count over the best-of-all selections.
    std::map<std::string, std::map<std::string, int>> family_distribution;
    std::map<std::string, std::uint64_t> seeds;
    nlohmann::json config;

    bool operator==(const BenchmarkReport&) const = default;
};

AggregateRow aggregate_row(const std::string& classifier, std::span<const CellResult> cells);
DeltaSummary summarize(std::span<const double> values);

// Histogram of descriptor families over the selected columns.
std::map<std::string, int> feature_family_distribution(std::span<const Subset> subsets,
                                                       const std::vector<FeatureDescriptor>& descriptors);

// Orders the cells and fills every derived field.
BenchmarkReport assemble_report(std::vector<CellResult> cells, std::vector<std::string> datasets,
                                std::vector<std::string> classifiers, nlohmann::json config,
                                std::map<std::string, std::uint64_t> seeds);

// Throws StructuralError when a stored aggregate disagrees with the cells.
void check_aggregates(const BenchmarkReport& r);

// Failed cells are recorded in the report; the run carries on.
BenchmarkReport run_benchmark(std::span<const PreparedDataset> datasets, const BenchmarkConfig& cfg,
                              nlohmann::json config_echo = {});

nlohmann::json to_json(const CellResult& c);
CellResult cell_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BenchmarkReport& r);
BenchmarkReport report_from_json(const nlohmann::json& j);

enum class ReportFormat { Csv, Json, PlotData };

// CSV: table3.csv and per_dataset_<classifier>.csv. JSON: report.json. Plot data: plotdata.csv.
std::vector<std::filesystem::path> emit_report(const BenchmarkReport& r, const std::filesystem::path& dir,
                                               const std::set<ReportFormat>& formats = {ReportFormat::Csv,
                                                                                        ReportFormat::Json,
                                                                                        ReportFormat::PlotData});

std::string table3_csv(const BenchmarkReport& r);
std::string per_dataset_csv(const BenchmarkReport& r, const std::string& classifier);
std::string plotdata_csv(const BenchmarkReport& r);

// Write to a sibling temporary and rename over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

nlohmann::json to_json(const EvaluationConfig& c);
EvaluationConfig evaluation_config_from_json(const nlohmann::json& j);

}  // namespace eegbench
