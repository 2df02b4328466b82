#pragma once

// Pipeline stages behind the eegbench command line. Each cmd_* returns a process exit code:
// 0 success, 1 cell failures under --strict or an unexpected error, 2 invalid configuration,
// 3 I/O failure (unreadable inputs, unwritable outputs, stale or tampered caches).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "eegbench/config.hpp"
#include "eegbench/evaluation.hpp"

namespace eegbench {

inline constexpr const char* kOutputDirEnv = "EEGBENCH_OUTPUT_DIR";
inline constexpr const char* kFeatureCacheHeader = "EEGBENCH-FEATURES 1";

struct CliOptions {
    std::filesystem::path config;
    std::optional<int> jobs;
    std::optional<std::uint64_t> seed;
    bool strict = false;
    bool paper_faithful = false;
    std::set<std::string> stages;  // cmd_run only; empty means extract, select, train, report
};

int exit_code_for(const std::exception& e);

// Config from disk with command-line overrides and the output-directory variable applied.
RunConfig resolve_config(const CliOptions& opts);

// Load, band-pass, resample and window one dataset, keeping the declared task pair.
std::vector<Trial> ingest(const DatasetEntry& d, const PreprocessConfig& p);

// Content hash over the dataset inputs and every setting that shapes its features.
std::string feature_hash(const RunConfig& c, const DatasetEntry& d);

struct FeatureCache {
    std::string hash;
    PreparedDataset data;
};

void write_feature_cache(const std::filesystem::path& path, const FeatureCache& cache);
// Throws VersionError on a foreign or tampered header, MalformedInputError on a truncated body.
FeatureCache read_feature_cache(const std::filesystem::path& path);

std::filesystem::path feature_cache_path(const RunConfig& c, const std::string& dataset);
std::filesystem::path selection_path(const RunConfig& c, const std::string& dataset, const std::string& classifier);
std::filesystem::path results_path(const RunConfig& c, const std::string& dataset, const std::string& classifier);

int cmd_extract(const CliOptions& opts, std::ostream& log);
int cmd_select(const CliOptions& opts, std::ostream& log);
int cmd_train(const CliOptions& opts, std::ostream& log);
int cmd_report(const CliOptions& opts, std::ostream& log);
int cmd_run(const CliOptions& opts, std::ostream& log);

// Writes the recording as CSV with a trailing label column.
int cmd_synth(const std::filesystem::path& spec, std::uint64_t seed, const std::filesystem::path& out, std::ostream& log);

}  // namespace eegbench
