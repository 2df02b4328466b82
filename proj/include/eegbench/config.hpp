#pragma once

// Run configuration: JSON schema, defaults and field-level validation.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "eegbench/classifiers.hpp"
#include "eegbench/evaluation.hpp"
#include "eegbench/features.hpp"
#include "eegbench/signal_io.hpp"
#include "eegbench/wrapper.hpp"

namespace eegbench {

struct PreprocessConfig {
    bool bandpass = true;
    double low = 0.5;
    double high = 45.0;
    double target_fs = 128.0;
    double window_s = 1.0;
    double hop_s = 0.5;
};

// A dataset read from files, or generated in memory from a synthetic spec.
struct DatasetEntry {
    DatasetSpec spec;
    LoadOptions load;
    std::optional<SynthSpec> synth;
    std::uint64_t synth_seed = 0;
};

struct RunConfig {
    std::vector<DatasetEntry> datasets;
    PreprocessConfig preprocessing;
    FeatureConfig features;
    SelectionConfig selection;
    EvaluationConfig evaluation;
    std::vector<ClassifierSpec> classifiers;
    std::filesystem::path output_dir = "eegbench-out";
    std::uint64_t seed = 0;
    int jobs = 0;  // 0 = hardware concurrency
};

// Relative dataset paths resolve against `base_dir`.
RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
// Throws IoError when unreadable, ConfigError on bad JSON or fields.
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& c);
// The subset of the config that determines results (no output directory or job count).
nlohmann::json result_config(const RunConfig& c);

BenchmarkConfig benchmark_config(const RunConfig& c);

nlohmann::json to_json(const DatasetEntry& d);
nlohmann::json to_json(const PreprocessConfig& c);
nlohmann::json to_json(const FeatureConfig& c);
FeatureConfig feature_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthSpec& s);
SynthSpec synth_spec_from_json(const nlohmann::json& j, const std::string& path = "synth");

}  // namespace eegbench
