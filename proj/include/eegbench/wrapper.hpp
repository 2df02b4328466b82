#pragma once

// Classifier-dependent (wrapper) selection on top of the filter ranking.

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eegbench/classifiers.hpp"
#include "eegbench/features.hpp"
#include "eegbench/selection.hpp"
#include "eegbench/split.hpp"

namespace eegbench {

enum class Protocol {
    InnerCv,        // k-fold cross-validation inside the training rows
    PaperFaithful,  // train on the training rows, score on the held-out rows
};

std::string_view to_string(Protocol p);
Protocol protocol_from_string(std::string_view s);

struct WrapperConfig {
    Protocol protocol = Protocol::InnerCv;
    int folds = 3;
    std::uint64_t seed = 0;
};

struct SelectionConfig {
    SearchMethod method = SearchMethod::Sffs;
    int shortlist = 200;
    int k_group = 20;
    int k_across = 25;
    int k_anfis = 5;
    RankOptions rank;
    SffsOptions sffs;
    GaConfig ga;
    WrapperConfig wrapper;

    // Throws ConfigError naming "selection.<field>".
    void validate() const;
};

// Accuracy fraction of `spec` trained on the `subset` columns of X.
// Training failures are rethrown with the subset appended to the message.
double wrapper_criterion(const Eigen::MatrixXd& X, const Labels& y, const SplitPlan& plan, const Subset& subset,
                         const ClassifierSpec& spec, const WrapperConfig& cfg);

// Cache around wrapper_criterion. X, y and plan must outlive it.
CriterionCache make_wrapper_cache(const Eigen::MatrixXd& X, const Labels& y, const SplitPlan& plan,
                                  const ClassifierSpec& spec, const WrapperConfig& cfg);

int subset_size(const ClassifierSpec& spec, const SelectionConfig& cfg, bool across);

// Filter stage for one group on the training rows: the top `cfg.shortlist` columns.
std::vector<Index> group_shortlist(const FeatureMatrix& m, const SplitPlan& plan, FeatureGroup g,
                                   const SelectionConfig& cfg);

// Wrapper search over `pool` for min(k, |pool|) columns with the configured method.
FeatureSubset search_pool(std::span<const Index> pool, int k, const ClassifierSpec& spec, const SelectionConfig& cfg,
                          CriterionCache& cache, std::uint64_t seed);

FeatureSubset select_within_group(const FeatureMatrix& m, const SplitPlan& plan, FeatureGroup g,
                                  const ClassifierSpec& spec, const SelectionConfig& cfg, CriterionCache& cache);

struct AcrossResult {
    FeatureSubset subset;
    // Set when the combined subset scores below the best per-group input.
    bool search_regression = false;
};

AcrossResult select_across_groups(std::span<const FeatureSubset> per_group, const ClassifierSpec& spec,
                                  const SelectionConfig& cfg, CriterionCache& cache);

// One stored selection, as written by the select stage.
struct SelectionRecord {
    std::string dataset;
    std::string classifier;
    std::string feature_set;  // group name, or "best-of-all"
    SearchMethod method = SearchMethod::Sffs;
    Protocol protocol = Protocol::InnerCv;
    Subset indices;
    std::vector<std::string> descriptors;
    double criterion = 0;
    std::uint64_t seed = 0;
    bool search_regression = false;
    std::string error;  // non-empty when the selection failed

    bool operator==(const SelectionRecord&) const = default;
};

nlohmann::json to_json(const SelectionRecord& r);
SelectionRecord selection_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SelectionConfig& c);
SelectionConfig selection_config_from_json(const nlohmann::json& j, const SelectionConfig& defaults = {});

}  // namespace eegbench
