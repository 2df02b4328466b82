#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "eegbench/features.hpp"
#include "eegbench/split.hpp"

namespace eegbench {

// Scores are capped here before normalization.
inline constexpr double kScoreCap = 1e6;

// Univariate two-class separability. `labels` holds 0/1 per row of `col`.
double mahalanobis_1d(const Eigen::Ref<const Eigen::VectorXd>& col, const Labels& labels);
double bhattacharyya_1d(const Eigen::Ref<const Eigen::VectorXd>& col, const Labels& labels);
double scatter_1d(const Eigen::Ref<const Eigen::VectorXd>& col, const Labels& labels);

struct SeparabilityScores {
    double mahalanobis = 0;
    double bhattacharyya = 0;
    double scatter = 0;
};

struct RankedFeatures {
    std::vector<Index> order;  // column indices, best first
    std::vector<double> scores;  // combined score after demotion, per column of `order`'s source
    std::vector<SeparabilityScores> components;
    std::vector<Index> columns;  // the columns that were ranked; scores/components align with these
};

struct RankOptions {
    double demotion_exponent = 1.0;  // s' = s * (1 - max|rho|^p)
};

// Rank `columns` of `values` using only `rows`. Empty spans mean all.
RankedFeatures rank_independent(const Eigen::MatrixXd& values, const Labels& labels, std::span<const Index> columns,
                                std::span<const Index> rows, const RankOptions& opts = {});
RankedFeatures rank_independent(const FeatureMatrix& m, const RankOptions& opts = {});

std::vector<Index> shortlist(const RankedFeatures& ranked, int n = 200);

// Sorted ascending column indices.
using Subset = std::vector<Index>;
using SubsetCriterion = std::function<double(const Subset&)>;

// Memoizes a criterion by subset. Safe to call from several threads; each
// distinct subset contributes one stored value.
class CriterionCache {
public:
    explicit CriterionCache(SubsetCriterion f) : f_(std::move(f)) {}
    double operator()(Subset s);
    std::size_t evaluations() const;

private:
    SubsetCriterion f_;
    mutable std::mutex mutex_;
    std::map<Subset, double> values_;
};

enum class SearchMethod { Sffs, Genetic, Exhaustive };

std::string_view to_string(SearchMethod m);
SearchMethod search_method_from_string(std::string_view s);

struct FeatureSubset {
    Subset indices;
    double criterion = 0;
    std::string classifier;
    SearchMethod method = SearchMethod::Sffs;
    // Best-so-far criterion after each generation (GA) or each step (SFFS).
    std::vector<double> trace;
};

struct SffsOptions {
    // Grow up to k + overshoot features so backward steps can revisit size k.
    int overshoot = 2;
    // Finish with best-improvement single swaps at size k until none helps.
    bool swap_polish = true;
    // Also try replacing two members at once when such a pass costs at most this many evaluations.
    std::size_t pair_swap_budget = 1000;
};

// Criterion evaluations in one pair-swap pass at subset size k over a pool of n.
std::size_t pair_swap_cost(std::size_t k, std::size_t n);

FeatureSubset sffs(std::span<const Index> pool, int k, CriterionCache& criterion, const SffsOptions& opts = {});

struct GaConfig {
    int population = 50;
    int generations = 40;
    double p_crossover = 0.9;
    double p_mutation = 0.05;
    int elite = 2;
    std::uint64_t seed = 0;
};

FeatureSubset genetic_select(std::span<const Index> pool, int k, CriterionCache& criterion, const GaConfig& ga);

// Enumerates every k-subset. Only for small pools.
FeatureSubset exhaustive(std::span<const Index> pool, int k, CriterionCache& criterion);

}  // namespace eegbench
