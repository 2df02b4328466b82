#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eegbench/signal_io.hpp"

namespace eegbench {

enum class SplitMode { Stratified, Chronological };

struct SplitPlan {
    std::vector<Index> train;
    std::vector<Index> test;
    SplitMode mode = SplitMode::Stratified;
    double ratio = 2.0 / 3.0;
    // Test windows removed by the overlap-aware variant.
    std::vector<Index> dropped;
};

// Stratified mode takes round(ratio * n_c) of each class; chronological mode
// takes the first round(ratio * N) trials. Both index lists come back sorted.
SplitPlan make_split(const Labels& labels, double ratio, SplitMode mode, std::uint64_t seed);

// Remove test trials whose sample span [start, start + length) overlaps any
// training trial from the same recording.
void drop_overlapping(SplitPlan& plan, const std::vector<Trial>& trials);

// Where a trial sits in its source recording.
struct TrialSpan {
    std::string recording_id;
    Index start = 0;
    Index length = 0;
    bool operator==(const TrialSpan&) const = default;
};

std::vector<TrialSpan> spans_of(const std::vector<Trial>& trials);
void drop_overlapping(SplitPlan& plan, const std::vector<TrialSpan>& spans);

// Assign `rows` to `folds` groups, dealing each class round-robin after a seeded shuffle.
std::vector<std::vector<Index>> stratified_folds(const Labels& labels, std::span<const Index> rows, int folds,
                                                 std::uint64_t seed);

// Percentage of matching labels.
double accuracy(const Labels& predicted, const Labels& truth);

}  // namespace eegbench
