#include "eegbench/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "eegbench/errors.hpp"
#include "eegbench/rng.hpp"

namespace eegbench {

namespace {

std::map<int, std::vector<Index>> by_class(const Labels& labels, std::span<const Index> rows) {
    std::map<int, std::vector<Index>> out;
    for (Index r : rows) out[labels[static_cast<std::size_t>(r)]].push_back(r);
    return out;
}

}  // namespace

SplitPlan make_split(const Labels& labels, double ratio, SplitMode mode, std::uint64_t seed) {
    const auto n = static_cast<Index>(labels.size());
    if (n < 6) throw DomainError("make_split needs at least 6 trials, got " + std::to_string(n));
    if (!(ratio > 0 && ratio < 1)) throw DomainError("split ratio must lie in (0, 1)");
    std::vector<Index> all(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    const auto classes = by_class(labels, all);
    if (classes.size() < 2) throw DomainError("make_split needs two classes");

    SplitPlan plan;
    plan.mode = mode;
    plan.ratio = ratio;
    if (mode == SplitMode::Chronological) {
        const auto cut = static_cast<Index>(std::llround(ratio * static_cast<double>(n)));
        plan.train.assign(all.begin(), all.begin() + cut);
        plan.test.assign(all.begin() + cut, all.end());
        return plan;
    }
    Rng rng(seed);
    for (auto [label, idx] : classes) {
        rng.shuffle(idx.begin(), idx.end());
        const auto cut = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(idx.size())));
        plan.train.insert(plan.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(cut));
        plan.test.insert(plan.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(cut), idx.end());
    }
    std::sort(plan.train.begin(), plan.train.end());
    std::sort(plan.test.begin(), plan.test.end());
    return plan;
}

std::vector<TrialSpan> spans_of(const std::vector<Trial>& trials) {
    std::vector<TrialSpan> out;
    out.reserve(trials.size());
    for (const auto& t : trials) out.push_back({t.recording_id, t.start, t.samples.cols()});
    return out;
}

void drop_overlapping(SplitPlan& plan, const std::vector<Trial>& trials) { drop_overlapping(plan, spans_of(trials)); }

void drop_overlapping(SplitPlan& plan, const std::vector<TrialSpan>& trials) {
    std::map<std::string, std::vector<std::pair<Index, Index>>> spans;
    for (Index r : plan.train) {
        const auto& t = trials[static_cast<std::size_t>(r)];
        spans[t.recording_id].emplace_back(t.start, t.start + t.length);
    }
    std::vector<Index> kept;
    for (Index r : plan.test) {
        const auto& t = trials[static_cast<std::size_t>(r)];
        const Index lo = t.start, hi = t.start + t.length;
        bool overlaps = false;
        if (auto it = spans.find(t.recording_id); it != spans.end())
            for (auto [a, b] : it->second)
                if (a < hi && lo < b) {
                    overlaps = true;
                    break;
                }
        (overlaps ? plan.dropped : kept).push_back(r);
    }
    plan.test = std::move(kept);
}

std::vector<std::vector<Index>> stratified_folds(const Labels& labels, std::span<const Index> rows, int folds,
                                                 std::uint64_t seed) {
    if (folds < 2) throw DomainError("need at least 2 folds");
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(folds));
    Rng rng(seed);
    std::size_t next = 0;
    for (auto [label, idx] : by_class(labels, rows)) {
        rng.shuffle(idx.begin(), idx.end());
        for (Index r : idx) out[next++ % out.size()].push_back(r);
    }
    for (auto& f : out) std::sort(f.begin(), f.end());
    return out;
}

double accuracy(const Labels& predicted, const Labels& truth) {
    if (predicted.size() != truth.size()) throw StructuralError("accuracy: label vectors differ in length");
    if (truth.empty()) throw StructuralError("accuracy: no labels");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
    return 100.0 * static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace eegbench
