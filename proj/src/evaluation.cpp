#include "eegbench/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "eegbench/errors.hpp"
#include "eegbench/hash.hpp"
#include "eegbench/rng.hpp"
#include "json_fields.hpp"

namespace eegbench {

using nlohmann::json;

std::string feature_set_name(int set) {
    if (set == kBestOfAll) return "best-of-all";
    return std::string(to_string(kFeatureGroups.at(static_cast<std::size_t>(set))));
}

std::string feature_set_title(int set) {
    if (set == kBestOfAll) return "Best of all groups";
    return group_title(kFeatureGroups.at(static_cast<std::size_t>(set)));
}

int feature_set_from_name(std::string_view name) {
    for (int s = 0; s < kFeatureSets; ++s)
        if (feature_set_name(s) == name) return s;
    throw DomainError("unknown feature set '" + std::string(name) + "'");
}

void EvaluationConfig::validate() const {
    if (!(split_ratio > 0 && split_ratio < 1)) throw ConfigError("evaluation.split_ratio", "must lie in (0, 1)");
}

namespace {

std::uint64_t kind_id(ClassifierKind k) {
    return static_cast<std::uint64_t>(std::find(kClassifierKinds.begin(), kClassifierKinds.end(), k) -
                                      kClassifierKinds.begin());
}

Labels pick(const Labels& y, std::span<const Index> rows) {
    Labels out;
    for (Index r : rows) out.push_back(y[static_cast<std::size_t>(r)]);
    return out;
}

// Mean of `a` beats `b`: higher mean, then lower spread, then lower index.
bool ranks_before(const AggregateCell& a, int ia, const AggregateCell& b, int ib) {
    if (*a.mean != *b.mean) return *a.mean > *b.mean;
    if (a.stddev != b.stddev) return a.stddev < b.stddev;
    return ia < ib;
}

}  // namespace

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (auto& t : pool) t.join();
}

std::uint64_t dataset_seed(std::uint64_t global, std::string_view dataset) {
    return derive_seed(global, {fnv1a(dataset)});
}

DatasetContext prepare_dataset(const PreparedDataset& d, const BenchmarkConfig& cfg, bool with_shortlists) {
    validate(d.matrix);
    DatasetContext ctx;
    ctx.name = d.name;
    ctx.seed = dataset_seed(cfg.seed, d.name);
    ctx.plan = make_split(d.matrix.labels, cfg.evaluation.split_ratio, cfg.evaluation.split_mode,
                          derive_seed(ctx.seed, {1}));
    if (cfg.evaluation.drop_overlapping && !d.spans.empty()) {
        if (d.spans.size() != d.matrix.labels.size()) throw StructuralError("trial span count != row count");
        drop_overlapping(ctx.plan, d.spans);
    }
    ctx.matrix = normalize(d.matrix, ctx.plan.train);
    if (!with_shortlists) return ctx;
    for (std::size_t g = 0; g < kFeatureGroups.size(); ++g) {
        try {
            ctx.shortlists[g] = group_shortlist(ctx.matrix, ctx.plan, kFeatureGroups[g], cfg.selection);
        } catch (const std::exception& e) {
            ctx.shortlist_errors[g] = e.what();
        }
    }
    return ctx;
}

std::uint64_t cell_seed(const DatasetContext& ctx, const ClassifierSpec& spec) {
    return derive_seed(ctx.seed, {kind_id(spec.kind), 3});
}

std::vector<SelectionRecord> select_cell(const DatasetContext& ctx, const ClassifierSpec& spec,
                                         const BenchmarkConfig& cfg) {
    SelectionConfig sc = cfg.selection;
    sc.wrapper.seed = derive_seed(ctx.seed, {kind_id(spec.kind), 1});
    sc.ga.seed = derive_seed(ctx.seed, {kind_id(spec.kind), 2});
    auto cache = make_wrapper_cache(ctx.matrix.values, ctx.matrix.labels, ctx.plan, spec, sc.wrapper);

    auto blank = [&](int set) {
        SelectionRecord r;
        r.dataset = ctx.name;
        r.classifier = std::string(to_string(spec.kind));
        r.feature_set = feature_set_name(set);
        r.method = sc.method;
        r.protocol = sc.wrapper.protocol;
        r.seed = sc.wrapper.seed;
        return r;
    };
    auto fill = [&](SelectionRecord& r, const FeatureSubset& s) {
        r.indices = s.indices;
        r.criterion = s.criterion;
        for (Index i : s.indices) r.descriptors.push_back(ctx.matrix.descriptors[static_cast<std::size_t>(i)].key());
    };

    std::vector<SelectionRecord> out;
    std::vector<FeatureSubset> winners;
    for (int g = 0; g < 6; ++g) {
        SelectionRecord r = blank(g);
        if (!ctx.shortlist_errors[static_cast<std::size_t>(g)].empty()) {
            r.error = ctx.shortlist_errors[static_cast<std::size_t>(g)];
        } else {
            try {
                const auto s = search_pool(ctx.shortlists[static_cast<std::size_t>(g)], subset_size(spec, sc, false), spec,
                                           sc, cache, derive_seed(sc.ga.seed, {static_cast<std::uint64_t>(g + 1)}));
                fill(r, s);
                winners.push_back(s);
            } catch (const std::exception& e) {
                r.error = e.what();
            }
        }
        out.push_back(std::move(r));
    }

    SelectionRecord across = blank(kBestOfAll);
    if (winners.empty()) {
        across.error = "no feature group produced a selection";
    } else {
        try {
            const auto r = select_across_groups(winners, spec, sc, cache);
            fill(across, r.subset);
            across.search_regression = r.search_regression;
        } catch (const std::exception& e) {
            across.error = e.what();
        }
    }
    out.push_back(std::move(across));
    return out;
}

std::vector<CellResult> score_cell(const DatasetContext& ctx, const ClassifierSpec& spec,
                                   std::span<const SelectionRecord> selections, std::uint64_t seed,
                                   std::vector<std::optional<TrainedModel>>* models) {
    std::vector<CellResult> out;
    if (models) models->assign(selections.size(), std::nullopt);
    const Labels& y = ctx.matrix.labels;
    for (std::size_t k = 0; k < selections.size(); ++k) {
        const auto& rec = selections[k];
        CellResult c;
        c.dataset = ctx.name;
        c.classifier = std::string(to_string(spec.kind));
        c.feature_set = rec.feature_set;
        c.selection = rec;
        c.error = rec.error;
        if (c.error.empty()) {
            try {
                if (ctx.plan.test.empty()) throw StructuralError("no held-out rows");
                const auto model = train(spec, ctx.matrix.values(ctx.plan.train, rec.indices), pick(y, ctx.plan.train), seed);
                c.accuracy = accuracy(predict(model, ctx.matrix.values(ctx.plan.test, rec.indices)), pick(y, ctx.plan.test));
                if (models) (*models)[k] = model;
            } catch (const std::exception& e) {
                c.error = e.what();
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<CellResult> evaluate_cell(const DatasetContext& ctx, const ClassifierSpec& spec,
                                      const BenchmarkConfig& cfg) {
    const auto sel = select_cell(ctx, spec, cfg);
    return score_cell(ctx, spec, sel, cell_seed(ctx, spec));
}

DeltaSummary summarize(std::span<const double> values) {
    DeltaSummary d;
    d.n = static_cast<int>(values.size());
    if (values.empty()) return d;
    double sum = 0;
    for (double v : values) sum += v;
    const double mean = sum / d.n;
    double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    d.mean = mean;
    d.stddev = std::sqrt(ss / d.n);
    return d;
}

AggregateRow aggregate_row(const std::string& classifier, std::span<const CellResult> cells) {
    AggregateRow row;
    row.classifier = classifier;
    for (int s = 0; s < kFeatureSets; ++s) {
        std::vector<double> v;
        const auto name = feature_set_name(s);
        for (const auto& c : cells)
            if (c.classifier == classifier && c.feature_set == name && c.accuracy) v.push_back(*c.accuracy);
        const auto d = summarize(v);
        row.sets[static_cast<std::size_t>(s)] = {d.mean, d.stddev, d.n};
    }
    std::vector<int> order;
    for (int s = 0; s < 6; ++s)
        if (row.sets[static_cast<std::size_t>(s)].mean) order.push_back(s);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return ranks_before(row.sets[static_cast<std::size_t>(a)], a, row.sets[static_cast<std::size_t>(b)], b);
    });
    if (!order.empty()) row.best = order[0];
    if (order.size() > 1) {
        row.second = order[1];
        row.best_minus_second = *row.sets[static_cast<std::size_t>(order[0])].mean - *row.sets[static_cast<std::size_t>(order[1])].mean;
    }
    if (row.best >= 0 && row.sets[kBestOfAll].mean)
        row.best_of_all_minus_best_group = *row.sets[kBestOfAll].mean - *row.sets[static_cast<std::size_t>(row.best)].mean;
    return row;
}

std::map<std::string, int> feature_family_distribution(std::span<const Subset> subsets,
                                                       const std::vector<FeatureDescriptor>& descriptors) {
    std::map<std::string, int> counts;
    for (const auto& s : subsets)
        for (Index i : s) {
            if (i < 0 || static_cast<std::size_t>(i) >= descriptors.size())
                throw StructuralError("selected column " + std::to_string(i) + " out of range");
            ++counts[descriptors[static_cast<std::size_t>(i)].family];
        }
    return counts;
}

BenchmarkReport assemble_report(std::vector<CellResult> cells, std::vector<std::string> datasets,
                                std::vector<std::string> classifiers, json config,
                                std::map<std::string, std::uint64_t> seeds) {
    auto position = [](const std::vector<std::string>& v, const std::string& x) {
        const auto it = std::find(v.begin(), v.end(), x);
        if (it == v.end()) throw StructuralError("cell refers to unknown entry '" + x + "'");
        return it - v.begin();
    };
    std::stable_sort(cells.begin(), cells.end(), [&](const CellResult& a, const CellResult& b) {
        const auto ka = std::tuple(position(datasets, a.dataset), position(classifiers, a.classifier),
                                   feature_set_from_name(a.feature_set));
        const auto kb = std::tuple(position(datasets, b.dataset), position(classifiers, b.classifier),
                                   feature_set_from_name(b.feature_set));
        return ka < kb;
    });

    BenchmarkReport r;
    r.datasets = std::move(datasets);
    r.classifiers = std::move(classifiers);
    r.cells = std::move(cells);
    r.config = std::move(config);
    r.seeds = std::move(seeds);

    std::vector<double> bms, boa, gain;
    for (const auto& cls : r.classifiers) {
        r.rows.push_back(aggregate_row(cls, r.cells));
        const auto& row = r.rows.back();
        if (row.best_minus_second) bms.push_back(*row.best_minus_second);
        if (row.best_of_all_minus_best_group) {
            boa.push_back(*row.best_of_all_minus_best_group);
            if (*row.best_of_all_minus_best_group >= 0) gain.push_back(*row.best_of_all_minus_best_group);
        }
        auto& dist = r.family_distribution[cls];
        for (const auto& c : r.cells)
            if (c.classifier == cls && c.feature_set == feature_set_name(kBestOfAll) && c.selection.error.empty())
                for (const auto& key : c.selection.descriptors) ++dist[FeatureDescriptor::parse(key).family];
    }
    r.best_minus_second = summarize(bms);
    r.best_of_all_minus_best_group = summarize(boa);
    r.best_of_all_gain_only = summarize(gain);
    return r;
}

void check_aggregates(const BenchmarkReport& r) {
    if (r.rows.size() != r.classifiers.size()) throw StructuralError("one aggregate row per classifier expected");
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto fresh = aggregate_row(r.classifiers[i], r.cells);
        const auto& row = r.rows[i];
        for (int s = 0; s < kFeatureSets; ++s) {
            const auto& a = row.sets[static_cast<std::size_t>(s)];
            const auto& b = fresh.sets[static_cast<std::size_t>(s)];
            const bool same = a.n == b.n && a.mean.has_value() == b.mean.has_value() &&
                              (!a.mean || std::abs(*a.mean - *b.mean) <= 1e-9) && std::abs(a.stddev - b.stddev) <= 1e-9;
            if (!same)
                throw StructuralError("aggregate for " + row.classifier + " / " + feature_set_name(s) +
                                      " disagrees with its cells");
        }
        if (row.best != fresh.best || row.second != fresh.second)
            throw StructuralError("best/second flags for " + row.classifier + " disagree with its cells");
    }
}

BenchmarkReport run_benchmark(std::span<const PreparedDataset> datasets, const BenchmarkConfig& cfg, json config_echo) {
    if (datasets.empty()) throw DomainError("run_benchmark needs at least one dataset");
    if (cfg.classifiers.empty()) throw DomainError("run_benchmark needs at least one classifier");
    cfg.evaluation.validate();
    cfg.selection.validate();
    std::vector<std::string> names, classifiers;
    std::map<std::string, std::uint64_t> seeds;
    for (const auto& d : datasets) {
        if (seeds.count(d.name)) throw DomainError("duplicate dataset name '" + d.name + "'");
        names.push_back(d.name);
        seeds[d.name] = dataset_seed(cfg.seed, d.name);
    }
    for (const auto& c : cfg.classifiers) {
        c.validate();
        const std::string n(to_string(c.kind));
        if (std::find(classifiers.begin(), classifiers.end(), n) != classifiers.end())
            throw DomainError("classifier " + n + " listed twice");
        classifiers.push_back(n);
    }

    std::vector<std::optional<DatasetContext>> contexts(datasets.size());
    std::vector<std::string> prep_errors(datasets.size());
    parallel_for(datasets.size(), cfg.jobs, [&](std::size_t i) {
        try {
            contexts[i] = prepare_dataset(datasets[i], cfg);
        } catch (const std::exception& e) {
            prep_errors[i] = e.what();
        }
    });

    const std::size_t nc = cfg.classifiers.size();
    std::vector<std::vector<CellResult>> slots(datasets.size() * nc);
    parallel_for(slots.size(), cfg.jobs, [&](std::size_t job) {
        const std::size_t d = job / nc, c = job % nc;
        const auto& spec = cfg.classifiers[c];
        if (contexts[d]) {
            slots[job] = evaluate_cell(*contexts[d], spec, cfg);
            return;
        }
        for (int s = 0; s < kFeatureSets; ++s) {
            CellResult cell;
            cell.dataset = datasets[d].name;
            cell.classifier = std::string(to_string(spec.kind));
            cell.feature_set = feature_set_name(s);
            cell.error = prep_errors[d];
            cell.selection.dataset = cell.dataset;
            cell.selection.classifier = cell.classifier;
            cell.selection.feature_set = cell.feature_set;
            cell.selection.error = cell.error;
            slots[job].push_back(std::move(cell));
        }
    });

    std::vector<CellResult> cells;
    for (auto& s : slots) cells.insert(cells.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
    return assemble_report(std::move(cells), std::move(names), std::move(classifiers), std::move(config_echo),
                           std::move(seeds));
}

// --- serialization -----------------------------------------------------------

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

json to_json(const DeltaSummary& d) { return {{"mean", opt(d.mean)}, {"std", d.stddev}, {"n", d.n}}; }

DeltaSummary delta_from(const json& j) {
    return {opt_from(j.at("mean")), j.at("std").get<double>(), j.at("n").get<int>()};
}

json set_or_null(int s) { return s < 0 ? json(nullptr) : json(feature_set_name(s)); }
int set_from(const json& j) { return j.is_null() ? -1 : feature_set_from_name(j.get<std::string>()); }

}  // namespace

json to_json(const CellResult& c) {
    json j = {{"dataset", c.dataset},
              {"classifier", c.classifier},
              {"feature_set", c.feature_set},
              {"accuracy", opt(c.accuracy)},
              {"selection", to_json(c.selection)}};
    if (!c.error.empty()) j["error"] = c.error;
    return j;
}

CellResult cell_from_json(const json& j) {
    try {
        CellResult c;
        c.dataset = j.at("dataset").get<std::string>();
        c.classifier = j.at("classifier").get<std::string>();
        c.feature_set = j.at("feature_set").get<std::string>();
        c.accuracy = opt_from(j.at("accuracy"));
        c.error = j.value("error", std::string());
        c.selection = selection_from_json(j.at("selection"));
        return c;
    } catch (const json::exception& e) {
        throw MalformedInputError(std::string("report cell: ") + e.what());
    }
}

json to_json(const BenchmarkReport& r) {
    json cells = json::array(), rows = json::array();
    for (const auto& c : r.cells) cells.push_back(to_json(c));
    for (const auto& row : r.rows) {
        json sets = json::array();
        for (int s = 0; s < kFeatureSets; ++s) {
            const auto& a = row.sets[static_cast<std::size_t>(s)];
            sets.push_back({{"feature_set", feature_set_name(s)}, {"mean", opt(a.mean)}, {"std", a.stddev}, {"n", a.n}});
        }
        rows.push_back({{"classifier", row.classifier},
                        {"sets", sets},
                        {"best", set_or_null(row.best)},
                        {"second", set_or_null(row.second)},
                        {"best_minus_second", opt(row.best_minus_second)},
                        {"best_of_all_minus_best_group", opt(row.best_of_all_minus_best_group)}});
    }
    return {{"format", "eegbench-report"},
            {"version", 1},
            {"datasets", r.datasets},
            {"classifiers", r.classifiers},
            {"cells", cells},
            {"rows", rows},
            {"summary",
             {{"best_minus_second", to_json(r.best_minus_second)},
              {"best_of_all_minus_best_group", to_json(r.best_of_all_minus_best_group)},
              {"best_of_all_gain_only", to_json(r.best_of_all_gain_only)}}},
            {"family_distribution", r.family_distribution},
            {"seeds", r.seeds},
            {"config", r.config}};
}

BenchmarkReport report_from_json(const json& j) {
    BenchmarkReport r;
    try {
        if (j.at("format") != "eegbench-report") throw MalformedInputError("not an eegbench report");
        if (j.at("version") != 1) throw VersionError("unsupported report version " + j.at("version").dump());
        r.datasets = j.at("datasets").get<std::vector<std::string>>();
        r.classifiers = j.at("classifiers").get<std::vector<std::string>>();
        for (const auto& c : j.at("cells")) r.cells.push_back(cell_from_json(c));
        for (const auto& rj : j.at("rows")) {
            AggregateRow row;
            row.classifier = rj.at("classifier").get<std::string>();
            const auto& sets = rj.at("sets");
            if (sets.size() != kFeatureSets) throw MalformedInputError("aggregate row needs 7 feature sets");
            for (int s = 0; s < kFeatureSets; ++s) {
                const auto& a = sets.at(static_cast<std::size_t>(s));
                row.sets[static_cast<std::size_t>(s)] = {opt_from(a.at("mean")), a.at("std").get<double>(), a.at("n").get<int>()};
            }
            row.best = set_from(rj.at("best"));
            row.second = set_from(rj.at("second"));
            row.best_minus_second = opt_from(rj.at("best_minus_second"));
            row.best_of_all_minus_best_group = opt_from(rj.at("best_of_all_minus_best_group"));
            r.rows.push_back(std::move(row));
        }
        const auto& sum = j.at("summary");
        r.best_minus_second = delta_from(sum.at("best_minus_second"));
        r.best_of_all_minus_best_group = delta_from(sum.at("best_of_all_minus_best_group"));
        r.best_of_all_gain_only = delta_from(sum.at("best_of_all_gain_only"));
        r.family_distribution = j.at("family_distribution").get<std::map<std::string, std::map<std::string, int>>>();
        r.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
        r.config = j.at("config");
    } catch (const json::exception& e) {
        throw MalformedInputError(std::string("report: ") + e.what());
    } catch (const DomainError& e) {
        throw MalformedInputError(std::string("report: ") + e.what());
    }
    check_aggregates(r);
    return r;
}

// --- emitters ------------------------------------------------------------------

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

std::string table3_csv(const BenchmarkReport& r) {
    std::string out = "classifier";
    for (int s = 0; s < kFeatureSets; ++s) out += "," + feature_set_title(s);
    out += ",best,second\n";
    for (const auto& row : r.rows) {
        out += row.classifier;
        for (const auto& a : row.sets) out += "," + (a.mean ? fixed(*a.mean, 2) + " / " + fixed(a.stddev, 2) : std::string());
        out += "," + (row.best >= 0 ? feature_set_title(row.best) : std::string());
        out += "," + (row.second >= 0 ? feature_set_title(row.second) : std::string());
        out += "\n";
    }
    return out;
}

std::string per_dataset_csv(const BenchmarkReport& r, const std::string& classifier) {
    std::string out = "dataset";
    for (int s = 0; s < kFeatureSets; ++s) out += "," + feature_set_title(s);
    out += "\n";
    for (const auto& d : r.datasets) {
        out += d;
        for (int s = 0; s < kFeatureSets; ++s) {
            std::string v;
            for (const auto& c : r.cells)
                if (c.dataset == d && c.classifier == classifier && c.feature_set == feature_set_name(s))
                    v = c.accuracy ? fixed(*c.accuracy, 4) : "failed";
            out += "," + v;
        }
        out += "\n";
    }
    return out;
}

std::string plotdata_csv(const BenchmarkReport& r) {
    std::string out = "dataset,classifier,feature_set,accuracy\n";
    for (const auto& c : r.cells)
        if (c.accuracy) out += c.dataset + "," + c.classifier + "," + c.feature_set + "," + fixed(*c.accuracy, 6) + "\n";
    return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + tmp.string());
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::vector<std::filesystem::path> emit_report(const BenchmarkReport& r, const std::filesystem::path& dir,
                                               const std::set<ReportFormat>& formats) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::string& name, const std::string& text) {
        write_atomic(dir / name, text);
        written.push_back(dir / name);
    };
    if (formats.count(ReportFormat::Csv)) {
        put("table3.csv", table3_csv(r));
        for (const auto& c : r.classifiers) put("per_dataset_" + c + ".csv", per_dataset_csv(r, c));
    }
    if (formats.count(ReportFormat::Json)) put("report.json", to_json(r).dump(2) + "\n");
    if (formats.count(ReportFormat::PlotData)) put("plotdata.csv", plotdata_csv(r));
    return written;
}

json to_json(const EvaluationConfig& c) {
    return {{"split_ratio", c.split_ratio},
            {"split_mode", c.split_mode == SplitMode::Stratified ? "stratified" : "chronological"},
            {"drop_overlapping", c.drop_overlapping}};
}

EvaluationConfig evaluation_config_from_json(const json& j) {
    EvaluationConfig c;
    detail::Fields f(j, "evaluation");
    f.get("split_ratio", c.split_ratio);
    if (f.has("split_mode")) {
        const auto mode = f.require<std::string>("split_mode");
        if (mode == "stratified") c.split_mode = SplitMode::Stratified;
        else if (mode == "chronological") c.split_mode = SplitMode::Chronological;
        else throw ConfigError(f.path("split_mode"), "expected 'stratified' or 'chronological'");
    }
    f.get("drop_overlapping", c.drop_overlapping);
    f.finish();
    c.validate();
    return c;
}

}  // namespace eegbench
