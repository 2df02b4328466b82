#include "eegbench/wrapper.hpp"

#include <algorithm>
#include <sstream>

#include "eegbench/errors.hpp"
#include "eegbench/rng.hpp"
#include "json_fields.hpp"

namespace eegbench {

using nlohmann::json;

std::string_view to_string(Protocol p) { return p == Protocol::InnerCv ? "inner-cv" : "paper-faithful"; }

Protocol protocol_from_string(std::string_view s) {
    if (s == "inner-cv") return Protocol::InnerCv;
    if (s == "paper-faithful") return Protocol::PaperFaithful;
    throw DomainError("unknown protocol '" + std::string(s) + "'");
}

void SelectionConfig::validate() const {
    auto need = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ConfigError(std::string("selection.") + field, what);
    };
    need(shortlist >= 1, "shortlist", "must be at least 1");
    need(k_group >= 1, "k_group", "must be at least 1");
    need(k_across >= 1, "k_across", "must be at least 1");
    need(k_anfis >= 1, "k_anfis", "must be at least 1");
    need(rank.demotion_exponent > 0, "demotion_exponent", "must be positive");
    need(sffs.overshoot >= 0, "sffs.overshoot", "must be non-negative");
    need(ga.population >= 4, "ga.population", "must be at least 4");
    need(ga.generations >= 0, "ga.generations", "must be non-negative");
    need(ga.p_crossover >= 0 && ga.p_crossover <= 1, "ga.p_crossover", "must lie in [0, 1]");
    need(ga.p_mutation >= 0 && ga.p_mutation <= 1, "ga.p_mutation", "must lie in [0, 1]");
    need(ga.elite >= 0 && ga.elite < ga.population, "ga.elite", "must lie in [0, population)");
    need(wrapper.folds >= 2, "folds", "must be at least 2");
}

namespace {

Labels pick(const Labels& y, std::span<const Index> rows) {
    Labels out;
    out.reserve(rows.size());
    for (Index r : rows) out.push_back(y[static_cast<std::size_t>(r)]);
    return out;
}

std::string subset_text(const Subset& s) {
    std::ostringstream os;
    os << "[subset";
    for (Index i : s) os << ' ' << i;
    os << ']';
    return os.str();
}

// Correct predictions on `test` after training on `train`.
int correct_on(const Eigen::MatrixXd& X, const Labels& y, const std::vector<Index>& train_rows,
               const std::vector<Index>& test_rows, const Subset& cols, const ClassifierSpec& spec, std::uint64_t seed) {
    const auto model = train(spec, X(train_rows, cols), pick(y, train_rows), seed);
    const Labels p = predict(model, X(test_rows, cols));
    int hits = 0;
    for (std::size_t i = 0; i < p.size(); ++i) hits += p[i] == y[static_cast<std::size_t>(test_rows[i])];
    return hits;
}

}  // namespace

double wrapper_criterion(const Eigen::MatrixXd& X, const Labels& y, const SplitPlan& plan, const Subset& subset,
                         const ClassifierSpec& spec, const WrapperConfig& cfg) {
    if (subset.empty()) throw DomainError("wrapper criterion needs a non-empty subset");
    try {
        if (cfg.protocol == Protocol::PaperFaithful) {
            if (plan.test.empty()) throw StructuralError("paper-faithful protocol needs test rows");
            return static_cast<double>(correct_on(X, y, plan.train, plan.test, subset, spec, cfg.seed)) /
                   static_cast<double>(plan.test.size());
        }
        const auto folds = stratified_folds(y, plan.train, cfg.folds, cfg.seed);
        int hits = 0;
        std::size_t total = 0;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            if (folds[f].empty()) continue;
            std::vector<Index> fit;
            for (std::size_t g = 0; g < folds.size(); ++g)
                if (g != f) fit.insert(fit.end(), folds[g].begin(), folds[g].end());
            std::sort(fit.begin(), fit.end());
            hits += correct_on(X, y, fit, folds[f], subset, spec, derive_seed(cfg.seed, {f}));
            total += folds[f].size();
        }
        return static_cast<double>(hits) / static_cast<double>(total);
    } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " " + subset_text(subset));
    } catch (const StructuralError& e) {
        throw StructuralError(std::string(e.what()) + " " + subset_text(subset));
    }
}

CriterionCache make_wrapper_cache(const Eigen::MatrixXd& X, const Labels& y, const SplitPlan& plan,
                                  const ClassifierSpec& spec, const WrapperConfig& cfg) {
    return CriterionCache([&X, &y, &plan, spec, cfg](const Subset& s) { return wrapper_criterion(X, y, plan, s, spec, cfg); });
}

int subset_size(const ClassifierSpec& spec, const SelectionConfig& cfg, bool across) {
    if (is_anfis(spec.kind)) return cfg.k_anfis;
    return across ? cfg.k_across : cfg.k_group;
}

std::vector<Index> group_shortlist(const FeatureMatrix& m, const SplitPlan& plan, FeatureGroup g,
                                   const SelectionConfig& cfg) {
    const auto cols = m.columns_of(g);
    if (cols.empty()) throw DomainError("feature group " + std::string(to_string(g)) + " has no columns");
    return shortlist(rank_independent(m.values, m.labels, cols, plan.train, cfg.rank), cfg.shortlist);
}

FeatureSubset search_pool(std::span<const Index> pool_in, int k, const ClassifierSpec& spec, const SelectionConfig& cfg,
                          CriterionCache& cache, std::uint64_t seed) {
    Subset pool(pool_in.begin(), pool_in.end());
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (pool.empty()) throw DomainError("empty search pool");
    k = std::min<int>(k, static_cast<int>(pool.size()));

    FeatureSubset out;
    if (k == static_cast<int>(pool.size())) {
        out.indices = pool;
        out.criterion = cache(pool);
        out.method = cfg.method;
        out.trace = {out.criterion};
    } else {
        switch (cfg.method) {
            case SearchMethod::Sffs: out = sffs(pool, k, cache, cfg.sffs); break;
            case SearchMethod::Genetic: {
                GaConfig ga = cfg.ga;
                ga.seed = seed;
                out = genetic_select(pool, k, cache, ga);
                break;
            }
            case SearchMethod::Exhaustive: out = exhaustive(pool, k, cache); break;
        }
    }
    out.classifier = std::string(to_string(spec.kind));
    return out;
}

FeatureSubset select_within_group(const FeatureMatrix& m, const SplitPlan& plan, FeatureGroup g,
                                  const ClassifierSpec& spec, const SelectionConfig& cfg, CriterionCache& cache) {
    const auto pool = group_shortlist(m, plan, g, cfg);
    return search_pool(pool, subset_size(spec, cfg, false), spec, cfg, cache,
                       derive_seed(cfg.ga.seed, {static_cast<std::uint64_t>(group_number(g))}));
}

AcrossResult select_across_groups(std::span<const FeatureSubset> per_group, const ClassifierSpec& spec,
                                  const SelectionConfig& cfg, CriterionCache& cache) {
    if (per_group.empty()) throw DomainError("select_across_groups needs at least one group result");
    Subset pool;
    double best_input = -1;
    for (const auto& s : per_group) {
        pool.insert(pool.end(), s.indices.begin(), s.indices.end());
        best_input = std::max(best_input, s.criterion);
    }
    AcrossResult r;
    r.subset = search_pool(pool, subset_size(spec, cfg, true), spec, cfg, cache, derive_seed(cfg.ga.seed, {0}));
    r.search_regression = r.subset.criterion < best_input;
    return r;
}

json to_json(const SelectionRecord& r) {
    json j = {{"dataset", r.dataset},
              {"classifier", r.classifier},
              {"feature_set", r.feature_set},
              {"method", to_string(r.method)},
              {"protocol", to_string(r.protocol)},
              {"indices", r.indices},
              {"descriptors", r.descriptors},
              {"criterion", r.criterion},
              {"seed", r.seed},
              {"search_regression", r.search_regression}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

SelectionRecord selection_from_json(const json& j) {
    try {
        SelectionRecord r;
        r.dataset = j.at("dataset").get<std::string>();
        r.classifier = j.at("classifier").get<std::string>();
        r.feature_set = j.at("feature_set").get<std::string>();
        r.method = search_method_from_string(j.at("method").get<std::string>());
        r.protocol = protocol_from_string(j.at("protocol").get<std::string>());
        r.indices = j.at("indices").get<Subset>();
        r.descriptors = j.at("descriptors").get<std::vector<std::string>>();
        r.criterion = j.at("criterion").get<double>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.search_regression = j.at("search_regression").get<bool>();
        r.error = j.value("error", std::string());
        return r;
    } catch (const json::exception& e) {
        throw MalformedInputError(std::string("selection record: ") + e.what());
    } catch (const DomainError& e) {
        throw MalformedInputError(std::string("selection record: ") + e.what());
    }
}

json to_json(const SelectionConfig& c) {
    return {{"method", to_string(c.method)},
            {"shortlist", c.shortlist},
            {"k_group", c.k_group},
            {"k_across", c.k_across},
            {"k_anfis", c.k_anfis},
            {"demotion_exponent", c.rank.demotion_exponent},
            {"sffs", {{"overshoot", c.sffs.overshoot}, {"swap_polish", c.sffs.swap_polish}, {"pair_swap_budget", c.sffs.pair_swap_budget}}},
            {"ga",
             {{"population", c.ga.population},
              {"generations", c.ga.generations},
              {"p_crossover", c.ga.p_crossover},
              {"p_mutation", c.ga.p_mutation},
              {"elite", c.ga.elite},
              {"seed", c.ga.seed}}},
            {"protocol", to_string(c.wrapper.protocol)},
            {"folds", c.wrapper.folds},
            {"seed", c.wrapper.seed}};
}

SelectionConfig selection_config_from_json(const json& j, const SelectionConfig& defaults) {
    SelectionConfig c = defaults;
    detail::Fields f(j, "selection");
    if (f.has("method")) {
        const auto name = f.require<std::string>("method");
        try {
            c.method = search_method_from_string(name);
        } catch (const DomainError& e) {
            throw ConfigError(f.path("method"), e.what());
        }
    }
    f.get("shortlist", c.shortlist);
    f.get("k_group", c.k_group);
    f.get("k_across", c.k_across);
    f.get("k_anfis", c.k_anfis);
    f.get("demotion_exponent", c.rank.demotion_exponent);
    if (f.has("sffs")) {
        detail::Fields s(f.at("sffs"), f.path("sffs"));
        s.get("overshoot", c.sffs.overshoot);
        s.get("swap_polish", c.sffs.swap_polish);
        s.get("pair_swap_budget", c.sffs.pair_swap_budget);
        s.finish();
    }
    if (f.has("ga")) {
        detail::Fields g(f.at("ga"), f.path("ga"));
        g.get("population", c.ga.population);
        g.get("generations", c.ga.generations);
        g.get("p_crossover", c.ga.p_crossover);
        g.get("p_mutation", c.ga.p_mutation);
        g.get("elite", c.ga.elite);
        g.get("seed", c.ga.seed);
        g.finish();
    }
    if (f.has("protocol")) {
        const auto name = f.require<std::string>("protocol");
        try {
            c.wrapper.protocol = protocol_from_string(name);
        } catch (const DomainError& e) {
            throw ConfigError(f.path("protocol"), e.what());
        }
    }
    f.get("folds", c.wrapper.folds);
    f.get("seed", c.wrapper.seed);
    f.finish();
    c.validate();
    return c;
}

}  // namespace eegbench
