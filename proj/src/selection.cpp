#include "eegbench/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "eegbench/errors.hpp"
#include "eegbench/rng.hpp"

namespace eegbench {

namespace {

struct TwoClass {
    double n0 = 0, n1 = 0;
    double mu0 = 0, mu1 = 0;
    double var0 = 0, var1 = 0;
    double tol = 0;  // squared-scale threshold for "zero" variance and mean gaps
};

TwoClass two_class(const Eigen::Ref<const Eigen::VectorXd>& col, const Labels& labels) {
    if (static_cast<std::size_t>(col.size()) != labels.size())
        throw StructuralError("separability: column and labels differ in length");
    TwoClass s;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
        const int y = labels[static_cast<std::size_t>(i)];
        if (y == 0) {
            s.n0 += 1;
            s.mu0 += col(i);
        } else if (y == 1) {
            s.n1 += 1;
            s.mu1 += col(i);
        } else {
            throw DomainError("separability expects labels 0 and 1");
        }
    }
    if (s.n0 < 2 || s.n1 < 2) throw DomainError("separability needs at least 2 samples of each class");
    s.mu0 /= s.n0;
    s.mu1 /= s.n1;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
        if (labels[static_cast<std::size_t>(i)] == 0)
            s.var0 += (col(i) - s.mu0) * (col(i) - s.mu0);
        else
            s.var1 += (col(i) - s.mu1) * (col(i) - s.mu1);
    }
    s.var0 /= s.n0;
    s.var1 /= s.n1;
    const double scale = 1e-12 * col.cwiseAbs().maxCoeff();
    s.tol = scale * scale;
    return s;
}

double capped(double v) { return std::isfinite(v) ? std::min(v, kScoreCap) : kScoreCap; }

}  // namespace

double mahalanobis_1d(const Eigen::Ref<const Eigen::VectorXd>& col, const Labels& labels) {
    const auto s = two_class(col, labels);
    const double gap = (s.mu0 - s.mu1) * (s.mu0 - s.mu1);
    const double pooled = (s.n0 * s.var0 + s.n1 * s.var1) / (s.n0 + s.n1);
    if (pooled <= s.tol) return gap <= s.tol ? 0.0 : kScoreCap;
    return capped(gap / pooled);
}

double bhattacharyya_1d(const Eigen::Ref<const Eigen::VectorXd>& col, const Labels& labels) {
    const auto s = two_class(col, labels);
    const double gap = (s.mu0 - s.mu1) * (s.mu0 - s.mu1);
    if (s.var0 <= s.tol || s.var1 <= s.tol) {
        if (s.var0 <= s.tol && s.var1 <= s.tol && gap <= s.tol) return 0.0;
        return kScoreCap;
    }
    const double sum = s.var0 + s.var1;
    return capped(0.25 * gap / sum + 0.5 * std::log(sum / (2.0 * std::sqrt(s.var0 * s.var1))));
}

double scatter_1d(const Eigen::Ref<const Eigen::VectorXd>& col, const Labels& labels) {
    const auto s = two_class(col, labels);
    const double n = s.n0 + s.n1;
    const double mu = (s.n0 * s.mu0 + s.n1 * s.mu1) / n;
    const double sb = (s.n0 * (s.mu0 - mu) * (s.mu0 - mu) + s.n1 * (s.mu1 - mu) * (s.mu1 - mu)) / n;
    const double sw = (s.n0 * s.var0 + s.n1 * s.var1) / n;
    if (sw <= s.tol) return sb <= s.tol ? 0.0 : kScoreCap;
    return capped(sb / sw);
}

namespace {

void min_max(std::vector<double>& v) {
    if (v.empty()) return;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double a = *lo, b = *hi;
    for (double& x : v) x = b > a ? (x - a) / (b - a) : 0.0;
}

std::vector<Index> iota_index(Index n) {
    std::vector<Index> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), Index{0});
    return v;
}

// For each position i in `cols`, max_{j < i} |corr(col_i, col_j)| over `rows`.
std::vector<double> prefix_max_correlation(const Eigen::MatrixXd& values, std::span<const Index> rows,
                                           std::span<const Index> cols, const std::vector<bool>& needed) {
    const auto n = static_cast<Index>(rows.size());
    const auto f = static_cast<Index>(cols.size());
    Eigen::MatrixXd z(n, f);
    for (Index j = 0; j < f; ++j) {
        for (Index i = 0; i < n; ++i) z(i, j) = values(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
        auto c = z.col(j);
        c.array() -= c.mean();
        const double norm = c.norm();
        const double scale = 1e-12 * std::sqrt(static_cast<double>(n)) *
                             values.col(cols[static_cast<std::size_t>(j)]).cwiseAbs().maxCoeff();
        if (norm > scale && norm > 0)
            c /= norm;
        else
            c.setZero();
    }
    std::vector<double> out(static_cast<std::size_t>(f), 0.0);
    constexpr Index kBlock = 256;
    for (Index b = 0; b < f; b += kBlock) {
        const Index len = std::min(kBlock, f - b);
        bool any = false;
        for (Index r = 0; r < len; ++r) any = any || needed[static_cast<std::size_t>(b + r)];
        if (!any || b + len == 1) continue;
        const Eigen::MatrixXd g = z.middleCols(b, len).transpose() * z.leftCols(b + len);
        for (Index r = 0; r < len; ++r) {
            const Index i = b + r;
            if (i == 0) continue;
            out[static_cast<std::size_t>(i)] = std::min(1.0, g.row(r).head(i).cwiseAbs().maxCoeff());
        }
    }
    return out;
}

}  // namespace

RankedFeatures rank_independent(const Eigen::MatrixXd& values, const Labels& labels, std::span<const Index> columns,
                                std::span<const Index> rows, const RankOptions& opts) {
    if (static_cast<std::size_t>(values.rows()) != labels.size())
        throw StructuralError("rank_independent: labels do not match the matrix rows");
    RankedFeatures out;
    out.columns = columns.empty() ? iota_index(values.cols()) : std::vector<Index>(columns.begin(), columns.end());
    const std::vector<Index> use_rows = rows.empty() ? iota_index(values.rows()) : std::vector<Index>(rows.begin(), rows.end());

    Labels sub(use_rows.size());
    for (std::size_t i = 0; i < use_rows.size(); ++i) sub[i] = labels[static_cast<std::size_t>(use_rows[i])];

    const std::size_t f = out.columns.size();
    std::vector<double> ma(f), bh(f), sc(f);
    Eigen::VectorXd col(static_cast<Index>(use_rows.size()));
    for (std::size_t j = 0; j < f; ++j) {
        for (std::size_t i = 0; i < use_rows.size(); ++i) col(static_cast<Index>(i)) = values(use_rows[i], out.columns[j]);
        ma[j] = mahalanobis_1d(col, sub);
        bh[j] = bhattacharyya_1d(col, sub);
        sc[j] = scatter_1d(col, sub);
        out.components.push_back({ma[j], bh[j], sc[j]});
    }
    min_max(ma);
    min_max(bh);
    min_max(sc);
    std::vector<double> s(f);
    for (std::size_t j = 0; j < f; ++j) s[j] = ma[j] + bh[j] + sc[j];

    auto by_score = [&](const std::vector<double>& score) {
        std::vector<std::size_t> pos(f);
        std::iota(pos.begin(), pos.end(), std::size_t{0});
        std::sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
            if (score[a] != score[b]) return score[a] > score[b];
            return out.columns[a] < out.columns[b];
        });
        return pos;
    };

    const auto first = by_score(s);
    std::vector<Index> sorted_cols(f);
    std::vector<bool> needed(f);
    for (std::size_t i = 0; i < f; ++i) {
        sorted_cols[i] = out.columns[first[i]];
        needed[i] = s[first[i]] > 0;
    }
    const auto rho = prefix_max_correlation(values, use_rows, sorted_cols, needed);
    out.scores.assign(f, 0.0);
    for (std::size_t i = 0; i < f; ++i) {
        const double factor = 1.0 - std::pow(rho[i], opts.demotion_exponent);
        out.scores[first[i]] = s[first[i]] * std::max(0.0, factor);
    }
    for (std::size_t p : by_score(out.scores)) out.order.push_back(out.columns[p]);
    return out;
}

RankedFeatures rank_independent(const FeatureMatrix& m, const RankOptions& opts) {
    return rank_independent(m.values, m.labels, {}, {}, opts);
}

std::vector<Index> shortlist(const RankedFeatures& ranked, int n) {
    if (n < 1) throw DomainError("shortlist size must be at least 1");
    const auto len = std::min(ranked.order.size(), static_cast<std::size_t>(n));
    return {ranked.order.begin(), ranked.order.begin() + static_cast<std::ptrdiff_t>(len)};
}

double CriterionCache::operator()(Subset s) {
    std::sort(s.begin(), s.end());
    {
        std::lock_guard lock(mutex_);
        if (auto it = values_.find(s); it != values_.end()) return it->second;
    }
    const double v = f_(s);
    std::lock_guard lock(mutex_);
    return values_.emplace(std::move(s), v).first->second;
}

std::size_t CriterionCache::evaluations() const {
    std::lock_guard lock(mutex_);
    return values_.size();
}

std::string_view to_string(SearchMethod m) {
    switch (m) {
        case SearchMethod::Sffs: return "sffs";
        case SearchMethod::Genetic: return "genetic";
        case SearchMethod::Exhaustive: return "exhaustive";
    }
    return "?";
}

SearchMethod search_method_from_string(std::string_view s) {
    if (s == "sffs") return SearchMethod::Sffs;
    if (s == "genetic" || s == "ga") return SearchMethod::Genetic;
    if (s == "exhaustive") return SearchMethod::Exhaustive;
    throw DomainError("unknown search method '" + std::string(s) + "'");
}

namespace {

std::vector<Index> checked_pool(std::span<const Index> pool, int k) {
    std::vector<Index> p(pool.begin(), pool.end());
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (k < 1) throw DomainError("subset size must be at least 1");
    if (static_cast<std::size_t>(k) > p.size())
        throw DomainError("subset size " + std::to_string(k) + " exceeds pool of " + std::to_string(p.size()));
    return p;
}

// Higher criterion wins; equal criteria go to the lexicographically smaller subset.
bool better(double a, const Subset& sa, double b, const Subset& sb) { return a > b || (a == b && sa < sb); }

Subset with(const Subset& s, Index f) {
    Subset out = s;
    out.insert(std::upper_bound(out.begin(), out.end(), f), f);
    return out;
}

Subset without(const Subset& s, std::size_t pos) {
    Subset out = s;
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(pos));
    return out;
}

}  // namespace

std::size_t pair_swap_cost(std::size_t k, std::size_t n) {
    if (k < 2 || n < k + 2) return 0;
    const std::size_t m = n - k;
    return k * (k - 1) / 2 * (m * (m - 1) / 2);
}

FeatureSubset sffs(std::span<const Index> pool_in, int k, CriterionCache& criterion, const SffsOptions& opts) {
    const auto pool = checked_pool(pool_in, k);
    if (opts.overshoot < 0) throw DomainError("SFFS overshoot must be non-negative");
    const auto ninf = -std::numeric_limits<double>::infinity();
    const std::size_t target = std::min(pool.size(), static_cast<std::size_t>(k + opts.overshoot));
    std::vector<double> best(target + 1, ninf);
    std::vector<Subset> best_set(target + 1);
    FeatureSubset out;
    out.method = SearchMethod::Sffs;

    Subset x;
    while (x.size() < target) {
        Subset step;
        double step_value = ninf;
        for (Index f : pool) {
            if (std::binary_search(x.begin(), x.end(), f)) continue;
            Subset s = with(x, f);
            const double v = criterion(s);
            if (step.empty() || better(v, s, step_value, step)) {
                step = std::move(s);
                step_value = v;
            }
        }
        const std::size_t m = step.size();
        if (best_set[m].empty() || better(step_value, step, best[m], best_set[m])) {
            best[m] = step_value;
            best_set[m] = step;
            x = std::move(step);
        } else {
            x = best_set[m];
        }
        out.trace.push_back(best[x.size()]);

        while (x.size() > 2) {
            Subset drop;
            double drop_value = ninf;
            for (std::size_t i = 0; i < x.size(); ++i) {
                Subset s = without(x, i);
                const double v = criterion(s);
                if (drop.empty() || better(v, s, drop_value, drop)) {
                    drop = std::move(s);
                    drop_value = v;
                }
            }
            const std::size_t d = drop.size();
            if (drop_value > best[d]) {
                best[d] = drop_value;
                best_set[d] = drop;
                x = std::move(drop);
            } else {
                break;
            }
        }
    }
    out.indices = best_set[static_cast<std::size_t>(k)];
    out.criterion = best[static_cast<std::size_t>(k)];

    while (opts.swap_polish && pool.size() > out.indices.size()) {
        Subset move;
        double move_value = out.criterion;
        for (std::size_t i = 0; i < out.indices.size(); ++i) {
            const Subset base = without(out.indices, i);
            for (Index f : pool) {
                if (std::binary_search(out.indices.begin(), out.indices.end(), f)) continue;
                Subset s = with(base, f);
                const double v = criterion(s);
                if (v > move_value || (!move.empty() && v == move_value && s < move)) {
                    move = std::move(s);
                    move_value = v;
                }
            }
        }
        if (move.empty() && pair_swap_cost(out.indices.size(), pool.size()) <= opts.pair_swap_budget) {
            const Subset& cur = out.indices;
            std::vector<Index> outside;
            for (Index f : pool)
                if (!std::binary_search(cur.begin(), cur.end(), f)) outside.push_back(f);
            for (std::size_t i = 0; i < cur.size(); ++i)
                for (std::size_t j = i + 1; j < cur.size(); ++j) {
                    const Subset base = without(without(cur, j), i);
                    for (std::size_t a = 0; a < outside.size(); ++a)
                        for (std::size_t b = a + 1; b < outside.size(); ++b) {
                            Subset s = with(with(base, outside[a]), outside[b]);
                            const double v = criterion(s);
                            if (v > move_value || (!move.empty() && v == move_value && s < move)) {
                                move = std::move(s);
                                move_value = v;
                            }
                        }
                }
        }
        if (move.empty()) break;
        out.indices = std::move(move);
        out.criterion = move_value;
        out.trace.push_back(move_value);
    }
    return out;
}

FeatureSubset genetic_select(std::span<const Index> pool_in, int k, CriterionCache& criterion, const GaConfig& ga) {
    const auto pool = checked_pool(pool_in, k);
    if (ga.population < 4) throw DomainError("GA population must be at least 4");
    if (ga.generations < 0) throw DomainError("GA generations must be non-negative");
    if (ga.elite < 0 || ga.elite > ga.population) throw DomainError("GA elite count out of range");
    Rng rng(ga.seed);
    const auto kk = static_cast<std::size_t>(k);

    struct Member {
        Subset genes;
        double fitness;
    };
    auto fitter = [](const Member& a, const Member& b) { return better(a.fitness, a.genes, b.fitness, b.genes); };

    auto random_subset = [&] {
        std::vector<Index> p = pool;
        for (std::size_t i = 0; i < kk; ++i) std::swap(p[i], p[i + rng.below(p.size() - i)]);
        Subset s(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(kk));
        std::sort(s.begin(), s.end());
        return s;
    };

    std::vector<Member> pop;
    for (int i = 0; i < ga.population; ++i) {
        Subset s = random_subset();
        const double v = criterion(s);
        pop.push_back({std::move(s), v});
    }
    Member best = *std::min_element(pop.begin(), pop.end(), fitter);
    FeatureSubset out;
    out.method = SearchMethod::Genetic;
    out.trace.push_back(best.fitness);

    auto tournament = [&]() -> const Member& {
        const Member* w = &pop[rng.below(pop.size())];
        for (int t = 1; t < 3; ++t) {
            const Member& c = pop[rng.below(pop.size())];
            if (fitter(c, *w)) w = &c;
        }
        return *w;
    };

    for (int g = 0; g < ga.generations; ++g) {
        std::sort(pop.begin(), pop.end(), fitter);
        std::vector<Member> next(pop.begin(), pop.begin() + ga.elite);
        while (next.size() < static_cast<std::size_t>(ga.population)) {
            const Member& a = tournament();
            const Member& b = tournament();
            Subset child;
            if (rng.uniform() < ga.p_crossover) {
                Subset rest;
                std::set_intersection(a.genes.begin(), a.genes.end(), b.genes.begin(), b.genes.end(),
                                      std::back_inserter(child));
                std::set_symmetric_difference(a.genes.begin(), a.genes.end(), b.genes.begin(), b.genes.end(),
                                              std::back_inserter(rest));
                rng.shuffle(rest.begin(), rest.end());
                child.insert(child.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(kk - child.size()));
            } else {
                child = a.genes;
            }
            if (pool.size() > kk) {
                for (std::size_t i = 0; i < kk; ++i) {
                    if (rng.uniform() >= ga.p_mutation) continue;
                    Index replacement;
                    do replacement = pool[rng.below(pool.size())];
                    while (std::find(child.begin(), child.end(), replacement) != child.end());
                    child[i] = replacement;
                }
            }
            std::sort(child.begin(), child.end());
            const double v = criterion(child);
            next.push_back({std::move(child), v});
        }
        pop = std::move(next);
        const Member& gen_best = *std::min_element(pop.begin(), pop.end(), fitter);
        if (fitter(gen_best, best)) best = gen_best;
        out.trace.push_back(best.fitness);
    }
    out.indices = best.genes;
    out.criterion = best.fitness;
    return out;
}

FeatureSubset exhaustive(std::span<const Index> pool_in, int k, CriterionCache& criterion) {
    const auto pool = checked_pool(pool_in, k);
    const auto kk = static_cast<std::size_t>(k);
    std::vector<std::size_t> pos(kk);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    FeatureSubset out;
    out.method = SearchMethod::Exhaustive;
    out.criterion = -std::numeric_limits<double>::infinity();
    while (true) {
        Subset s(kk);
        for (std::size_t i = 0; i < kk; ++i) s[i] = pool[pos[i]];
        const double v = criterion(s);
        if (out.indices.empty() || better(v, s, out.criterion, out.indices)) {
            out.indices = std::move(s);
            out.criterion = v;
        }
        std::size_t i = kk;
        while (i > 0 && pos[i - 1] == pool.size() - kk + i - 1) --i;
        if (i == 0) break;
        ++pos[i - 1];
        for (std::size_t j = i; j < kk; ++j) pos[j] = pos[j - 1] + 1;
    }
    return out;
}

}  // namespace eegbench
