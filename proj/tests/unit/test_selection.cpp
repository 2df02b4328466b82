#include <doctest.h>

#include <Eigen/Cholesky>
#include <cmath>
#include <thread>

#include "eegbench/errors.hpp"
#include "eegbench/rng.hpp"
#include "eegbench/selection.hpp"
#include "oracles.hpp"

using namespace eegbench;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

std::vector<double> stdvec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

struct Gaussians {
    Eigen::MatrixXd x;
    Labels y;
};

// Two classes with per-feature mean shifts.
Gaussians gaussians(int per_class, const Eigen::VectorXd& shift, std::uint64_t seed) {
    Rng rng(seed);
    const Index d = shift.size();
    Gaussians g;
    g.x.resize(2 * per_class, d);
    for (int i = 0; i < 2 * per_class; ++i) {
        const int label = i % 2;
        g.y.push_back(label);
        for (Index j = 0; j < d; ++j) g.x(i, j) = rng.normal() + (label ? shift(j) : 0.0);
    }
    return g;
}

// Multivariate Mahalanobis distance between class means on a column subset;
// non-decreasing under inclusion.
double subset_mahalanobis(const Gaussians& g, const Subset& s) {
    const auto k = static_cast<Index>(s.size());
    Eigen::VectorXd m0 = Eigen::VectorXd::Zero(k), m1 = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
    double n0 = 0, n1 = 0;
    for (Index i = 0; i < g.x.rows(); ++i) {
        Eigen::VectorXd r(k);
        for (Index j = 0; j < k; ++j) r(j) = g.x(i, s[static_cast<std::size_t>(j)]);
        (g.y[static_cast<std::size_t>(i)] ? m1 : m0) += r;
        (g.y[static_cast<std::size_t>(i)] ? n1 : n0) += 1;
    }
    m0 /= n0;
    m1 /= n1;
    for (Index i = 0; i < g.x.rows(); ++i) {
        Eigen::VectorXd r(k);
        for (Index j = 0; j < k; ++j) r(j) = g.x(i, s[static_cast<std::size_t>(j)]);
        r -= g.y[static_cast<std::size_t>(i)] ? m1 : m0;
        cov += r * r.transpose();
    }
    cov /= (n0 + n1);
    const Eigen::VectorXd d = m1 - m0;
    return d.dot(cov.ldlt().solve(d));
}

}  // namespace

TEST_CASE("separability: closed forms") {
    const Labels y{0, 0, 1, 1};
    // class 0 {-1, 1}: mean 0 var 1; class 1 {1, 3}: mean 2 var 1
    const auto gap2 = vec({-1, 1, 1, 3});
    CHECK(mahalanobis_1d(gap2, y) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(std::abs(bhattacharyya_1d(gap2, y) - 0.5) < 1e-9);

    const auto same = vec({-1, 1, -1, 1});
    CHECK(mahalanobis_1d(same, y) == 0.0);
    CHECK(bhattacharyya_1d(same, y) == 0.0);
    CHECK(scatter_1d(same, y) == 0.0);

    // variances 1 and 4, equal means
    const auto widths = vec({-1, 1, -2, 2});
    CHECK(std::abs(bhattacharyya_1d(widths, y) - 0.5 * std::log(5.0 / 4.0)) < 1e-9);

    // means -1 and 1, unit variances
    const auto pm = vec({-2, 0, 0, 2});
    CHECK(scatter_1d(pm, y) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(mahalanobis_1d(vec({1, 2, 3, 4}), Labels{0, 0, 0, 1}), DomainError);
    CHECK_THROWS_AS(bhattacharyya_1d(vec({1, 2, 3}), Labels{0, 0, 0}), DomainError);
}

TEST_CASE("separability: zero within-class variance hits the cap") {
    const Labels y{0, 0, 1, 1};
    CHECK(mahalanobis_1d(vec({1, 1, 2, 2}), y) == kScoreCap);
    CHECK(bhattacharyya_1d(vec({1, 1, 2, 3}), y) == kScoreCap);
    CHECK(scatter_1d(vec({1, 1, 2, 2}), y) == kScoreCap);
    CHECK(mahalanobis_1d(vec({5, 5, 5, 5}), y) == 0.0);
    CHECK(bhattacharyya_1d(vec({5, 5, 5, 5}), y) == 0.0);
}

TEST_CASE("separability: random Gaussians match looped formulas") {
    Rng rng(31);
    for (int t = 0; t < 50; ++t) {
        const int n0 = 5 + static_cast<int>(rng.below(30)), n1 = 5 + static_cast<int>(rng.below(30));
        Eigen::VectorXd x(n0 + n1);
        Labels y;
        for (int i = 0; i < n0 + n1; ++i) {
            const int c = i < n0 ? 0 : 1;
            y.push_back(c);
            x(i) = c ? 3 + 2 * rng.normal() : rng.normal();
        }
        const auto xs = stdvec(x);
        CHECK(std::abs(mahalanobis_1d(x, y) - oracle::mahalanobis(xs, y)) < 1e-12 * std::max(1.0, oracle::mahalanobis(xs, y)));
        CHECK(std::abs(bhattacharyya_1d(x, y) - oracle::bhattacharyya(xs, y)) < 1e-12);
        CHECK(std::abs(scatter_1d(x, y) - oracle::scatter(xs, y)) < 1e-12);
    }
}

TEST_CASE("separability: affine invariance") {
    Rng rng(8);
    for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd x(40);
        Labels y;
        for (int i = 0; i < 40; ++i) {
            y.push_back(i % 2);
            x(i) = rng.normal() * (1 + i % 2) + (i % 2) * rng.uniform(0, 3);
        }
        double a = rng.uniform(-100, 100);
        if (std::abs(a) < 1e-3) a = 1;
        const double b = rng.uniform(-1000, 1000);
        const Eigen::VectorXd z = (a * x.array() + b).matrix();
        CHECK(std::abs(mahalanobis_1d(x, y) - mahalanobis_1d(z, y)) < 1e-9);
        CHECK(std::abs(bhattacharyya_1d(x, y) - bhattacharyya_1d(z, y)) < 1e-9);
        CHECK(std::abs(scatter_1d(x, y) - scatter_1d(z, y)) < 1e-9);
    }
}

TEST_CASE("rank_independent: order invariant under per-column affine maps") {
    Eigen::VectorXd shift(12);
    shift << 0.1, 0.9, 0.3, 0, 0.5, 1.2, 0.05, 0.7, 0.2, 0.4, 1.5, 0.6;
    auto g = gaussians(30, shift, 5);
    const auto base = rank_independent(g.x, g.y, {}, {});
    Rng rng(6);
    for (Index j = 0; j < g.x.cols(); ++j) g.x.col(j) = (g.x.col(j).array() * rng.uniform(0.1, 50) * (j % 2 ? -1 : 1) + rng.uniform(-9, 9)).matrix();
    const auto moved = rank_independent(g.x, g.y, {}, {});
    CHECK(base.order == moved.order);
}

TEST_CASE("rank_independent: duplicate of the top feature is demoted to zero") {
    Eigen::VectorXd shift(5);
    shift << 2.0, 0.5, 0.4, 0.3, 0.2;
    auto g = gaussians(40, shift, 11);
    g.x.conservativeResize(Eigen::NoChange, 6);
    g.x.col(5) = g.x.col(0);
    const auto r = rank_independent(g.x, g.y, {}, {});
    CHECK(r.order.front() == 0);
    CHECK(r.scores[5] == 0.0);
    CHECK(r.order.back() == 5);
}

TEST_CASE("rank_independent: constant columns keep index order") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Constant(10, 4, 3.0);
    Labels y{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    const auto r = rank_independent(x, y, {}, {});
    CHECK(r.order == std::vector<Index>{0, 1, 2, 3});
    for (double s : r.scores) CHECK(s == 0.0);
}

TEST_CASE("rank_independent: 5x40 matrix against a spreadsheet-style recomputation") {
    Eigen::VectorXd shift(5);
    shift << 0.3, 1.5, 0.8, 0.1, 1.1;
    auto g = gaussians(20, shift, 77);
    g.x.col(4) = 0.7 * g.x.col(1) + 0.3 * g.x.col(4);  // correlated with column 1

    std::vector<std::vector<double>> cols;
    for (Index j = 0; j < 5; ++j) cols.push_back(stdvec(g.x.col(j)));
    double m[3][5];
    for (int j = 0; j < 5; ++j) {
        m[0][j] = oracle::mahalanobis(cols[static_cast<std::size_t>(j)], g.y);
        m[1][j] = oracle::bhattacharyya(cols[static_cast<std::size_t>(j)], g.y);
        m[2][j] = oracle::scatter(cols[static_cast<std::size_t>(j)], g.y);
    }
    double s[5] = {0, 0, 0, 0, 0};
    for (auto& row : m) {
        const double lo = *std::min_element(row, row + 5), hi = *std::max_element(row, row + 5);
        for (int j = 0; j < 5; ++j) s[j] += (row[j] - lo) / (hi - lo);
    }
    std::vector<int> first{0, 1, 2, 3, 4};
    std::sort(first.begin(), first.end(), [&](int a, int b) { return s[a] > s[b]; });
    double demoted[5];
    for (std::size_t i = 0; i < 5; ++i) {
        double worst = 0;
        for (std::size_t j = 0; j < i; ++j)
            worst = std::max(worst, std::abs(oracle::pearson(cols[static_cast<std::size_t>(first[i])], cols[static_cast<std::size_t>(first[j])])));
        demoted[first[i]] = s[first[i]] * (1 - worst);
    }
    std::vector<Index> expected{0, 1, 2, 3, 4};
    std::sort(expected.begin(), expected.end(), [&](Index a, Index b) { return demoted[a] > demoted[b]; });

    const auto r = rank_independent(g.x, g.y, {}, {});
    CHECK(r.order == expected);
    for (int j = 0; j < 5; ++j) CHECK(r.scores[static_cast<std::size_t>(j)] == doctest::Approx(demoted[j]).epsilon(1e-10));
}

TEST_CASE("rank_independent: restricted columns and rows") {
    Eigen::VectorXd shift(6);
    shift << 0, 2, 0, 0, 1, 0;
    auto g = gaussians(30, shift, 2);
    const std::vector<Index> cols{1, 3, 4};
    std::vector<Index> rows;
    for (Index i = 0; i < 40; ++i) rows.push_back(i);
    const auto r = rank_independent(g.x, g.y, cols, rows);
    CHECK(r.columns == cols);
    CHECK(r.order.size() == 3);
    CHECK(r.order.front() == 1);
}

TEST_CASE("shortlist") {
    RankedFeatures r;
    for (Index i = 0; i < 150; ++i) r.order.push_back(149 - i);
    CHECK(shortlist(r, 200).size() == 150);
    r.order.clear();
    for (Index i = 0; i < 832; ++i) r.order.push_back(i);
    const auto s = shortlist(r);
    CHECK(s.size() == 200);
    CHECK(std::equal(s.begin(), s.end(), r.order.begin()));
    CHECK_THROWS_AS(shortlist(r, 0), DomainError);
}

TEST_CASE("CriterionCache evaluates each subset once across threads") {
    std::atomic<int> calls{0};
    CriterionCache cache([&](const Subset& s) {
        ++calls;
        return static_cast<double>(s.size());
    });
    std::vector<std::thread> workers;
    for (int t = 0; t < 4; ++t)
        workers.emplace_back([&] {
            for (Index i = 0; i < 50; ++i) cache({i, i + 1});
        });
    for (auto& w : workers) w.join();
    CHECK(cache.evaluations() == 50);
    CHECK(cache({3, 2}) == 2.0);
    CHECK(cache.evaluations() == 50);
}

TEST_CASE("sffs: additive criterion picks the k largest") {
    const std::vector<double> w{0.3, 0.9, 0.1, 0.5, 0.7, 0.2, 0.8, 0.05};
    CriterionCache crit([&](const Subset& s) {
        double v = 0;
        for (Index i : s) v += w[static_cast<std::size_t>(i)];
        return v;
    });
    const std::vector<Index> pool{0, 1, 2, 3, 4, 5, 6, 7};
    CHECK(sffs(pool, 3, crit).indices == Subset{1, 4, 6});
    CHECK(sffs(pool, 8, crit).indices == pool);
    SffsOptions plain;
    plain.overshoot = 0;
    plain.swap_polish = false;
    CHECK(sffs(pool, 3, crit, plain).indices == Subset{1, 4, 6});
    CHECK_THROWS_AS(sffs(pool, 9, crit), DomainError);
}

TEST_CASE("sffs: monotone criterion matches exhaustive search on 10-feature pools") {
    Rng rng(123);
    for (int run = 0; run < 20; ++run) {
        Eigen::VectorXd shift(10);
        for (Index j = 0; j < 10; ++j) shift(j) = rng.uniform(0, 1);
        const auto g = gaussians(25, shift, 1000 + run);
        auto f = [&](const Subset& s) { return subset_mahalanobis(g, s); };
        CriterionCache crit(f);
        std::vector<Index> pool{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
        const auto got = sffs(pool, 3, crit);
        const auto [opt, arg] = oracle::best_subset(10, 3, [&](const std::vector<long>& s) { return f(Subset(s.begin(), s.end())); });
        CHECK(got.criterion >= 0.99 * opt);
        // Never worse than the best single feature.
        double single = 0;
        for (Index j = 0; j < 10; ++j) single = std::max(single, f({j}));
        CHECK(got.criterion >= single);
    }
}

TEST_CASE("sffs: floating removal escapes a greedy trap") {
    // {0,1} is the best pair but 2 is the best single feature; every set with 2 scores low.
    auto f = [](const Subset& s) {
        if (s == Subset{2}) return 10.0;
        if (s.size() == 1) return 1.0 + static_cast<double>(s[0]) * 0.1;
        if (s == Subset{0, 1}) return 50.0;
        if (s == Subset{0, 1, 3}) return 60.0;
        const bool has2 = std::find(s.begin(), s.end(), 2) != s.end();
        return (has2 ? 11.0 : 5.0) + static_cast<double>(s.size());
    };
    CriterionCache crit(f);
    const std::vector<Index> pool{0, 1, 2, 3};
    SffsOptions plain;
    plain.overshoot = 0;
    plain.swap_polish = false;
    const auto r = sffs(pool, 3, crit, plain);
    CHECK(r.indices == Subset{0, 1, 3});
    CHECK(r.criterion == 60.0);
}

TEST_CASE("sffs: pair swaps reach a complementary pair") {
    // 0 and 1 are worthless alone but best together; single swaps from the greedy answer never help.
    auto f = [](const Subset& s) {
        auto has = [&](Index i) { return std::find(s.begin(), s.end(), i) != s.end(); };
        double v = 0;
        for (Index i : s) v += i >= 2 ? 1.0 + 0.1 * static_cast<double>(i) : 0.0;
        if (has(0) && has(1)) v += 10;
        return v;
    };
    const std::vector<Index> pool{0, 1, 2, 3, 4, 5};
    SffsOptions o;
    o.overshoot = 0;
    CriterionCache with_pairs(f);
    CHECK(sffs(pool, 3, with_pairs, o).indices == Subset{0, 1, 5});
    o.pair_swap_budget = 0;
    CriterionCache singles(f);
    CHECK(sffs(pool, 3, singles, o).indices == Subset{3, 4, 5});
    CHECK(pair_swap_cost(3, 6) == 9);
    CHECK(pair_swap_cost(20, 200) == 190 * (180 * 179 / 2));
    CHECK(pair_swap_cost(1, 10) == 0);
}

TEST_CASE("exhaustive agrees with the bitmask oracle") {
    Rng rng(4);
    std::vector<double> w(9);
    for (double& v : w) v = rng.normal();
    auto f = [&](const Subset& s) {
        double v = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = 0; j < s.size(); ++j) v += w[static_cast<std::size_t>(s[i])] * w[static_cast<std::size_t>(s[j])] * (i == j ? 1 : -0.4);
        return v;
    };
    CriterionCache crit(f);
    std::vector<Index> pool{0, 1, 2, 3, 4, 5, 6, 7, 8};
    const auto got = exhaustive(pool, 4, crit);
    const auto [opt, arg] = oracle::best_subset(9, 4, [&](const std::vector<long>& s) { return f(Subset(s.begin(), s.end())); });
    CHECK(got.criterion == doctest::Approx(opt));
    CHECK(crit.evaluations() == 126);
}

TEST_CASE("genetic_select") {
    const std::vector<double> w{0.3, 0.9, 0.1, 0.5, 0.7, 0.2, 0.8, 0.05, 0.45, 0.6};
    auto additive = [&](const Subset& s) {
        double v = 0;
        for (Index i : s) v += w[static_cast<std::size_t>(i)];
        return v;
    };
    const std::vector<Index> pool{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};

    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        CriterionCache crit(additive);
        GaConfig ga;
        ga.population = 30;
        ga.generations = 50;
        ga.seed = seed;
        const auto r = genetic_select(pool, 3, crit, ga);
        CHECK(r.indices.size() == 3);
        CHECK(std::adjacent_find(r.indices.begin(), r.indices.end()) == r.indices.end());
        CHECK(std::is_sorted(r.trace.begin(), r.trace.end()));
        hits += r.indices == Subset{1, 4, 6};
    }
    CHECK(hits >= 95);

    SUBCASE("zero generations returns the best initial member") {
        GaConfig ga;
        ga.generations = 0;
        ga.population = 8;
        ga.seed = 3;
        std::vector<Subset> seen;
        CriterionCache crit([&](const Subset& s) {
            seen.push_back(s);
            return additive(s);
        });
        const auto r = genetic_select(pool, 3, crit, ga);
        double best = -1;
        for (const auto& s : seen) best = std::max(best, additive(s));
        CHECK(r.criterion == best);
        CHECK(r.trace.size() == 1);
    }

    SUBCASE("deterministic given seed") {
        GaConfig ga;
        ga.seed = 42;
        CriterionCache a(additive), b(additive);
        CHECK(genetic_select(pool, 4, a, ga).indices == genetic_select(pool, 4, b, ga).indices);
    }

    CriterionCache crit(additive);
    GaConfig small;
    small.population = 3;
    CHECK_THROWS_AS(genetic_select(pool, 3, crit, small), DomainError);
}

TEST_CASE("make_split") {
    const Labels y{0, 0, 0, 0, 0, 1, 1, 1, 1};
    const auto p = make_split(y, 2.0 / 3.0, SplitMode::Stratified, 1);
    CHECK(p.train.size() == 6);
    CHECK(p.test.size() == 3);
    int train1 = 0;
    for (Index i : p.train) train1 += y[static_cast<std::size_t>(i)];
    CHECK(train1 == 3);
    CHECK(make_split(y, 2.0 / 3.0, SplitMode::Stratified, 1).train == p.train);

    const auto c = make_split(y, 2.0 / 3.0, SplitMode::Chronological, 1);
    CHECK(c.train == std::vector<Index>{0, 1, 2, 3, 4, 5});

    CHECK_THROWS_AS(make_split(Labels(9, 1), 2.0 / 3.0, SplitMode::Stratified, 1), DomainError);
    CHECK_THROWS_AS(make_split(Labels{0, 1, 0}, 2.0 / 3.0, SplitMode::Stratified, 1), DomainError);
}

TEST_CASE("make_split: partition invariants on random label vectors") {
    Rng rng(19);
    for (int t = 0; t < 200; ++t) {
        const auto n = 6 + static_cast<std::size_t>(rng.below(200));
        Labels y(n);
        for (auto& v : y) v = static_cast<int>(rng.below(2));
        y[0] = 0;
        y[1] = 1;
        const double ratio = rng.uniform(0.2, 0.8);
        const auto p = make_split(y, ratio, SplitMode::Stratified, t);
        std::vector<int> seen(n, 0);
        for (Index i : p.train) ++seen[static_cast<std::size_t>(i)];
        for (Index i : p.test) ++seen[static_cast<std::size_t>(i)];
        CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
        const double want = std::round(ratio * static_cast<double>(n));
        CHECK(std::abs(static_cast<double>(p.train.size()) - want) <= 1.0);
        for (int c = 0; c < 2; ++c) {
            double nc = 0, tc = 0;
            for (std::size_t i = 0; i < n; ++i) nc += y[i] == c;
            for (Index i : p.train) tc += y[static_cast<std::size_t>(i)] == c;
            CHECK(std::abs(tc - ratio * nc) <= 1.0);
        }
    }
}

TEST_CASE("drop_overlapping removes test windows that share samples with training windows") {
    std::vector<Trial> trials(5);
    for (int i = 0; i < 5; ++i) {
        trials[static_cast<std::size_t>(i)].samples = Eigen::MatrixXd::Zero(1, 4);
        trials[static_cast<std::size_t>(i)].start = 2 * i;
        trials[static_cast<std::size_t>(i)].recording_id = "r";
    }
    trials[4].recording_id = "other";
    SplitPlan p;
    p.train = {0, 1};
    p.test = {2, 3, 4};
    drop_overlapping(p, trials);
    CHECK(p.test == std::vector<Index>{3, 4});
    CHECK(p.dropped == std::vector<Index>{2});
}

TEST_CASE("stratified_folds partition the rows") {
    Labels y(30);
    for (std::size_t i = 0; i < 30; ++i) y[i] = i < 12 ? 0 : 1;
    std::vector<Index> rows;
    for (Index i = 0; i < 30; i += 1) rows.push_back(i);
    const auto folds = stratified_folds(y, rows, 3, 5);
    std::size_t total = 0;
    for (const auto& f : folds) {
        total += f.size();
        CHECK(f.size() == 10);
        int ones = 0;
        for (Index i : f) ones += y[static_cast<std::size_t>(i)];
        CHECK(ones == 6);
    }
    CHECK(total == 30);
}

TEST_CASE("accuracy") {
    CHECK(accuracy({0, 1, 1}, {0, 1, 1}) == 100.0);
    CHECK(accuracy({0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, {0, 0, 0, 0, 0, 0, 0, 0, 0, 0}) == 50.0);
    CHECK(accuracy({1, 0}, {0, 1}) == 0.0);
    CHECK_THROWS_AS(accuracy({0}, {0, 1}), StructuralError);
}
