#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <set>

#include "eegbench/autoregressive.hpp"
#include "eegbench/entropy.hpp"
#include "eegbench/errors.hpp"
#include "eegbench/features.hpp"
#include "eegbench/moments.hpp"
#include "eegbench/rng.hpp"
#include "eegbench/transforms.hpp"
#include "eegbench/wavelet.hpp"
#include "oracles.hpp"

using namespace eegbench;

namespace {

Trial random_trial(int channels, int length, std::uint64_t seed, double fs = 128) {
    Rng rng(seed);
    Trial t;
    t.fs = fs;
    t.samples.resize(channels, length);
    for (int c = 0; c < channels; ++c)
        for (int i = 0; i < length; ++i) t.samples(c, i) = rng.normal();
    return t;
}

double value_of(const FeatureBlock& b, const std::string& family, std::vector<int> channels,
                std::vector<std::pair<std::string, std::string>> params = {}) {
    for (std::size_t i = 0; i < b.size(); ++i) {
        const auto& d = b.descriptors[i];
        if (d.family == family && d.channels == channels && d.params == params) return b.values[i];
    }
    FAIL("feature not found: " << family);
    return 0;
}

std::vector<double> row_vec(const Eigen::MatrixXd& m, int r) {
    std::vector<double> v(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.cols(); ++i) v[static_cast<std::size_t>(i)] = m(r, i);
    return v;
}

}  // namespace

TEST_CASE("statistics: constant channel") {
    Trial t;
    t.fs = 128;
    t.samples = Eigen::MatrixXd::Constant(2, 64, 3.0);
    t.samples.row(1) = random_trial(1, 64, 5).samples;
    const auto b = extract_statistics(t, StatisticsConfig{});
    for (int p = 1; p <= 5; ++p) CHECK(value_of(b, "moment", {0}, {{"order", std::to_string(p)}}) == 0.0);
    CHECK(value_of(b, "variance", {0}) == 0.0);
    CHECK(value_of(b, "form_factor", {0}) == 0.0);
    CHECK(value_of(b, "correlation", {0, 1}) == 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::isfinite(b.values[i]));
}

TEST_CASE("statistics: identical channels correlate at 1") {
    Trial t = random_trial(1, 64, 9);
    t.samples.conservativeResize(2, 64);
    t.samples.row(1) = t.samples.row(0);
    const auto b = extract_statistics(t, StatisticsConfig{});
    CHECK(value_of(b, "correlation", {0, 1}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("statistics: pairwise second-order cumulant equals covariance") {
    const Trial t = random_trial(2, 64, 21);
    const auto b = extract_statistics(t, StatisticsConfig{});
    const Eigen::RowVectorXd a = t.samples.row(0).array() - t.samples.row(0).mean();
    const Eigen::RowVectorXd c = t.samples.row(1).array() - t.samples.row(1).mean();
    const double cov = a.dot(c) / 64.0;
    CHECK(std::abs(value_of(b, "cumulant", {0, 1}, {{"order", "2"}, {"powers", "1,1"}}) - cov) < 1e-12);
}

TEST_CASE("statistics: moments and cumulants match definitional oracles") {
    Rng rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 8 + static_cast<int>(rng.below(25));
        Eigen::MatrixXd x(4, n);
        for (int c = 0; c < 4; ++c)
            for (int i = 0; i < n; ++i) x(c, i) = rng.normal() * (1 + c) + 0.5 * c;
        std::vector<std::vector<double>> rows;
        for (int c = 0; c < 4; ++c) rows.push_back(row_vec(x, c));
        for (int p = 1; p <= 5; ++p)
            CHECK(std::abs(central_moment(x.row(0), p) - oracle::central_moment(rows[0], p)) < 1e-10);

        const Eigen::MatrixXd centred = x.colwise() - x.rowwise().mean();
        const std::vector<std::vector<int>> tuples{{0, 1}, {0, 0, 1}, {0, 1, 1}, {0, 0, 0, 1}, {0, 0, 1, 1},
                                                   {0, 1, 2}, {0, 1, 1, 2}, {0, 1, 2, 3}, {2, 2, 2, 2}};
        for (const auto& tup : tuples) {
            std::vector<std::vector<double>> series;
            for (int r : tup) series.push_back(rows[static_cast<std::size_t>(r)]);
            CHECK(std::abs(joint_cumulant(centred, std::span<const int>(tup)) - oracle::joint_cumulant(series)) < 1e-10);
        }
    }
}

TEST_CASE("statistics: cumulant tuple sampling is capped and seeded") {
    const auto all = channel_tuples<3>(6, 1000, 1);
    CHECK(all.size() == 20);
    const auto capped = channel_tuples<4>(32, 100, 7);
    CHECK(capped.size() == 100);
    CHECK(capped == channel_tuples<4>(32, 100, 7));
    CHECK(std::is_sorted(capped.begin(), capped.end()));
    const StatisticsConfig r = resolve(StatisticsConfig{}, 32, 3);
    CHECK(r.triples.size() == 200);
    CHECK(r.quadruples.size() == 100);
}

TEST_CASE("entropy: histogram measures") {
    std::vector<double> uniform(64, 1.0 / 64);
    CHECK(shannon_entropy(uniform) == doctest::Approx(std::log(64.0)));
    for (double q : {-5.0, -2.0, -1.0, 0.5, 1.5, 2.0, 3.0, 5.0}) CHECK(renyi_entropy(uniform, q) == doctest::Approx(std::log(64.0)));
    CHECK_THROWS_AS(renyi_entropy(uniform, 1.0), DomainError);
    CHECK_THROWS_AS(tsallis_entropy(uniform, 1.0), DomainError);

    Rng rng(77);
    for (int k = 0; k < 50; ++k) {
        Eigen::VectorXd x(256);
        for (int i = 0; i < 256; ++i) x(i) = rng.normal();
        const auto p = histogram_probabilities(x, 64);
        const double h = shannon_entropy(p);
        CHECK(std::abs(renyi_entropy(p, 1.001) - h) < 1e-2);
        CHECK(std::abs(renyi_entropy(p, 0.999) - h) < 1e-2);
        CHECK(std::abs(tsallis_entropy(p, 1.001) - h) < 1e-2);
        CHECK(std::abs(tsallis_entropy(p, 0.999) - h) < 1e-2);
        double prev = renyi_entropy(p, 0.5);
        for (double q : {1.5, 2.0, 3.0, 5.0}) {
            const double cur = renyi_entropy(p, q);
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("entropy: constant channel") {
    Trial t;
    t.fs = 128;
    t.samples = Eigen::MatrixXd::Constant(1, 64, -2.0);
    const auto b = extract_entropy(t, EntropyConfig{});
    CHECK(value_of(b, "apen", {0}, {{"m", "2"}, {"r", "0.2"}}) == 0.0);
    CHECK(value_of(b, "lz76", {0}, {{"measure", "phrases"}}) == 2.0);
    CHECK(value_of(b, "lz76", {0}, {{"measure", "normalized"}}) < 0.25);
    CHECK(value_of(b, "shannon", {0}, {{"bins", "64"}}) == 0.0);
    for (double v : b.values) CHECK(std::isfinite(v));

    EntropyConfig bad;
    bad.q_grid = {2.0, 1.0};
    CHECK_THROWS_AS(extract_entropy(t, bad), DomainError);
}

TEST_CASE("entropy: LZ76 phrase counts") {
    CHECK(lz76_phrases({0, 0, 0, 0, 0, 0, 0, 0}) == 2);
    // 0001101001000101 parses as 0.001.10.100.1000.101
    CHECK(lz76_phrases({0, 0, 0, 1, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 1}) == 6);
    CHECK(lz76_phrases({0, 1, 0, 1, 0, 1, 0, 1}) == 3);
}

TEST_CASE("entropy: neural complexity") {
    Rng rng(5);
    Eigen::MatrixXd indep(4, 2000), mixed(4, 2000);
    for (int i = 0; i < 2000; ++i) {
        const double common = rng.normal();
        for (int c = 0; c < 4; ++c) {
            indep(c, i) = rng.normal();
            mixed(c, i) = common + 0.3 * rng.normal();
        }
    }
    CHECK(neural_complexity(indep) < 0.02);
    CHECK(neural_complexity(mixed) > 1.0);
    CHECK(neural_complexity(Eigen::MatrixXd::Zero(3, 50)) == 0.0);
}

TEST_CASE("fit_ar: white noise and preconditions") {
    const Trial t = random_trial(1, 10000, 8);
    const auto b = fit_ar(t, 4);
    REQUIRE(b.size() == 4);
    for (double v : b.values) CHECK(std::abs(v) < 0.2);

    const Trial shortt = random_trial(1, 12, 8);
    CHECK_THROWS_AS(fit_ar(shortt, 8), DomainError);

    Trial flat;
    flat.fs = 128;
    flat.samples = Eigen::MatrixXd::Constant(1, 128, 1.0);
    const auto z = fit_ar(flat, 4);
    for (std::size_t i = 0; i < z.size(); ++i) {
        CHECK(z.values[i] == 0.0);
        CHECK(z.degenerate[i]);
    }
}

TEST_CASE("fit_ar: fitted models are stable") {
    Rng rng(99);
    for (int w = 0; w < 200; ++w) {
        Eigen::VectorXd x(128);
        const double f = rng.uniform(1, 60);
        for (int i = 0; i < 128; ++i) x(i) = std::sin(2 * std::numbers::pi * f * i / 128.0) + 0.1 * rng.normal();
        for (int order : {4, 8, 16, 32}) {
            bool degenerate = false;
            const Eigen::VectorXd phi = burg(x, order, degenerate);
            const Eigen::VectorXcd poles = Eigen::EigenSolver<Eigen::MatrixXd>(oracle::ar_companion(phi)).eigenvalues();
            CHECK(poles.cwiseAbs().maxCoeff() < 1.0);
        }
    }
}

TEST_CASE("band_energy") {
    const auto bands = default_bands();
    CHECK(bands[0] == Band{0.5, 4});
    CHECK(bands[1] == Band{4, 8});
    CHECK(bands[2] == Band{8, 13});
    CHECK(bands[3] == Band{13, 22});
    CHECK(bands.size() == 4 + 22);
    CHECK(bands.back() == Band{42.5, 44.5});

    Trial t;
    t.fs = 128;
    t.samples.resize(1, 128);
    for (int i = 0; i < 128; ++i) t.samples(0, i) = std::sin(2 * std::numbers::pi * 10 * i / 128.0);
    const std::vector<Band> alpha{{8, 13}, {0, 64}};
    const auto b = band_energy(t, alpha);
    CHECK(b.values[0] / b.values[1] >= 0.99);

    const std::vector<Band> bad{{60, 70}};
    CHECK_THROWS_AS(band_energy(t, bad), DomainError);
}

TEST_CASE("band_energy: disjoint cover sums to total energy") {
    const Trial t = random_trial(3, 128, 31);
    std::vector<Band> cover{{0, 0.5}};
    for (double lo = 0.5; lo < 44.5; lo += 2) cover.emplace_back(lo, lo + 2);
    cover.emplace_back(44.5, 64);
    const auto b = band_energy(t, cover);
    for (int c = 0; c < 3; ++c) {
        double sum = 0;
        for (std::size_t k = 0; k < cover.size(); ++k) sum += b.values[c * cover.size() + k];
        const double total = t.samples.row(c).squaredNorm();
        CHECK(std::abs(sum - total) <= 1e-6 * total);
    }
}

TEST_CASE("energy spectrum agrees with a direct DFT") {
    const Trial t = random_trial(1, 100, 3);
    std::vector<double> x(100);
    for (int i = 0; i < 100; ++i) x[static_cast<std::size_t>(i)] = t.samples(0, i);
    const auto p = oracle::dft_power(x);
    const Eigen::VectorXd e = energy_spectrum(t.samples.row(0).transpose());
    CHECK(e(0) == doctest::Approx(p[0] / 100));
    CHECK(e(7) == doctest::Approx(2 * p[7] / 100));
    CHECK(e(50) == doctest::Approx(p[50] / 100));
}

TEST_CASE("dct_dst") {
    Trial t;
    t.fs = 128;
    t.samples = Eigen::MatrixXd::Constant(1, 128, 2.5);
    const auto b = dct_dst(t, 128);
    CHECK(b.values[0] == doctest::Approx(2.5 * std::sqrt(128.0)));
    for (int k = 1; k < 128; ++k) CHECK(std::abs(b.values[static_cast<std::size_t>(k)]) < 1e-12);
    CHECK_THROWS_AS(dct_dst(t, 129), DomainError);
    CHECK_THROWS_AS(dct_dst(t, 0), DomainError);

    const Trial r = random_trial(1, 128, 12);
    const Eigen::VectorXd x = r.samples.row(0).transpose();
    CHECK((idct2(dct2(x, 128)) - x).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((dst1(dst1(x, 128), 128) - x).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(dct2(Eigen::VectorXd::Zero(16), 16).isZero(0));
}

TEST_CASE("wavelets") {
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
    const Eigen::VectorXd w = dwt(ones, WaveletFamily::Haar, 1);
    CHECK(w(0) == doctest::Approx(w(1)));
    CHECK(w(2) == 0.0);
    CHECK(w(3) == 0.0);

    Rng rng(1);
    Eigen::VectorXd x(128);
    for (int i = 0; i < 128; ++i) x(i) = rng.normal();
    for (auto f : kWaveletFamilies) {
        CAPTURE(to_string(f));
        const Eigen::VectorXd c = dwt(x, f, 4);
        CHECK((idwt(c, f, 4) - x).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(std::abs(c.squaredNorm() - x.squaredNorm()) < 1e-9 * x.squaredNorm());
        CHECK(dwt(Eigen::VectorXd::Zero(128), f, 4).isZero(0));
    }
    CHECK_THROWS_AS(wavelet_from_string("sym4"), DomainError);

    // Lengths that are not a multiple of 2^levels are periodically extended.
    CHECK(dwt(Eigen::VectorXd::Ones(100), WaveletFamily::Db2, 4).size() == 112);
}

TEST_CASE("wavelet features are laid out approximation first") {
    const Trial t = random_trial(2, 128, 4);
    const auto b = wavelet_coeffs(t, WaveletFamily::Db3, 4);
    CHECK(b.size() == 256);
    CHECK(b.descriptors[0].params[1].second == "a");
    CHECK(b.descriptors[8].params == std::vector<std::pair<std::string, std::string>>{{"level", "4"}, {"kind", "d"}, {"index", "0"}});
    CHECK(b.descriptors[127].params[0].second == "1");
}

TEST_CASE("build_feature_matrix") {
    std::vector<Trial> trials;
    for (int i = 0; i < 3; ++i) {
        trials.push_back(random_trial(32, 128, 100 + i));
        trials.back().label = i % 2;
    }
    FeatureConfig cfg;
    cfg.groups = {FeatureGroup::Energy};
    const auto m = build_feature_matrix(trials, cfg);
    CHECK(m.cols() == 32 * static_cast<Eigen::Index>(default_bands().size()));
    CHECK(m.cols() == 832);
    CHECK(m.rows() == 3);
    CHECK(m.labels == Labels{0, 1, 0});
    CHECK(build_feature_matrix(trials, cfg).values == m.values);

    CHECK_THROWS_AS(build_feature_matrix({}, cfg), StructuralError);
    trials.push_back(random_trial(31, 128, 5));
    CHECK_THROWS_AS(build_feature_matrix(trials, cfg), StructuralError);
}

TEST_CASE("all groups: unique descriptors and finite values on degenerate windows") {
    std::vector<Trial> trials;
    trials.push_back(random_trial(4, 128, 1));
    Trial flat;
    flat.fs = 128;
    flat.samples = Eigen::MatrixXd::Constant(4, 128, 7.0);
    trials.push_back(flat);
    Trial spike = flat;
    spike.samples.setZero();
    spike.samples(2, 64) = 100.0;
    trials.push_back(spike);

    const auto m = build_feature_matrix(trials, FeatureConfig{});
    CHECK(m.values.allFinite());
    std::set<std::string> keys;
    for (const auto& d : m.descriptors) {
        keys.insert(d.key());
        CHECK(FeatureDescriptor::parse(d.key()) == d);
    }
    CHECK(keys.size() == m.descriptors.size());
    for (auto g : kFeatureGroups) CHECK_FALSE(m.columns_of(g).empty());
}

TEST_CASE("normalize") {
    FeatureMatrix m;
    m.values.resize(3, 2);
    m.values << 1, 5, 2, 5, 3, 5;
    m.descriptors = {FeatureDescriptor{FeatureGroup::AR, "a", {0}, {}}, FeatureDescriptor{FeatureGroup::AR, "b", {0}, {}}};
    m.labels = {0, 1, 0};
    const auto n = normalize(m);
    CHECK(std::abs(n.values.col(0).mean()) < 1e-12);
    CHECK(std::sqrt(n.values.col(0).squaredNorm() / 3) == doctest::Approx(1.0));
    CHECK(n.values.col(1).isZero(0));
    CHECK(n.stddev(1) == 0.0);
    CHECK(n.normalization == Normalization::ZScore);
}

TEST_CASE("normalize: held-out rows use training statistics") {
    Rng rng(3);
    FeatureMatrix m;
    m.values.resize(10, 3);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 3; ++j) m.values(i, j) = rng.normal() * (j + 1) + j;
    m.descriptors.assign(3, FeatureDescriptor{});
    for (int j = 0; j < 3; ++j) m.descriptors[static_cast<std::size_t>(j)].family = std::to_string(j);
    m.labels.assign(10, 0);
    const std::vector<Eigen::Index> train{0, 1, 2, 3, 4, 5};
    const auto n = normalize(m, train);

    Eigen::MatrixXd train_block(6, 3);
    for (int i = 0; i < 6; ++i) train_block.row(i) = m.values.row(i);
    const Eigen::RowVectorXd mu = train_block.colwise().mean();
    const Eigen::RowVectorXd sd = ((train_block.rowwise() - mu).array().square().colwise().sum() / 6.0).sqrt();
    for (int i = 6; i < 10; ++i)
        for (int j = 0; j < 3; ++j) CHECK(n.values(i, j) == doctest::Approx((m.values(i, j) - mu(j)) / sd(j)));
    for (int j = 0; j < 3; ++j) CHECK(std::abs(n.values.topRows(6).col(j).mean()) < 1e-9);
}
