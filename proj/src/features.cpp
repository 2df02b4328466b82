#include "eegbench/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "eegbench/autoregressive.hpp"
#include "eegbench/entropy.hpp"
#include "eegbench/errors.hpp"
#include "eegbench/moments.hpp"
#include "eegbench/rng.hpp"
#include "eegbench/transforms.hpp"

namespace eegbench {

std::string_view to_string(FeatureGroup g) {
    switch (g) {
        case FeatureGroup::Statistic: return "Statistic";
        case FeatureGroup::Entropy: return "Entropy";
        case FeatureGroup::AR: return "AR";
        case FeatureGroup::Energy: return "Energy";
        case FeatureGroup::DctDst: return "DctDst";
        case FeatureGroup::Wavelet: return "Wavelet";
    }
    return "?";
}

FeatureGroup group_from_string(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (auto g : kFeatureGroups) {
        std::string n(to_string(g));
        std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
        if (n == lower) return g;
    }
    throw DomainError("unknown feature group '" + std::string(name) + "'");
}

int group_number(FeatureGroup g) { return static_cast<int>(g) + 1; }

std::string group_title(FeatureGroup g) {
    static const char* names[] = {"Statistic", "Entropy", "AR", "Energy", "DCT/DST", "Wavelet"};
    return "Group " + std::to_string(group_number(g)) + " (" + names[static_cast<int>(g)] + ")";
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

FeatureDescriptor desc(FeatureGroup g, std::string family, std::vector<int> channels,
                       std::vector<std::pair<std::string, std::string>> params = {}) {
    return FeatureDescriptor{g, std::move(family), std::move(channels), std::move(params)};
}

template <typename T>
std::pair<std::string, std::string> kv(std::string k, T v) {
    if constexpr (std::is_floating_point_v<T>)
        return {std::move(k), fmt_double(v)};
    else if constexpr (std::is_integral_v<T>)
        return {std::move(k), std::to_string(v)};
    else
        return {std::move(k), std::string(v)};
}

}  // namespace

std::string FeatureDescriptor::key() const {
    std::string s(to_string(group));
    s += '/';
    s += family;
    s += "/ch=";
    for (std::size_t i = 0; i < channels.size(); ++i) {
        if (i) s += '+';
        s += std::to_string(channels[i]);
    }
    for (const auto& [k, v] : params) {
        s += '/';
        s += k;
        s += '=';
        s += v;
    }
    return s;
}

FeatureDescriptor FeatureDescriptor::parse(std::string_view key) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = key.find('/', start);
        parts.emplace_back(key.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (parts.size() < 3 || parts[2].rfind("ch=", 0) != 0) throw MalformedInputError("bad feature descriptor '" + std::string(key) + "'");
    FeatureDescriptor d;
    d.group = group_from_string(parts[0]);
    d.family = parts[1];
    std::string_view ch = std::string_view(parts[2]).substr(3);
    while (!ch.empty()) {
        const auto plus = ch.find('+');
        const auto tok = ch.substr(0, plus);
        int v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size())
            throw MalformedInputError("bad channel list in descriptor '" + std::string(key) + "'");
        d.channels.push_back(v);
        if (plus == std::string_view::npos) break;
        ch.remove_prefix(plus + 1);
    }
    for (std::size_t i = 3; i < parts.size(); ++i) {
        const auto eq = parts[i].find('=');
        if (eq == std::string::npos) throw MalformedInputError("bad parameter in descriptor '" + std::string(key) + "'");
        d.params.emplace_back(parts[i].substr(0, eq), parts[i].substr(eq + 1));
    }
    return d;
}

void FeatureBlock::add(double v, FeatureDescriptor d, bool is_degenerate) {
    if (!std::isfinite(v)) {
        v = 0.0;
        is_degenerate = true;
    }
    values.push_back(v);
    descriptors.push_back(std::move(d));
    degenerate.push_back(is_degenerate);
}

void FeatureBlock::append(const FeatureBlock& other) {
    values.insert(values.end(), other.values.begin(), other.values.end());
    descriptors.insert(descriptors.end(), other.descriptors.begin(), other.descriptors.end());
    degenerate.insert(degenerate.end(), other.degenerate.begin(), other.degenerate.end());
}

std::vector<Band> default_bands() {
    std::vector<Band> bands{{0.5, 4.0}, {4.0, 8.0}, {8.0, 13.0}, {13.0, 22.0}};
    for (double lo = 0.5; lo + 2.0 <= 45.0 + 1e-12; lo += 2.0) bands.emplace_back(lo, lo + 2.0);
    return bands;
}

template <std::size_t N>
std::vector<std::array<int, N>> channel_tuples(int n_channels, int cap, std::uint64_t seed) {
    std::vector<std::array<int, N>> all;
    if (n_channels < static_cast<int>(N) || cap <= 0) return all;
    std::array<int, N> t{};
    for (std::size_t i = 0; i < N; ++i) t[i] = static_cast<int>(i);
    while (true) {
        all.push_back(t);
        int i = static_cast<int>(N) - 1;
        while (i >= 0 && t[static_cast<std::size_t>(i)] == n_channels - static_cast<int>(N) + i) --i;
        if (i < 0) break;
        ++t[static_cast<std::size_t>(i)];
        for (std::size_t j = static_cast<std::size_t>(i) + 1; j < N; ++j) t[j] = t[j - 1] + 1;
    }
    if (static_cast<int>(all.size()) <= cap) return all;
    Rng rng(derive_seed(seed, {N}));
    for (std::size_t i = 0; i < static_cast<std::size_t>(cap); ++i)
        std::swap(all[i], all[i + rng.below(all.size() - i)]);
    all.resize(static_cast<std::size_t>(cap));
    std::sort(all.begin(), all.end());
    return all;
}

template std::vector<std::array<int, 3>> channel_tuples<3>(int, int, std::uint64_t);
template std::vector<std::array<int, 4>> channel_tuples<4>(int, int, std::uint64_t);

StatisticsConfig resolve(const StatisticsConfig& cfg, int n_channels, std::uint64_t seed) {
    StatisticsConfig out = cfg;
    if (out.triples.empty()) out.triples = channel_tuples<3>(n_channels, cfg.triple_cap, seed);
    if (out.quadruples.empty()) out.quadruples = channel_tuples<4>(n_channels, cfg.quadruple_cap, seed);
    return out;
}

namespace {

// Multisets of `order` elements over `arity` distinct slots using each slot at
// least once, as power vectors, in lexicographic order.
void power_vectors(int arity, int order, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == arity) {
        if (std::accumulate(cur.begin(), cur.end(), 0) == order) out.push_back(cur);
        return;
    }
    const int used = std::accumulate(cur.begin(), cur.end(), 0);
    const int remaining_slots = arity - static_cast<int>(cur.size()) - 1;
    for (int p = 1; used + p + remaining_slots <= order; ++p) {
        cur.push_back(p);
        power_vectors(arity, order, cur, out);
        cur.pop_back();
    }
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

void add_cumulants(FeatureBlock& out, const Eigen::MatrixXd& centred, const std::vector<int>& chans) {
    const int arity = static_cast<int>(chans.size());
    for (int order = std::max(arity, 2); order <= 4; ++order) {
        std::vector<std::vector<int>> powers;
        std::vector<int> cur;
        power_vectors(arity, order, cur, powers);
        for (const auto& pw : powers) {
            std::vector<int> rows;
            for (int s = 0; s < arity; ++s)
                for (int r = 0; r < pw[static_cast<std::size_t>(s)]; ++r) rows.push_back(chans[static_cast<std::size_t>(s)]);
            out.add(joint_cumulant(centred, std::span<const int>(rows)),
                    desc(FeatureGroup::Statistic, "cumulant", chans, {kv("order", order), kv("powers", join_ints(pw))}));
        }
    }
}

}  // namespace

FeatureBlock extract_statistics(const Trial& trial, const StatisticsConfig& cfg_in) {
    const Eigen::MatrixXd& x = trial.samples;
    const int C = static_cast<int>(x.rows());
    if (x.cols() < 8) throw DomainError("statistics need windows of at least 8 samples");
    const StatisticsConfig cfg = (cfg_in.triples.empty() && cfg_in.quadruples.empty()) ? resolve(cfg_in, C, 0) : cfg_in;
    const Eigen::MatrixXd centred = x.colwise() - x.rowwise().mean();
    constexpr auto G = FeatureGroup::Statistic;

    FeatureBlock out;
    for (int c = 0; c < C; ++c) {
        const auto row = x.row(c);
        for (int p = 1; p <= cfg.max_moment_order; ++p) out.add(central_moment(row, p), desc(G, "moment", {c}, {kv("order", p)}));
        out.add(central_moment(row, 2), desc(G, "variance", {c}));
        bool degenerate = false;
        const double ff = form_factor(row, degenerate);
        out.add(ff, desc(G, "form_factor", {c}), degenerate);
    }
    for (int i = 0; i < C; ++i)
        for (int j = i + 1; j < C; ++j) {
            bool degenerate = false;
            const double r = correlation(x.row(i), x.row(j), degenerate);
            out.add(r, desc(G, "correlation", {i, j}), degenerate);
            for (int total = 2; total <= cfg.max_joint_order; ++total)
                for (int p = 1; p < total; ++p) {
                    const int q = total - p;
                    const double m = (centred.row(i).array().pow(p) * centred.row(j).array().pow(q)).mean();
                    out.add(m, desc(G, "joint_moment", {i, j}, {kv("p", p), kv("q", q)}));
                }
            add_cumulants(out, centred, {i, j});
        }
    for (const auto& t : cfg.triples)
        if (t.back() < C) add_cumulants(out, centred, {t[0], t[1], t[2]});
    for (const auto& t : cfg.quadruples)
        if (t.back() < C) add_cumulants(out, centred, {t[0], t[1], t[2], t[3]});
    return out;
}

FeatureBlock extract_entropy(const Trial& trial, const EntropyConfig& cfg) {
    const Eigen::MatrixXd& x = trial.samples;
    if (x.cols() < 32) throw DomainError("entropy features need windows of at least 32 samples");
    for (double q : cfg.q_grid)
        if (q == 1.0) throw DomainError("q = 1 is the Shannon limit and is reported separately");
    constexpr auto G = FeatureGroup::Entropy;

    FeatureBlock out;
    for (int c = 0; c < static_cast<int>(x.rows()); ++c) {
        const auto row = x.row(c);
        const auto p = histogram_probabilities(row, cfg.bins);
        out.add(shannon_entropy(p), desc(G, "shannon", {c}, {kv("bins", cfg.bins)}));
        for (double q : cfg.q_grid) out.add(renyi_entropy(p, q), desc(G, "renyi", {c}, {kv("q", q), kv("bins", cfg.bins)}));
        for (double q : cfg.q_grid) out.add(tsallis_entropy(p, q), desc(G, "tsallis", {c}, {kv("q", q), kv("bins", cfg.bins)}));
        const auto bits = median_binarize(row);
        const long phrases = lz76_phrases(bits);
        out.add(static_cast<double>(phrases), desc(G, "lz76", {c}, {kv("measure", "phrases")}));
        out.add(lz76_normalized(phrases, bits.size()), desc(G, "lz76", {c}, {kv("measure", "normalized")}));
        const double sd = std::sqrt((row.array() - row.mean()).square().mean());
        out.add(approximate_entropy(row, cfg.apen_m, cfg.apen_r * sd),
                desc(G, "apen", {c}, {kv("m", cfg.apen_m), kv("r", cfg.apen_r)}));
    }
    if (cfg.neural_complexity) {
        std::vector<int> all(static_cast<std::size_t>(x.rows()));
        std::iota(all.begin(), all.end(), 0);
        out.add(neural_complexity(x), desc(G, "neural_complexity", all));
    }
    return out;
}

FeatureBlock fit_ar(const Trial& trial, int order) {
    const Eigen::MatrixXd& x = trial.samples;
    if (order < 1) throw DomainError("AR order must be positive");
    if (x.cols() <= 2 * order) throw DomainError("window too short for AR order " + std::to_string(order));
    FeatureBlock out;
    for (int c = 0; c < static_cast<int>(x.rows()); ++c) {
        bool degenerate = false;
        const Eigen::VectorXd phi = burg(x.row(c).transpose(), order, degenerate);
        for (int k = 0; k < order; ++k)
            out.add(phi(k), desc(FeatureGroup::AR, "ar_coef", {c}, {kv("order", order), kv("lag", k + 1)}), degenerate);
    }
    return out;
}

FeatureBlock band_energy(const Trial& trial, std::span<const Band> bands) {
    const Eigen::MatrixXd& x = trial.samples;
    const double fs = trial.fs;
    if (!(fs > 0.0)) throw DomainError("trial sampling rate must be positive");
    const double nyquist = fs / 2.0;
    for (const auto& [lo, hi] : bands)
        if (!(lo >= 0.0) || !(hi > lo) || hi > nyquist + 1e-12)
            throw DomainError("band [" + fmt_double(lo) + ", " + fmt_double(hi) + ") outside [0, fs/2]");
    const Eigen::Index n = x.cols();
    FeatureBlock out;
    for (int c = 0; c < static_cast<int>(x.rows()); ++c) {
        const Eigen::VectorXd e = energy_spectrum(x.row(c).transpose());
        for (const auto& [lo, hi] : bands) {
            double acc = 0.0;
            for (Eigen::Index f = 0; f < e.size(); ++f) {
                const double freq = static_cast<double>(f) * fs / static_cast<double>(n);
                const bool top = std::abs(hi - nyquist) <= 1e-12 && std::abs(freq - nyquist) <= 1e-12;
                if ((freq >= lo && freq < hi) || top) acc += e(f);
            }
            out.add(acc, desc(FeatureGroup::Energy, "band_energy", {c}, {kv("low", lo), kv("high", hi)}));
        }
    }
    return out;
}

FeatureBlock dct_dst(const Trial& trial, int k) {
    const Eigen::MatrixXd& x = trial.samples;
    if (k < 1 || k > x.cols()) throw DomainError("DCT/DST coefficient count must be in [1, window length]");
    FeatureBlock out;
    for (int c = 0; c < static_cast<int>(x.rows()); ++c) {
        const Eigen::VectorXd row = x.row(c).transpose();
        const Eigen::VectorXd dc = dct2(row, k);
        const Eigen::VectorXd ds = dst1(row, k);
        for (int j = 0; j < k; ++j) out.add(dc(j), desc(FeatureGroup::DctDst, "dct", {c}, {kv("k", j)}));
        for (int j = 0; j < k; ++j) out.add(ds(j), desc(FeatureGroup::DctDst, "dst", {c}, {kv("k", j)}));
    }
    return out;
}

FeatureBlock wavelet_coeffs(const Trial& trial, WaveletFamily family, int levels) {
    const Eigen::MatrixXd& x = trial.samples;
    FeatureBlock out;
    const std::string fam(to_string(family));
    for (int c = 0; c < static_cast<int>(x.rows()); ++c) {
        const Eigen::VectorXd w = dwt(x.row(c).transpose(), family, levels);
        const Eigen::Index n = w.size();
        Eigen::Index pos = 0;
        const Eigen::Index approx_len = n >> levels;
        for (Eigen::Index i = 0; i < approx_len; ++i, ++pos)
            out.add(w(pos), desc(FeatureGroup::Wavelet, fam, {c}, {kv("level", levels), kv("kind", "a"), kv("index", i)}));
        for (int level = levels; level >= 1; --level) {
            const Eigen::Index len = n >> level;
            for (Eigen::Index i = 0; i < len; ++i, ++pos)
                out.add(w(pos), desc(FeatureGroup::Wavelet, fam, {c}, {kv("level", level), kv("kind", "d"), kv("index", i)}));
        }
    }
    return out;
}

FeatureBlock extract_all(const Trial& trial, const FeatureConfig& cfg) {
    FeatureBlock out;
    for (auto g : kFeatureGroups) {
        if (!cfg.groups.contains(g)) continue;
        switch (g) {
            case FeatureGroup::Statistic:
                out.append(extract_statistics(trial, cfg.statistics));
                break;
            case FeatureGroup::Entropy:
                out.append(extract_entropy(trial, cfg.entropy));
                break;
            case FeatureGroup::AR:
                for (int order : cfg.ar.orders) out.append(fit_ar(trial, order));
                break;
            case FeatureGroup::Energy:
                out.append(band_energy(trial, cfg.energy.bands));
                break;
            case FeatureGroup::DctDst:
                out.append(dct_dst(trial, cfg.dct_dst.k));
                break;
            case FeatureGroup::Wavelet:
                for (auto f : cfg.wavelet.families) out.append(wavelet_coeffs(trial, f, cfg.wavelet.levels));
                break;
        }
    }
    return out;
}

std::vector<Eigen::Index> FeatureMatrix::columns_of(FeatureGroup g) const {
    std::vector<Eigen::Index> cols;
    for (std::size_t i = 0; i < descriptors.size(); ++i)
        if (descriptors[i].group == g) cols.push_back(static_cast<Eigen::Index>(i));
    return cols;
}

void validate(const FeatureMatrix& m) {
    if (static_cast<Eigen::Index>(m.descriptors.size()) != m.cols()) throw StructuralError("descriptor count != column count");
    if (static_cast<Eigen::Index>(m.labels.size()) != m.rows()) throw StructuralError("label count != row count");
    if (!m.values.allFinite()) throw StructuralError("feature matrix contains non-finite values");
}

FeatureMatrix build_feature_matrix(const std::vector<Trial>& trials, const FeatureConfig& cfg_in) {
    if (trials.empty()) throw StructuralError("no trials to extract features from");
    const auto C = trials.front().samples.rows();
    const auto W = trials.front().samples.cols();
    for (const auto& t : trials)
        if (t.samples.rows() != C || t.samples.cols() != W || t.fs != trials.front().fs)
            throw StructuralError("trials have inconsistent shapes");

    FeatureConfig cfg = cfg_in;
    cfg.statistics = resolve(cfg.statistics, static_cast<int>(C), cfg.seed);

    FeatureMatrix m;
    const FeatureBlock first = extract_all(trials.front(), cfg);
    m.descriptors = first.descriptors;
    m.values.resize(static_cast<Eigen::Index>(trials.size()), static_cast<Eigen::Index>(first.size()));
    m.values.row(0) = Eigen::Map<const Eigen::RowVectorXd>(first.values.data(), static_cast<Eigen::Index>(first.size()));
    m.labels.push_back(trials.front().label);
    for (std::size_t i = 1; i < trials.size(); ++i) {
        const FeatureBlock b = extract_all(trials[i], cfg);
        m.values.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(b.values.data(), static_cast<Eigen::Index>(b.size()));
        m.labels.push_back(trials[i].label);
    }
    return m;
}

ZScore fit_zscore(const Eigen::MatrixXd& values, std::span<const Eigen::Index> rows) {
    if (rows.empty()) throw StructuralError("z-score needs at least one row");
    const Eigen::Index cols = values.cols();
    ZScore z{Eigen::RowVectorXd::Zero(cols), Eigen::RowVectorXd::Zero(cols)};
    const double n = static_cast<double>(rows.size());
    for (auto r : rows) z.mean += values.row(r);
    z.mean /= n;
    Eigen::RowVectorXd maxabs = Eigen::RowVectorXd::Zero(cols);
    for (auto r : rows) {
        z.stddev += (values.row(r) - z.mean).array().square().matrix();
        maxabs = maxabs.cwiseMax(values.row(r).cwiseAbs());
    }
    z.stddev = (z.stddev / n).cwiseSqrt();
    for (Eigen::Index c = 0; c < cols; ++c)
        if (!(z.stddev(c) > 1e-12 * std::max(1.0, maxabs(c)))) z.stddev(c) = 0.0;
    return z;
}

Eigen::MatrixXd apply_zscore(const Eigen::MatrixXd& values, const ZScore& z) {
    if (values.cols() != z.mean.size()) throw StructuralError("z-score width does not match matrix");
    Eigen::MatrixXd out(values.rows(), values.cols());
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
        if (z.stddev(c) > 0.0)
            out.col(c) = (values.col(c).array() - z.mean(c)) / z.stddev(c);
        else
            out.col(c).setZero();
    }
    return out;
}

FeatureMatrix normalize(const FeatureMatrix& m) {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(m.rows()));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    return normalize(m, rows);
}

FeatureMatrix normalize(const FeatureMatrix& m, std::span<const Eigen::Index> train_rows) {
    validate(m);
    const ZScore z = fit_zscore(m.values, train_rows);
    FeatureMatrix out = m;
    out.values = apply_zscore(m.values, z);
    out.normalization = Normalization::ZScore;
    out.mean = z.mean;
    out.stddev = z.stddev;
    return out;
}

}  // namespace eegbench
