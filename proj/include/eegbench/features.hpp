#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eegbench/signal_io.hpp"
#include "eegbench/wavelet.hpp"

namespace eegbench {

enum class FeatureGroup { Statistic, Entropy, AR, Energy, DctDst, Wavelet };

inline constexpr std::array<FeatureGroup, 6> kFeatureGroups{FeatureGroup::Statistic, FeatureGroup::Entropy, FeatureGroup::AR,
                                                            FeatureGroup::Energy,    FeatureGroup::DctDst,  FeatureGroup::Wavelet};

std::string_view to_string(FeatureGroup g);
// Accepts the enum name ("Energy") or lower case ("energy").
FeatureGroup group_from_string(std::string_view name);
// Report column title, e.g. "Group 4 (Energy)".
std::string group_title(FeatureGroup g);
int group_number(FeatureGroup g);

struct FeatureDescriptor {
    FeatureGroup group = FeatureGroup::Statistic;
    std::string family;
    std::vector<int> channels;
    std::vector<std::pair<std::string, std::string>> params;

    // Canonical one-line text; unique per column.
    std::string key() const;
    static FeatureDescriptor parse(std::string_view key);
    bool operator==(const FeatureDescriptor&) const = default;
};

// Values and descriptors from one extractor on one trial, in emission order.
struct FeatureBlock {
    std::vector<double> values;
    std::vector<FeatureDescriptor> descriptors;
    std::vector<bool> degenerate;

    void add(double v, FeatureDescriptor d, bool is_degenerate = false);
    void append(const FeatureBlock& other);
    std::size_t size() const { return values.size(); }
};

struct StatisticsConfig {
    int max_moment_order = 5;
    int max_joint_order = 5;
    int triple_cap = 200;
    int quadruple_cap = 100;
    // Channel tuples for higher-order cumulants; filled from the caps and seed when empty.
    std::vector<std::array<int, 3>> triples;
    std::vector<std::array<int, 4>> quadruples;
};

struct EntropyConfig {
    int bins = 64;
    std::vector<double> q_grid{-5, -2, -1, 0.5, 1.5, 2, 3, 5};
    int apen_m = 2;
    double apen_r = 0.2;  // multiple of the channel standard deviation
    bool neural_complexity = true;
};

struct ArConfig {
    std::vector<int> orders{4, 8, 16, 32};
};

using Band = std::pair<double, double>;

// delta, theta, alpha, beta followed by contiguous 2 Hz bins from 0.5 Hz up to 45 Hz.
std::vector<Band> default_bands();

struct EnergyConfig {
    std::vector<Band> bands = default_bands();
};

struct DctDstConfig {
    int k = 32;
};

struct WaveletConfig {
    std::vector<WaveletFamily> families{kWaveletFamilies.begin(), kWaveletFamilies.end()};
    int levels = 4;
};

struct FeatureConfig {
    std::set<FeatureGroup> groups{kFeatureGroups.begin(), kFeatureGroups.end()};
    StatisticsConfig statistics;
    EntropyConfig entropy;
    ArConfig ar;
    EnergyConfig energy;
    DctDstConfig dct_dst;
    WaveletConfig wavelet;
    std::uint64_t seed = 0;
};

// Lexicographic tuples of `size` distinct channels, or a seeded sample of `cap` of them.
template <std::size_t N>
std::vector<std::array<int, N>> channel_tuples(int n_channels, int cap, std::uint64_t seed);

// Fill the cumulant channel tuples for a montage of `n_channels`.
StatisticsConfig resolve(const StatisticsConfig& cfg, int n_channels, std::uint64_t seed);

FeatureBlock extract_statistics(const Trial& trial, const StatisticsConfig& cfg);
FeatureBlock extract_entropy(const Trial& trial, const EntropyConfig& cfg);
FeatureBlock fit_ar(const Trial& trial, int order);
FeatureBlock band_energy(const Trial& trial, std::span<const Band> bands);
FeatureBlock dct_dst(const Trial& trial, int k);
FeatureBlock wavelet_coeffs(const Trial& trial, WaveletFamily family, int levels);

// Everything enabled in `cfg` for one trial, groups in enum order.
FeatureBlock extract_all(const Trial& trial, const FeatureConfig& cfg);

enum class Normalization { Raw, ZScore };

struct FeatureMatrix {
    Eigen::MatrixXd values;  // trial x feature
    std::vector<FeatureDescriptor> descriptors;
    Labels labels;
    Normalization normalization = Normalization::Raw;
    Eigen::RowVectorXd mean;  // populated by normalize()
    Eigen::RowVectorXd stddev;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
    std::vector<Eigen::Index> columns_of(FeatureGroup g) const;
};

// Throws StructuralError if the invariants do not hold.
void validate(const FeatureMatrix& m);

FeatureMatrix build_feature_matrix(const std::vector<Trial>& trials, const FeatureConfig& cfg);

struct ZScore {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd stddev;  // 0 marks a constant column
};

ZScore fit_zscore(const Eigen::MatrixXd& values, std::span<const Eigen::Index> rows);
Eigen::MatrixXd apply_zscore(const Eigen::MatrixXd& values, const ZScore& z);

// Z-score with statistics from every row.
FeatureMatrix normalize(const FeatureMatrix& m);
// Z-score with statistics from `train_rows` only, applied to every row.
FeatureMatrix normalize(const FeatureMatrix& m, std::span<const Eigen::Index> train_rows);

}  // namespace eegbench
