#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <vector>

#include "eegbench/errors.hpp"

namespace eegbench {

// Occupied-bin probabilities of a `bins`-bin equal-width histogram over [min, max].
// Empty bins are dropped so that negative orders stay finite.
template <typename Derived>
std::vector<double> histogram_probabilities(const Eigen::MatrixBase<Derived>& x, int bins) {
    if (bins < 1) throw DomainError("histogram needs at least one bin");
    const Eigen::Index n = x.size();
    if (n == 0) return {};
    const double lo = x.minCoeff(), hi = x.maxCoeff();
    std::vector<long> counts(static_cast<std::size_t>(bins), 0);
    const double width = hi - lo;
    for (Eigen::Index i = 0; i < n; ++i) {
        int b = width > 0.0 ? static_cast<int>((x(i) - lo) / width * bins) : 0;
        counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))]++;
    }
    std::vector<double> p;
    for (long c : counts)
        if (c > 0) p.push_back(static_cast<double>(c) / static_cast<double>(n));
    return p;
}

inline double shannon_entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

inline double power_sum(const std::vector<double>& p, double q) {
    double s = 0.0;
    for (double v : p)
        if (v > 0.0) s += std::pow(v, q);
    return s;
}

inline double renyi_entropy(const std::vector<double>& p, double q) {
    if (q == 1.0) throw DomainError("Renyi order 1 is the Shannon limit; request Shannon instead");
    return std::log(power_sum(p, q)) / (1.0 - q);
}

inline double tsallis_entropy(const std::vector<double>& p, double q) {
    if (q == 1.0) throw DomainError("Tsallis q = 1 is the Shannon limit; request Shannon instead");
    return (1.0 - power_sum(p, q)) / (q - 1.0);
}

// Number of phrases in the Lempel-Ziv (1976) parsing, Kaspar-Schuster scheme.
inline long lz76_phrases(const std::vector<unsigned char>& s) {
    const long n = static_cast<long>(s.size());
    if (n == 0) return 0;
    if (n == 1) return 1;
    long c = 1, l = 1, i = 0, k = 1, k_max = 1;
    while (true) {
        if (s[static_cast<std::size_t>(i + k - 1)] == s[static_cast<std::size_t>(l + k - 1)]) {
            ++k;
            if (l + k > n) {
                ++c;
                break;
            }
        } else {
            k_max = std::max(k, k_max);
            ++i;
            if (i == l) {
                ++c;
                l += k_max;
                if (l + 1 > n) break;
                i = 0;
                k = 1;
                k_max = 1;
            } else {
                k = 1;
            }
        }
    }
    return c;
}

// Binarise at the median (x > median -> 1).
template <typename Derived>
std::vector<unsigned char> median_binarize(const Eigen::MatrixBase<Derived>& x) {
    std::vector<double> v(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) v[static_cast<std::size_t>(i)] = x(i);
    std::vector<double> sorted = v;
    const std::size_t n = sorted.size();
    std::sort(sorted.begin(), sorted.end());
    const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    std::vector<unsigned char> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = v[i] > median ? 1 : 0;
    return b;
}

// c(n) * log2(n) / n
inline double lz76_normalized(long phrases, std::size_t n) {
    if (n < 2) return 0.0;
    const double nn = static_cast<double>(n);
    return static_cast<double>(phrases) * std::log2(nn) / nn;
}

// Approximate entropy ApEn(m, r) with Chebyshev distance and self-matches counted.
template <typename Derived>
double approximate_entropy(const Eigen::MatrixBase<Derived>& x, int m, double r) {
    const Eigen::Index n = x.size();
    auto phi = [&](int mm) {
        const Eigen::Index count = n - mm + 1;
        if (count <= 0) return 0.0;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < count; ++i) {
            long matches = 0;
            for (Eigen::Index j = 0; j < count; ++j) {
                bool ok = true;
                for (int k = 0; k < mm && ok; ++k) ok = std::abs(x(i + k) - x(j + k)) <= r;
                matches += ok;
            }
            acc += std::log(static_cast<double>(matches) / static_cast<double>(count));
        }
        return acc / static_cast<double>(count);
    };
    if (n <= m) return 0.0;
    return phi(m) - phi(m + 1);
}

// Gaussian approximation of neural complexity: sum over channels of the mutual
// information between the channel and all others, 0.5*ln(var_i * (S^-1)_ii).
template <typename Derived>
double neural_complexity(const Eigen::MatrixBase<Derived>& channels_by_time) {
    const Eigen::Index d = channels_by_time.rows();
    const Eigen::Index n = channels_by_time.cols();
    if (d < 2 || n < 2) return 0.0;
    const Eigen::MatrixXd centred = channels_by_time.colwise() - channels_by_time.rowwise().mean();
    Eigen::MatrixXd cov = centred * centred.transpose() / static_cast<double>(n);
    const double scale = cov.trace() / static_cast<double>(d);
    if (!(scale > 0.0)) return 0.0;
    cov.diagonal().array() += 1e-6 * scale;
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) return 0.0;
    const Eigen::MatrixXd prec = llt.solve(Eigen::MatrixXd::Identity(d, d));
    double c = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) c += 0.5 * std::log(cov(i, i) * prec(i, i));
    return std::max(c, 0.0);
}

}  // namespace eegbench
