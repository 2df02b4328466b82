#pragma once

#include <Eigen/Core>
#include <array>
#include <span>
#include <string>
#include <string_view>

#include "eegbench/errors.hpp"

namespace eegbench {

enum class WaveletFamily { Haar, Db2, Db3, Db4, Db5 };

inline constexpr std::array<WaveletFamily, 5> kWaveletFamilies{WaveletFamily::Haar, WaveletFamily::Db2, WaveletFamily::Db3,
                                                               WaveletFamily::Db4, WaveletFamily::Db5};

inline std::string_view to_string(WaveletFamily f) {
    switch (f) {
        case WaveletFamily::Haar: return "haar";
        case WaveletFamily::Db2: return "db2";
        case WaveletFamily::Db3: return "db3";
        case WaveletFamily::Db4: return "db4";
        case WaveletFamily::Db5: return "db5";
    }
    return "?";
}

inline WaveletFamily wavelet_from_string(std::string_view name) {
    for (auto f : kWaveletFamilies)
        if (to_string(f) == name) return f;
    if (name == "db1") return WaveletFamily::Haar;
    throw DomainError("unsupported wavelet family '" + std::string(name) + "'");
}

// Daubechies scaling filters (sum = sqrt(2)).
inline std::span<const double> scaling_filter(WaveletFamily f) {
    static constexpr std::array<double, 2> haar{0.7071067811865476, 0.7071067811865476};
    static constexpr std::array<double, 4> db2{0.48296291314453416, 0.8365163037378079, 0.2241438680420134,
                                               -0.12940952255126037};
    static constexpr std::array<double, 6> db3{0.33267055295008263,  0.8068915093110925,  0.45987750211849154,
                                               -0.13501102001025458, -0.08544127388202666, 0.03522629188570953};
    static constexpr std::array<double, 8> db4{0.2303778133088965,   0.7148465705529157,  0.6308807679298589,
                                               -0.027983769416859854, -0.18703481171909309, 0.030841381835560764,
                                               0.0328830116668852,   -0.010597401785069032};
    static constexpr std::array<double, 10> db5{0.16010239797419293,  0.6038292697971896,   0.7243085284377729,
                                                0.13842814590132074,  -0.24229488706638203, -0.032244869584638375,
                                                0.07757149384004572,  -0.006241490212798274, -0.012580751999081999,
                                                0.0033357252854737712};
    switch (f) {
        case WaveletFamily::Haar: return haar;
        case WaveletFamily::Db2: return db2;
        case WaveletFamily::Db3: return db3;
        case WaveletFamily::Db4: return db4;
        case WaveletFamily::Db5: return db5;
    }
    throw DomainError("unsupported wavelet family");
}

namespace detail {

template <typename Scalar>
void analysis_step(std::span<const double> h, const Scalar* x, Eigen::Index n, Scalar* approx, Scalar* detail) {
    const auto L = static_cast<Eigen::Index>(h.size());
    for (Eigen::Index k = 0; k < n / 2; ++k) {
        Scalar a = 0, d = 0;
        for (Eigen::Index t = 0; t < L; ++t) {
            const Scalar v = x[(2 * k + t) % n];
            const double g = (t % 2 == 0 ? 1.0 : -1.0) * h[static_cast<std::size_t>(L - 1 - t)];
            a += Scalar(h[static_cast<std::size_t>(t)]) * v;
            d += Scalar(g) * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

template <typename Scalar>
void synthesis_step(std::span<const double> h, const Scalar* approx, const Scalar* detail, Eigen::Index n, Scalar* x) {
    const auto L = static_cast<Eigen::Index>(h.size());
    for (Eigen::Index i = 0; i < n; ++i) x[i] = 0;
    for (Eigen::Index k = 0; k < n / 2; ++k)
        for (Eigen::Index t = 0; t < L; ++t) {
            const double g = (t % 2 == 0 ? 1.0 : -1.0) * h[static_cast<std::size_t>(L - 1 - t)];
            x[(2 * k + t) % n] += Scalar(h[static_cast<std::size_t>(t)]) * approx[k] + Scalar(g) * detail[k];
        }
}

}  // namespace detail

// Periodised multilevel DWT. Output layout: [a_L, d_L, d_{L-1}, ..., d_1].
// Signals whose length is not a multiple of 2^levels are periodically extended first.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> dwt(const Eigen::MatrixBase<Derived>& signal, WaveletFamily family,
                                                                int levels) {
    using Scalar = typename Derived::Scalar;
    if (levels < 1) throw DomainError("wavelet depth must be at least 1");
    const Eigen::Index block = Eigen::Index{1} << levels;
    const Eigen::Index n0 = signal.size();
    const Eigen::Index n = ((n0 + block - 1) / block) * block;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n), work(n), tmp(n);
    for (Eigen::Index i = 0; i < n; ++i) work(i) = signal(i % n0);
    const auto h = scaling_filter(family);
    Eigen::Index len = n;
    for (int l = 0; l < levels; ++l) {
        detail::analysis_step<Scalar>(h, work.data(), len, tmp.data(), out.data() + len / 2);
        work.head(len / 2) = tmp.head(len / 2);
        len /= 2;
    }
    out.head(len) = work.head(len);
    return out;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> idwt(const Eigen::MatrixBase<Derived>& coeffs, WaveletFamily family,
                                                                 int levels) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = coeffs.size();
    if (levels < 1 || n % (Eigen::Index{1} << levels) != 0) throw DomainError("coefficient length incompatible with depth");
    const auto h = scaling_filter(family);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> approx = coeffs.head(n >> levels), next;
    for (Eigen::Index len = n >> (levels - 1); len <= n; len *= 2) {
        next.resize(len);
        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> det = coeffs.segment(len / 2, len / 2);
        detail::synthesis_step<Scalar>(h, approx.data(), det.data(), len, next.data());
        approx = next;
    }
    return approx;
}

}  // namespace eegbench
