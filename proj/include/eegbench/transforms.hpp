#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace eegbench {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Orthonormal DCT-II, first `k` coefficients.
template <typename Derived>
Vector<typename Derived::Scalar> dct2(const Eigen::MatrixBase<Derived>& x, Eigen::Index k) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = x.size();
    Vector<Scalar> out(k);
    const Scalar s0 = std::sqrt(Scalar(1) / Scalar(n));
    const Scalar sk = std::sqrt(Scalar(2) / Scalar(n));
    for (Eigen::Index j = 0; j < k; ++j) {
        Scalar acc = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            acc += x(i) * std::cos(Scalar(std::numbers::pi) * Scalar(j) * Scalar(2 * i + 1) / Scalar(2 * n));
        out(j) = (j == 0 ? s0 : sk) * acc;
    }
    return out;
}

// Inverse of the full orthonormal DCT-II (a DCT-III).
template <typename Derived>
Vector<typename Derived::Scalar> idct2(const Eigen::MatrixBase<Derived>& c) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = c.size();
    Vector<Scalar> out(n);
    const Scalar s0 = std::sqrt(Scalar(1) / Scalar(n));
    const Scalar sk = std::sqrt(Scalar(2) / Scalar(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        Scalar acc = s0 * c(0);
        for (Eigen::Index j = 1; j < n; ++j)
            acc += sk * c(j) * std::cos(Scalar(std::numbers::pi) * Scalar(j) * Scalar(2 * i + 1) / Scalar(2 * n));
        out(i) = acc;
    }
    return out;
}

// Orthonormal DST-I, first `k` coefficients. The full transform is its own inverse.
template <typename Derived>
Vector<typename Derived::Scalar> dst1(const Eigen::MatrixBase<Derived>& x, Eigen::Index k) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = x.size();
    Vector<Scalar> out(k);
    const Scalar s = std::sqrt(Scalar(2) / Scalar(n + 1));
    for (Eigen::Index j = 0; j < k; ++j) {
        Scalar acc = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            acc += x(i) * std::sin(Scalar(std::numbers::pi) * Scalar(i + 1) * Scalar(j + 1) / Scalar(n + 1));
        out(j) = s * acc;
    }
    return out;
}

// One-sided energy spectrum: entry f holds the energy at frequency f*fs/N
// (f = 0..N/2), negative frequencies folded in, so the entries sum to sum(x^2).
template <typename Derived>
Vector<typename Derived::Scalar> energy_spectrum(const Eigen::MatrixBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = x.size();
    std::vector<Scalar> in(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = x(i);
    std::vector<std::complex<Scalar>> spec;
    Eigen::FFT<Scalar> fft;
    fft.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);
    fft.fwd(spec, in);
    const Eigen::Index half = n / 2;
    Vector<Scalar> e(half + 1);
    for (Eigen::Index f = 0; f <= half; ++f) {
        const Scalar p = std::norm(spec[static_cast<std::size_t>(f)]) / Scalar(n);
        const bool unpaired = f == 0 || (n % 2 == 0 && f == half);
        e(f) = unpaired ? p : Scalar(2) * p;
    }
    return e;
}

}  // namespace eegbench
