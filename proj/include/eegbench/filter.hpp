#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace eegbench {

// Direct-form-II-transposed biquad with a0 normalised to 1.
template <typename Scalar>
struct Biquad {
    Scalar b0, b1, b2, a1, a2;

    Scalar dc_gain() const { return (b0 + b1 + b2) / (Scalar(1) + a1 + a2); }
};

template <typename Scalar>
using SosFilter = std::vector<Biquad<Scalar>>;

enum class FilterType { LowPass, HighPass };

// Butterworth design by bilinear transform with frequency pre-warping, one biquad
// per conjugate pole pair. `order` must be even.
template <typename Scalar>
SosFilter<Scalar> butterworth(int order, Scalar cutoff_hz, Scalar fs, FilterType type) {
    using std::numbers::pi;
    SosFilter<Scalar> sos;
    const Scalar K = std::tan(Scalar(pi) * cutoff_hz / fs);
    const Scalar K2 = K * K;
    for (int k = 1; k <= order / 2; ++k) {
        const Scalar Q = Scalar(1) / (Scalar(2) * std::sin(Scalar(2 * k - 1) * Scalar(pi) / Scalar(2 * order)));
        const Scalar norm = Scalar(1) / (Scalar(1) + K / Q + K2);
        Biquad<Scalar> s{};
        if (type == FilterType::LowPass) {
            s.b0 = K2 * norm;
            s.b1 = Scalar(2) * s.b0;
            s.b2 = s.b0;
        } else {
            s.b0 = norm;
            s.b1 = Scalar(-2) * norm;
            s.b2 = norm;
        }
        s.a1 = Scalar(2) * (K2 - Scalar(1)) * norm;
        s.a2 = (Scalar(1) - K / Q + K2) * norm;
        sos.push_back(s);
    }
    return sos;
}

namespace detail {

// Steady-state section states for a unit step, scaled through the cascade.
template <typename Scalar>
std::vector<std::pair<Scalar, Scalar>> sos_step_state(const SosFilter<Scalar>& sos) {
    std::vector<std::pair<Scalar, Scalar>> zi;
    Scalar scale = Scalar(1);
    for (const auto& s : sos) {
        const Scalar y = s.dc_gain();
        zi.emplace_back(scale * (y - s.b0), scale * (s.b2 - s.a2 * y));
        scale *= y;
    }
    return zi;
}

template <typename Scalar>
void sos_run(const SosFilter<Scalar>& sos, std::vector<Scalar>& x, Scalar x0) {
    auto zi = sos_step_state(sos);
    for (std::size_t k = 0; k < sos.size(); ++k) {
        const auto& s = sos[k];
        Scalar z1 = zi[k].first * x0;
        Scalar z2 = zi[k].second * x0;
        for (auto& v : x) {
            const Scalar in = v;
            const Scalar out = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * out + z2;
            z2 = s.b2 * in - s.a2 * out;
            v = out;
        }
    }
}

}  // namespace detail

// Samples until the cascade's impulse response has shed all but 1e-12 of its energy.
template <typename Scalar>
Eigen::Index impulse_length(const SosFilter<Scalar>& sos, Eigen::Index cap = Eigen::Index{1} << 16) {
    std::vector<Scalar> h(static_cast<std::size_t>(cap), Scalar(0));
    h[0] = Scalar(1);
    for (const auto& s : sos) {
        Scalar z1 = 0, z2 = 0;
        for (auto& v : h) {
            const Scalar in = v;
            const Scalar out = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * out + z2;
            z2 = s.b2 * in - s.a2 * out;
            v = out;
        }
    }
    Scalar total = 0;
    for (auto v : h) total += v * v;
    Scalar tail = 0;
    for (Eigen::Index i = cap - 1; i > 0; --i) {
        tail += h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)];
        if (tail > Scalar(1e-12) * total) return i + 1;
    }
    return 1;
}

// Zero-phase forward-backward filtering with mirror padding (as long as
// the impulse response allows) and steady-state initial conditions at both ends.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> sosfiltfilt(
    const std::vector<Biquad<typename Derived::Scalar>>& sos, const Eigen::MatrixBase<Derived>& signal) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = signal.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
    if (n == 0) return out;
    if (n == 1 || sos.empty()) {
        out = signal;
        return out;
    }
    const Eigen::Index pad = std::min<Eigen::Index>(
        std::max<Eigen::Index>(3 * (2 * static_cast<Eigen::Index>(sos.size()) + 1), impulse_length(sos)), n - 1);
    std::vector<Scalar> ext(static_cast<std::size_t>(n + 2 * pad));
    for (Eigen::Index i = 0; i < pad; ++i) ext[i] = signal(pad - i);
    for (Eigen::Index i = 0; i < n; ++i) ext[pad + i] = signal(i);
    for (Eigen::Index i = 0; i < pad; ++i) ext[pad + n + i] = signal(n - 2 - i);

    detail::sos_run(sos, ext, ext.front());
    std::reverse(ext.begin(), ext.end());
    detail::sos_run(sos, ext, ext.front());
    std::reverse(ext.begin(), ext.end());
    for (Eigen::Index i = 0; i < n; ++i) out(i) = ext[pad + i];
    return out;
}

}  // namespace eegbench
