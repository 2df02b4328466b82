#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "eegbench/errors.hpp"

namespace eegbench {

// Burg estimate of phi in x_t = sum_k phi_k x_{t-k} + e_t, on the demeaned series.
// Reflection coefficients are kept strictly inside (-1, 1), so the fitted
// model is always stable. Sets `degenerate` and returns zeros for a constant series.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> burg(const Eigen::MatrixBase<Derived>& series, int order,
                                                                bool& degenerate) {
    using Scalar = typename Derived::Scalar;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = series.size();
    if (order < 1) throw DomainError("AR order must be positive");
    if (n <= 2 * order) throw DomainError("AR fit needs more than 2*order samples");

    Vec f = series.array() - series.mean();
    Vec b = f;
    Vec a = Vec::Zero(order + 1);
    a(0) = 1;
    degenerate = false;

    Scalar den = Scalar(2) * f.squaredNorm() - f(0) * f(0) - b(n - 1) * b(n - 1);
    const Scalar floor = std::numeric_limits<Scalar>::epsilon() * f.squaredNorm();
    if (!(f.squaredNorm() > Scalar(0)) || !(den > floor)) {
        degenerate = true;
        return Vec::Zero(order);
    }
    // Residual power below this fraction of the signal power is rounding noise; fitting it
    // only pushes poles onto the unit circle.
    const Scalar noise_floor = Scalar(1e-12) * den;
    const Scalar kmax = Scalar(1) - Scalar(1e-6);
    for (int k = 0; k < order; ++k) {
        if (k > 0) {
            den = 0;
            for (Eigen::Index i = 0; i < n - k - 1; ++i) den += f(i + k + 1) * f(i + k + 1) + b(i) * b(i);
        }
        if (!(den > floor) || !(den > noise_floor)) break;
        Scalar mu = 0;
        for (Eigen::Index i = 0; i < n - k - 1; ++i) mu += f(i + k + 1) * b(i);
        mu = std::clamp(Scalar(-2) * mu / den, -kmax, kmax);
        for (int i = 0; i <= (k + 1) / 2; ++i) {
            const Scalar t1 = a(i) + mu * a(k + 1 - i);
            const Scalar t2 = a(k + 1 - i) + mu * a(i);
            a(i) = t1;
            a(k + 1 - i) = t2;
        }
        for (Eigen::Index i = 0; i < n - k - 1; ++i) {
            const Scalar t1 = f(i + k + 1) + mu * b(i);
            const Scalar t2 = b(i) + mu * f(i + k + 1);
            f(i + k + 1) = t1;
            b(i) = t2;
        }
    }
    return -a.tail(order);
}

}  // namespace eegbench
