#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

namespace eegbench {

// All estimators below are plug-in (divide by N), over the columns of a series.

template <typename Derived>
typename Derived::Scalar central_moment(const Eigen::MatrixBase<Derived>& x, int order) {
    using Scalar = typename Derived::Scalar;
    if (order == 1) return Scalar(0);
    const Scalar mu = x.mean();
    return (x.array() - mu).pow(order).mean();
}

// E[(x-mx)^p (y-my)^q]
template <typename DX, typename DY>
typename DX::Scalar joint_central_moment(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y, int p, int q) {
    const auto xc = (x.array() - x.mean()).pow(p);
    const auto yc = (y.array() - y.mean()).pow(q);
    return (xc * yc).mean();
}

// Joint cumulant of 2 to 4 already-centred series (rows of `centred`) selected
// by `rows`, which may repeat: cum(x_i, x_i, x_j) is rows {i, i, j}.
template <typename Derived>
typename Derived::Scalar joint_cumulant(const Eigen::MatrixBase<Derived>& centred, std::span<const int> rows) {
    using Scalar = typename Derived::Scalar;
    auto m2 = [&](int a, int b) { return (centred.row(a).array() * centred.row(b).array()).mean(); };
    switch (rows.size()) {
        case 1:
            return Scalar(0);
        case 2:
            return m2(rows[0], rows[1]);
        case 3:
            return (centred.row(rows[0]).array() * centred.row(rows[1]).array() * centred.row(rows[2]).array()).mean();
        case 4: {
            const int a = rows[0], b = rows[1], c = rows[2], d = rows[3];
            const Scalar m4 =
                (centred.row(a).array() * centred.row(b).array() * centred.row(c).array() * centred.row(d).array()).mean();
            return m4 - m2(a, b) * m2(c, d) - m2(a, c) * m2(b, d) - m2(a, d) * m2(b, c);
        }
        default:
            throw std::invalid_argument("joint cumulants are implemented for orders 1 to 4");
    }
}

// Pearson correlation; 0 with `degenerate` set when either series is constant.
template <typename DX, typename DY>
typename DX::Scalar correlation(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y, bool& degenerate) {
    using Scalar = typename DX::Scalar;
    const auto xc = (x.array() - x.mean());
    const auto yc = (y.array() - y.mean());
    const Scalar sxx = xc.square().sum();
    const Scalar syy = yc.square().sum();
    const Scalar n = Scalar(x.size());
    const Scalar tx = n * std::pow(Scalar(1e-12) * x.cwiseAbs().maxCoeff(), 2);
    const Scalar ty = n * std::pow(Scalar(1e-12) * y.cwiseAbs().maxCoeff(), 2);
    degenerate = !(sxx > tx) || !(syy > ty) || !(sxx > Scalar(0)) || !(syy > Scalar(0));
    if (degenerate) return Scalar(0);
    const Scalar r = (xc * yc).sum() / std::sqrt(sxx * syy);
    return std::clamp(r, Scalar(-1), Scalar(1));
}

// (sd(x'') / sd(x')) / (sd(x') / sd(x)), derivatives by first differences.
template <typename Derived>
typename Derived::Scalar form_factor(const Eigen::MatrixBase<Derived>& x, bool& degenerate) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = x.size();
    degenerate = true;
    if (n < 3) return Scalar(0);
    const auto d1 = (x.tail(n - 1) - x.head(n - 1)).eval();
    const auto d2 = (d1.tail(n - 2) - d1.head(n - 2)).eval();
    auto sd = [](const auto& v) { return std::sqrt((v.array() - v.mean()).square().mean()); };
    const Scalar s0 = sd(x), s1 = sd(d1), s2 = sd(d2);
    const Scalar floor = Scalar(1e-12) * x.cwiseAbs().maxCoeff();
    if (!(s0 > floor) || !(s1 > floor) || !(s1 > Scalar(0))) return Scalar(0);
    degenerate = false;
    return (s2 / s1) / (s1 / s0);
}

}  // namespace eegbench
