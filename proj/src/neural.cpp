#include "neural.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "eegbench/errors.hpp"
#include "eegbench/rng.hpp"

namespace eegbench::detail {

// ---- multilayer perceptron ----

MlpParams init_mlp(int inputs, int hidden_layers, int width, Activation act, std::uint64_t seed) {
    Rng rng(seed);
    MlpParams p;
    p.hidden = act;
    std::vector<int> sizes{inputs};
    for (int l = 0; l < hidden_layers; ++l) sizes.push_back(width);
    sizes.push_back(1);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const double limit = std::sqrt(6.0 / (sizes[l] + sizes[l + 1]));
        Eigen::MatrixXd w(sizes[l + 1], sizes[l]);
        for (Index c = 0; c < w.cols(); ++c)
            for (Index r = 0; r < w.rows(); ++r) w(r, c) = rng.uniform(-limit, limit);
        p.weights.push_back(std::move(w));
        p.biases.push_back(Eigen::VectorXd::Zero(sizes[l + 1]));
    }
    return p;
}

namespace {

// Activations per layer, inputs first; the last entry holds the output logits.
std::vector<Eigen::MatrixXd> forward(const MlpParams& p, const Eigen::MatrixXd& X) {
    std::vector<Eigen::MatrixXd> a{X.transpose()};
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        Eigen::MatrixXd z = (p.weights[l] * a.back()).colwise() + p.biases[l];
        if (l + 1 < p.weights.size() && p.hidden == Activation::Tanh) z = z.array().tanh();
        a.push_back(std::move(z));
    }
    return a;
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

Eigen::VectorXd mlp_logits(const MlpParams& p, const Eigen::MatrixXd& X) { return forward(p, X).back().row(0).transpose(); }

double mlp_loss(const MlpParams& p, const Eigen::MatrixXd& X, const Eigen::VectorXd& t, MlpParams* grad) {
    const auto a = forward(p, X);
    const Eigen::RowVectorXd z = a.back().row(0);
    const auto n = static_cast<double>(X.rows());
    double loss = 0;
    for (Index i = 0; i < z.size(); ++i) loss += softplus(z(i)) - t(i) * z(i);
    loss /= n;
    if (!grad) return loss;

    grad->hidden = p.hidden;
    grad->weights.resize(p.weights.size());
    grad->biases.resize(p.biases.size());
    Eigen::MatrixXd delta(1, z.size());
    for (Index i = 0; i < z.size(); ++i) delta(0, i) = (sigmoid(z(i)) - t(i)) / n;
    for (std::size_t l = p.weights.size(); l-- > 0;) {
        grad->weights[l] = delta * a[l].transpose();
        grad->biases[l] = delta.rowwise().sum();
        if (l == 0) break;
        Eigen::MatrixXd back = p.weights[l].transpose() * delta;
        if (p.hidden == Activation::Tanh) back.array() *= 1.0 - a[l].array().square();
        delta = std::move(back);
    }
    return loss;
}

MlpParams train_mlp(const Eigen::MatrixXd& X, const Labels& y, int hidden_layers, Activation act, const Hyperparams& hp,
                    std::uint64_t seed, std::vector<double>& trace) {
    MlpParams p = init_mlp(static_cast<int>(X.cols()), hidden_layers, hp.hidden, act, seed);
    Eigen::VectorXd t(X.rows());
    for (Index i = 0; i < X.rows(); ++i) t(i) = y[static_cast<std::size_t>(i)];
    MlpParams velocity = p, g;
    for (auto& w : velocity.weights) w.setZero();
    for (auto& b : velocity.biases) b.setZero();
    for (int e = 0; e < hp.epochs; ++e) {
        trace.push_back(mlp_loss(p, X, t, &g));
        for (std::size_t l = 0; l < p.weights.size(); ++l) {
            velocity.weights[l] = hp.momentum * velocity.weights[l] - hp.learning_rate * g.weights[l];
            velocity.biases[l] = hp.momentum * velocity.biases[l] - hp.learning_rate * g.biases[l];
            p.weights[l] += velocity.weights[l];
            p.biases[l] += velocity.biases[l];
        }
    }
    trace.push_back(mlp_loss(p, X, t, nullptr));
    return p;
}

// ---- ANFIS ----

int premise_width(MembershipShape shape) { return shape == MembershipShape::Gaussian ? 2 : 4; }

namespace {

double logistic(double z) { return sigmoid(z); }

// Membership value; writes d(mu)/d(param) into `g` when non-null.
double membership(MembershipShape shape, const double* q, double x, double* g) {
    switch (shape) {
        case MembershipShape::Gaussian: {
            const double c = q[0], s = q[1];
            const double u = (x - c) / s;
            const double mu = std::exp(-0.5 * u * u);
            if (g) {
                g[0] = mu * u / s;
                g[1] = mu * u * u / s;
            }
            return mu;
        }
        case MembershipShape::ProductSigmoid: {
            const double a1 = q[0], c1 = q[1], a2 = q[2], c2 = q[3];
            const double s1 = logistic(a1 * (x - c1)), s2 = logistic(-a2 * (x - c2));
            if (g) {
                const double d1 = s1 * (1 - s1), d2 = s2 * (1 - s2);
                g[0] = s2 * d1 * (x - c1);
                g[1] = -s2 * d1 * a1;
                g[2] = -s1 * d2 * (x - c2);
                g[3] = s1 * d2 * a2;
            }
            return s1 * s2;
        }
        case MembershipShape::Trapezoid: {
            const double a = q[0], b = q[1], c = q[2], d = q[3];
            if (g) std::fill(g, g + 4, 0.0);
            if (x <= a || x >= d) return 0.0;
            if (x < b) {
                if (g) {
                    g[0] = (x - b) / ((b - a) * (b - a));
                    g[1] = -(x - a) / ((b - a) * (b - a));
                }
                return (x - a) / (b - a);
            }
            if (x <= c) return 1.0;
            if (g) {
                g[2] = (d - x) / ((d - c) * (d - c));
                g[3] = (x - c) / ((d - c) * (d - c));
            }
            return (d - x) / (d - c);
        }
    }
    return 0.0;
}

void constrain(AnfisParams& p) {
    const int P = premise_width(p.shape);
    for (Index i = 0; i < p.premise.rows(); ++i)
        for (int j = 0; j < 2; ++j) {
            auto at = [&](int k) -> double& { return p.premise(i, j * P + k); };
            switch (p.shape) {
                case MembershipShape::Gaussian: at(1) = std::max(std::abs(at(1)), 1e-3); break;
                case MembershipShape::ProductSigmoid:
                    at(0) = std::max(at(0), 1e-3);
                    at(2) = std::max(at(2), 1e-3);
                    break;
                case MembershipShape::Trapezoid: {
                    double v[4] = {at(0), at(1), at(2), at(3)};
                    std::sort(v, v + 4);
                    v[1] = std::max(v[1], v[0] + 1e-6);
                    v[2] = std::max(v[2], v[1]);
                    v[3] = std::max(v[3], v[2] + 1e-6);
                    for (int k = 0; k < 4; ++k) at(k) = v[k];
                    break;
                }
            }
        }
}

struct Firing {
    Eigen::MatrixXd mu;      // input x 2
    Eigen::VectorXd w;       // raw rule strengths
    double total = 0;
};

Firing fire(const AnfisParams& p, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
    const Index d = x.size();
    const int P = premise_width(p.shape);
    const Index rules = Index{1} << d;
    Firing f;
    f.mu.resize(d, 2);
    double q[4];
    for (Index i = 0; i < d; ++i)
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < P; ++k) q[k] = p.premise(i, j * P + k);
            f.mu(i, j) = membership(p.shape, q, x(i), nullptr);
        }
    f.w.resize(rules);
    for (Index r = 0; r < rules; ++r) {
        double v = 1;
        for (Index i = 0; i < d; ++i) v *= f.mu(i, (r >> i) & 1);
        f.w(r) = v;
    }
    f.total = f.w.sum();
    return f;
}

constexpr double kMinFiring = 1e-300;

}  // namespace

AnfisParams init_anfis(const Eigen::MatrixXd& X, MembershipShape shape) {
    const Index d = X.cols();
    const int P = premise_width(shape);
    AnfisParams p;
    p.shape = shape;
    p.premise.resize(d, 2 * P);
    for (Index i = 0; i < d; ++i) {
        const double lo = X.col(i).minCoeff(), hi = X.col(i).maxCoeff();
        const double r = std::max(hi - lo, 1e-6), mid = 0.5 * (lo + hi);
        switch (shape) {
            case MembershipShape::Gaussian:
                p.premise.row(i) << lo, r / 2, hi, r / 2;
                break;
            case MembershipShape::ProductSigmoid:
                p.premise.row(i) << 8 / r, lo - r, 8 / r, mid, 8 / r, mid, 8 / r, hi + r;
                break;
            case MembershipShape::Trapezoid:
                p.premise.row(i) << lo - 3 * r, lo - 2 * r, lo + r / 4, hi - r / 4, lo + r / 4, hi - r / 4, hi + 2 * r, hi + 3 * r;
                break;
        }
    }
    p.consequents = Eigen::MatrixXd::Zero(Index{1} << d, d + 1);
    return p;
}

Eigen::MatrixXd anfis_normalized_firing_impl(const AnfisParams& p, const Eigen::MatrixXd& X) {
    const Index rules = Index{1} << X.cols();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(X.rows(), rules);
    for (Index n = 0; n < X.rows(); ++n) {
        const Firing f = fire(p, X.row(n));
        if (f.total > kMinFiring) out.row(n) = f.w.transpose() / f.total;
    }
    return out;
}

void anfis_fit_consequents(AnfisParams& p, const Eigen::MatrixXd& X, const Eigen::VectorXd& t) {
    const Index d = X.cols(), rules = Index{1} << d, width = rules * (d + 1);
    const Eigen::MatrixXd wbar = anfis_normalized_firing_impl(p, X);
    Eigen::MatrixXd A(X.rows(), width);
    for (Index n = 0; n < X.rows(); ++n)
        for (Index r = 0; r < rules; ++r) {
            A.block(n, r * (d + 1), 1, d) = wbar(n, r) * X.row(n);
            A(n, r * (d + 1) + d) = wbar(n, r);
        }
    Eigen::MatrixXd normal = A.transpose() * A;
    const double ridge = 1e-8 * std::max(normal.trace() / static_cast<double>(width), 1e-12);
    normal.diagonal().array() += ridge;
    const Eigen::VectorXd theta = normal.ldlt().solve(A.transpose() * t);
    for (Index r = 0; r < rules; ++r) p.consequents.row(r) = theta.segment(r * (d + 1), d + 1).transpose();
}

Eigen::VectorXd anfis_output(const AnfisParams& p, const Eigen::MatrixXd& X) {
    const Index d = X.cols();
    Eigen::VectorXd out(X.rows());
    for (Index n = 0; n < X.rows(); ++n) {
        const Firing f = fire(p, X.row(n));
        if (f.total <= kMinFiring) {
            out(n) = 0;
            continue;
        }
        const Eigen::VectorXd rule_out = p.consequents.leftCols(d) * X.row(n).transpose() + p.consequents.col(d);
        out(n) = f.w.dot(rule_out) / f.total;
    }
    return out;
}

double anfis_loss(const AnfisParams& p, const Eigen::MatrixXd& X, const Eigen::VectorXd& t, Eigen::MatrixXd* grad) {
    const Index d = X.cols(), rules = Index{1} << d;
    const int P = premise_width(p.shape);
    const auto n = static_cast<double>(X.rows());
    if (grad) *grad = Eigen::MatrixXd::Zero(p.premise.rows(), p.premise.cols());
    double loss = 0;
    double q[4], g[4];
    for (Index s = 0; s < X.rows(); ++s) {
        const Firing f = fire(p, X.row(s));
        const Eigen::VectorXd rule_out = p.consequents.leftCols(d) * X.row(s).transpose() + p.consequents.col(d);
        const double out = f.total > kMinFiring ? f.w.dot(rule_out) / f.total : 0.0;
        const double e = out - t(s);
        loss += 0.5 * e * e / n;
        if (!grad || f.total <= kMinFiring) continue;
        for (Index i = 0; i < d; ++i) {
            double dmu[2] = {0, 0};
            for (Index r = 0; r < rules; ++r) {
                double others = 1;
                for (Index k = 0; k < d; ++k)
                    if (k != i) others *= f.mu(k, (r >> k) & 1);
                dmu[(r >> i) & 1] += (rule_out(r) - out) / f.total * others;
            }
            for (int j = 0; j < 2; ++j) {
                for (int k = 0; k < P; ++k) q[k] = p.premise(i, j * P + k);
                membership(p.shape, q, X(s, i), g);
                for (int k = 0; k < P; ++k) (*grad)(i, j * P + k) += e / n * dmu[j] * g[k];
            }
        }
    }
    return loss;
}

AnfisParams train_anfis(const Eigen::MatrixXd& X, const Labels& y, MembershipShape shape, const Hyperparams& hp,
                        std::vector<double>& trace) {
    Eigen::VectorXd t(X.rows());
    for (Index i = 0; i < X.rows(); ++i) t(i) = y[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
    AnfisParams p = init_anfis(X, shape);
    AnfisParams best = p;
    double best_loss = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd g;
    for (int e = 0; e <= hp.anfis_epochs; ++e) {
        anfis_fit_consequents(p, X, t);
        const double loss = anfis_loss(p, X, t, e < hp.anfis_epochs ? &g : nullptr);
        trace.push_back(std::sqrt(2 * loss));
        if (loss < best_loss) {
            best_loss = loss;
            best = p;
        }
        if (e == hp.anfis_epochs) break;
        const double norm = g.norm();
        if (!(norm > 0) || !std::isfinite(norm)) break;
        p.premise -= hp.anfis_step * g / norm;
        constrain(p);
    }
    return best;
}

}  // namespace eegbench::detail

namespace eegbench {

Eigen::MatrixXd anfis_normalized_firing(const AnfisParams& p, const Eigen::MatrixXd& X) {
    return detail::anfis_normalized_firing_impl(p, X);
}

namespace {

double relative_error(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

}  // namespace

double mlp_gradient_check(const ClassifierSpec& spec, const Eigen::MatrixXd& X, const Labels& y, std::uint64_t seed) {
    constexpr double h = 1e-5;
    double worst = 0;
    if (is_anfis(spec.kind)) {
        const auto shape = spec.kind == ClassifierKind::ANFIS1   ? MembershipShape::Gaussian
                           : spec.kind == ClassifierKind::ANFIS2 ? MembershipShape::ProductSigmoid
                                                                 : MembershipShape::Trapezoid;
        Eigen::VectorXd t(X.rows());
        for (Index i = 0; i < X.rows(); ++i) t(i) = y[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
        AnfisParams p = detail::init_anfis(X, shape);
        detail::anfis_fit_consequents(p, X, t);
        Eigen::MatrixXd g;
        detail::anfis_loss(p, X, t, &g);
        for (Index k = 0; k < p.premise.size(); ++k) {
            AnfisParams plus = p, minus = p;
            plus.premise.data()[k] += h;
            minus.premise.data()[k] -= h;
            const double fd = (detail::anfis_loss(plus, X, t, nullptr) - detail::anfis_loss(minus, X, t, nullptr)) / (2 * h);
            worst = std::max(worst, relative_error(g.data()[k], fd));
        }
        return worst;
    }

    int layers = 1;
    Activation act = Activation::Tanh;
    switch (spec.kind) {
        case ClassifierKind::MLP2TG:
        case ClassifierKind::NFCM: break;
        case ClassifierKind::MLP2PN: act = Activation::Identity; break;
        case ClassifierKind::MLP3TG: layers = 2; break;
        case ClassifierKind::MLP3PN:
            layers = 2;
            act = Activation::Identity;
            break;
        default: throw DomainError("gradient check applies to MLP and ANFIS kinds only");
    }
    Eigen::VectorXd t(X.rows());
    for (Index i = 0; i < X.rows(); ++i) t(i) = y[static_cast<std::size_t>(i)];
    const MlpParams p = detail::init_mlp(static_cast<int>(X.cols()), layers, spec.hp.hidden, act, seed);
    MlpParams g;
    detail::mlp_loss(p, X, t, &g);
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        for (int which = 0; which < 2; ++which) {
            const Index count = which == 0 ? p.weights[l].size() : p.biases[l].size();
            for (Index k = 0; k < count; ++k) {
                MlpParams plus = p, minus = p;
                (which == 0 ? plus.weights[l].data() : plus.biases[l].data())[k] += h;
                (which == 0 ? minus.weights[l].data() : minus.biases[l].data())[k] -= h;
                const double fd = (detail::mlp_loss(plus, X, t, nullptr) - detail::mlp_loss(minus, X, t, nullptr)) / (2 * h);
                const double an = (which == 0 ? g.weights[l].data() : g.biases[l].data())[k];
                worst = std::max(worst, relative_error(an, fd));
            }
        }
    }
    return worst;
}

}  // namespace eegbench
