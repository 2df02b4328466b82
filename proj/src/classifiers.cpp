#include "eegbench/classifiers.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include "eegbench/errors.hpp"
#include "eegbench/rng.hpp"
#include "neural.hpp"

namespace eegbench {

namespace {

constexpr const char* kNames[] = {"Bayes",  "SVM",    "Percep", "MLP2TG", "MLP2PN", "MLP3TG",
                                  "MLP3PN", "RBF",    "ANFIS1", "ANFIS2", "ANFIS3", "N-F-CM"};

std::string lower(std::string_view s) {
    std::string out;
    for (char c : s)
        if (c != '-' && c != '_') out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::string_view to_string(ClassifierKind k) { return kNames[static_cast<int>(k)]; }

ClassifierKind classifier_from_string(std::string_view name) {
    const auto want = lower(name);
    for (auto k : kClassifierKinds)
        if (lower(to_string(k)) == want) return k;
    if (want == "perceptron") return ClassifierKind::Percep;
    throw DomainError("unknown classifier '" + std::string(name) + "'");
}

bool is_anfis(ClassifierKind k) {
    return k == ClassifierKind::ANFIS1 || k == ClassifierKind::ANFIS2 || k == ClassifierKind::ANFIS3;
}

void ClassifierSpec::validate() const {
    auto need = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ConfigError(std::string("hyperparams.") + field, what);
    };
    need(hp.bayes_ridge >= 0, "bayes_ridge", "must be non-negative");
    need(hp.svm_c > 0, "svm_c", "must be positive");
    need(hp.svm_tolerance > 0, "svm_tolerance", "must be positive");
    need(hp.svm_max_iterations > 0, "svm_max_iterations", "must be positive");
    need(hp.perceptron_epochs > 0, "perceptron_epochs", "must be positive");
    need(hp.perceptron_rate > 0, "perceptron_rate", "must be positive");
    need(hp.hidden > 0, "hidden", "must be positive");
    need(hp.epochs > 0, "epochs", "must be positive");
    need(hp.learning_rate > 0, "learning_rate", "must be positive");
    need(hp.momentum >= 0 && hp.momentum < 1, "momentum", "must lie in [0, 1)");
    need(hp.rbf_centers > 0, "rbf_centers", "must be positive");
    need(hp.anfis_epochs > 0, "anfis_epochs", "must be positive");
    need(hp.anfis_step > 0, "anfis_step", "must be positive");
    need(hp.anfis_max_inputs > 0 && hp.anfis_max_inputs <= 12, "anfis_max_inputs", "must lie in [1, 12]");
    need(hp.fcm_clusters > 0, "fcm_clusters", "must be positive");
    need(hp.fcm_fuzzifier > 1, "fcm_fuzzifier", "must exceed 1");
}

namespace {

void check_training_set(const Eigen::MatrixXd& X, const Labels& y) {
    if (static_cast<std::size_t>(X.rows()) != y.size()) throw StructuralError("train: labels do not match rows");
    if (X.cols() == 0) throw StructuralError("train: no features");
    if (!X.allFinite()) throw DomainError("train: non-finite feature values");
    bool has[2] = {false, false};
    for (int v : y) {
        if (v != 0 && v != 1) throw DomainError("train: labels must be 0 or 1");
        has[v] = true;
    }
    if (!has[0] || !has[1]) throw DomainError("train: both classes must be present");
}

Eigen::VectorXd signed_targets(const Labels& y) {
    Eigen::VectorXd t(static_cast<Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) t(static_cast<Index>(i)) = y[i] ? 1.0 : -1.0;
    return t;
}

BayesParams train_bayes(const Eigen::MatrixXd& X, const Labels& y, double ridge) {
    BayesParams p;
    const Index d = X.cols();
    for (int c = 0; c < 2; ++c) {
        std::vector<Index> rows;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == c) rows.push_back(static_cast<Index>(i));
        Eigen::MatrixXd xc(static_cast<Index>(rows.size()), d);
        for (std::size_t i = 0; i < rows.size(); ++i) xc.row(static_cast<Index>(i)) = X.row(rows[i]);
        p.mean[c] = xc.colwise().mean().transpose();
        const Eigen::MatrixXd centred = xc.rowwise() - p.mean[c].transpose();
        Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(rows.size());
        const double tr = cov.trace() / static_cast<double>(d);
        cov.diagonal().array() += ridge * (tr > 0 ? tr : 1.0);
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success) {
            cov.diagonal().array() += 1e-9 * (tr > 0 ? tr : 1.0);
            llt.compute(cov);
        }
        if (llt.info() != Eigen::Success) throw DomainError("Bayes: covariance is not positive definite");
        p.chol[c] = llt.matrixL();
        p.log_prior[c] = std::log(static_cast<double>(rows.size()) / static_cast<double>(y.size()));
    }
    return p;
}

Eigen::VectorXd bayes_scores(const BayesParams& p, const Eigen::MatrixXd& X) {
    Eigen::VectorXd lp[2];
    for (int c = 0; c < 2; ++c) {
        const Eigen::MatrixXd diff = (X.rowwise() - p.mean[c].transpose()).transpose();
        const Eigen::MatrixXd z = p.chol[c].triangularView<Eigen::Lower>().solve(diff);
        const double logdet = 2.0 * p.chol[c].diagonal().array().log().sum();
        lp[c] = (-0.5 * z.colwise().squaredNorm().array() - 0.5 * logdet + p.log_prior[c]).matrix().transpose();
    }
    return lp[1] - lp[0];
}

// Sequential minimal optimisation on the linear-kernel dual, with
// second-order working-set selection.
LinearParams train_svm(const Eigen::MatrixXd& X, const Labels& labels, const Hyperparams& hp,
                       std::vector<double>& trace) {
    const Index n = X.rows();
    const Eigen::VectorXd y = signed_targets(labels);
    const Eigen::MatrixXd K = X * X.transpose();
    const double C = hp.svm_c;
    constexpr double tau = 1e-12;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd G = Eigen::VectorXd::Constant(n, -1.0);

    auto up = [&](Index t) { return (y(t) > 0 && alpha(t) < C) || (y(t) < 0 && alpha(t) > 0); };
    auto low = [&](Index t) { return (y(t) > 0 && alpha(t) > 0) || (y(t) < 0 && alpha(t) < C); };

    int iter = 0;
    for (; iter < hp.svm_max_iterations; ++iter) {
        Index i = -1;
        double gmax = -std::numeric_limits<double>::infinity();
        for (Index t = 0; t < n; ++t)
            if (up(t) && -y(t) * G(t) > gmax) {
                gmax = -y(t) * G(t);
                i = t;
            }
        Index j = -1;
        double gmin = std::numeric_limits<double>::infinity();
        double best_obj = std::numeric_limits<double>::infinity();
        for (Index t = 0; t < n; ++t) {
            if (!low(t)) continue;
            gmin = std::min(gmin, -y(t) * G(t));
            if (i < 0) continue;
            const double b = gmax + y(t) * G(t);
            if (b <= 0) continue;
            double a = K(i, i) + K(t, t) - 2.0 * K(i, t);
            if (a <= 0) a = tau;
            const double obj = -(b * b) / a;
            if (obj < best_obj) {
                best_obj = obj;
                j = t;
            }
        }
        if (i < 0 || j < 0 || gmax - gmin < hp.svm_tolerance) break;

        const double ai = alpha(i), aj = alpha(j);
        const double qij = y(i) * y(j) * K(i, j);
        if (y(i) != y(j)) {
            double quad = K(i, i) + K(j, j) + 2.0 * qij;
            if (quad <= 0) quad = tau;
            const double delta = (-G(i) - G(j)) / quad;
            const double diff = ai - aj;
            alpha(i) += delta;
            alpha(j) += delta;
            if (diff > 0) {
                if (alpha(j) < 0) {
                    alpha(j) = 0;
                    alpha(i) = diff;
                }
            } else if (alpha(i) < 0) {
                alpha(i) = 0;
                alpha(j) = -diff;
            }
            if (diff > 0) {
                if (alpha(i) > C) {
                    alpha(i) = C;
                    alpha(j) = C - diff;
                }
            } else if (alpha(j) > C) {
                alpha(j) = C;
                alpha(i) = C + diff;
            }
        } else {
            double quad = K(i, i) + K(j, j) - 2.0 * qij;
            if (quad <= 0) quad = tau;
            const double delta = (G(i) - G(j)) / quad;
            const double sum = ai + aj;
            alpha(i) -= delta;
            alpha(j) += delta;
            if (sum > C) {
                if (alpha(i) > C) {
                    alpha(i) = C;
                    alpha(j) = sum - C;
                }
            } else if (alpha(j) < 0) {
                alpha(j) = 0;
                alpha(i) = sum;
            }
            if (sum > C) {
                if (alpha(j) > C) {
                    alpha(j) = C;
                    alpha(i) = sum - C;
                }
            } else if (alpha(i) < 0) {
                alpha(i) = 0;
                alpha(j) = sum;
            }
        }
        const double di = alpha(i) - ai, dj = alpha(j) - aj;
        G += (y.array() * K.col(i).array() * (y(i) * di) + y.array() * K.col(j).array() * (y(j) * dj)).matrix();
    }

    // rho from free vectors, else the midpoint of the feasible interval.
    double sum = 0, ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
    int free = 0;
    for (Index t = 0; t < n; ++t) {
        const double yg = y(t) * G(t);
        if (alpha(t) >= C) {
            if (y(t) < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (alpha(t) <= 0) {
            if (y(t) > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++free;
            sum += yg;
        }
    }
    const double rho = free > 0 ? sum / free : (ub + lb) / 2;
    LinearParams p;
    p.w = X.transpose() * (alpha.array() * y.array()).matrix();
    p.b = -rho;
    trace.push_back(0.5 * (alpha.array() * y.array()).matrix().dot(K * (alpha.array() * y.array()).matrix()) - alpha.sum());
    trace.push_back(static_cast<double>(iter));
    return p;
}

LinearParams train_perceptron(const Eigen::MatrixXd& X, const Labels& labels, const Hyperparams& hp, std::uint64_t seed,
                              std::vector<double>& trace) {
    const Index n = X.rows();
    const Eigen::VectorXd y = signed_targets(labels);
    Rng rng(seed);
    LinearParams cur{Eigen::VectorXd::Zero(X.cols()), 0.0};
    LinearParams best = cur;
    double best_acc = -1;
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    for (int e = 0; e < hp.perceptron_epochs; ++e) {
        rng.shuffle(order.begin(), order.end());
        for (Index i : order)
            if (y(i) * (X.row(i).dot(cur.w) + cur.b) <= 0) {
                cur.w += hp.perceptron_rate * y(i) * X.row(i).transpose();
                cur.b += hp.perceptron_rate * y(i);
            }
        const Eigen::VectorXd s = (X * cur.w).array() + cur.b;
        double hits = 0;
        for (Index i = 0; i < n; ++i) hits += (s(i) >= 0) == (y(i) > 0);
        const double acc = hits / static_cast<double>(n);
        trace.push_back(1.0 - acc);
        if (acc > best_acc) {
            best_acc = acc;
            best = cur;
        }
        if (acc == 1.0) break;
    }
    return best;
}

Eigen::MatrixXd rbf_design(const RbfParams& p, const Eigen::MatrixXd& X) {
    Eigen::MatrixXd phi(X.rows(), p.centers.rows() + 1);
    const double denom = 2.0 * p.width * p.width;
    for (Index j = 0; j < p.centers.rows(); ++j)
        phi.col(j) = (-(X.rowwise() - p.centers.row(j)).rowwise().squaredNorm().array() / denom).exp().matrix();
    phi.col(p.centers.rows()).setOnes();
    return phi;
}

RbfParams train_rbf(const Eigen::MatrixXd& X, const Labels& y, const Hyperparams& hp, std::uint64_t seed,
                    std::vector<double>& trace) {
    const int k = std::min<int>(hp.rbf_centers, static_cast<int>(X.rows()));
    const auto km = kmeans(X, k, seed);
    trace = km.objective;
    RbfParams p;
    p.centers = km.centers;
    double total = 0;
    int counted = 0;
    for (Index i = 0; i < p.centers.rows(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < p.centers.rows(); ++j)
            if (i != j) nearest = std::min(nearest, (p.centers.row(i) - p.centers.row(j)).norm());
        if (std::isfinite(nearest) && nearest > 0) {
            total += nearest;
            ++counted;
        }
    }
    p.width = counted > 0 ? total / counted : 1.0;
    const Eigen::MatrixXd phi = rbf_design(p, X);
    p.readout = phi.completeOrthogonalDecomposition().solve(signed_targets(y));
    return p;
}

void check_probe(const TrainedModel& m, const Eigen::MatrixXd& X) {
    if (X.cols() != m.meta.n_features)
        throw StructuralError("predict: expected " + std::to_string(m.meta.n_features) + " features, got " +
                              std::to_string(X.cols()));
}

}  // namespace

TrainedModel train(const ClassifierSpec& spec, const Eigen::MatrixXd& X, const Labels& y, std::uint64_t seed) {
    spec.validate();
    check_training_set(X, y);
    if (is_anfis(spec.kind) && X.cols() > spec.hp.anfis_max_inputs)
        throw DomainError("ANFIS supports at most " + std::to_string(spec.hp.anfis_max_inputs) + " inputs, got " +
                          std::to_string(X.cols()));
    TrainedModel m;
    m.spec = spec;
    m.meta.n_features = static_cast<int>(X.cols());
    const double ones = static_cast<double>(std::count(y.begin(), y.end(), 1));
    m.meta.priors = {1.0 - ones / static_cast<double>(y.size()), ones / static_cast<double>(y.size())};
    auto& trace = m.meta.loss_trace;
    const auto& hp = spec.hp;
    switch (spec.kind) {
        case ClassifierKind::Bayes: m.params = train_bayes(X, y, hp.bayes_ridge); break;
        case ClassifierKind::SVM: m.params = train_svm(X, y, hp, trace); break;
        case ClassifierKind::Percep: m.params = train_perceptron(X, y, hp, seed, trace); break;
        case ClassifierKind::MLP2TG: m.params = detail::train_mlp(X, y, 1, Activation::Tanh, hp, seed, trace); break;
        case ClassifierKind::MLP2PN: m.params = detail::train_mlp(X, y, 1, Activation::Identity, hp, seed, trace); break;
        case ClassifierKind::MLP3TG: m.params = detail::train_mlp(X, y, 2, Activation::Tanh, hp, seed, trace); break;
        case ClassifierKind::MLP3PN: m.params = detail::train_mlp(X, y, 2, Activation::Identity, hp, seed, trace); break;
        case ClassifierKind::RBF: m.params = train_rbf(X, y, hp, seed, trace); break;
        case ClassifierKind::ANFIS1: m.params = detail::train_anfis(X, y, MembershipShape::Gaussian, hp, trace); break;
        case ClassifierKind::ANFIS2: m.params = detail::train_anfis(X, y, MembershipShape::ProductSigmoid, hp, trace); break;
        case ClassifierKind::ANFIS3: m.params = detail::train_anfis(X, y, MembershipShape::Trapezoid, hp, trace); break;
        case ClassifierKind::NFCM: {
            NfcmParams p;
            const int c = std::min<int>(hp.fcm_clusters, static_cast<int>(X.rows()));
            const auto fcm = fuzzy_cmeans(X, c, hp.fcm_fuzzifier, derive_seed(seed, {1}));
            p.centers = fcm.centers;
            p.fuzzifier = hp.fcm_fuzzifier;
            Eigen::MatrixXd aug(X.rows(), X.cols() + c);
            aug << X, fcm.memberships;
            p.mlp = detail::train_mlp(aug, y, 1, Activation::Tanh, hp, derive_seed(seed, {2}), trace);
            m.params = std::move(p);
            break;
        }
    }
    return m;
}

Eigen::VectorXd decision_values(const TrainedModel& m, const Eigen::MatrixXd& X) {
    check_probe(m, X);
    return std::visit(
        [&](const auto& p) -> Eigen::VectorXd {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, BayesParams>) {
                return bayes_scores(p, X);
            } else if constexpr (std::is_same_v<T, LinearParams>) {
                return (X * p.w).array() + p.b;
            } else if constexpr (std::is_same_v<T, MlpParams>) {
                return detail::mlp_logits(p, X);
            } else if constexpr (std::is_same_v<T, RbfParams>) {
                return rbf_design(p, X) * p.readout;
            } else if constexpr (std::is_same_v<T, AnfisParams>) {
                return detail::anfis_output(p, X);
            } else {
                Eigen::MatrixXd aug(X.rows(), X.cols() + p.centers.rows());
                aug << X, fcm_memberships(X, p.centers, p.fuzzifier);
                return detail::mlp_logits(p.mlp, aug);
            }
        },
        m.params);
}

Labels predict(const TrainedModel& m, const Eigen::MatrixXd& X) {
    const Eigen::VectorXd s = decision_values(m, X);
    Labels out(static_cast<std::size_t>(s.size()));
    for (Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = s(i) >= 0 ? 1 : 0;
    return out;
}

KMeansResult kmeans(const Eigen::MatrixXd& X, int k, std::uint64_t seed, int max_iterations) {
    const Index n = X.rows();
    if (k < 1 || k > n) throw DomainError("kmeans: k must lie in [1, rows]");
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    Rng rng(seed);
    rng.shuffle(idx.begin(), idx.end());
    KMeansResult r;
    r.centers.resize(k, X.cols());
    for (int j = 0; j < k; ++j) r.centers.row(j) = X.row(idx[static_cast<std::size_t>(j)]);
    r.assignment.assign(static_cast<std::size_t>(n), -1);
    for (int it = 0; it < max_iterations; ++it) {
        bool changed = false;
        double objective = 0;
        for (Index i = 0; i < n; ++i) {
            int best = 0;
            double dist = std::numeric_limits<double>::infinity();
            for (int j = 0; j < k; ++j) {
                const double d = (X.row(i) - r.centers.row(j)).squaredNorm();
                if (d < dist) {
                    dist = d;
                    best = j;
                }
            }
            objective += dist;
            if (r.assignment[static_cast<std::size_t>(i)] != best) {
                r.assignment[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        r.objective.push_back(objective);
        if (!changed) break;
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, X.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Index i = 0; i < n; ++i) {
            sums.row(r.assignment[static_cast<std::size_t>(i)]) += X.row(i);
            ++counts[static_cast<std::size_t>(r.assignment[static_cast<std::size_t>(i)])];
        }
        for (int j = 0; j < k; ++j)
            if (counts[static_cast<std::size_t>(j)] > 0) r.centers.row(j) = sums.row(j) / counts[static_cast<std::size_t>(j)];
    }
    return r;
}

Eigen::MatrixXd fcm_memberships(const Eigen::MatrixXd& X, const Eigen::MatrixXd& centers, double m) {
    const Index n = X.rows(), c = centers.rows();
    Eigen::MatrixXd u(n, c);
    const double power = 2.0 / (m - 1.0);
    Eigen::VectorXd d(c);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < c; ++j) d(j) = (X.row(i) - centers.row(j)).norm();
        Index zero = -1;
        for (Index j = 0; j < c && zero < 0; ++j)
            if (d(j) <= 1e-12) zero = j;
        if (zero >= 0) {
            u.row(i).setZero();
            u(i, zero) = 1;
            continue;
        }
        for (Index j = 0; j < c; ++j) u(i, j) = 1.0 / (d(j) / d.array()).pow(power).sum();
    }
    return u;
}

FcmResult fuzzy_cmeans(const Eigen::MatrixXd& X, int clusters, double m, std::uint64_t seed, int max_iterations) {
    const Index n = X.rows();
    if (clusters < 1 || clusters > n) throw DomainError("fuzzy_cmeans: cluster count must lie in [1, rows]");
    if (!(m > 1)) throw DomainError("fuzzy_cmeans: fuzzifier must exceed 1");
    Rng rng(seed);
    FcmResult r;
    r.memberships.resize(n, clusters);
    for (Index i = 0; i < n; ++i) {
        for (int j = 0; j < clusters; ++j) r.memberships(i, j) = rng.uniform() + 1e-3;
        r.memberships.row(i) /= r.memberships.row(i).sum();
    }
    for (int it = 0; it < max_iterations; ++it) {
        const Eigen::MatrixXd um = r.memberships.array().pow(m);
        r.centers = (um.transpose() * X).array().colwise() / um.colwise().sum().transpose().array();
        Eigen::MatrixXd next = fcm_memberships(X, r.centers, m);
        const double change = (next - r.memberships).cwiseAbs().maxCoeff();
        r.memberships = std::move(next);
        if (change < 1e-9) break;
    }
    return r;
}

// ---- serialization ----

namespace {

using nlohmann::json;

json mat_json(const Eigen::MatrixXd& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Eigen::MatrixXd json_mat(const json& j) {
    const auto data = j.at("data").get<std::vector<double>>();
    const Index r = j.at("rows").get<Index>(), c = j.at("cols").get<Index>();
    if (static_cast<std::size_t>(r * c) != data.size()) throw MalformedInputError("model: matrix size mismatch");
    return Eigen::Map<const Eigen::MatrixXd>(data.data(), r, c);
}

json mlp_json(const MlpParams& p) {
    json layers = json::array();
    for (std::size_t l = 0; l < p.weights.size(); ++l) layers.push_back({{"W", mat_json(p.weights[l])}, {"b", mat_json(p.biases[l])}});
    return {{"hidden", p.hidden == Activation::Tanh ? "tanh" : "identity"}, {"layers", layers}};
}

MlpParams json_mlp(const json& j) {
    MlpParams p;
    p.hidden = j.at("hidden").get<std::string>() == "tanh" ? Activation::Tanh : Activation::Identity;
    for (const auto& l : j.at("layers")) {
        p.weights.push_back(json_mat(l.at("W")));
        p.biases.push_back(json_mat(l.at("b")));
    }
    return p;
}

constexpr const char* kShapeNames[] = {"gaussian", "psig", "trapezoid"};

}  // namespace

json to_json(const Hyperparams& hp) {
    return {{"bayes_ridge", hp.bayes_ridge},     {"svm_c", hp.svm_c},
            {"svm_tolerance", hp.svm_tolerance}, {"svm_max_iterations", hp.svm_max_iterations},
            {"perceptron_epochs", hp.perceptron_epochs}, {"perceptron_rate", hp.perceptron_rate},
            {"hidden", hp.hidden},               {"epochs", hp.epochs},
            {"learning_rate", hp.learning_rate}, {"momentum", hp.momentum},
            {"rbf_centers", hp.rbf_centers},     {"anfis_epochs", hp.anfis_epochs},
            {"anfis_step", hp.anfis_step},       {"anfis_max_inputs", hp.anfis_max_inputs},
            {"fcm_clusters", hp.fcm_clusters},   {"fcm_fuzzifier", hp.fcm_fuzzifier}};
}

Hyperparams hyperparams_from_json(const json& j, const Hyperparams& defaults) {
    Hyperparams hp = defaults;
    if (!j.is_object()) throw ConfigError("hyperparams", "expected an object");
    const json known = to_json(hp);
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw ConfigError("hyperparams." + key, "unknown hyperparameter");
        if (!value.is_number()) throw ConfigError("hyperparams." + key, "expected a number");
    }
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("bayes_ridge", hp.bayes_ridge);
    get("svm_c", hp.svm_c);
    get("svm_tolerance", hp.svm_tolerance);
    get("svm_max_iterations", hp.svm_max_iterations);
    get("perceptron_epochs", hp.perceptron_epochs);
    get("perceptron_rate", hp.perceptron_rate);
    get("hidden", hp.hidden);
    get("epochs", hp.epochs);
    get("learning_rate", hp.learning_rate);
    get("momentum", hp.momentum);
    get("rbf_centers", hp.rbf_centers);
    get("anfis_epochs", hp.anfis_epochs);
    get("anfis_step", hp.anfis_step);
    get("anfis_max_inputs", hp.anfis_max_inputs);
    get("fcm_clusters", hp.fcm_clusters);
    get("fcm_fuzzifier", hp.fcm_fuzzifier);
    return hp;
}

json to_json(const TrainedModel& m) {
    json params = std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, BayesParams>) {
                json j;
                for (int c = 0; c < 2; ++c)
                    j["class"].push_back({{"mean", mat_json(p.mean[c])}, {"chol", mat_json(p.chol[c])}, {"log_prior", p.log_prior[c]}});
                return j;
            } else if constexpr (std::is_same_v<T, LinearParams>) {
                return {{"w", mat_json(p.w)}, {"b", p.b}};
            } else if constexpr (std::is_same_v<T, MlpParams>) {
                return mlp_json(p);
            } else if constexpr (std::is_same_v<T, RbfParams>) {
                return {{"centers", mat_json(p.centers)}, {"width", p.width}, {"readout", mat_json(p.readout)}};
            } else if constexpr (std::is_same_v<T, AnfisParams>) {
                return {{"shape", kShapeNames[static_cast<int>(p.shape)]},
                        {"premise", mat_json(p.premise)},
                        {"consequents", mat_json(p.consequents)}};
            } else {
                return {{"centers", mat_json(p.centers)}, {"fuzzifier", p.fuzzifier}, {"mlp", mlp_json(p.mlp)}};
            }
        },
        m.params);
    return {{"format", "eegbench-model"},
            {"version", 1},
            {"spec", {{"kind", std::string(to_string(m.spec.kind))}, {"hyperparams", to_json(m.spec.hp)}}},
            {"meta", {{"n_features", m.meta.n_features}, {"priors", m.meta.priors}, {"loss_trace", m.meta.loss_trace}}},
            {"params", params}};
}

TrainedModel model_from_json(const json& j) {
    try {
        if (j.at("format") != "eegbench-model") throw MalformedInputError("not a model file");
        if (j.at("version") != 1) throw VersionError("unsupported model version " + j.at("version").dump());
        TrainedModel m;
        m.spec.kind = classifier_from_string(j.at("spec").at("kind").get<std::string>());
        m.spec.hp = hyperparams_from_json(j.at("spec").at("hyperparams"));
        m.meta.n_features = j.at("meta").at("n_features").get<int>();
        m.meta.priors = j.at("meta").at("priors").get<std::array<double, 2>>();
        m.meta.loss_trace = j.at("meta").at("loss_trace").get<std::vector<double>>();
        const json& p = j.at("params");
        switch (m.spec.kind) {
            case ClassifierKind::Bayes: {
                BayesParams b;
                for (int c = 0; c < 2; ++c) {
                    const json& cj = p.at("class").at(static_cast<std::size_t>(c));
                    b.mean[c] = json_mat(cj.at("mean"));
                    b.chol[c] = json_mat(cj.at("chol"));
                    b.log_prior[c] = cj.at("log_prior").get<double>();
                }
                m.params = std::move(b);
                break;
            }
            case ClassifierKind::SVM:
            case ClassifierKind::Percep: m.params = LinearParams{json_mat(p.at("w")), p.at("b").get<double>()}; break;
            case ClassifierKind::RBF:
                m.params = RbfParams{json_mat(p.at("centers")), p.at("width").get<double>(), json_mat(p.at("readout"))};
                break;
            case ClassifierKind::ANFIS1:
            case ClassifierKind::ANFIS2:
            case ClassifierKind::ANFIS3: {
                AnfisParams a;
                const auto shape = p.at("shape").get<std::string>();
                for (int s = 0; s < 3; ++s)
                    if (shape == kShapeNames[s]) a.shape = static_cast<MembershipShape>(s);
                a.premise = json_mat(p.at("premise"));
                a.consequents = json_mat(p.at("consequents"));
                m.params = std::move(a);
                break;
            }
            case ClassifierKind::NFCM:
                m.params = NfcmParams{json_mat(p.at("centers")), p.at("fuzzifier").get<double>(), json_mlp(p.at("mlp"))};
                break;
            default: m.params = json_mlp(p); break;
        }
        return m;
    } catch (const json::exception& e) {
        throw MalformedInputError(std::string("model: ") + e.what());
    }
}

}  // namespace eegbench
