#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <json.hpp>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eegbench/signal_io.hpp"

namespace eegbench {

enum class ClassifierKind { Bayes, SVM, Percep, MLP2TG, MLP2PN, MLP3TG, MLP3PN, RBF, ANFIS1, ANFIS2, ANFIS3, NFCM };

inline constexpr std::array<ClassifierKind, 12> kClassifierKinds{
    ClassifierKind::Bayes,  ClassifierKind::SVM,    ClassifierKind::Percep, ClassifierKind::MLP2TG,
    ClassifierKind::MLP2PN, ClassifierKind::MLP3TG, ClassifierKind::MLP3PN, ClassifierKind::RBF,
    ClassifierKind::ANFIS1, ClassifierKind::ANFIS2, ClassifierKind::ANFIS3, ClassifierKind::NFCM};

// Display names: "Bayes", "SVM", ..., "N-F-CM".
std::string_view to_string(ClassifierKind k);
// Case-insensitive; "NFCM" and "N-F-CM" both work.
ClassifierKind classifier_from_string(std::string_view name);
bool is_anfis(ClassifierKind k);

struct Hyperparams {
    double bayes_ridge = 1e-3;  // times tr(cov)/d
    double svm_c = 1.0;
    double svm_tolerance = 1e-6;
    int svm_max_iterations = 1000000;
    int perceptron_epochs = 200;
    double perceptron_rate = 1.0;
    int hidden = 10;
    int epochs = 500;
    double learning_rate = 0.01;
    double momentum = 0.9;
    int rbf_centers = 10;
    int anfis_epochs = 50;
    double anfis_step = 0.05;
    int anfis_max_inputs = 8;
    int fcm_clusters = 4;
    double fcm_fuzzifier = 2.0;

    bool operator==(const Hyperparams&) const = default;
};

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::Bayes;
    Hyperparams hp;

    // Throws ConfigError naming the offending hyperparameter.
    void validate() const;
    bool operator==(const ClassifierSpec&) const = default;
};

struct BayesParams {
    std::array<Eigen::VectorXd, 2> mean;
    std::array<Eigen::MatrixXd, 2> chol;  // lower Cholesky factor of the regularised covariance
    std::array<double, 2> log_prior{};
};

// SVM and perceptron.
struct LinearParams {
    Eigen::VectorXd w;
    double b = 0;
};

enum class Activation { Tanh, Identity };

struct MlpParams {
    Activation hidden = Activation::Tanh;
    std::vector<Eigen::MatrixXd> weights;  // layer l maps size(l) -> size(l+1), stored out x in
    std::vector<Eigen::VectorXd> biases;
};

struct RbfParams {
    Eigen::MatrixXd centers;  // center x feature
    double width = 1;
    Eigen::VectorXd readout;  // one weight per center, then the bias
};

enum class MembershipShape { Gaussian, ProductSigmoid, Trapezoid };

struct AnfisParams {
    MembershipShape shape = MembershipShape::Gaussian;
    // premise(i, j*P + p): parameter p of membership function j on input i.
    Eigen::MatrixXd premise;
    // consequents(r, :) = [p_1 .. p_d, q] for rule r; bit i of r selects the MF on input i.
    Eigen::MatrixXd consequents;
};

struct NfcmParams {
    Eigen::MatrixXd centers;  // cluster x feature
    double fuzzifier = 2;
    MlpParams mlp;
};

using ParameterBlock = std::variant<BayesParams, LinearParams, MlpParams, RbfParams, AnfisParams, NfcmParams>;

struct TrainMeta {
    int n_features = 0;
    std::array<double, 2> priors{};
    std::vector<double> loss_trace;
};

struct TrainedModel {
    ClassifierSpec spec;
    ParameterBlock params;
    TrainMeta meta;
};

// X is trial x feature; labels are 0/1.
TrainedModel train(const ClassifierSpec& spec, const Eigen::MatrixXd& X, const Labels& y, std::uint64_t seed);

// Positive scores favour class 1. Predicted label is 1 when the score is >= 0.
Eigen::VectorXd decision_values(const TrainedModel& model, const Eigen::MatrixXd& X);
Labels predict(const TrainedModel& model, const Eigen::MatrixXd& X);

nlohmann::json to_json(const Hyperparams& hp);
Hyperparams hyperparams_from_json(const nlohmann::json& j, const Hyperparams& defaults = {});
nlohmann::json to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

// Max relative error between analytic and central-difference (h = 1e-5)
// gradients of the training loss at the seeded initial parameters. MLP kinds
// check every weight; ANFIS kinds check the premise parameters.
double mlp_gradient_check(const ClassifierSpec& spec, const Eigen::MatrixXd& X, const Labels& y, std::uint64_t seed);

// Building blocks exposed for testing.
struct KMeansResult {
    Eigen::MatrixXd centers;
    std::vector<int> assignment;
    std::vector<double> objective;  // after each iteration
};
KMeansResult kmeans(const Eigen::MatrixXd& X, int k, std::uint64_t seed, int max_iterations = 100);

struct FcmResult {
    Eigen::MatrixXd centers;
    Eigen::MatrixXd memberships;  // sample x cluster
};
FcmResult fuzzy_cmeans(const Eigen::MatrixXd& X, int clusters, double m, std::uint64_t seed, int max_iterations = 300);
Eigen::MatrixXd fcm_memberships(const Eigen::MatrixXd& X, const Eigen::MatrixXd& centers, double m);

// Normalised rule firing strengths (sample x rule) of a trained or initial ANFIS.
Eigen::MatrixXd anfis_normalized_firing(const AnfisParams& p, const Eigen::MatrixXd& X);

}  // namespace eegbench
