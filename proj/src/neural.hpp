#pragma once

// Internal: trainers shared between classifiers.cpp and neural.cpp.

#include "eegbench/classifiers.hpp"

namespace eegbench::detail {

MlpParams init_mlp(int inputs, int hidden_layers, int width, Activation act, std::uint64_t seed);
// Mean cross-entropy of the sigmoid output; fills `grad` (same layout as params) when non-null.
double mlp_loss(const MlpParams& p, const Eigen::MatrixXd& X, const Eigen::VectorXd& t, MlpParams* grad);
Eigen::VectorXd mlp_logits(const MlpParams& p, const Eigen::MatrixXd& X);
MlpParams train_mlp(const Eigen::MatrixXd& X, const Labels& y, int hidden_layers, Activation act, const Hyperparams& hp,
                    std::uint64_t seed, std::vector<double>& trace);

AnfisParams init_anfis(const Eigen::MatrixXd& X, MembershipShape shape);
void anfis_fit_consequents(AnfisParams& p, const Eigen::MatrixXd& X, const Eigen::VectorXd& t);
Eigen::VectorXd anfis_output(const AnfisParams& p, const Eigen::MatrixXd& X);
// Half mean squared error; fills the premise gradient when non-null.
double anfis_loss(const AnfisParams& p, const Eigen::MatrixXd& X, const Eigen::VectorXd& t, Eigen::MatrixXd* grad);
AnfisParams train_anfis(const Eigen::MatrixXd& X, const Labels& y, MembershipShape shape, const Hyperparams& hp,
                        std::vector<double>& trace);

int premise_width(MembershipShape shape);

}  // namespace eegbench::detail
