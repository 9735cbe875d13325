#pragma once

#include <Eigen/Dense>

namespace sca::metrics {

/// (1/sqrt(2m)) |W_hat^T W_hat - W_star^T W_star|_F, in [0, 1].
/// Both arguments must have orthonormal rows (checked to 1e-6) and equal shape.
double frobenius_subspace_error(const Eigen::Ref<const Eigen::MatrixXd>& w_hat,
                                const Eigen::Ref<const Eigen::MatrixXd>& w_star);

/// Fraction of label cells where the two binary matrices disagree.
double multilabel_error(const Eigen::Ref<const Eigen::MatrixXd>& y_hat,
                        const Eigen::Ref<const Eigen::MatrixXd>& y_true);

/// Label vector of the Euclidean-nearest training row for every test row;
/// distance ties go to the lowest training index.
Eigen::MatrixXd one_nn_predict(const Eigen::Ref<const Eigen::MatrixXd>& z_train,
                               const Eigen::Ref<const Eigen::MatrixXd>& y_train,
                               const Eigen::Ref<const Eigen::MatrixXd>& z_test);

}  // namespace sca::metrics
