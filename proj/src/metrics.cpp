#include "sca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sca::metrics {

namespace {

void check_orthonormal_rows(const Eigen::Ref<const Eigen::MatrixXd>& w, const char* name) {
    const Eigen::MatrixXd gram = w * w.transpose();
    const double defect = (gram - Eigen::MatrixXd::Identity(w.rows(), w.rows())).cwiseAbs().maxCoeff();
    if (!(defect <= 1e-6)) {
        throw std::invalid_argument(std::string("frobenius_subspace_error: ") + name +
                                    " rows are not orthonormal (defect " + std::to_string(defect) + ")");
    }
}

bool is_binary(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    return ((m.array() == 0.0) || (m.array() == 1.0)).all();
}

}  // namespace

double frobenius_subspace_error(const Eigen::Ref<const Eigen::MatrixXd>& w_hat,
                                const Eigen::Ref<const Eigen::MatrixXd>& w_star) {
    if (w_hat.rows() != w_star.rows() || w_hat.cols() != w_star.cols() || w_hat.rows() == 0) {
        throw std::invalid_argument("frobenius_subspace_error: shape mismatch");
    }
    check_orthonormal_rows(w_hat, "W_hat");
    check_orthonormal_rows(w_star, "W_star");
    const Eigen::MatrixXd diff = w_hat.transpose() * w_hat - w_star.transpose() * w_star;
    const double value = diff.norm() / std::sqrt(2.0 * static_cast<double>(w_hat.rows()));
    return std::clamp(value, 0.0, 1.0);
}

double multilabel_error(const Eigen::Ref<const Eigen::MatrixXd>& y_hat,
                        const Eigen::Ref<const Eigen::MatrixXd>& y_true) {
    if (y_hat.rows() != y_true.rows() || y_hat.cols() != y_true.cols()) {
        throw std::invalid_argument("multilabel_error: shape mismatch");
    }
    if (y_hat.size() == 0) throw std::invalid_argument("multilabel_error: empty label matrices");
    if (!is_binary(y_hat) || !is_binary(y_true)) {
        throw std::invalid_argument("multilabel_error: labels must be 0 or 1");
    }
    const auto wrong = (y_hat.array() != y_true.array()).count();
    return static_cast<double>(wrong) / static_cast<double>(y_hat.size());
}

Eigen::MatrixXd one_nn_predict(const Eigen::Ref<const Eigen::MatrixXd>& z_train,
                               const Eigen::Ref<const Eigen::MatrixXd>& y_train,
                               const Eigen::Ref<const Eigen::MatrixXd>& z_test) {
    if (z_train.rows() == 0) throw std::invalid_argument("one_nn_predict: empty training set");
    if (y_train.rows() != z_train.rows()) {
        throw std::invalid_argument("one_nn_predict: training features and labels differ in length");
    }
    if (z_test.cols() != z_train.cols()) throw std::invalid_argument("one_nn_predict: dimension mismatch");

    Eigen::MatrixXd out(z_test.rows(), y_train.cols());
    for (Eigen::Index q = 0; q < z_test.rows(); ++q) {
        Eigen::Index best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < z_train.rows(); ++i) {
            const double dist = (z_train.row(i) - z_test.row(q)).squaredNorm();
            if (dist < best_dist) {
                best_dist = dist;
                best = i;
            }
        }
        out.row(q) = y_train.row(best);
    }
    return out;
}

}  // namespace sca::metrics
