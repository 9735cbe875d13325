#include "sca/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace sca::baselines {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kEigenFloor = 1e-12;

// Slice label per sample. Tied responses always share a slice; the last
// slice takes whatever remains.
std::vector<int> equal_frequency_slices(const VectorXd& y, int slices) {
    const auto n = static_cast<std::size_t>(y.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&y](std::size_t a, std::size_t b) { return y(static_cast<Index>(a)) < y(static_cast<Index>(b)); });

    const std::size_t target = n / static_cast<std::size_t>(slices);
    std::vector<int> label(n);
    int current = 0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < n; ++p) {
        const bool tie_with_previous =
            p > 0 && y(static_cast<Index>(order[p])) == y(static_cast<Index>(order[p - 1]));
        if (count >= target && current < slices - 1 && !tie_with_previous) {
            ++current;
            count = 0;
        }
        label[order[p]] = current;
        ++count;
    }
    return label;
}

}  // namespace

Projection sir_fit(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const MatrixXd>& y,
                   const SirConfig& config) {
    if (config.slices < 2) throw std::invalid_argument("sir_fit: need at least 2 slices");
    if (y.cols() != 1) throw std::invalid_argument("sir_fit: response must be scalar");
    if (y.rows() != x.rows()) throw std::invalid_argument("sir_fit: X and y differ in length");
    if (x.rows() < 2 * config.slices) {
        throw std::invalid_argument("sir_fit: need at least " + std::to_string(2 * config.slices) + " samples");
    }
    if (config.m < 1 || config.m > x.cols()) throw std::invalid_argument("sir_fit: need 1 <= m <= d");

    const Index n = x.rows();
    const Index d = x.cols();
    const MatrixXd centered = x.rowwise() - x.colwise().mean();
    const MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<MatrixXd> cov_eig(cov);
    const VectorXd& evals = cov_eig.eigenvalues();
    if (!(evals.maxCoeff() > 0.0) || evals.minCoeff() <= kEigenFloor * evals.maxCoeff()) {
        throw std::invalid_argument(
            "sir_fit: sample covariance of X is singular; remove collinear columns or regularize");
    }
    const VectorXd inv_sqrt = evals.cwiseMax(kEigenFloor).cwiseSqrt().cwiseInverse();
    const MatrixXd whitening = cov_eig.eigenvectors() * inv_sqrt.asDiagonal() * cov_eig.eigenvectors().transpose();
    const MatrixXd whitened = centered * whitening;

    const std::vector<int> label = equal_frequency_slices(y.col(0), config.slices);
    const int used = *std::max_element(label.begin(), label.end()) + 1;
    if (used < 2) throw std::invalid_argument("sir_fit: response is constant; every sample falls in one slice");

    MatrixXd means = MatrixXd::Zero(used, d);
    VectorXd counts = VectorXd::Zero(used);
    for (Index i = 0; i < n; ++i) {
        means.row(label[static_cast<std::size_t>(i)]) += whitened.row(i);
        counts(label[static_cast<std::size_t>(i)]) += 1.0;
    }
    MatrixXd between = MatrixXd::Zero(d, d);
    for (Index h = 0; h < used; ++h) {
        const VectorXd mean = means.row(h).transpose() / counts(h);
        between += (counts(h) / static_cast<double>(n)) * mean * mean.transpose();
    }
    if (between.cwiseAbs().maxCoeff() <= 1e-14) {
        throw std::invalid_argument("sir_fit: between-slice scatter vanishes; response carries no signal");
    }

    const MatrixXd directions = maximize_trace(between, config.m).projection.matrix();
    // Whitened direction eta maps back to beta = Sigma^{-1/2} eta.
    return Projection::from_row_space(directions * whitening);
}

}  // namespace sca::baselines
