#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "sca/metrics.hpp"

using namespace sca::metrics;
using Eigen::MatrixXd;

TEST_CASE("frobenius subspace error examples") {
    const MatrixXd e1 = (MatrixXd(1, 2) << 1, 0).finished();
    const MatrixXd e2 = (MatrixXd(1, 2) << 0, 1).finished();
    CHECK(frobenius_subspace_error(e1, e1) == 0.0);
    CHECK(frobenius_subspace_error(e1, e2) == doctest::Approx(1.0));

    // theta = 45 degrees: P - P* = [[-1/2, 1/2], [1/2, 1/2]], Frobenius norm 1, over sqrt 2.
    const double c = std::sqrt(0.5);
    const MatrixXd diag = (MatrixXd(1, 2) << c, c).finished();
    CHECK(frobenius_subspace_error(diag, e1) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));
    // Same formula in closed form: |sin theta| for one-dimensional subspaces.
    for (double theta : {0.1, 0.7, 1.3, 2.9}) {
        const MatrixXd w = (MatrixXd(1, 2) << std::cos(theta), std::sin(theta)).finished();
        CHECK(frobenius_subspace_error(w, e1) == doctest::Approx(std::abs(std::sin(theta))).epsilon(1e-13));
    }
}

TEST_CASE("frobenius subspace error properties") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 100; ++t) {
        const int d = std::uniform_int_distribution<int>(2, 8)(rng);
        const int m = std::uniform_int_distribution<int>(1, d)(rng);
        const MatrixXd a = oracle::random_stiefel(m, d, rng);
        const MatrixXd b = oracle::random_stiefel(m, d, rng);
        const MatrixXd q = oracle::random_stiefel(m, m, rng);
        const double e = frobenius_subspace_error(a, b);
        CHECK(e >= 0.0);
        CHECK(e <= 1.0);
        CHECK(std::abs(e - frobenius_subspace_error(b, a)) <= 1e-15);
        CHECK(std::abs(e - frobenius_subspace_error(q * a, b)) <= 1e-10);
        CHECK(std::abs(e - frobenius_subspace_error(a, q * b)) <= 1e-10);
        CHECK(frobenius_subspace_error(q * a, a) <= 1e-7);
    }
}

TEST_CASE("frobenius subspace error input checks") {
    const MatrixXd e1 = (MatrixXd(1, 2) << 1, 0).finished();
    CHECK_THROWS_AS(frobenius_subspace_error(e1, MatrixXd::Identity(1, 3)), std::invalid_argument);
    CHECK_THROWS_AS(frobenius_subspace_error(2 * e1, e1), std::invalid_argument);
}

TEST_CASE("multilabel error") {
    const MatrixXd y = (MatrixXd(2, 2) << 1, 0, 0, 1).finished();
    CHECK(multilabel_error(y, y) == 0.0);
    CHECK(multilabel_error(MatrixXd::Ones(2, 2) - y, y) == 1.0);
    MatrixXd one = y;
    one(1, 0) = 1;
    CHECK(multilabel_error(one, y) == 0.25);
    CHECK(multilabel_error(y, one) == multilabel_error(one, y));
    CHECK_THROWS_AS(multilabel_error(y, MatrixXd::Zero(2, 3)), std::invalid_argument);
    CHECK_THROWS_AS(multilabel_error(0.5 * y, y), std::invalid_argument);
}

TEST_CASE("one nearest neighbour") {
    const MatrixXd zt = (MatrixXd(3, 1) << 0.0, 2.0, 5.0).finished();
    const MatrixXd yt = (MatrixXd(3, 2) << 1, 0, 0, 1, 1, 1).finished();
    // Exact match, midpoint tie (goes to the lower index) and a far point.
    const MatrixXd q = (MatrixXd(3, 1) << 2.0, 1.0, 9.0).finished();
    const MatrixXd p = one_nn_predict(zt, yt, q);
    CHECK(p.row(0) == yt.row(1));
    CHECK(p.row(1) == yt.row(0));
    CHECK(p.row(2) == yt.row(2));

    const MatrixXd single = one_nn_predict(zt.topRows(1), yt.topRows(1), q);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(single.row(i) == yt.row(0));

    // Brute-force distance oracle on random points.
    std::mt19937_64 rng(42);
    const MatrixXd a = oracle::normal_matrix(15, 3, rng);
    const MatrixXd la = oracle::uniform_matrix(15, 4, rng, 0, 1).array().round();
    const MatrixXd b = oracle::normal_matrix(6, 3, rng);
    const MatrixXd pb = one_nn_predict(a, la, b);
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        Eigen::Index arg = 0;
        (a.rowwise() - b.row(i)).rowwise().squaredNorm().minCoeff(&arg);
        CHECK(pb.row(i) == la.row(arg));
    }

    CHECK_THROWS_AS(one_nn_predict(MatrixXd(0, 1), MatrixXd(0, 2), q), std::invalid_argument);
    CHECK_THROWS_AS(one_nn_predict(zt, yt, MatrixXd::Zero(1, 2)), std::invalid_argument);
}
