#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "sca/datasets.hpp"
#include "sca/lsmi.hpp"

using namespace sca;
using namespace sca::lsmi;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

oracle::Problem random_problem(std::mt19937_64& rng, Eigen::Index n, Eigen::Index b) {
    oracle::Problem p;
    p.z = oracle::normal_matrix(n, 2, rng);
    p.y = oracle::normal_matrix(n, 1, rng);
    p.cz = p.z.topRows(b);
    p.cy = p.y.topRows(b);
    std::uniform_real_distribution<double> w(0.8, 2.5);
    p.sz = w(rng);
    p.sy = w(rng);
    return p;
}

MatrixXd spd(Eigen::Index b, std::mt19937_64& rng) {
    const MatrixXd a = oracle::normal_matrix(b, b, rng);
    return a * a.transpose() + 0.1 * MatrixXd::Identity(b, b);
}

}  // namespace

TEST_CASE("h_hat: self center and isolated samples") {
    const MatrixXd z = (MatrixXd(1, 1) << 0.4).finished();
    const MatrixXd y = (MatrixXd(1, 1) << -1.0).finished();
    const VectorXd h = compute_h_hat(z, y, z, y, KernelSpec::epanechnikov(1.0), KernelSpec::gaussian(1.0));
    CHECK(h(0) == 1.0);

    // Narrow support: only the diagonal term survives.
    const MatrixXd z3 = (MatrixXd(3, 1) << 0.0, 5.0, 10.0).finished();
    const MatrixXd y3 = (MatrixXd(3, 1) << 1.0, 2.0, 3.0).finished();
    const VectorXd h3 =
        compute_h_hat(z3, y3, z3, y3, KernelSpec::epanechnikov(0.1), KernelSpec::gaussian(1.0));
    for (int l = 0; l < 3; ++l) CHECK(h3(l) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    CHECK_THROWS_AS(compute_h_hat(MatrixXd(0, 1), MatrixXd(0, 1), z, y, KernelSpec::epanechnikov(1.0),
                                  KernelSpec::gaussian(1.0)),
                    std::invalid_argument);
}

TEST_CASE("h_hat matches the double loop") {
    std::mt19937_64 rng(21);
    const auto p = random_problem(rng, 3, 3);
    const VectorXd h =
        compute_h_hat(p.z, p.y, p.cz, p.cy, KernelSpec::epanechnikov(p.sz), KernelSpec::gaussian(p.sy));
    CHECK((h - oracle::h_loop(p)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("H_hat matches the quadruple loop") {
    std::mt19937_64 rng(22);
    std::uniform_int_distribution<int> n_dist(2, 20);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const int n = n_dist(rng);
        const int b = std::uniform_int_distribution<int>(1, std::min(n, 10))(rng);
        const auto p = random_problem(rng, n, b);
        const MatrixXd H =
            compute_H_hat(p.z, p.y, p.cz, p.cy, KernelSpec::epanechnikov(p.sz), KernelSpec::gaussian(p.sy));
        worst = std::max(worst, (H - oracle::H_loop(p)).cwiseAbs().maxCoeff());

        CHECK((H - H.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(H);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("H_hat with a single center") {
    // With one center H = mean(K^2) mean(L^2); it equals h^2 only when n = 1.
    std::mt19937_64 rng(23);
    const auto p = random_problem(rng, 6, 1);
    const auto kz = KernelSpec::epanechnikov(p.sz);
    const auto ky = KernelSpec::gaussian(p.sy);
    const MatrixXd H = compute_H_hat(p.z, p.y, p.cz, p.cy, kz, ky);
    const VectorXd k = kernels::gram(p.z, p.cz, kz).col(0);
    const VectorXd l = kernels::gram(p.y, p.cy, ky).col(0);
    CHECK(H(0, 0) == doctest::Approx(k.squaredNorm() / 6.0 * l.squaredNorm() / 6.0).epsilon(1e-14));

    const MatrixXd z1 = p.z.topRows(1);
    const MatrixXd y1 = p.y.topRows(1);
    const MatrixXd cz = (MatrixXd(1, 2) << 0.1, 0.2).finished();
    const MatrixXd cy = (MatrixXd(1, 1) << 0.3).finished();
    const double h1 = compute_h_hat(z1, y1, cz, cy, kz, ky)(0);
    CHECK(compute_H_hat(z1, y1, cz, cy, kz, ky)(0, 0) == doctest::Approx(h1 * h1).epsilon(1e-14));
}

TEST_CASE("solve_alpha") {
    std::mt19937_64 rng(24);
    const VectorXd v = oracle::normal_matrix(4, 1, rng);
    CHECK((solve_alpha(MatrixXd::Zero(4, 4), v, 1.0) - v).norm() <= 1e-15);

    const MatrixXd H = spd(6, rng);
    const VectorXd h = oracle::normal_matrix(6, 1, rng);
    double previous = std::numeric_limits<double>::infinity();
    for (double lam : {1.0, 10.0, 100.0}) {
        const double norm = solve_alpha(H, h, lam).norm();
        CHECK(norm < previous);
        previous = norm;
    }

    for (int t = 0; t < 20; ++t) {
        const MatrixXd A = spd(5, rng);
        const VectorXd b = oracle::normal_matrix(5, 1, rng);
        const VectorXd alpha = solve_alpha(A, b, 0.01);
        MatrixXd system = A;
        system.diagonal().array() += 0.01;
        const VectorXd ref = oracle::dense_solve(system, b);
        CHECK((alpha - ref).norm() <= 1e-10 * ref.norm());
        CHECK((system * alpha - b).norm() <= 1e-8 * b.norm());
    }

    CHECK_THROWS_AS(solve_alpha(H, h, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_alpha(H, h, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_alpha(H, VectorXd::Zero(3), 1.0), std::invalid_argument);
}

TEST_CASE("solve_alpha reports the condition number on failure") {
    MatrixXd H = MatrixXd::Zero(2, 2);
    H(0, 0) = -5.0;
    const VectorXd h = VectorXd::Ones(2);
    try {
        solve_alpha(H, h, 1.0);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::isinf(e.condition()));
    }
}

TEST_CASE("estimate_smi") {
    const VectorXd h = (VectorXd(2) << 0.5, 0.25).finished();
    const VectorXd alpha = (VectorXd(2) << 1.0, 2.0).finished();
    CHECK(estimate_smi(h, alpha) == doctest::Approx(0.0));
    CHECK(estimate_smi(VectorXd::Zero(2), alpha) == -0.5);
    CHECK_THROWS_AS(estimate_smi(h, VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("estimate_smi is invariant to sample order") {
    std::mt19937_64 rng(25);
    const auto p = random_problem(rng, 15, 6);
    const auto kz = KernelSpec::epanechnikov(p.sz);
    const auto ky = KernelSpec::gaussian(p.sy);
    auto smi = [&](const MatrixXd& z, const MatrixXd& y) {
        const VectorXd h = compute_h_hat(z, y, p.cz, p.cy, kz, ky);
        return estimate_smi(h, solve_alpha(compute_H_hat(z, y, p.cz, p.cy, kz, ky), h, 0.1));
    };
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(15);
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + 15, rng);
    CHECK(std::abs(smi(p.z, p.y) - smi(perm * p.z, perm * p.y)) <= 1e-10);
}

TEST_CASE("folds and centers") {
    const auto fold = assign_folds(23, 5, 7);
    std::vector<int> size(5, 0);
    for (int f : fold) ++size[static_cast<std::size_t>(f)];
    CHECK(*std::max_element(size.begin(), size.end()) - *std::min_element(size.begin(), size.end()) <= 1);
    CHECK(fold == assign_folds(23, 5, 7));
    CHECK(fold != assign_folds(23, 5, 8));
    CHECK_THROWS_AS(assign_folds(3, 5, 0), std::invalid_argument);
    CHECK_THROWS_AS(assign_folds(10, 1, 0), std::invalid_argument);

    const auto c = choose_centers(50, 10, 3);
    CHECK(c.size() == 10);
    CHECK(std::is_sorted(c.begin(), c.end()));
    CHECK(std::adjacent_find(c.begin(), c.end()) == c.end());
    CHECK(choose_centers(50, 0, 3).size() == 50);
    CHECK(choose_centers(50, 80, 3).size() == 50);
}

TEST_CASE("cross_validate selection contract") {
    std::mt19937_64 rng(26);
    const MatrixXd z = oracle::normal_matrix(40, 1, rng);
    const MatrixXd y = z + 0.3 * oracle::normal_matrix(40, 1, rng);

    const CvReport single = cross_validate(z, y, HyperGrid::fixed(1.0, 1.0, 0.1), 0);
    CHECK(single.candidates.size() == 1);
    CHECK(single.selected == 0);

    HyperGrid dup;
    dup.width_scale = HyperGrid::WidthScale::Absolute;
    dup.sigma_z = {0.8, 0.8};
    dup.sigma_y = {1.0};
    dup.lambda = {0.1};
    const CvReport d = cross_validate(z, y, dup, 0);
    CHECK(d.candidates[0].score == d.candidates[1].score);
    CHECK(d.selected == 0);

    const CvReport full = cross_validate(z, y, HyperGrid::default_grid(), 0);
    CHECK(full.candidates.size() == 6 * 6 * 4);
    for (const auto& c : full.candidates) CHECK(full.best().score <= c.score);
    // Grid order: sigma_z outer, lambda inner.
    CHECK(full.candidates[0].hypers.sigma_z == full.candidates[23].hypers.sigma_z);
    CHECK(full.candidates[0].hypers.lambda == 1e-3);
    CHECK(full.candidates[3].hypers.lambda == 1.0);
}

TEST_CASE("cross_validate avoids pathologically narrow kernels") {
    datasets::SyntheticSpec spec;
    spec.which = datasets::Benchmark::Data2;
    spec.n = 200;
    spec.seed = 1;
    const auto data = datasets::generate(spec);
    const MatrixXd z = data.x * data.w_star.transpose();
    HyperGrid grid = HyperGrid::default_grid();
    grid.sigma_z = {0.01, 0.25, 0.5, 1.0};
    const CvReport r = cross_validate(z, data.y, grid, 1);
    const double narrow = 0.01 * kernels::median_pairwise_distance(z);
    CHECK(r.best().hypers.sigma_z > narrow);
}

TEST_CASE("fit: dependence sanity") {
    datasets::SyntheticSpec spec;
    spec.which = datasets::Benchmark::Data2;
    spec.n = 200;
    const auto data = datasets::generate(spec);
    const MatrixXd z = data.x * data.w_star.transpose();
    const LsmiFit dep = fit(z, data.y, HyperGrid::default_grid(), 0);
    CHECK(dep.smi > 0.0);
    CHECK(dep.model.alpha.size() == 200);
    CHECK(dep.model.center_indices.size() == 200);

    const LsmiFit sub = fit(z, data.y, HyperGrid::default_grid(), 0, LsmiOptions{KernelKind::Epanechnikov,
                                                                                 KernelKind::Gaussian, 50});
    CHECK(sub.model.alpha.size() == 50);
    CHECK(sub.model.centers_z.rows() == 50);
}

TEST_CASE("fit: label-correlation output kernel") {
    std::mt19937_64 rng(27);
    const MatrixXd z = oracle::normal_matrix(60, 2, rng);
    MatrixXd y(60, 3);
    for (int i = 0; i < 60; ++i) {
        y(i, 0) = z(i, 0) > 0 ? 1.0 : 0.0;
        y(i, 1) = z(i, 1) > 0 ? 1.0 : 0.0;
        y(i, 2) = (i % 3 == 0) ? 1.0 : 0.0;
    }
    const LsmiFit f = fit(z, y, HyperGrid::default_grid(), 0, LsmiOptions{KernelKind::Epanechnikov,
                                                                           KernelKind::LabelCorrelation, 0});
    CHECK(std::isnan(f.report.best().hypers.sigma_y));
    CHECK(f.model.kernel_y.kind() == KernelKind::LabelCorrelation);
    CHECK(std::isfinite(f.smi));
}

TEST_CASE("HyperGrid validation") {
    HyperGrid g = HyperGrid::default_grid();
    CHECK_NOTHROW(g.validate());
    g.lambda = {0.0};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = HyperGrid::default_grid();
    g.sigma_z = {};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = HyperGrid::default_grid();
    g.folds = 1;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}
