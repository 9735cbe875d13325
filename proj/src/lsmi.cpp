#include "sca/lsmi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sca/random.hpp"

namespace sca::lsmi {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_samples(const Eigen::Ref<const MatrixXd>& z, const Eigen::Ref<const MatrixXd>& y) {
    if (z.rows() == 0) throw std::invalid_argument("lsmi: no samples");
    if (z.rows() != y.rows()) {
        throw std::invalid_argument("lsmi: Z has " + std::to_string(z.rows()) + " rows but Y has " +
                                    std::to_string(y.rows()));
    }
    if (!z.allFinite() || !y.allFinite()) throw std::invalid_argument("lsmi: non-finite input");
}

void check_positive_list(const std::vector<double>& values, const char* name) {
    if (values.empty()) throw std::invalid_argument(std::string("HyperGrid: empty ") + name);
    for (double v : values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("HyperGrid: non-positive ") + name +
                                        " candidate " + std::to_string(v));
        }
    }
}

std::vector<Index> iota_indices(Index n) {
    std::vector<Index> out(static_cast<std::size_t>(n));
    std::iota(out.begin(), out.end(), Index{0});
    return out;
}

MatrixXd take_rows(const Eigen::Ref<const MatrixXd>& m, const std::vector<Index>& rows) {
    return m(rows, Eigen::all);
}

// Per-width kernel matrices between all samples and the centers.
std::vector<MatrixXd> kernel_stack(const MatrixXd& sq_dist, const std::vector<double>& widths,
                                   KernelKind kind) {
    std::vector<MatrixXd> out;
    out.reserve(widths.size());
    for (double w : widths) out.push_back(kernels::apply_kernel(sq_dist, make_input_kernel(kind, w)));
    return out;
}

struct FoldBlock {
    MatrixXd train;  // n_train x b_k
    MatrixXd test;   // n_test x b_k
    MatrixXd train_gram;
    MatrixXd test_gram;
};

// `full_gram` is full^T full over all rows; the training gram is that minus
// the held-out rows, which saves one large product per fold.
FoldBlock split_block(const MatrixXd& full, const MatrixXd& full_gram,
                      const std::vector<Index>& train_rows, const std::vector<Index>& test_rows,
                      const std::vector<Index>& cols) {
    FoldBlock block;
    block.train = full(train_rows, cols);
    block.test = full(test_rows, cols);
    block.test_gram = block.test.transpose() * block.test;
    block.train_gram = full_gram(cols, cols) - block.test_gram;
    return block;
}

std::vector<MatrixXd> gram_stack(const std::vector<MatrixXd>& stack) {
    std::vector<MatrixXd> out;
    out.reserve(stack.size());
    for (const auto& m : stack) out.push_back(m.transpose() * m);
    return out;
}

}  // namespace

Eigen::VectorXd DensityRatioModel::evaluate(const Eigen::Ref<const Eigen::MatrixXd>& z,
                                            const Eigen::Ref<const Eigen::MatrixXd>& y) const {
    check_samples(z, y);
    const MatrixXd k = kernels::gram(z, centers_z, kernel_z);
    const MatrixXd l = kernels::gram(y, centers_y, kernel_y);
    return k.cwiseProduct(l) * alpha;
}

HyperGrid HyperGrid::default_grid() {
    HyperGrid grid;
    grid.sigma_z = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
    grid.sigma_y = grid.sigma_z;
    grid.lambda = {1e-3, 1e-2, 1e-1, 1.0};
    grid.folds = 5;
    grid.width_scale = WidthScale::MedianMultiple;
    return grid;
}

HyperGrid HyperGrid::fixed(double sigma_z, double sigma_y, double lambda, int folds) {
    HyperGrid grid;
    grid.sigma_z = {sigma_z};
    grid.sigma_y = {sigma_y};
    grid.lambda = {lambda};
    grid.folds = folds;
    grid.width_scale = WidthScale::Absolute;
    return grid;
}

void HyperGrid::validate() const {
    check_positive_list(sigma_z, "sigma_z");
    // A single NaN sigma_y marks a width-free output kernel.
    if (!(sigma_y.size() == 1 && std::isnan(sigma_y.front()))) check_positive_list(sigma_y, "sigma_y");
    check_positive_list(lambda, "lambda");
    if (folds < 2) throw std::invalid_argument("HyperGrid: folds must be at least 2");
}

KernelSpec make_input_kernel(KernelKind kind, double sigma_z) {
    switch (kind) {
        case KernelKind::Epanechnikov: return KernelSpec::epanechnikov(sigma_z);
        case KernelKind::Gaussian: return KernelSpec::gaussian(sigma_z);
        case KernelKind::LabelCorrelation: break;
    }
    throw std::invalid_argument("input kernel must be epanechnikov or gaussian");
}

KernelSpec make_output_kernel(KernelKind kind, double sigma_y,
                              const Eigen::Ref<const Eigen::MatrixXd>& y) {
    if (kind == KernelKind::LabelCorrelation) {
        return KernelSpec::label_correlation(y.colwise().mean().transpose());
    }
    return make_input_kernel(kind, sigma_y);
}

Eigen::VectorXd h_hat_from_kernels(const MatrixXd& k, const MatrixXd& l) {
    if (k.rows() == 0) throw std::invalid_argument("compute_h_hat: no samples");
    return k.cwiseProduct(l).colwise().mean().transpose();
}

Eigen::MatrixXd H_hat_from_kernels(const MatrixXd& k, const MatrixXd& l) {
    if (k.rows() == 0) throw std::invalid_argument("compute_H_hat: no samples");
    const double n = static_cast<double>(k.rows());
    const MatrixXd kk = k.transpose() * k;
    const MatrixXd ll = l.transpose() * l;
    return kk.cwiseProduct(ll) / (n * n);
}

Eigen::VectorXd compute_h_hat(const Eigen::Ref<const MatrixXd>& z, const Eigen::Ref<const MatrixXd>& y,
                              const Eigen::Ref<const MatrixXd>& centers_z,
                              const Eigen::Ref<const MatrixXd>& centers_y,
                              const KernelSpec& kernel_z, const KernelSpec& kernel_y) {
    check_samples(z, y);
    return h_hat_from_kernels(kernels::gram(z, centers_z, kernel_z),
                              kernels::gram(y, centers_y, kernel_y));
}

Eigen::MatrixXd compute_H_hat(const Eigen::Ref<const MatrixXd>& z, const Eigen::Ref<const MatrixXd>& y,
                              const Eigen::Ref<const MatrixXd>& centers_z,
                              const Eigen::Ref<const MatrixXd>& centers_y,
                              const KernelSpec& kernel_z, const KernelSpec& kernel_y) {
    check_samples(z, y);
    return H_hat_from_kernels(kernels::gram(z, centers_z, kernel_z),
                              kernels::gram(y, centers_y, kernel_y));
}

Eigen::VectorXd solve_alpha(const MatrixXd& H_hat, const VectorXd& h_hat, double lambda) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("solve_alpha: lambda must be positive, got " + std::to_string(lambda));
    }
    if (H_hat.rows() != H_hat.cols() || H_hat.rows() != h_hat.size()) {
        throw std::invalid_argument("solve_alpha: dimension mismatch");
    }
    MatrixXd system = H_hat;
    system.diagonal().array() += lambda;

    const auto condition = [&system] {
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(system, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    };

    Eigen::LLT<MatrixXd> llt(system);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("solve_alpha: Cholesky factorization failed", condition());
    }
    VectorXd alpha = llt.solve(h_hat);
    const double residual = (system * alpha - h_hat).norm();
    if (!alpha.allFinite() || residual > 1e-8 * std::max(h_hat.norm(), 1e-300)) {
        // One step of iterative refinement before giving up.
        alpha += llt.solve(h_hat - system * alpha);
        const double refined = (system * alpha - h_hat).norm();
        if (!alpha.allFinite() || refined > 1e-8 * std::max(h_hat.norm(), 1e-300)) {
            throw NumericalError("solve_alpha: residual " + std::to_string(refined) +
                                     " exceeds tolerance",
                                 condition());
        }
    }
    return alpha;
}

double estimate_smi(const VectorXd& h_hat, const VectorXd& alpha) {
    if (h_hat.size() != alpha.size()) throw std::invalid_argument("estimate_smi: length mismatch");
    return 0.5 * h_hat.dot(alpha) - 0.5;
}

std::vector<Index> choose_centers(Index n, std::size_t max_centers, std::uint64_t seed) {
    const auto count = static_cast<std::size_t>(n);
    if (max_centers == 0 || max_centers >= count) return iota_indices(n);
    Engine engine = make_engine(seed, streams::kCenters);
    const auto perm = seeded_permutation(count, engine);
    std::vector<Index> out(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(max_centers));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> assign_folds(Index n, int folds, std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("assign_folds: folds must be at least 2");
    if (n < folds) {
        throw std::invalid_argument("assign_folds: " + std::to_string(n) + " samples cannot fill " +
                                    std::to_string(folds) + " folds");
    }
    Engine engine = make_engine(seed, streams::kFolds);
    const auto perm = seeded_permutation(static_cast<std::size_t>(n), engine);
    std::vector<int> fold(static_cast<std::size_t>(n));
    const auto total = static_cast<std::size_t>(n);
    const auto k = static_cast<std::size_t>(folds);
    // Block f covers positions [f*n/k, (f+1)*n/k), so sizes differ by at most one.
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t begin = f * total / k;
        const std::size_t end = (f + 1) * total / k;
        for (std::size_t p = begin; p < end; ++p) fold[perm[p]] = static_cast<int>(f);
    }
    return fold;
}

HyperGrid resolve_grid(const HyperGrid& grid, const Eigen::Ref<const MatrixXd>& z,
                       const Eigen::Ref<const MatrixXd>& y, std::uint64_t seed,
                       const LsmiOptions& options) {
    HyperGrid out = grid;
    if (grid.width_scale == HyperGrid::WidthScale::MedianMultiple) {
        check_positive_list(grid.sigma_z, "sigma_z");
        const double med_z = kernels::median_pairwise_distance(z, kernels::kDefaultMedianSampleCap, seed);
        for (double& s : out.sigma_z) s *= med_z;
        if (options.kernel_y != KernelKind::LabelCorrelation) {
            check_positive_list(grid.sigma_y, "sigma_y");
            const double med_y =
                kernels::median_pairwise_distance(y, kernels::kDefaultMedianSampleCap, seed);
            for (double& s : out.sigma_y) s *= med_y;
        }
        out.width_scale = HyperGrid::WidthScale::Absolute;
    }
    if (options.kernel_y == KernelKind::LabelCorrelation) {
        out.sigma_y = {std::numeric_limits<double>::quiet_NaN()};
    }
    out.validate();
    return out;
}

CvReport cross_validate(const Eigen::Ref<const MatrixXd>& z, const Eigen::Ref<const MatrixXd>& y,
                        const HyperGrid& grid, std::uint64_t seed, const LsmiOptions& options) {
    check_samples(z, y);
    const HyperGrid resolved = resolve_grid(grid, z, y, seed, options);
    const Index n = z.rows();
    const std::vector<int> fold = assign_folds(n, resolved.folds, seed);
    const std::vector<Index> centers = choose_centers(n, options.max_centers, seed);

    const MatrixXd centers_z = take_rows(z, centers);
    const MatrixXd centers_y = take_rows(y, centers);
    const std::vector<MatrixXd> k_full =
        kernel_stack(kernels::squared_distances(z, centers_z), resolved.sigma_z, options.kernel_z);
    std::vector<MatrixXd> l_full;
    if (options.kernel_y == KernelKind::LabelCorrelation) {
        l_full.push_back(kernels::gram(y, centers_y, make_output_kernel(options.kernel_y, 0.0, y)));
    } else {
        l_full = kernel_stack(kernels::squared_distances(y, centers_y), resolved.sigma_y, options.kernel_y);
    }

    const std::vector<MatrixXd> k_gram = gram_stack(k_full);
    const std::vector<MatrixXd> l_gram = gram_stack(l_full);

    CvReport report;
    for (double sz : resolved.sigma_z) {
        for (double sy : resolved.sigma_y) {
            for (double lam : resolved.lambda) report.candidates.push_back({{sz, sy, lam}, 0.0});
        }
    }

    const std::size_t n_lambda = resolved.lambda.size();
    const std::size_t n_sy = resolved.sigma_y.size();
    for (int k = 0; k < resolved.folds; ++k) {
        std::vector<Index> train_rows;
        std::vector<Index> test_rows;
        for (Index i = 0; i < n; ++i) (fold[static_cast<std::size_t>(i)] == k ? test_rows : train_rows).push_back(i);
        std::vector<Index> cols;
        for (std::size_t p = 0; p < centers.size(); ++p) {
            if (fold[static_cast<std::size_t>(centers[p])] != k) cols.push_back(static_cast<Index>(p));
        }
        if (train_rows.empty() || test_rows.empty() || cols.empty()) {
            throw std::invalid_argument("cross_validate: fold " + std::to_string(k) + " is empty");
        }
        const double n_train = static_cast<double>(train_rows.size());
        const double n_test = static_cast<double>(test_rows.size());

        std::vector<FoldBlock> k_blocks;
        for (std::size_t s = 0; s < k_full.size(); ++s) {
            k_blocks.push_back(split_block(k_full[s], k_gram[s], train_rows, test_rows, cols));
        }
        std::vector<FoldBlock> l_blocks;
        for (std::size_t t = 0; t < l_full.size(); ++t) {
            l_blocks.push_back(split_block(l_full[t], l_gram[t], train_rows, test_rows, cols));
        }

        for (std::size_t s = 0; s < k_blocks.size(); ++s) {
            const FoldBlock& kb = k_blocks[s];
            for (std::size_t t = 0; t < l_blocks.size(); ++t) {
                const FoldBlock& lb = l_blocks[t];
                const MatrixXd H_train = kb.train_gram.cwiseProduct(lb.train_gram) / (n_train * n_train);
                const VectorXd h_train = kb.train.cwiseProduct(lb.train).colwise().mean().transpose();
                const MatrixXd H_test = kb.test_gram.cwiseProduct(lb.test_gram) / (n_test * n_test);
                const VectorXd h_test = kb.test.cwiseProduct(lb.test).colwise().mean().transpose();
                for (std::size_t r = 0; r < n_lambda; ++r) {
                    const VectorXd alpha = solve_alpha(H_train, h_train, resolved.lambda[r]);
                    const double j = 0.5 * alpha.dot(H_test * alpha) - h_test.dot(alpha);
                    report.candidates[(s * n_sy + t) * n_lambda + r].score += j;
                }
            }
        }
    }

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < report.candidates.size(); ++c) {
        double& score = report.candidates[c].score;
        score /= static_cast<double>(resolved.folds);
        if (std::isnan(score)) score = std::numeric_limits<double>::infinity();
        if (score < best) {
            best = score;
            report.selected = c;
        }
    }
    return report;
}

LsmiFit fit(const Eigen::Ref<const MatrixXd>& z, const Eigen::Ref<const MatrixXd>& y,
            const HyperGrid& grid, std::uint64_t seed, const LsmiOptions& options) {
    return fit_selected(z, y, cross_validate(z, y, grid, seed, options), seed, options);
}

LsmiFit fit_selected(const Eigen::Ref<const MatrixXd>& z, const Eigen::Ref<const MatrixXd>& y,
                     CvReport report, std::uint64_t seed, const LsmiOptions& options) {
    check_samples(z, y);
    const Hyperparameters best = report.best().hypers;

    const std::vector<Index> centers = choose_centers(z.rows(), options.max_centers, seed);
    KernelSpec kernel_z = make_input_kernel(options.kernel_z, best.sigma_z);
    KernelSpec kernel_y = make_output_kernel(options.kernel_y, best.sigma_y, y);
    MatrixXd centers_z = take_rows(z, centers);
    MatrixXd centers_y = take_rows(y, centers);

    const MatrixXd k = kernels::gram(z, centers_z, kernel_z);
    const MatrixXd l = kernels::gram(y, centers_y, kernel_y);
    const VectorXd h = h_hat_from_kernels(k, l);
    VectorXd alpha = solve_alpha(H_hat_from_kernels(k, l), h, best.lambda);
    const double smi = estimate_smi(h, alpha);

    return LsmiFit{
        DensityRatioModel{std::move(alpha), std::move(centers_z), std::move(centers_y), centers,
                          std::move(kernel_z), std::move(kernel_y), best.lambda},
        smi, std::move(report)};
}

}  // namespace sca::lsmi
