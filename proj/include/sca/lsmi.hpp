#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sca/kernels.hpp"

namespace sca::lsmi {

using kernels::KernelKind;
using kernels::KernelSpec;

/// Raised when a linear solve fails numerically. Carries the condition
/// number estimate of the system matrix.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double condition)
        : std::runtime_error(what), condition_(condition) {}
    double condition() const { return condition_; }

private:
    double condition_;
};

/// Fitted ratio model w(z, y) = sum_l alpha_l K(z, z_l) L(y, y_l).
struct DensityRatioModel {
    Eigen::VectorXd alpha;
    Eigen::MatrixXd centers_z;
    Eigen::MatrixXd centers_y;
    /// Sample indices the centers were taken from.
    std::vector<Eigen::Index> center_indices;
    KernelSpec kernel_z;
    KernelSpec kernel_y;
    double lambda;

    /// Evaluates the ratio model at every row pair (z_i, y_i).
    Eigen::VectorXd evaluate(const Eigen::Ref<const Eigen::MatrixXd>& z,
                             const Eigen::Ref<const Eigen::MatrixXd>& y) const;
};

/// Candidate hyperparameters for cross-validation.
///
/// With `WidthScale::MedianMultiple` the width candidates are multipliers of
/// the median pairwise distance of Z (resp. Y) and are resolved against the
/// data at fit time; with `Absolute` they are used as given.
struct HyperGrid {
    enum class WidthScale { Absolute, MedianMultiple };

    std::vector<double> sigma_z;
    std::vector<double> sigma_y;
    std::vector<double> lambda;
    int folds = 5;
    WidthScale width_scale = WidthScale::MedianMultiple;

    /// Median-anchored multiplicative grid: {0.25, 0.5, 0.75, 1, 1.5, 2} for
    /// both widths, lambda in {1e-3, 1e-2, 1e-1, 1}, 5 folds.
    static HyperGrid default_grid();

    /// A single absolute candidate (skips model selection in effect).
    static HyperGrid fixed(double sigma_z, double sigma_y, double lambda, int folds = 5);

    void validate() const;
};

struct Hyperparameters {
    double sigma_z;
    /// NaN when the output kernel has no width.
    double sigma_y;
    double lambda;
};

struct CvCandidate {
    Hyperparameters hypers;
    double score;
};

struct CvReport {
    /// In grid order: sigma_z outer, sigma_y middle, lambda inner.
    std::vector<CvCandidate> candidates;
    std::size_t selected = 0;

    const CvCandidate& best() const { return candidates.at(selected); }
};

struct LsmiOptions {
    KernelKind kernel_z = KernelKind::Epanechnikov;
    /// Gaussian or LabelCorrelation.
    KernelKind kernel_y = KernelKind::Gaussian;
    /// Uniformly subsample this many kernel centers (0 = use every sample).
    std::size_t max_centers = 0;
};

struct LsmiFit {
    DensityRatioModel model;
    double smi;
    CvReport report;
};

/// h_l = (1/n) sum_i K(z_i, z_l) L(y_i, y_l).
Eigen::VectorXd compute_h_hat(const Eigen::Ref<const Eigen::MatrixXd>& z,
                              const Eigen::Ref<const Eigen::MatrixXd>& y,
                              const Eigen::Ref<const Eigen::MatrixXd>& centers_z,
                              const Eigen::Ref<const Eigen::MatrixXd>& centers_y,
                              const KernelSpec& kernel_z, const KernelSpec& kernel_y);

/// H_{l,l'} = (1/n^2) sum_{i,j} K(z_i,z_l) L(y_j,y_l) K(z_i,z_l') L(y_j,y_l'),
/// the empirical second moment of the basis under the product of marginals.
/// Evaluated in factored form as (K^T K) .* (L^T L) / n^2.
Eigen::MatrixXd compute_H_hat(const Eigen::Ref<const Eigen::MatrixXd>& z,
                              const Eigen::Ref<const Eigen::MatrixXd>& y,
                              const Eigen::Ref<const Eigen::MatrixXd>& centers_z,
                              const Eigen::Ref<const Eigen::MatrixXd>& centers_y,
                              const KernelSpec& kernel_z, const KernelSpec& kernel_y);

/// Same estimators from precomputed n x b kernel matrices.
Eigen::VectorXd h_hat_from_kernels(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l);
Eigen::MatrixXd H_hat_from_kernels(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l);

/// Solves (H + lambda I) alpha = h. lambda must be positive.
Eigen::VectorXd solve_alpha(const Eigen::MatrixXd& H_hat, const Eigen::VectorXd& h_hat,
                            double lambda);

/// 0.5 h^T alpha - 0.5.
double estimate_smi(const Eigen::VectorXd& h_hat, const Eigen::VectorXd& alpha);

/// Resolves median-relative width candidates against the data. Absolute grids
/// are returned unchanged. For a LabelCorrelation output kernel the sigma_y
/// list collapses to a single NaN entry.
HyperGrid resolve_grid(const HyperGrid& grid, const Eigen::Ref<const Eigen::MatrixXd>& z,
                       const Eigen::Ref<const Eigen::MatrixXd>& y, std::uint64_t seed,
                       const LsmiOptions& options = {});

/// K-fold cross-validation of the hold-out objective
/// J = 0.5 alpha^T H_k alpha - h_k^T alpha over every grid candidate.
CvReport cross_validate(const Eigen::Ref<const Eigen::MatrixXd>& z,
                        const Eigen::Ref<const Eigen::MatrixXd>& y, const HyperGrid& grid,
                        std::uint64_t seed, const LsmiOptions& options = {});

/// Refits on all samples with `report.best()`.
LsmiFit fit_selected(const Eigen::Ref<const Eigen::MatrixXd>& z,
                     const Eigen::Ref<const Eigen::MatrixXd>& y, CvReport report, std::uint64_t seed,
                     const LsmiOptions& options = {});

/// Cross-validates, then refits on all samples with the selected candidate.
LsmiFit fit(const Eigen::Ref<const Eigen::MatrixXd>& z, const Eigen::Ref<const Eigen::MatrixXd>& y,
            const HyperGrid& grid, std::uint64_t seed, const LsmiOptions& options = {});

/// Kernel spec for the output variable, given the training labels.
KernelSpec make_output_kernel(KernelKind kind, double sigma_y,
                              const Eigen::Ref<const Eigen::MatrixXd>& y);
KernelSpec make_input_kernel(KernelKind kind, double sigma_z);

/// Sorted center indices: every sample, or a seeded uniform subsample.
std::vector<Eigen::Index> choose_centers(Eigen::Index n, std::size_t max_centers,
                                         std::uint64_t seed);

/// fold[i] in [0, folds): contiguous blocks of a seeded permutation.
std::vector<int> assign_folds(Eigen::Index n, int folds, std::uint64_t seed);

}  // namespace sca::lsmi
