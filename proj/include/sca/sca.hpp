#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sca/kernels.hpp"
#include "sca/lsmi.hpp"

namespace sca {

inline constexpr double kStiefelTolerance = 1e-10;

/// An m x d matrix with orthonormal rows (W W^T = I_m).
class Projection {
public:
    /// Throws std::invalid_argument unless max|W W^T - I| <= tolerance.
    explicit Projection(Eigen::MatrixXd w, double tolerance = kStiefelTolerance);

    /// Orthonormalizes the rows of an arbitrary full-row-rank matrix
    /// (Householder QR of its transpose), preserving the row space.
    static Projection from_row_space(const Eigen::Ref<const Eigen::MatrixXd>& rows);

    static Projection identity(Eigen::Index d);

    const Eigen::MatrixXd& matrix() const { return w_; }
    Eigen::Index m() const { return w_.rows(); }
    Eigen::Index d() const { return w_.cols(); }

    /// max |W W^T - I|.
    double orthonormality_defect() const;

private:
    Eigen::MatrixXd w_;
};

struct ScaConfig {
    Eigen::Index m = 1;
    double tol = 1e-6;
    int max_iters = 100;
    lsmi::HyperGrid grid = lsmi::HyperGrid::default_grid();
    /// Re-run cross-validation at every iteration; otherwise reuse the
    /// hyperparameters picked at the first iteration.
    bool reselect_each_iter = true;
    std::uint64_t seed = 0;
    kernels::KernelKind kernel_y = kernels::KernelKind::Gaussian;
    std::size_t max_centers = 0;
    /// Drop negative ratio coefficients when building D. Without this the
    /// linearized objective can favour directions that spread the data and
    /// the SMI estimate collapses after one step.
    bool clip_negative_alpha = true;

    void validate() const;
};

struct FitTrace {
    std::vector<double> smi_per_iter;
    std::vector<lsmi::Hyperparameters> selected_hypers_per_iter;
    /// Iterations whose D' had no off-diagonal support pair; W was kept.
    std::vector<bool> degenerate_per_iter;
    bool converged = false;
    int iters = 0;
    /// Index into smi_per_iter of the returned iterate (-1 when the loop was skipped).
    int best_iter = -1;
    double initial_smi = 0.0;
};

struct ScaResult {
    Projection projection;
    Projection initial;
    FitTrace trace;
    /// Hyperparameters of the LSMI fit at the returned iterate.
    lsmi::Hyperparameters hypers;
};

struct PrincipalSubspace {
    Projection projection;
    /// tr(W D W^T) = sum of the m largest eigenvalues.
    double trace;
    /// All eigenvalues of the symmetrized D, descending.
    Eigen::VectorXd eigenvalues;
};

struct DMatrix {
    Eigen::MatrixXd d;
    /// Pairs (i, l) with sample i != center l inside the kernel support.
    std::size_t off_diagonal_pairs = 0;
};

/// D = (1/n) sum_i sum_l alpha_l I(|z_i - z_l|^2 / (2 sigma^2) < 1) L(y_i, y_l)
///     [ (1/m) I_d - (1/(2 sigma^2)) (x_i - x_l)(x_i - x_l)^T ]
/// where l runs over `centers` (sample indices) and z are the rows of
/// `support_coords` used for the indicator. With z = W x this satisfies
/// tr(W D W^T) = h^T alpha for the matching LSMI fit. With
/// `clip_negative_alpha`, alpha_l is replaced by max(alpha_l, 0).
DMatrix assemble_d_matrix(const Eigen::Ref<const Eigen::MatrixXd>& x,
                          const Eigen::Ref<const Eigen::MatrixXd>& y,
                          const Eigen::Ref<const Eigen::MatrixXd>& support_coords,
                          const std::vector<Eigen::Index>& centers,
                          const Eigen::Ref<const Eigen::VectorXd>& alpha, Eigen::Index m,
                          double sigma, const kernels::KernelSpec& kernel_y,
                          bool clip_negative_alpha = false);

/// D with every sample as a center and z = W x inside the indicator.
Eigen::MatrixXd compute_d_matrix(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                 const Eigen::Ref<const Eigen::MatrixXd>& y,
                                 const Eigen::Ref<const Eigen::VectorXd>& alpha, const Projection& w,
                                 double sigma_z, const kernels::KernelSpec& kernel_y,
                                 bool clip_negative_alpha = false);

/// Top-m eigenvectors of (D + D^T)/2 as rows. Each row's largest-magnitude
/// entry is positive; equal eigenvalues are ordered by their eigenvectors,
/// lexicographically descending.
PrincipalSubspace maximize_trace(const Eigen::Ref<const Eigen::MatrixXd>& d, Eigen::Index m);

struct Initialization {
    Projection projection;
    /// Input-space LSMI fit behind the chosen projection.
    lsmi::LsmiFit lsmi;
    /// Held-out LSMI score of the projected data, one per sigma_x candidate.
    std::vector<double> width_scores;
};

/// Dependence maximization in the input space: LSMI with an Epanechnikov
/// kernel on x, then the top-m eigenvectors of the resulting D^(0). One
/// projection is built per sigma_x candidate (with its best sigma_y and
/// lambda); the one whose projected data has the lowest cross-validated LSMI
/// score over the sigma_z grid wins.
Initialization initialize(const Eigen::Ref<const Eigen::MatrixXd>& x,
                          const Eigen::Ref<const Eigen::MatrixXd>& y, const ScaConfig& config);

/// Alternates LSMI estimation on Z = X W'^T with eigen-maximization of D'
/// until the SMI estimate stops improving by more than config.tol.
/// Returns the iterate with the highest SMI estimate.
ScaResult fit(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::MatrixXd>& y,
              const ScaConfig& config);

/// X W^T.
Eigen::MatrixXd transform(const Eigen::Ref<const Eigen::MatrixXd>& x, const Projection& projection);

}  // namespace sca
