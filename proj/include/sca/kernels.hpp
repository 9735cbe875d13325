#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace sca::kernels {

enum class KernelKind { Epanechnikov, Gaussian, LabelCorrelation };

std::string_view to_string(KernelKind kind);

/// A kernel family together with its hyperparameters.
///
/// For Epanechnikov the width is the bandwidth sigma in
/// max(0, 1 - |u-v|^2 / (2 sigma^2)). For Gaussian it enters as
/// exp(-|u-v|^2 / (2 sigma)), i.e. it is a squared bandwidth.
/// LabelCorrelation has no width and carries the training label mean.
class KernelSpec {
public:
    static KernelSpec epanechnikov(double width);
    static KernelSpec gaussian(double width);
    static KernelSpec label_correlation(Eigen::VectorXd label_mean);

    KernelKind kind() const { return kind_; }
    /// NaN for LabelCorrelation.
    double width() const { return width_; }
    const std::optional<Eigen::VectorXd>& label_mean() const { return label_mean_; }

    /// Value of the kernel as a function of the squared distance. Not
    /// defined for LabelCorrelation.
    double from_squared_distance(double sq_dist) const;

private:
    KernelSpec(KernelKind kind, double width, std::optional<Eigen::VectorXd> mean)
        : kind_(kind), width_(width), label_mean_(std::move(mean)) {}

    KernelKind kind_;
    double width_;
    std::optional<Eigen::VectorXd> label_mean_;
};

double epanechnikov(const Eigen::Ref<const Eigen::VectorXd>& u,
                    const Eigen::Ref<const Eigen::VectorXd>& v, double sigma);

double gaussian(const Eigen::Ref<const Eigen::VectorXd>& u,
                const Eigen::Ref<const Eigen::VectorXd>& v, double sigma);

/// Cosine of (y - mean) and (y2 - mean). Throws if either centered vector is zero.
double label_correlation(const Eigen::Ref<const Eigen::VectorXd>& y,
                         const Eigen::Ref<const Eigen::VectorXd>& y2,
                         const Eigen::Ref<const Eigen::VectorXd>& mean);

/// Pairwise squared Euclidean distances between rows, evaluated entry by
/// entry as |a_i - b_j|^2 (no norm expansion, so the result is exactly
/// symmetric when a == b).
Eigen::MatrixXd squared_distances(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                  const Eigen::Ref<const Eigen::MatrixXd>& b);

/// Applies a distance-based kernel elementwise to a squared-distance matrix.
Eigen::MatrixXd apply_kernel(const Eigen::MatrixXd& sq_dist, const KernelSpec& spec);

/// Entry (i, j) is k(points_a.row(i), points_b.row(j)).
Eigen::MatrixXd gram(const Eigen::Ref<const Eigen::MatrixXd>& points_a,
                     const Eigen::Ref<const Eigen::MatrixXd>& points_b,
                     const KernelSpec& spec);

inline constexpr std::size_t kDefaultMedianSampleCap = 1000;

/// Median Euclidean distance over all pairs among min(n, sample_cap) rows.
/// When n exceeds the cap the rows are a uniform subsample drawn from `seed`.
double median_pairwise_distance(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                std::size_t sample_cap = kDefaultMedianSampleCap,
                                std::uint64_t seed = 0);

}  // namespace sca::kernels
