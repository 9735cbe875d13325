#include "sca/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sca/random.hpp"

namespace sca::kernels {

namespace {

void check_width(double width) {
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw std::invalid_argument("kernel width must be positive and finite, got " +
                                    std::to_string(width));
    }
}

void check_same_length(Eigen::Index a, Eigen::Index b) {
    if (a != b) {
        throw std::invalid_argument("kernel arguments differ in dimension (" + std::to_string(a) +
                                    " vs " + std::to_string(b) + ")");
    }
}

// Rows of (y - mean) scaled to unit norm.
Eigen::MatrixXd normalized_centered(const Eigen::Ref<const Eigen::MatrixXd>& y,
                                    const Eigen::VectorXd& mean) {
    Eigen::MatrixXd centered = y.rowwise() - mean.transpose();
    for (Eigen::Index i = 0; i < centered.rows(); ++i) {
        const double norm = centered.row(i).norm();
        if (norm == 0.0) {
            throw std::invalid_argument("label_correlation: label vector " + std::to_string(i) +
                                        " equals the label mean");
        }
        centered.row(i) /= norm;
    }
    return centered;
}

}  // namespace

std::string_view to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::Epanechnikov: return "epanechnikov";
        case KernelKind::Gaussian: return "gaussian";
        case KernelKind::LabelCorrelation: return "label_correlation";
    }
    return "unknown";
}

KernelSpec KernelSpec::epanechnikov(double width) {
    check_width(width);
    return KernelSpec(KernelKind::Epanechnikov, width, std::nullopt);
}

KernelSpec KernelSpec::gaussian(double width) {
    check_width(width);
    return KernelSpec(KernelKind::Gaussian, width, std::nullopt);
}

KernelSpec KernelSpec::label_correlation(Eigen::VectorXd label_mean) {
    if (label_mean.size() == 0 || !label_mean.allFinite()) {
        throw std::invalid_argument("label_correlation kernel needs a finite, nonempty label mean");
    }
    return KernelSpec(KernelKind::LabelCorrelation, std::numeric_limits<double>::quiet_NaN(),
                      std::move(label_mean));
}

double KernelSpec::from_squared_distance(double sq_dist) const {
    switch (kind_) {
        case KernelKind::Epanechnikov:
            return std::max(0.0, 1.0 - sq_dist / (2.0 * width_ * width_));
        case KernelKind::Gaussian:
            return std::exp(-sq_dist / (2.0 * width_));
        case KernelKind::LabelCorrelation:
            break;
    }
    throw std::logic_error("label_correlation is not a function of distance");
}

double epanechnikov(const Eigen::Ref<const Eigen::VectorXd>& u,
                    const Eigen::Ref<const Eigen::VectorXd>& v, double sigma) {
    check_same_length(u.size(), v.size());
    return KernelSpec::epanechnikov(sigma).from_squared_distance((u - v).squaredNorm());
}

double gaussian(const Eigen::Ref<const Eigen::VectorXd>& u,
                const Eigen::Ref<const Eigen::VectorXd>& v, double sigma) {
    check_same_length(u.size(), v.size());
    return KernelSpec::gaussian(sigma).from_squared_distance((u - v).squaredNorm());
}

double label_correlation(const Eigen::Ref<const Eigen::VectorXd>& y,
                         const Eigen::Ref<const Eigen::VectorXd>& y2,
                         const Eigen::Ref<const Eigen::VectorXd>& mean) {
    check_same_length(y.size(), y2.size());
    check_same_length(y.size(), mean.size());
    const Eigen::VectorXd a = y - mean;
    const Eigen::VectorXd b = y2 - mean;
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        throw std::invalid_argument("label_correlation: degenerate label vector (equals the mean)");
    }
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

Eigen::MatrixXd squared_distances(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                  const Eigen::Ref<const Eigen::MatrixXd>& b) {
    check_same_length(a.cols(), b.cols());
    Eigen::MatrixXd out(a.rows(), b.rows());
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            out(i, j) = (a.row(i) - b.row(j)).squaredNorm();
        }
    }
    return out;
}

Eigen::MatrixXd apply_kernel(const Eigen::MatrixXd& sq_dist, const KernelSpec& spec) {
    return sq_dist.unaryExpr([&spec](double s) { return spec.from_squared_distance(s); });
}

Eigen::MatrixXd gram(const Eigen::Ref<const Eigen::MatrixXd>& points_a,
                     const Eigen::Ref<const Eigen::MatrixXd>& points_b,
                     const KernelSpec& spec) {
    check_same_length(points_a.cols(), points_b.cols());
    if (spec.kind() == KernelKind::LabelCorrelation) {
        const Eigen::VectorXd& mean = *spec.label_mean();
        check_same_length(points_a.cols(), mean.size());
        const Eigen::MatrixXd na = normalized_centered(points_a, mean);
        const Eigen::MatrixXd nb = normalized_centered(points_b, mean);
        Eigen::MatrixXd out(na.rows(), nb.rows());
        for (Eigen::Index j = 0; j < nb.rows(); ++j) {
            for (Eigen::Index i = 0; i < na.rows(); ++i) {
                out(i, j) = std::clamp(na.row(i).dot(nb.row(j)), -1.0, 1.0);
            }
        }
        return out;
    }
    return apply_kernel(squared_distances(points_a, points_b), spec);
}

double median_pairwise_distance(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                std::size_t sample_cap, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (n < 2) throw std::invalid_argument("median_pairwise_distance needs at least 2 rows");
    if (sample_cap < 2) throw std::invalid_argument("median_pairwise_distance: sample_cap < 2");

    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    if (n > sample_cap) {
        Engine engine = make_engine(seed, streams::kMedian);
        rows = seeded_permutation(n, engine);
        rows.resize(sample_cap);
        std::sort(rows.begin(), rows.end());
    }

    std::vector<double> dist;
    dist.reserve(rows.size() * (rows.size() - 1) / 2);
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = a + 1; b < rows.size(); ++b) {
            const auto ia = static_cast<Eigen::Index>(rows[a]);
            const auto ib = static_cast<Eigen::Index>(rows[b]);
            dist.push_back((points.row(ia) - points.row(ib)).norm());
        }
    }
    if (*std::max_element(dist.begin(), dist.end()) == 0.0) {
        throw std::invalid_argument("median_pairwise_distance: all rows are identical");
    }

    const std::size_t mid = dist.size() / 2;
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
    double median = dist[mid];
    if (dist.size() % 2 == 0) {
        const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (lower + median);
    }
    if (median == 0.0) {
        // More than half the pairs coincide; fall back to the smallest positive distance.
        double smallest = std::numeric_limits<double>::infinity();
        for (double d : dist) {
            if (d > 0.0) smallest = std::min(smallest, d);
        }
        median = smallest;
    }
    return median;
}

}  // namespace sca::kernels
