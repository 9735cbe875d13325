#include "sca/sca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace sca {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Projection::Projection(MatrixXd w, double tolerance) : w_(std::move(w)) {
    if (w_.rows() < 1 || w_.cols() < 1) throw std::invalid_argument("Projection: empty matrix");
    if (w_.rows() > w_.cols()) {
        throw std::invalid_argument("Projection: m = " + std::to_string(w_.rows()) +
                                    " exceeds d = " + std::to_string(w_.cols()));
    }
    if (!w_.allFinite()) throw std::invalid_argument("Projection: non-finite entries");
    const double defect = orthonormality_defect();
    if (!(defect <= tolerance)) {
        throw std::invalid_argument("Projection: rows are not orthonormal (max |WW^T - I| = " +
                                    std::to_string(defect) + ")");
    }
}

Projection Projection::from_row_space(const Eigen::Ref<const MatrixXd>& rows) {
    if (rows.rows() < 1 || rows.rows() > rows.cols()) {
        throw std::invalid_argument("Projection::from_row_space: need 1 <= m <= d");
    }
    Eigen::HouseholderQR<MatrixXd> qr(rows.transpose());
    const MatrixXd r = qr.matrixQR().topRows(rows.rows()).triangularView<Eigen::Upper>();
    const double scale = std::max(r.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if ((r.diagonal().cwiseAbs().array() <= 1e-12 * scale).any()) {
        throw std::invalid_argument("Projection::from_row_space: rows are linearly dependent");
    }
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(rows.cols(), rows.rows());
    return Projection(q.transpose());
}

Projection Projection::identity(Index d) { return Projection(MatrixXd::Identity(d, d)); }

double Projection::orthonormality_defect() const {
    return (w_ * w_.transpose() - MatrixXd::Identity(w_.rows(), w_.rows())).cwiseAbs().maxCoeff();
}

void ScaConfig::validate() const {
    if (m < 1) throw std::invalid_argument("ScaConfig: m must be at least 1");
    if (!(tol > 0.0)) throw std::invalid_argument("ScaConfig: tol must be positive");
    if (max_iters < 1) throw std::invalid_argument("ScaConfig: max_iters must be at least 1");
    if (kernel_y == kernels::KernelKind::Epanechnikov) {
        throw std::invalid_argument("ScaConfig: output kernel must be gaussian or label_correlation");
    }
}

DMatrix assemble_d_matrix(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const MatrixXd>& y,
                          const Eigen::Ref<const MatrixXd>& support_coords,
                          const std::vector<Index>& centers, const Eigen::Ref<const VectorXd>& alpha,
                          Index m, double sigma, const kernels::KernelSpec& kernel_y,
                          bool clip_negative_alpha) {
    const Index n = x.rows();
    const Index d = x.cols();
    const auto b = static_cast<Index>(centers.size());
    if (n == 0) throw std::invalid_argument("compute_d_matrix: no samples");
    if (y.rows() != n || support_coords.rows() != n) {
        throw std::invalid_argument("compute_d_matrix: X, Y and Z row counts differ");
    }
    if (alpha.size() != b) {
        throw std::invalid_argument("compute_d_matrix: alpha has " + std::to_string(alpha.size()) +
                                    " entries for " + std::to_string(b) + " centers");
    }
    if (m < 1 || m > d) throw std::invalid_argument("compute_d_matrix: need 1 <= m <= d");
    if (!(sigma > 0.0)) throw std::invalid_argument("compute_d_matrix: sigma must be positive");
    for (Index c : centers) {
        if (c < 0 || c >= n) throw std::invalid_argument("compute_d_matrix: center index out of range");
    }

    const MatrixXd y_centers = y(centers, Eigen::all);
    const MatrixXd l = kernels::gram(y, y_centers, kernel_y);
    const double two_sigma_sq = 2.0 * sigma * sigma;

    DMatrix out;
    MatrixXd scatter = MatrixXd::Zero(d, d);
    double weight_sum = 0.0;
    MatrixXd diffs(b, d);
    VectorXd weights(b);
    for (Index i = 0; i < n; ++i) {
        Index active = 0;
        for (Index p = 0; p < b; ++p) {
            const Index c = centers[static_cast<std::size_t>(p)];
            const double sq = (support_coords.row(i) - support_coords.row(c)).squaredNorm();
            if (!(sq / two_sigma_sq < 1.0)) continue;
            if (c != i) ++out.off_diagonal_pairs;
            const double w = (clip_negative_alpha ? std::max(alpha(p), 0.0) : alpha(p)) * l(i, p);
            weight_sum += w;
            diffs.row(active) = x.row(i) - x.row(c);
            weights(active) = w;
            ++active;
        }
        if (active > 0) {
            scatter.noalias() += diffs.topRows(active).transpose() *
                                 weights.head(active).asDiagonal() * diffs.topRows(active);
        }
    }
    scatter = 0.5 * (scatter + scatter.transpose()).eval();

    out.d = (weight_sum / static_cast<double>(m)) * MatrixXd::Identity(d, d) - scatter / two_sigma_sq;
    out.d /= static_cast<double>(n);
    return out;
}

MatrixXd compute_d_matrix(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const MatrixXd>& y,
                          const Eigen::Ref<const VectorXd>& alpha, const Projection& w,
                          double sigma_z, const kernels::KernelSpec& kernel_y, bool clip_negative_alpha) {
    if (x.cols() != w.d()) throw std::invalid_argument("compute_d_matrix: X columns differ from W");
    std::vector<Index> centers(static_cast<std::size_t>(x.rows()));
    std::iota(centers.begin(), centers.end(), Index{0});
    const MatrixXd z = transform(x, w);
    return assemble_d_matrix(x, y, z, centers, alpha, w.m(), sigma_z, kernel_y, clip_negative_alpha).d;
}

PrincipalSubspace maximize_trace(const Eigen::Ref<const MatrixXd>& d, Index m) {
    if (d.rows() != d.cols()) throw std::invalid_argument("maximize_trace: D is not square");
    if (m < 1 || m > d.rows()) throw std::invalid_argument("maximize_trace: need 1 <= m <= d");
    if (!d.allFinite()) throw std::invalid_argument("maximize_trace: D has non-finite entries");

    const MatrixXd sym = 0.5 * (d + d.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success) throw std::runtime_error("maximize_trace: eigensolver failed");

    MatrixXd vectors = eig.eigenvectors();
    const VectorXd& values = eig.eigenvalues();
    const Index dim = sym.rows();
    for (Index k = 0; k < dim; ++k) {
        Index arg = 0;
        vectors.col(k).cwiseAbs().maxCoeff(&arg);
        if (vectors(arg, k) < 0.0) vectors.col(k) = -vectors.col(k);
    }

    std::vector<Index> order(static_cast<std::size_t>(dim));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (values(a) != values(b)) return values(a) > values(b);
        for (Index r = 0; r < dim; ++r) {
            if (vectors(r, a) != vectors(r, b)) return vectors(r, a) > vectors(r, b);
        }
        return a < b;
    });

    MatrixXd w(m, dim);
    VectorXd sorted(dim);
    double trace = 0.0;
    for (Index k = 0; k < dim; ++k) {
        const Index src = order[static_cast<std::size_t>(k)];
        sorted(k) = values(src);
        if (k < m) {
            w.row(k) = vectors.col(src).transpose();
            trace += values(src);
        }
    }
    return PrincipalSubspace{Projection(std::move(w)), trace, std::move(sorted)};
}

namespace {

void check_fit_inputs(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const MatrixXd>& y,
                      const ScaConfig& config) {
    config.validate();
    if (x.rows() < 2) throw std::invalid_argument("sca: need at least 2 samples");
    if (y.rows() != x.rows()) {
        throw std::invalid_argument("sca: X has " + std::to_string(x.rows()) + " rows but Y has " +
                                    std::to_string(y.rows()));
    }
    if (config.m > x.cols()) {
        throw std::invalid_argument("sca: m = " + std::to_string(config.m) + " exceeds d = " +
                                    std::to_string(x.cols()));
    }
    if (x.rows() < config.grid.folds) throw std::invalid_argument("sca: fewer samples than folds");
    if (!x.allFinite() || !y.allFinite()) throw std::invalid_argument("sca: non-finite input");
}

lsmi::LsmiOptions lsmi_options(const ScaConfig& config) {
    return lsmi::LsmiOptions{kernels::KernelKind::Epanechnikov, config.kernel_y, config.max_centers};
}

}  // namespace

Initialization initialize(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const MatrixXd>& y,
                          const ScaConfig& config) {
    check_fit_inputs(x, y, config);
    const lsmi::LsmiOptions options = lsmi_options(config);
    const lsmi::CvReport x_report = lsmi::cross_validate(x, y, config.grid, config.seed, options);

    // The input-space CV score favours wide kernels whose D^(0) carries little
    // directional information, so every sigma_x candidate is projected and the
    // projection itself is scored by held-out LSMI in the reduced space.
    std::vector<double> widths;
    for (const auto& c : x_report.candidates) {
        if (widths.empty() || widths.back() != c.hypers.sigma_z) widths.push_back(c.hypers.sigma_z);
    }

    std::optional<Initialization> best;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<double> scores;
    for (double width : widths) {
        lsmi::CvReport sub;
        double sub_best = std::numeric_limits<double>::infinity();
        for (const auto& c : x_report.candidates) {
            if (c.hypers.sigma_z != width) continue;
            if (sub.candidates.empty() || c.score < sub_best) {
                sub_best = c.score;
                sub.selected = sub.candidates.size();
            }
            sub.candidates.push_back(c);
        }
        lsmi::LsmiFit candidate = lsmi::fit_selected(x, y, std::move(sub), config.seed, options);
        const DMatrix d0 = assemble_d_matrix(x, y, x, candidate.model.center_indices,
                                             candidate.model.alpha, config.m, width,
                                             candidate.model.kernel_y, config.clip_negative_alpha);
        Projection w0 = maximize_trace(d0.d, config.m).projection;

        const MatrixXd z = transform(x, w0);
        const lsmi::Hyperparameters& h = candidate.report.best().hypers;
        lsmi::HyperGrid z_grid = lsmi::resolve_grid(config.grid, z, y, config.seed, options);
        z_grid.sigma_y = {h.sigma_y};
        z_grid.lambda = {h.lambda};
        const double score = lsmi::cross_validate(z, y, z_grid, config.seed, options).best().score;
        scores.push_back(score);
        if (!best || score < best_score) {
            best_score = score;
            best.emplace(Initialization{std::move(w0), std::move(candidate), {}});
        }
    }
    best->width_scores = std::move(scores);
    return std::move(*best);
}

ScaResult fit(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const MatrixXd>& y,
              const ScaConfig& config) {
    Initialization init = initialize(x, y, config);
    FitTrace trace;
    trace.initial_smi = init.lsmi.smi;
    const lsmi::Hyperparameters init_hypers = init.lsmi.report.best().hypers;

    if (config.m == x.cols()) {
        trace.converged = true;
        return ScaResult{init.projection, init.projection, std::move(trace), init_hypers};
    }

    const lsmi::LsmiOptions options = lsmi_options(config);
    lsmi::HyperGrid grid = config.grid;
    Projection current = init.projection;
    Projection best = init.projection;
    lsmi::Hyperparameters best_hypers = init_hypers;
    double best_smi = -std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < config.max_iters; ++iter) {
        const MatrixXd z = transform(x, current);
        const lsmi::LsmiFit est = lsmi::fit(z, y, grid, config.seed, options);
        const lsmi::Hyperparameters hypers = est.report.best().hypers;

        trace.smi_per_iter.push_back(est.smi);
        trace.selected_hypers_per_iter.push_back(hypers);
        trace.iters = iter + 1;
        if (est.smi > best_smi) {
            best_smi = est.smi;
            best = current;
            best_hypers = hypers;
            trace.best_iter = iter;
        }
        if (iter > 0 && est.smi - trace.smi_per_iter[trace.smi_per_iter.size() - 2] < config.tol) {
            trace.degenerate_per_iter.push_back(false);
            trace.converged = true;
            break;
        }
        if (iter == 0 && !config.reselect_each_iter) {
            grid = lsmi::HyperGrid::fixed(hypers.sigma_z, hypers.sigma_y, hypers.lambda, config.grid.folds);
        }

        const DMatrix d_prime = assemble_d_matrix(x, y, z, est.model.center_indices, est.model.alpha,
                                                  config.m, hypers.sigma_z, est.model.kernel_y,
                                                  config.clip_negative_alpha);
        const bool degenerate = d_prime.off_diagonal_pairs == 0;
        trace.degenerate_per_iter.push_back(degenerate);
        if (!degenerate) current = maximize_trace(d_prime.d, config.m).projection;
    }

    return ScaResult{std::move(best), std::move(init.projection), std::move(trace), best_hypers};
}

MatrixXd transform(const Eigen::Ref<const MatrixXd>& x, const Projection& projection) {
    if (x.cols() != projection.d()) {
        throw std::invalid_argument("transform: X has " + std::to_string(x.cols()) +
                                    " columns, projection expects " + std::to_string(projection.d()));
    }
    return x * projection.matrix().transpose();
}

}  // namespace sca
