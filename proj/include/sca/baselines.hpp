#pragma once

#include <Eigen/Dense>

#include "sca/sca.hpp"

namespace sca::baselines {

struct SirConfig {
    int slices = 10;
    Eigen::Index m = 1;
};

/// Sliced inverse regression: slice y into equal-frequency groups, take the
/// slice means of whitened X and return the leading eigen-directions of their
/// weighted scatter, mapped back to the original coordinates.
Projection sir_fit(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::MatrixXd>& y,
                   const SirConfig& config);

}  // namespace sca::baselines
