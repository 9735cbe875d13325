#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace sca::datasets {

enum class Benchmark { Data1, Data2, Data3, Data4 };

std::string_view to_string(Benchmark which);
/// Accepts "data1".."data4" (case-insensitive). Throws std::invalid_argument otherwise.
Benchmark parse_benchmark(std::string_view name);

struct SyntheticSpec {
    Benchmark which = Benchmark::Data1;
    Eigen::Index n = 1000;
    std::uint64_t seed = 0;
    /// Multiplier on the additive noise term E (1 = as published, 0 = noiseless).
    double noise_scale = 1.0;
    /// Data4 branch test: false reads "X2 <= |1/6|" literally, true uses |X2| <= 1/6.
    bool data4_abs_threshold = false;
    /// If set, coordinates outside the true subspace are drawn from this seed
    /// instead of `seed`; active coordinates and noise are unaffected.
    std::optional<std::uint64_t> nuisance_seed;
};

struct SyntheticData {
    Eigen::MatrixXd x;       // n x d
    Eigen::MatrixXd y;       // n x 1
    Eigen::MatrixXd w_star;  // m x d, rows are standard basis vectors
};

Eigen::Index input_dim(Benchmark which);
Eigen::Index true_dim(Benchmark which);

SyntheticData generate(const SyntheticSpec& spec);

}  // namespace sca::datasets
