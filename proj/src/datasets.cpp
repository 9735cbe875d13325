#include "sca/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "sca/random.hpp"

namespace sca::datasets {

namespace {

using Eigen::Index;

std::vector<Index> active_coordinates(Benchmark which) {
    switch (which) {
        case Benchmark::Data1: return {1};
        case Benchmark::Data2: return {2};
        case Benchmark::Data3: return {0, 1};
        case Benchmark::Data4: return {1};
    }
    return {};
}

enum class InputLaw { Uniform1, StandardNormal, UniformHalf };

InputLaw input_law(Benchmark which) {
    switch (which) {
        case Benchmark::Data1: return InputLaw::Uniform1;
        case Benchmark::Data2:
        case Benchmark::Data3: return InputLaw::StandardNormal;
        case Benchmark::Data4: return InputLaw::UniformHalf;
    }
    return InputLaw::StandardNormal;
}

// One column drawn from its own stream, so resampling one column never shifts another.
Eigen::VectorXd draw_column(InputLaw law, Index n, std::uint64_t seed, Index column) {
    Engine engine = make_engine(seed, streams::kDataColumnBase + static_cast<std::uint64_t>(column));
    Eigen::VectorXd out(n);
    switch (law) {
        case InputLaw::Uniform1: {
            std::uniform_real_distribution<double> dist(-1.0, 1.0);
            for (Index i = 0; i < n; ++i) out(i) = dist(engine);
            break;
        }
        case InputLaw::UniformHalf: {
            std::uniform_real_distribution<double> dist(-0.5, 0.5);
            for (Index i = 0; i < n; ++i) out(i) = dist(engine);
            break;
        }
        case InputLaw::StandardNormal: {
            std::normal_distribution<double> dist(0.0, 1.0);
            for (Index i = 0; i < n; ++i) out(i) = dist(engine);
            break;
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(Benchmark which) {
    switch (which) {
        case Benchmark::Data1: return "data1";
        case Benchmark::Data2: return "data2";
        case Benchmark::Data3: return "data3";
        case Benchmark::Data4: return "data4";
    }
    return "unknown";
}

Benchmark parse_benchmark(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (Benchmark b : {Benchmark::Data1, Benchmark::Data2, Benchmark::Data3, Benchmark::Data4}) {
        if (lower == to_string(b)) return b;
    }
    throw std::invalid_argument("unknown dataset '" + std::string(name) + "' (expected data1..data4)");
}

Index input_dim(Benchmark which) {
    switch (which) {
        case Benchmark::Data1: return 4;
        case Benchmark::Data2: return 10;
        case Benchmark::Data3: return 4;
        case Benchmark::Data4: return 5;
    }
    return 0;
}

Index true_dim(Benchmark which) { return which == Benchmark::Data3 ? 2 : 1; }

SyntheticData generate(const SyntheticSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("generate: n must be at least 1");
    const Index n = spec.n;
    const Index d = input_dim(spec.which);
    const std::vector<Index> active = active_coordinates(spec.which);
    const InputLaw law = input_law(spec.which);

    SyntheticData data;
    data.x.resize(n, d);
    for (Index j = 0; j < d; ++j) {
        const bool is_active = std::find(active.begin(), active.end(), j) != active.end();
        const std::uint64_t seed = (!is_active && spec.nuisance_seed) ? *spec.nuisance_seed : spec.seed;
        data.x.col(j) = draw_column(law, n, seed, j);
    }

    data.w_star = Eigen::MatrixXd::Zero(static_cast<Index>(active.size()), d);
    for (std::size_t r = 0; r < active.size(); ++r) data.w_star(static_cast<Index>(r), active[r]) = 1.0;

    Engine noise_engine = make_engine(spec.seed, streams::kDataNoise);
    std::normal_distribution<double> std_normal(0.0, 1.0);
    Eigen::VectorXd noise(n);
    for (Index i = 0; i < n; ++i) noise(i) = spec.noise_scale * std_normal(noise_engine);

    data.y.resize(n, 1);
    const auto& x = data.x;
    switch (spec.which) {
        case Benchmark::Data1:
            data.y.col(0) = x.col(1) + 0.5 * noise;
            break;
        case Benchmark::Data2:
            data.y.col(0) = x.col(2).array().square().matrix() + 0.1 * noise;
            break;
        case Benchmark::Data3:
            for (Index i = 0; i < n; ++i) {
                const double x1 = x(i, 0);
                const double x2 = x(i, 1);
                data.y(i, 0) = (x1 * x1 + x2) / (0.5 + (x2 + 1.5) * (x2 + 1.5)) + (1.0 + x2) * (1.0 + x2) +
                               0.1 * noise(i);
            }
            break;
        case Benchmark::Data4: {
            // Variance 0.2 in both branches; the mixture picks +1 or -1 with equal odds.
            Engine mix_engine = make_engine(spec.seed, streams::kDataMixture);
            std::normal_distribution<double> mix_normal(0.0, 1.0);
            std::bernoulli_distribution coin(0.5);
            const double sd = std::sqrt(0.2);
            for (Index i = 0; i < n; ++i) {
                const double x2 = x(i, 1);
                const bool central = spec.data4_abs_threshold ? std::abs(x2) <= 1.0 / 6.0 : x2 <= 1.0 / 6.0;
                const double draw = mix_normal(mix_engine);
                const bool positive = coin(mix_engine);
                const double mean = central ? 0.0 : (positive ? 1.0 : -1.0);
                data.y(i, 0) = mean + sd * draw;
            }
            break;
        }
    }
    return data;
}

}  // namespace sca::datasets
