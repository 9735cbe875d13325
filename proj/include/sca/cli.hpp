#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sca/datasets.hpp"

namespace sca::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitUsage = 2;

struct GenDataOptions {
    datasets::Benchmark which = datasets::Benchmark::Data1;
    Eigen::Index n = 1000;
    std::uint64_t seed = 0;
    double noise_scale = 1.0;
    bool data4_abs_threshold = false;
    std::filesystem::path out_x;
    std::filesystem::path out_y;
};

struct FitOptions {
    std::filesystem::path x_path;
    std::filesystem::path y_path;
    Eigen::Index m = 1;
    double tol = 1e-6;
    int max_iters = 100;
    std::uint64_t seed = 0;
    int folds = 5;
    /// Empty means the built-in median-relative defaults.
    std::vector<double> sigma_z_multipliers;
    std::vector<double> sigma_y_multipliers;
    std::vector<double> lambdas;
    bool reselect_each_iter = true;
    std::size_t max_centers = 0;
    std::string kernel_y = "gaussian";
    bool verbose = false;
    std::filesystem::path model_out;
};

struct TransformOptions {
    std::filesystem::path model_path;
    std::filesystem::path x_path;
    std::filesystem::path out_path;
};

enum class Method { Sca, Sca0, Sir };

struct BenchmarkOptions {
    std::vector<datasets::Benchmark> datasets{datasets::Benchmark::Data1, datasets::Benchmark::Data2,
                                              datasets::Benchmark::Data3, datasets::Benchmark::Data4};
    std::vector<Method> methods{Method::Sca0, Method::Sca, Method::Sir};
    Eigen::Index n = 1000;
    int trials = 20;
    std::uint64_t seed = 0;
    std::size_t max_centers = 300;
    bool reselect_each_iter = true;
    int sir_slices = 10;
    /// Write mean_seconds as 0 so repeated runs are byte-identical.
    bool no_timing = false;
    std::filesystem::path out_csv;
    /// Defaults to <out_csv stem>.summary.csv next to out_csv.
    std::optional<std::filesystem::path> summary_csv;
};

struct BenchmarkRow {
    datasets::Benchmark dataset;
    Method method;
    int trial;
    std::uint64_t seed;
    double error;  // NaN when the trial failed
    double seconds;
};

struct BenchmarkSummary {
    datasets::Benchmark dataset;
    Method method;
    Eigen::Index n;
    int trials;
    double mean_error;
    double std_error;
    double mean_seconds;
};

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

int cmd_gen_data(const GenDataOptions& options, std::ostream& err);
int cmd_fit(const FitOptions& options, std::ostream& out, std::ostream& err);
int cmd_transform(const TransformOptions& options, std::ostream& err);
int cmd_benchmark(const BenchmarkOptions& options, std::ostream& out, std::ostream& err);

/// Runs every (dataset, trial, method) combination; rows come back in
/// (dataset, method, trial) order.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkOptions& options, std::ostream* progress = nullptr);
std::vector<BenchmarkSummary> summarize(const BenchmarkOptions& options, const std::vector<BenchmarkRow>& rows);

/// Full command-line entry point: parses `args` (without the program name)
/// and dispatches. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sca::cli
