#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "sca/lsmi.hpp"

namespace sca::io {

/// Headerless comma-separated numeric matrix, one row per line. Throws
/// std::runtime_error on I/O failure, ragged rows or non-finite values.
Eigen::MatrixXd read_csv(const std::filesystem::path& path);

/// Writes with 17 significant digits so values survive a round trip.
void write_csv(const std::filesystem::path& path, const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Persisted projection plus the settings that produced it.
struct ModelFile {
    static constexpr int kSchemaVersion = 1;

    int schema_version = kSchemaVersion;
    Eigen::MatrixXd w;
    lsmi::Hyperparameters hypers{};
    std::string kernel_y = "gaussian";
    std::uint64_t seed = 0;
    int iterations = 0;
    bool converged = false;
    double final_smi = 0.0;
};

std::string serialize(const ModelFile& model);
ModelFile deserialize(const std::string& text);

void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace sca::io
