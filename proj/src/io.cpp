#include "sca/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace sca::io {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_cell(const std::string& raw, const std::filesystem::path& path, std::size_t line,
                  std::size_t column) {
    const std::string cell = trim(raw);
    const auto where = [&] {
        return path.string() + ":" + std::to_string(line) + " column " + std::to_string(column);
    };
    if (cell.empty()) throw std::runtime_error("empty field at " + where());
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || errno == ERANGE) {
        throw std::runtime_error("not a number '" + cell + "' at " + where());
    }
    if (!std::isfinite(value)) throw std::runtime_error("non-finite value '" + cell + "' at " + where());
    return value;
}

double json_number(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Eigen::MatrixXd read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(parse_cell(cell, path, line_no, row.size() + 1));
        if (!line.empty() && line.back() == ',') row.push_back(parse_cell("", path, line_no, row.size() + 1));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::runtime_error("ragged CSV: " + path.string() + ":" + std::to_string(line_no) + " has " +
                                     std::to_string(row.size()) + " fields, expected " +
                                     std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    if (in.bad()) throw std::runtime_error("read error on " + path.string());
    if (rows.empty()) throw std::runtime_error("no data rows in " + path.string());

    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
}

void write_csv(const std::filesystem::path& path, const Eigen::Ref<const Eigen::MatrixXd>& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
    out.flush();
    if (!out) throw std::runtime_error("write error on " + path.string());
}

std::string serialize(const ModelFile& model) {
    json w = json::array();
    for (Eigen::Index i = 0; i < model.w.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < model.w.cols(); ++j) row.push_back(model.w(i, j));
        w.push_back(std::move(row));
    }
    const json doc = {
        {"schema_version", model.schema_version},
        {"m", model.w.rows()},
        {"d", model.w.cols()},
        {"W", std::move(w)},
        {"hyperparameters",
         {{"sigma_z", number_or_null(model.hypers.sigma_z)},
          {"sigma_y", number_or_null(model.hypers.sigma_y)},
          {"lambda", number_or_null(model.hypers.lambda)},
          {"kernel_y", model.kernel_y}}},
        {"fit",
         {{"seed", model.seed},
          {"iterations", model.iterations},
          {"converged", model.converged},
          {"final_smi", number_or_null(model.final_smi)}}},
    };
    return doc.dump(2) + "\n";
}

ModelFile deserialize(const std::string& text) {
    try {
        const json doc = json::parse(text);
        ModelFile model;
        model.schema_version = doc.at("schema_version").get<int>();
        if (model.schema_version != ModelFile::kSchemaVersion) {
            throw std::runtime_error("unsupported model schema_version " + std::to_string(model.schema_version));
        }
        const auto m = doc.at("m").get<Eigen::Index>();
        const auto d = doc.at("d").get<Eigen::Index>();
        const json& w = doc.at("W");
        if (m < 1 || d < 1 || static_cast<Eigen::Index>(w.size()) != m) {
            throw std::runtime_error("model W does not match its declared shape");
        }
        model.w.resize(m, d);
        for (Eigen::Index i = 0; i < m; ++i) {
            const json& row = w.at(static_cast<std::size_t>(i));
            if (static_cast<Eigen::Index>(row.size()) != d) throw std::runtime_error("model W row has wrong length");
            for (Eigen::Index j = 0; j < d; ++j) model.w(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
        }
        const json& hp = doc.at("hyperparameters");
        model.hypers = {json_number(hp.at("sigma_z")), json_number(hp.at("sigma_y")), json_number(hp.at("lambda"))};
        model.kernel_y = hp.value("kernel_y", std::string("gaussian"));
        const json& fit = doc.at("fit");
        model.seed = fit.at("seed").get<std::uint64_t>();
        model.iterations = fit.at("iterations").get<int>();
        model.converged = fit.at("converged").get<bool>();
        model.final_smi = json_number(fit.at("final_smi"));
        return model;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << serialize(model);
    out.flush();
    if (!out) throw std::runtime_error("write error on " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return deserialize(buffer.str());
}

}  // namespace sca::io
