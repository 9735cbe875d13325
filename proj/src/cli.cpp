#include "sca/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <tuple>
#include <sstream>

#include <CLI11.hpp>

#include "sca/baselines.hpp"
#include "sca/io.hpp"
#include "sca/metrics.hpp"
#include "sca/sca.hpp"

namespace sca::cli {

namespace {

using Clock = std::chrono::steady_clock;

kernels::KernelKind parse_output_kernel(const std::string& name) {
    if (name == "gaussian") return kernels::KernelKind::Gaussian;
    if (name == "label_correlation") return kernels::KernelKind::LabelCorrelation;
    throw std::invalid_argument("unknown output kernel '" + name + "'");
}

std::filesystem::path default_summary_path(const std::filesystem::path& out_csv) {
    std::filesystem::path p = out_csv;
    p.replace_extension();
    return p.string() + ".summary.csv";
}

Projection run_method(Method method, const datasets::SyntheticData& data, const BenchmarkOptions& options,
                      std::uint64_t seed) {
    const Eigen::Index m = data.w_star.rows();
    ScaConfig config;
    config.m = m;
    config.seed = seed;
    config.max_centers = options.max_centers;
    config.reselect_each_iter = options.reselect_each_iter;
    switch (method) {
        case Method::Sca0: return initialize(data.x, data.y, config).projection;
        case Method::Sca: return fit(data.x, data.y, config).projection;
        case Method::Sir: return baselines::sir_fit(data.x, data.y, {options.sir_slices, m});
    }
    throw std::logic_error("unknown method");
}

std::string format_double(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

}  // namespace

std::string_view to_string(Method method) {
    switch (method) {
        case Method::Sca: return "sca";
        case Method::Sca0: return "sca0";
        case Method::Sir: return "sir";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    for (Method m : {Method::Sca, Method::Sca0, Method::Sir}) {
        if (name == to_string(m)) return m;
    }
    throw std::invalid_argument("unknown method '" + std::string(name) + "' (expected sca, sca0 or sir)");
}

int cmd_gen_data(const GenDataOptions& options, std::ostream& err) {
    try {
        datasets::SyntheticSpec spec;
        spec.which = options.which;
        spec.n = options.n;
        spec.seed = options.seed;
        spec.noise_scale = options.noise_scale;
        spec.data4_abs_threshold = options.data4_abs_threshold;
        const datasets::SyntheticData data = datasets::generate(spec);
        io::write_csv(options.out_x, data.x);
        io::write_csv(options.out_y, data.y);
        return kExitOk;
    } catch (const std::exception& e) {
        err << "gen-data: " << e.what() << '\n';
        return kExitRuntimeError;
    }
}

int cmd_fit(const FitOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const Eigen::MatrixXd x = io::read_csv(options.x_path);
        const Eigen::MatrixXd y = io::read_csv(options.y_path);
        if (x.rows() != y.rows()) {
            throw std::runtime_error("X has " + std::to_string(x.rows()) + " rows but Y has " +
                                     std::to_string(y.rows()));
        }
        if (options.m < 1 || options.m > x.cols()) {
            throw std::runtime_error("m = " + std::to_string(options.m) + " must lie in [1, " +
                                     std::to_string(x.cols()) + "]");
        }

        ScaConfig config;
        config.m = options.m;
        config.tol = options.tol;
        config.max_iters = options.max_iters;
        config.seed = options.seed;
        config.reselect_each_iter = options.reselect_each_iter;
        config.max_centers = options.max_centers;
        config.kernel_y = parse_output_kernel(options.kernel_y);
        config.grid.folds = options.folds;
        if (!options.sigma_z_multipliers.empty()) config.grid.sigma_z = options.sigma_z_multipliers;
        if (!options.sigma_y_multipliers.empty()) config.grid.sigma_y = options.sigma_y_multipliers;
        if (!options.lambdas.empty()) config.grid.lambda = options.lambdas;

        const ScaResult result = fit(x, y, config);
        if (options.verbose) {
            err << "initial SMI " << result.trace.initial_smi << '\n';
            for (std::size_t t = 0; t < result.trace.smi_per_iter.size(); ++t) {
                const auto& hp = result.trace.selected_hypers_per_iter[t];
                err << "iter " << t + 1 << " SMI " << result.trace.smi_per_iter[t] << " sigma_z " << hp.sigma_z
                    << " sigma_y " << hp.sigma_y << " lambda " << hp.lambda
                    << (result.trace.degenerate_per_iter[t] ? " (degenerate)" : "") << '\n';
            }
            err << (result.trace.converged ? "converged" : "stopped at max_iters") << " after "
                << result.trace.iters << " iterations\n";
        }

        io::ModelFile model;
        model.w = result.projection.matrix();
        model.hypers = result.hypers;
        model.kernel_y = options.kernel_y;
        model.seed = options.seed;
        model.iterations = result.trace.iters;
        model.converged = result.trace.converged;
        model.final_smi = result.trace.best_iter >= 0
                              ? result.trace.smi_per_iter[static_cast<std::size_t>(result.trace.best_iter)]
                              : result.trace.initial_smi;
        io::save_model(options.model_out, model);
        (void)out;
        return kExitOk;
    } catch (const std::exception& e) {
        err << "fit: " << e.what() << '\n';
        return kExitRuntimeError;
    }
}

int cmd_transform(const TransformOptions& options, std::ostream& err) {
    try {
        const io::ModelFile model = io::load_model(options.model_path);
        const Projection projection(model.w, 1e-8);
        const Eigen::MatrixXd x = io::read_csv(options.x_path);
        io::write_csv(options.out_path, transform(x, projection));
        return kExitOk;
    } catch (const std::exception& e) {
        err << "transform: " << e.what() << '\n';
        return kExitRuntimeError;
    }
}

std::vector<BenchmarkRow> run_benchmark(const BenchmarkOptions& options, std::ostream* progress) {
    if (options.trials < 1) throw std::invalid_argument("benchmark: trials must be at least 1");
    // Indexed [dataset][method][trial] so output order does not depend on loop order.
    std::vector<BenchmarkRow> rows;
    std::map<std::tuple<std::size_t, std::size_t, int>, BenchmarkRow> table;
    for (std::size_t di = 0; di < options.datasets.size(); ++di) {
        for (int t = 0; t < options.trials; ++t) {
            const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(t);
            datasets::SyntheticSpec spec;
            spec.which = options.datasets[di];
            spec.n = options.n;
            spec.seed = seed;
            const datasets::SyntheticData data = datasets::generate(spec);
            for (std::size_t mi = 0; mi < options.methods.size(); ++mi) {
                BenchmarkRow row{options.datasets[di], options.methods[mi], t, seed,
                                 std::numeric_limits<double>::quiet_NaN(), 0.0};
                const auto start = Clock::now();
                try {
                    const Projection w = run_method(options.methods[mi], data, options, seed);
                    row.error = metrics::frobenius_subspace_error(w.matrix(), data.w_star);
                } catch (const std::exception& e) {
                    if (progress) *progress << "trial failed: " << e.what() << '\n';
                }
                row.seconds = std::chrono::duration<double>(Clock::now() - start).count();
                if (progress) {
                    *progress << to_string(row.dataset) << ' ' << to_string(row.method) << " trial " << t
                              << " error " << row.error << " (" << row.seconds << " s)\n";
                }
                table.emplace(std::make_tuple(di, mi, t), row);
            }
        }
    }
    for (auto& [key, row] : table) rows.push_back(row);
    return rows;
}

std::vector<BenchmarkSummary> summarize(const BenchmarkOptions& options, const std::vector<BenchmarkRow>& rows) {
    std::vector<BenchmarkSummary> out;
    for (auto dataset : options.datasets) {
        for (auto method : options.methods) {
            double sum = 0.0;
            double sum_seconds = 0.0;
            int ok = 0;
            std::vector<double> errors;
            for (const auto& r : rows) {
                if (r.dataset != dataset || r.method != method) continue;
                sum_seconds += r.seconds;
                if (std::isfinite(r.error)) {
                    errors.push_back(r.error);
                    sum += r.error;
                    ++ok;
                }
            }
            const double nan = std::numeric_limits<double>::quiet_NaN();
            const double mean = ok > 0 ? sum / ok : nan;
            double var = 0.0;
            for (double e : errors) var += (e - mean) * (e - mean);
            const double sd = ok > 1 ? std::sqrt(var / (ok - 1)) : (ok == 1 ? 0.0 : nan);
            out.push_back({dataset, method, options.n, options.trials, mean, sd,
                           options.no_timing ? 0.0 : sum_seconds / options.trials});
        }
    }
    return out;
}

int cmd_benchmark(const BenchmarkOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const std::vector<BenchmarkRow> rows = run_benchmark(options, nullptr);
        const std::vector<BenchmarkSummary> summary = summarize(options, rows);

        {
            std::ofstream trials(options.out_csv);
            if (!trials) throw std::runtime_error("cannot open " + options.out_csv.string());
            trials << "dataset,method,n,trial,seed,error\n";
            for (const auto& r : rows) {
                trials << to_string(r.dataset) << ',' << to_string(r.method) << ',' << options.n << ','
                       << r.trial << ',' << r.seed << ',' << format_double(r.error) << '\n';
            }
            if (!trials) throw std::runtime_error("write error on " + options.out_csv.string());
        }
        const auto summary_path = options.summary_csv.value_or(default_summary_path(options.out_csv));
        {
            std::ofstream s(summary_path);
            if (!s) throw std::runtime_error("cannot open " + summary_path.string());
            s << "dataset,method,n,trials,mean_error,std_error,mean_seconds\n";
            for (const auto& r : summary) {
                s << to_string(r.dataset) << ',' << to_string(r.method) << ',' << r.n << ',' << r.trials << ','
                  << format_double(r.mean_error) << ',' << format_double(r.std_error) << ','
                  << format_double(r.mean_seconds) << '\n';
            }
            if (!s) throw std::runtime_error("write error on " + summary_path.string());
        }

        // Human-readable table: one row per dataset, "mean (std)" per method.
        out << std::left << std::setw(8) << "dataset";
        for (auto method : options.methods) out << std::setw(18) << to_string(method);
        out << '\n' << std::fixed << std::setprecision(3);
        for (auto dataset : options.datasets) {
            out << std::setw(8) << to_string(dataset);
            for (auto method : options.methods) {
                for (const auto& r : summary) {
                    if (r.dataset != dataset || r.method != method) continue;
                    std::ostringstream cell;
                    cell << std::fixed << std::setprecision(3) << r.mean_error << " (" << r.std_error << ")";
                    out << std::setw(18) << cell.str();
                }
            }
            out << '\n';
        }
        out << std::setw(8) << "seconds";
        for (auto method : options.methods) {
            for (const auto& r : summary) {
                if (r.method == method && r.dataset == options.datasets.front()) {
                    std::ostringstream cell;
                    cell << std::fixed << std::setprecision(3) << r.mean_seconds;
                    out << std::setw(18) << cell.str();
                }
            }
        }
        out << '\n';
        out.unsetf(std::ios::fixed);
        return kExitOk;
    } catch (const std::exception& e) {
        err << "benchmark: " << e.what() << '\n';
        return kExitRuntimeError;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sufficient component analysis: supervised linear dimension reduction"};
    app.require_subcommand(1);

    const std::vector<std::string> dataset_names{"data1", "data2", "data3", "data4"};

    GenDataOptions gen;
    std::string gen_dataset;
    auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic benchmark dataset as CSV");
    gen_cmd->add_option("--dataset", gen_dataset, "data1 | data2 | data3 | data4")
        ->required()
        ->check(CLI::IsMember(dataset_names, CLI::ignore_case));
    gen_cmd->add_option("-n,--n", gen.n, "number of samples")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", gen.seed, "random seed");
    gen_cmd->add_option("--noise-scale", gen.noise_scale, "multiplier on the additive noise");
    gen_cmd->add_flag("--data4-abs", gen.data4_abs_threshold, "data4: branch on |X2| <= 1/6");
    gen_cmd->add_option("--out-x", gen.out_x, "output CSV for X")->required();
    gen_cmd->add_option("--out-y", gen.out_y, "output CSV for Y")->required();

    FitOptions fit_opts;
    bool no_reselect = false;
    auto* fit_cmd = app.add_subcommand("fit", "Learn a projection from CSV data");
    fit_cmd->add_option("--x", fit_opts.x_path, "input features CSV (n x d)")->required();
    fit_cmd->add_option("--y", fit_opts.y_path, "outputs CSV (n x d_y)")->required();
    fit_cmd->add_option("-m,--m", fit_opts.m, "target dimension")->required()->check(CLI::PositiveNumber);
    fit_cmd->add_option("--model", fit_opts.model_out, "output model file (JSON)")->required();
    fit_cmd->add_option("--tol", fit_opts.tol, "stop when the SMI estimate improves by less than this")
        ->check(CLI::PositiveNumber);
    fit_cmd->add_option("--max-iters", fit_opts.max_iters, "iteration cap")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--seed", fit_opts.seed, "random seed (folds, center subsampling)");
    fit_cmd->add_option("--folds", fit_opts.folds, "cross-validation folds")->check(CLI::Range(2, 1000000));
    fit_cmd->add_option("--sigma-z", fit_opts.sigma_z_multipliers,
                        "input kernel width candidates, as multiples of the median distance")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    fit_cmd->add_option("--sigma-y", fit_opts.sigma_y_multipliers,
                        "output kernel width candidates, as multiples of the median distance")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    fit_cmd->add_option("--lambda", fit_opts.lambdas, "regularization candidates")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    fit_cmd->add_flag("--no-reselect", no_reselect, "reuse the first iteration's hyperparameters");
    fit_cmd->add_option("--max-centers", fit_opts.max_centers, "kernel centers to subsample (0 = all samples)");
    fit_cmd->add_option("--kernel-y", fit_opts.kernel_y, "output kernel")
        ->check(CLI::IsMember({"gaussian", "label_correlation"}));
    fit_cmd->add_flag("-v,--verbose", fit_opts.verbose, "print the per-iteration SMI trace to stderr");

    TransformOptions tr;
    auto* tr_cmd = app.add_subcommand("transform", "Project CSV data with a fitted model");
    tr_cmd->add_option("--model", tr.model_path, "model file")->required();
    tr_cmd->add_option("--x", tr.x_path, "input CSV")->required();
    tr_cmd->add_option("--out", tr.out_path, "output CSV (n x m)")->required();

    BenchmarkOptions bench;
    std::vector<std::string> bench_datasets;
    std::vector<std::string> bench_methods;
    std::string summary_path;
    auto* bench_cmd = app.add_subcommand("benchmark", "Subspace-recovery benchmark on the synthetic datasets");
    bench_cmd->add_option("--datasets", bench_datasets, "comma-separated subset of data1..data4")
        ->delimiter(',')
        ->check(CLI::IsMember(dataset_names, CLI::ignore_case));
    bench_cmd->add_option("--methods", bench_methods, "comma-separated subset of sca, sca0, sir")
        ->delimiter(',')
        ->check(CLI::IsMember({"sca", "sca0", "sir"}));
    bench_cmd->add_option("-n,--n", bench.n, "samples per trial")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--trials", bench.trials, "trials per dataset")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench.seed, "base seed; trial t uses seed + t");
    bench_cmd->add_option("--max-centers", bench.max_centers, "LSMI kernel centers (0 = all samples)");
    bench_cmd->add_option("--slices", bench.sir_slices, "SIR slice count")->check(CLI::Range(2, 1000000));
    bench_cmd->add_flag("--no-reselect", [&bench](std::int64_t) { bench.reselect_each_iter = false; },
                        "reuse the first iteration's hyperparameters");
    bench_cmd->add_flag("--no-timing", bench.no_timing, "write mean_seconds as 0 for reproducible output");
    bench_cmd->add_option("--out", bench.out_csv, "per-trial CSV")->required();
    bench_cmd->add_option("--summary", summary_path, "summary CSV (default: <out>.summary.csv)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (*gen_cmd) {
        gen.which = datasets::parse_benchmark(gen_dataset);
        return cmd_gen_data(gen, err);
    }
    if (*fit_cmd) {
        fit_opts.reselect_each_iter = !no_reselect;
        return cmd_fit(fit_opts, out, err);
    }
    if (*tr_cmd) return cmd_transform(tr, err);
    if (*bench_cmd) {
        if (!bench_datasets.empty()) {
            bench.datasets.clear();
            for (const auto& name : bench_datasets) bench.datasets.push_back(datasets::parse_benchmark(name));
        }
        if (!bench_methods.empty()) {
            bench.methods.clear();
            for (const auto& name : bench_methods) bench.methods.push_back(parse_method(name));
        }
        if (!summary_path.empty()) bench.summary_csv = summary_path;
        return cmd_benchmark(bench, out, err);
    }
    return kExitUsage;
}

}  // namespace sca::cli
