// Command-line front end: fit, estimate-d, simulate, benchmark, distance.
// Exit codes: 0 success, 2 usage errors, 1 data or numerical errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lassosir/errors.hpp"
#include "lassosir/estimators.hpp"
#include "lassosir/io.hpp"
#include "lassosir/linalg.hpp"
#include "lassosir/simbench.hpp"

namespace {

using json = nlohmann::json;
using namespace lassosir;

using ConfigLog = std::map<std::string, std::string>;

void log_config(const ConfigLog& config) {
    for (const auto& [key, value] : config) std::cerr << "# " << key << "=" << value << "\n";
}

std::uint64_t materialize_seed(const std::optional<std::uint64_t>& given) {
    if (given) return *given;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

json matrix_to_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

struct DataFlags {
    std::string input;
    std::string response = "y";
    bool no_header = false;
    bool quantile = false;
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
    cmd->add_option("--input", flags.input, "input CSV, samples as rows")->required();
    cmd->add_option("--response", flags.response,
                    "response column name, or 1-based index when headerless");
    cmd->add_flag("--no-header", flags.no_header, "file has no header row");
    cmd->add_flag("--quantile-normalize", flags.quantile,
                  "replace each covariate by its normal scores");
}

io::LoadedData load_data(const DataFlags& flags, ConfigLog& config) {
    io::LoadedData data = io::load_csv(flags.input, flags.response, !flags.no_header);
    if (flags.quantile) data.X = io::quantile_normalize(data.X, &data.names);
    config["input"] = flags.input;
    config["response"] = flags.response;
    config["header"] = flags.no_header ? "false" : "true";
    config["quantile_normalize"] = flags.quantile ? "true" : "false";
    config["n"] = std::to_string(data.X.cols());
    config["p"] = std::to_string(data.X.rows());
    return data;
}

int command_fit(const DataFlags& data_flags, const std::string& method_name, int slices,
                std::optional<int> directions, bool discrete, int folds,
                std::optional<int> screen_size, std::optional<double> mu_theory,
                std::optional<std::uint64_t> seed_opt, const std::string& output,
                const std::string& format) {
    ConfigLog config;
    const io::LoadedData data = load_data(data_flags, config);
    const std::uint64_t seed = materialize_seed(seed_opt);
    const simbench::Method method = simbench::parse_method(method_name);

    estimators::FitOptions opts;
    opts.slices = slices;
    opts.directions = directions;
    opts.discrete = discrete;
    opts.cv_folds = folds;
    opts.seed = seed;
    opts.mu_theory_c = mu_theory;

    config["command"] = "fit";
    config["method"] = method_name;
    config["slices"] = std::to_string(slices);
    config["directions"] = directions ? std::to_string(*directions) : "estimated";
    config["discrete"] = discrete ? "true" : "false";
    config["folds"] = std::to_string(folds);
    config["seed"] = std::to_string(seed);
    config["output"] = output;
    config["format"] = format;
    if (mu_theory) config["mu_theory"] = std::to_string(*mu_theory);
    if (screen_size) config["screen_size"] = std::to_string(*screen_size);
    log_config(config);

    const bool estimated = !directions.has_value() && !discrete;
    auto resolve_d = [&]() -> int {
        if (directions) return *directions;
        if (discrete) {  // slicing convention: d = levels - 1
            std::set<double> levels(data.y.begin(), data.y.end());
            return static_cast<int>(levels.size()) - 1;
        }
        return estimators::estimate_d(data.X, data.y, opts);
    };

    estimators::CentralSpaceEstimate est;
    switch (method) {
        case simbench::Method::lasso_sir:
            est = estimators::lasso_sir(data.X, data.y, opts);
            break;
        case simbench::Method::dt_sir:
            est = estimators::dt_sir(data.X, data.y, slices, resolve_d(), screen_size,
                                     discrete);
            break;
        case simbench::Method::matrix_lasso:
            est = estimators::matrix_lasso(data.X, data.y, slices, resolve_d(), folds, seed,
                                           discrete);
            break;
    }

    io::write_matrix_csv(output + ".basis.csv", est.basis);

    json summary;
    summary["config"] = config;
    summary["method"] = method_name;
    summary["d_used"] = est.d_used;
    summary["d_estimated"] = estimated;
    summary["adjusted_eigenvalues"] = std::vector<double>(
        est.adjusted_eigenvalues.begin(), est.adjusted_eigenvalues.end());
    summary["mu"] = est.mu_used;
    summary["predictors"] = data.names;

    if (format == "json") {
        summary["beta"] = matrix_to_json(est.B_hat);
        summary["basis"] = matrix_to_json(est.basis);
        write_text(output + ".json", summary.dump(2) + "\n");
    } else {
        io::write_matrix_csv(output + ".beta.csv", est.B_hat);
        std::string rows = "direction,mu,adjusted_eigenvalue\n";
        for (int i = 0; i < est.d_used; ++i) {
            char line[128];
            std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", i + 1,
                          i < static_cast<int>(est.mu_used.size()) ? est.mu_used[i] : 0.0,
                          est.adjusted_eigenvalues(i));
            rows += line;
        }
        write_text(output + ".csv", rows);
    }

    std::cout << "fit: method=" << method_name << " d=" << est.d_used
              << (estimated ? " (estimated)" : "") << " nonzero rows="
              << (est.B_hat.array() != 0.0).rowwise().any().count() << "\n";
    std::cout << "wrote " << output << (format == "json" ? ".json" : ".csv") << " and "
              << output << ".basis.csv\n";
    return 0;
}

int command_estimate_d(const DataFlags& data_flags, int slices, int folds,
                       std::optional<std::uint64_t> seed_opt, const std::string& output) {
    ConfigLog config;
    const io::LoadedData data = load_data(data_flags, config);
    const std::uint64_t seed = materialize_seed(seed_opt);
    config["command"] = "estimate-d";
    config["slices"] = std::to_string(slices);
    config["folds"] = std::to_string(folds);
    config["seed"] = std::to_string(seed);
    log_config(config);

    estimators::FitOptions opts;
    opts.slices = slices;
    opts.cv_folds = folds;
    opts.seed = seed;
    const estimators::DirectionScan scan = estimators::scan_directions(data.X, data.y, opts);

    std::cout << "estimated directions: " << scan.d_hat << "\n";
    std::cout << "adjusted eigenvalues:";
    for (double v : scan.adjusted_eigenvalues) std::cout << ' ' << v;
    std::cout << "\n";

    if (!output.empty()) {
        json summary;
        summary["config"] = config;
        summary["d_hat"] = scan.d_hat;
        summary["adjusted_eigenvalues"] = std::vector<double>(
            scan.adjusted_eigenvalues.begin(), scan.adjusted_eigenvalues.end());
        write_text(output, summary.dump(2) + "\n");
    }
    return 0;
}

int command_simulate(const std::string& setting_name, int p, const std::string& cov_name,
                     double rho, int n, std::optional<std::uint64_t> seed_opt,
                     const std::string& output, const std::string& truth_output) {
    const simbench::SettingId setting = simbench::parse_setting(setting_name);
    const std::uint64_t seed = materialize_seed(seed_opt);
    const simbench::CovKind kind =
        cov_name == "block" ? simbench::CovKind::block : simbench::CovKind::ar1;
    if (cov_name != "ar1" && cov_name != "block")
        throw std::invalid_argument("--cov must be ar1 or block");

    ConfigLog config{{"command", "simulate"}, {"setting", setting_name},
                     {"p", std::to_string(p)}, {"cov", cov_name},
                     {"rho", std::to_string(rho)}, {"n", std::to_string(n)},
                     {"seed", std::to_string(seed)}, {"output", output}};
    log_config(config);

    const simbench::CovarianceSpec cov{kind, p, rho,
                                       simbench::setting_info(setting).active_set};
    const simbench::Dataset data = simbench::sample_dataset(setting, cov, n, seed);
    io::write_dataset_csv(output, data.X, data.y);
    if (!truth_output.empty())
        io::write_matrix_csv(truth_output, linalg::orthonormal_basis(data.B_true));

    std::cout << "simulated setting " << setting_name << ": n=" << n << " p=" << p
              << " -> " << output << "\n";
    return 0;
}

int command_benchmark(const std::vector<std::string>& setting_names, std::vector<int> p_grid,
                      const std::string& cov_name, double rho,
                      const std::vector<std::string>& method_names, int reps, int n, int slices,
                      int folds, std::optional<int> directions, std::optional<int> screen_size,
                      int threads, std::optional<std::uint64_t> seed_opt,
                      const std::string& output, const std::string& format) {
    simbench::BenchmarkConfig config;
    for (const std::string& name : setting_names)
        config.settings.push_back(simbench::parse_setting(name));
    if (config.settings.empty()) config.settings = {simbench::SettingId::I};
    if (!p_grid.empty()) config.p_grid = std::move(p_grid);
    if (cov_name != "ar1" && cov_name != "block")
        throw std::invalid_argument("--cov must be ar1 or block");
    config.cov_kind = cov_name == "block" ? simbench::CovKind::block : simbench::CovKind::ar1;
    config.rho = rho;
    config.methods.clear();
    for (const std::string& name : method_names)
        config.methods.push_back(simbench::parse_method(name));
    if (config.methods.empty()) config.methods = {simbench::Method::lasso_sir};
    config.replications = reps;
    config.n = n;
    config.slices = slices;
    config.cv_folds = folds;
    config.directions = directions;
    config.screen_size = screen_size;
    config.threads = threads;
    config.seed = materialize_seed(seed_opt);

    ConfigLog log;
    log["command"] = "benchmark";
    std::string joined;
    for (const auto& s : config.settings)
        joined += (joined.empty() ? "" : ",") + simbench::setting_info(s).name;
    log["settings"] = joined;
    joined.clear();
    for (int p : config.p_grid) joined += (joined.empty() ? "" : ",") + std::to_string(p);
    log["p"] = joined;
    joined.clear();
    for (const auto& m : config.methods)
        joined += (joined.empty() ? "" : ",") + simbench::method_name(m);
    log["methods"] = joined;
    log["cov"] = cov_name;
    log["rho"] = std::to_string(rho);
    log["reps"] = std::to_string(reps);
    log["n"] = std::to_string(n);
    log["slices"] = std::to_string(slices);
    log["folds"] = std::to_string(folds);
    log["threads"] = std::to_string(threads);
    log["seed"] = std::to_string(config.seed);
    if (directions) log["directions"] = std::to_string(*directions);
    if (screen_size) log["screen_size"] = std::to_string(*screen_size);
    log_config(log);

    const simbench::BenchmarkReport report = simbench::run_benchmark(config);
    std::cout << simbench::report_table(report);

    if (!output.empty()) {
        if (format == "json") {
            json doc;
            doc["seed"] = report.seed;
            doc["config"] = log;
            json rows = json::array();
            for (const simbench::BenchmarkRow& row : report.rows) {
                rows.push_back({{"setting", row.setting},
                                {"p", row.p},
                                {"rho", row.rho},
                                {"cov_kind", row.cov_kind},
                                {"method", row.method},
                                {"n_reps", row.n_reps},
                                {"mean_err", row.mean_err},
                                {"sd_err", row.sd_err},
                                {"mean_d_hat", row.mean_d_hat},
                                {"seconds", row.seconds},
                                {"failures", row.failures}});
            }
            doc["rows"] = std::move(rows);
            write_text(output, doc.dump(2) + "\n");
        } else {
            write_text(output, simbench::report_csv(report));
        }
        std::cout << "wrote " << output << "\n";
    }
    return 0;
}

int command_distance(const std::string& path_a, const std::string& path_b) {
    const Eigen::MatrixXd A = io::read_matrix_csv(path_a);
    const Eigen::MatrixXd B = io::read_matrix_csv(path_b);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", linalg::projection_distance(A, B));
    std::cout << buf << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse sliced inverse regression via Lasso"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file");

    // fit
    auto* fit = app.add_subcommand("fit", "estimate the central space from a CSV dataset");
    DataFlags fit_data;
    add_data_flags(fit, fit_data);
    std::string fit_method = "lasso-sir";
    int fit_slices = 20, fit_folds = 10;
    bool fit_discrete = false;
    std::optional<int> fit_directions, fit_screen;
    std::optional<double> fit_mu_theory;
    std::optional<std::uint64_t> fit_seed;
    std::string fit_output = "fit", fit_format = "json";
    fit->add_option("--method", fit_method, "lasso-sir | dt-sir | matrix-lasso");
    fit->add_option("--slices", fit_slices, "number of slices H (continuous responses)");
    fit->add_option("--directions", fit_directions, "number of directions d; estimated if absent");
    fit->add_flag("--discrete", fit_discrete,
                  "slice by distinct response levels; d defaults to levels-1");
    fit->add_option("--folds", fit_folds, "cross-validation folds");
    fit->add_option("--screen-size", fit_screen, "DT-SIR retained predictor count");
    fit->add_option("--mu-theory", fit_mu_theory,
                    "use mu_i = C sqrt(log p / (n lambda_i)) with this C instead of CV");
    fit->add_option("--seed", fit_seed, "RNG seed (materialized and logged if absent)");
    fit->add_option("--output", fit_output, "output path prefix");
    fit->add_option("--format", fit_format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));

    // estimate-d
    auto* estd = app.add_subcommand("estimate-d", "estimate the number of directions");
    DataFlags estd_data;
    add_data_flags(estd, estd_data);
    int estd_slices = 20, estd_folds = 10;
    std::optional<std::uint64_t> estd_seed;
    std::string estd_output;
    estd->add_option("--slices", estd_slices, "number of slices H");
    estd->add_option("--folds", estd_folds, "cross-validation folds");
    estd->add_option("--seed", estd_seed, "RNG seed");
    estd->add_option("--output", estd_output, "optional JSON output path");

    // simulate
    auto* sim = app.add_subcommand("simulate", "draw a dataset from settings I..XIII");
    std::string sim_setting = "I", sim_cov = "ar1", sim_output, sim_truth;
    int sim_p = 100, sim_n = 1000;
    double sim_rho = 0.5;
    std::optional<std::uint64_t> sim_seed;
    sim->add_option("--setting", sim_setting, "simulation setting I..XIII");
    sim->add_option("--p", sim_p, "dimension");
    sim->add_option("--n", sim_n, "sample count");
    sim->add_option("--cov", sim_cov, "ar1 | block");
    sim->add_option("--rho", sim_rho, "covariance correlation parameter");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--output", sim_output, "dataset CSV path")->required();
    sim->add_option("--truth-output", sim_truth, "write the true basis CSV here");

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "Monte-Carlo estimation-error tables");
    std::vector<std::string> bench_settings, bench_methods{"lasso-sir"};
    std::vector<int> bench_p;
    std::string bench_cov = "ar1", bench_output, bench_format = "csv";
    double bench_rho = 0.5;
    int bench_reps = 100, bench_n = 1000, bench_slices = 20, bench_folds = 10,
        bench_threads = 1;
    std::optional<int> bench_directions, bench_screen;
    std::optional<std::uint64_t> bench_seed;
    bench->add_option("--setting", bench_settings, "settings to run (repeatable)")
        ->delimiter(',');
    bench->add_option("--p", bench_p, "dimension grid (repeatable)")->delimiter(',');
    bench->add_option("--cov", bench_cov, "ar1 | block");
    bench->add_option("--rho", bench_rho, "covariance correlation parameter");
    bench->add_option("--methods", bench_methods, "methods to compare")->delimiter(',');
    bench->add_option("--reps", bench_reps, "replications per cell");
    bench->add_option("--n", bench_n, "sample count");
    bench->add_option("--slices", bench_slices, "slices H for continuous settings");
    bench->add_option("--folds", bench_folds, "cross-validation folds");
    bench->add_option("--directions", bench_directions, "fix d instead of estimating it");
    bench->add_option("--screen-size", bench_screen, "DT-SIR retained predictor count");
    bench->add_option("--threads", bench_threads, "worker threads over replications");
    bench->add_option("--seed", bench_seed, "RNG seed");
    bench->add_option("--output", bench_output, "report path");
    bench->add_option("--format", bench_format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));

    // distance
    auto* dist = app.add_subcommand("distance",
                                    "Frobenius distance between two basis projections");
    std::string dist_a, dist_b;
    dist->add_option("basis_a", dist_a, "first basis CSV")->required();
    dist->add_option("basis_b", dist_b, "second basis CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*fit)
            return command_fit(fit_data, fit_method, fit_slices, fit_directions, fit_discrete,
                               fit_folds, fit_screen, fit_mu_theory, fit_seed, fit_output,
                               fit_format);
        if (*estd)
            return command_estimate_d(estd_data, estd_slices, estd_folds, estd_seed,
                                      estd_output);
        if (*sim)
            return command_simulate(sim_setting, sim_p, sim_cov, sim_rho, sim_n, sim_seed,
                                    sim_output, sim_truth);
        if (*bench)
            return command_benchmark(bench_settings, bench_p, bench_cov, bench_rho,
                                     bench_methods, bench_reps, bench_n, bench_slices,
                                     bench_folds, bench_directions, bench_screen,
                                     bench_threads, bench_seed, bench_output, bench_format);
        if (*dist) return command_distance(dist_a, dist_b);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
