#include "lassosir/simbench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "lassosir/estimators.hpp"
#include "lassosir/linalg.hpp"
#include "lassosir/rng.hpp"

namespace lassosir::simbench {

namespace {

std::vector<int> range_set(int count) {
    std::vector<int> s(count);
    std::iota(s.begin(), s.end(), 0);
    return s;
}

const std::vector<SimulationSetting>& all_settings() {
    static const std::vector<SimulationSetting> table = {
        {SettingId::I, "I", 1, ResponseKind::continuous, range_set(10), false},
        {SettingId::II, "II", 1, ResponseKind::continuous, range_set(20), false},
        {SettingId::III, "III", 1, ResponseKind::continuous, range_set(10), false},
        {SettingId::IV, "IV", 1, ResponseKind::continuous, range_set(50), false},
        {SettingId::V, "V", 1, ResponseKind::continuous, range_set(7), false},
        {SettingId::VI, "VI", 2, ResponseKind::continuous, range_set(7), true},
        {SettingId::VII, "VII", 2, ResponseKind::continuous, range_set(12), false},
        {SettingId::VIII, "VIII", 2, ResponseKind::continuous, range_set(12), false},
        {SettingId::IX, "IX", 2, ResponseKind::continuous, range_set(12), true},
        {SettingId::X, "X", 1, ResponseKind::dichotomous, range_set(10), false},
        {SettingId::XI, "XI", 1, ResponseKind::dichotomous, range_set(7), false},
        {SettingId::XII, "XII", 1, ResponseKind::dichotomous, range_set(20), false},
        {SettingId::XIII, "XIII", 2, ResponseKind::trichotomous, range_set(12), false},
    };
    return table;
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

Eigen::MatrixXd draw_coefficients(SettingId id, int p, std::mt19937_64& gen) {
    const SimulationSetting& info = setting_info(id);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p, info.d_true);
    switch (id) {
        case SettingId::VI:  // beta_{1:4,1} = 1, beta_{5:7,2} = 1
            for (int i = 0; i < 4; ++i) B(i, 0) = 1.0;
            for (int i = 4; i < 7; ++i) B(i, 1) = 1.0;
            break;
        case SettingId::IX:  // beta_{1:8,1} = 1, beta_{9:12,2} = 1
            for (int i = 0; i < 8; ++i) B(i, 0) = 1.0;
            for (int i = 8; i < 12; ++i) B(i, 1) = 1.0;
            break;
        case SettingId::VII:
        case SettingId::VIII:
        case SettingId::XIII:  // beta_{1:7,1}, beta_{8:12,2} ~ N(0,1)
            for (int i = 0; i < 7; ++i) B(i, 0) = rng::standard_normal(gen);
            for (int i = 7; i < 12; ++i) B(i, 1) = rng::standard_normal(gen);
            break;
        default:
            for (int i : info.active_set) B(i, 0) = rng::standard_normal(gen);
            break;
    }
    return B;
}

}  // namespace

Covariance make_covariance(const CovarianceSpec& spec) {
    if (spec.p < 1) throw std::invalid_argument("make_covariance: p must be >= 1");
    Covariance cov;
    cov.sigma.resize(spec.p, spec.p);
    if (spec.kind == CovKind::ar1) {
        if (!(spec.rho > -1.0 && spec.rho < 1.0))
            throw std::invalid_argument("make_covariance: ar1 needs -1 < rho < 1");
        for (int i = 0; i < spec.p; ++i)
            for (int j = 0; j < spec.p; ++j)
                cov.sigma(i, j) = std::pow(spec.rho, std::abs(i - j));
    } else {
        std::vector<char> in_active(spec.p, 0);
        for (int i : spec.active_set) {
            if (i < 0 || i >= spec.p)
                throw std::invalid_argument("make_covariance: active index out of range");
            in_active[i] = 1;
        }
        for (int i = 0; i < spec.p; ++i) {
            for (int j = 0; j < spec.p; ++j) {
                if (i == j)
                    cov.sigma(i, j) = 1.0;
                else if (in_active[i] == in_active[j])
                    cov.sigma(i, j) = spec.rho;
                else
                    cov.sigma(i, j) = 0.1;
            }
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov.sigma);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("make_covariance: configuration is not positive definite");
    cov.factor = llt.matrixL();
    return cov;
}

CovarianceSampler::CovarianceSampler(const CovarianceSpec& spec) : spec_(spec) {
    if (spec_.kind == CovKind::ar1) {
        if (!(spec_.rho > -1.0 && spec_.rho < 1.0))
            throw std::invalid_argument("CovarianceSampler: ar1 needs -1 < rho < 1");
        if (spec_.p < 1) throw std::invalid_argument("CovarianceSampler: p must be >= 1");
    } else {
        factor_ = make_covariance(spec_).factor;
    }
}

Eigen::VectorXd CovarianceSampler::sample(std::mt19937_64& gen) const {
    Eigen::VectorXd x(spec_.p);
    if (spec_.kind == CovKind::ar1) {
        const double innovation = std::sqrt(1.0 - spec_.rho * spec_.rho);
        x(0) = rng::standard_normal(gen);
        for (int i = 1; i < spec_.p; ++i)
            x(i) = spec_.rho * x(i - 1) + innovation * rng::standard_normal(gen);
        return x;
    }
    Eigen::VectorXd z(spec_.p);
    for (int i = 0; i < spec_.p; ++i) z(i) = rng::standard_normal(gen);
    return factor_ * z;
}

const SimulationSetting& setting_info(SettingId id) {
    return all_settings()[static_cast<int>(id)];
}

SettingId parse_setting(const std::string& name) {
    for (const SimulationSetting& s : all_settings())
        if (s.name == name) return s.id;
    throw std::invalid_argument("unknown setting '" + name + "' (expected I..XIII)");
}

double response_value(SettingId id, double z1, double z2, double e1, double e2) {
    switch (id) {
        case SettingId::I: return z1 + e1;
        case SettingId::II: return z1 * z1 * z1 / 2.0 + e1;
        case SettingId::III: return std::sin(z1) * std::exp(z1) + e1;
        case SettingId::IV: return std::exp(z1 / 10.0) + e1;
        case SettingId::V: return std::exp(z1 + e1);
        case SettingId::VI: {
            const double t = std::abs(z2 / 4.0 + 2.0);
            return t * t * t * sign_of(z1) + e1;
        }
        case SettingId::VII: return z1 * std::exp(z2) + e1;
        case SettingId::VIII: return z1 * std::exp(z2 + e1);
        case SettingId::IX: {
            const double t = 2.0 + z2 / 3.0;
            return z1 * t * t + e1;
        }
        case SettingId::X: return z1 + e1 > 0.0 ? 1.0 : 0.0;
        case SettingId::XI: return std::exp(z1) + e1 > 0.0 ? 1.0 : 0.0;
        case SettingId::XII: return z1 * z1 * z1 / 2.0 + e1 > 0.0 ? 1.0 : 0.0;
        case SettingId::XIII:
            if (z1 + e1 < 0.0) return 1.0;
            return z2 + e2 < 0.0 ? 2.0 : 3.0;
    }
    throw std::logic_error("response_value: unreachable");
}

Dataset sample_dataset(SettingId id, const CovarianceSpec& cov, int n, std::uint64_t seed) {
    return sample_dataset(id, CovarianceSampler(cov), n, seed);
}

Dataset sample_dataset(SettingId id, const CovarianceSampler& sampler, int n,
                       std::uint64_t seed) {
    const SimulationSetting& info = setting_info(id);
    const int p = sampler.dimension();
    if (n < 1) throw std::invalid_argument("sample_dataset: n must be >= 1");
    if (p <= info.active_set.back())
        throw std::invalid_argument("sample_dataset: p too small for setting " + info.name);

    std::mt19937_64 gen(seed);
    Dataset data;
    data.B_true = draw_coefficients(id, p, gen);
    data.X.resize(p, n);
    data.y.resize(n);
    for (int j = 0; j < n; ++j) {
        const Eigen::VectorXd x = sampler.sample(gen);
        data.X.col(j) = x;
        const double z1 = data.B_true.col(0).dot(x);
        const double z2 = info.d_true > 1 ? data.B_true.col(1).dot(x) : 0.0;
        const double e1 = rng::standard_normal(gen);
        const double e2 =
            info.response == ResponseKind::trichotomous ? rng::standard_normal(gen) : 0.0;
        data.y(j) = response_value(id, z1, z2, e1, e2);
    }
    return data;
}

std::string method_name(Method m) {
    switch (m) {
        case Method::lasso_sir: return "lasso-sir";
        case Method::dt_sir: return "dt-sir";
        case Method::matrix_lasso: return "matrix-lasso";
    }
    throw std::logic_error("method_name: unreachable");
}

Method parse_method(const std::string& name) {
    if (name == "lasso-sir") return Method::lasso_sir;
    if (name == "dt-sir") return Method::dt_sir;
    if (name == "matrix-lasso") return Method::matrix_lasso;
    throw std::invalid_argument("unknown method '" + name +
                                "' (expected lasso-sir, dt-sir or matrix-lasso)");
}

namespace {

struct RepOutcome {
    bool ok = false;
    double error = 0.0;
    double seconds = 0.0;
};

struct CellAccumulator {
    std::vector<std::vector<RepOutcome>> per_method;  // [method][rep]
    std::vector<double> d_hats;                       // [rep]
};

// One replication of one cell: draw data, resolve d (estimated or fixed),
// run each requested method against the same data and the same d.
void run_replication(const BenchmarkConfig& config, SettingId setting,
                     const CovarianceSampler& sampler, std::uint64_t cell_seed, int rep,
                     CellAccumulator& acc) {
    using clock = std::chrono::steady_clock;
    const SimulationSetting& info = setting_info(setting);
    const std::uint64_t rep_seed = rng::derive_seed(cell_seed, rep + 1);
    const bool discrete = info.response != ResponseKind::continuous;

    const Dataset data =
        sample_dataset(setting, sampler, config.n, rng::derive_seed(rep_seed, 1));

    estimators::FitOptions fit;
    fit.slices = config.slices;
    fit.discrete = discrete;
    fit.cv_folds = config.cv_folds;
    fit.seed = rng::derive_seed(rep_seed, 2);
    fit.directions = config.directions;

    int d_used = 0;
    std::optional<estimators::CentralSpaceEstimate> lasso_estimate;
    double lasso_seconds = 0.0;
    {
        const auto t0 = clock::now();
        if (!discrete && !config.directions) {
            try {
                const estimators::DirectionScan scan =
                    estimators::scan_directions(data.X, data.y, fit);
                d_used = scan.d_hat;
                estimators::CentralSpaceEstimate est;
                est.B_hat = scan.B_full.leftCols(d_used);
                est.basis = linalg::orthonormal_basis(est.B_hat);
                est.adjusted_eigenvalues = scan.adjusted_eigenvalues.head(d_used);
                est.d_used = d_used;
                est.mu_used.assign(scan.mu_used.begin(), scan.mu_used.begin() + d_used);
                lasso_estimate = std::move(est);
            } catch (const std::exception&) {
                // no usable d: every method of this replication is a failure
                for (auto& outcomes : acc.per_method) outcomes[rep].ok = false;
                acc.d_hats[rep] = 0.0;
                return;
            }
        } else {
            if (config.directions)
                d_used = *config.directions;
            else  // discrete convention: d = levels - 1
                d_used = (info.response == ResponseKind::trichotomous ? 3 : 2) - 1;
        }
        lasso_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    }
    acc.d_hats[rep] = d_used;

    for (std::size_t m = 0; m < config.methods.size(); ++m) {
        RepOutcome& out = acc.per_method[m][rep];
        const auto t0 = clock::now();
        try {
            estimators::CentralSpaceEstimate est;
            switch (config.methods[m]) {
                case Method::lasso_sir:
                    if (lasso_estimate) {
                        est = *lasso_estimate;
                    } else {
                        estimators::FitOptions opts = fit;
                        opts.directions = d_used;
                        est = estimators::lasso_sir(data.X, data.y, opts);
                    }
                    break;
                case Method::dt_sir:
                    est = estimators::dt_sir(data.X, data.y, config.slices, d_used,
                                             config.screen_size, discrete);
                    break;
                case Method::matrix_lasso:
                    est = estimators::matrix_lasso(data.X, data.y, config.slices, d_used,
                                                   config.cv_folds,
                                                   rng::derive_seed(rep_seed, 3), discrete);
                    break;
            }
            out.error = linalg::projection_distance(est.basis, data.B_true);
            out.ok = true;
        } catch (const std::exception&) {
            out.ok = false;
        }
        out.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        if (m == 0) out.seconds += lasso_seconds;  // scan time rides on the first method
    }
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
    if (config.replications < 1)
        throw std::invalid_argument("run_benchmark: replications must be >= 1");
    if (config.settings.empty())
        throw std::invalid_argument("run_benchmark: no settings requested");
    if (config.methods.empty())
        throw std::invalid_argument("run_benchmark: no methods requested");

    BenchmarkReport report;
    report.seed = config.seed;

    for (SettingId setting : config.settings) {
        const SimulationSetting& info = setting_info(setting);
        for (int p : config.p_grid) {
            CovarianceSpec cov{config.cov_kind, p, config.rho, info.active_set};
            const CovarianceSampler sampler(cov);
            // Content-derived: identical no matter how cells are ordered.
            const std::uint64_t cell_seed = rng::derive_seed(
                config.seed, static_cast<std::uint64_t>(setting) + 1,
                static_cast<std::uint64_t>(p));

            CellAccumulator acc;
            acc.per_method.assign(config.methods.size(),
                                  std::vector<RepOutcome>(config.replications));
            acc.d_hats.assign(config.replications, 0.0);

            const int threads =
                std::max(1, std::min(config.threads, config.replications));
            if (threads == 1) {
                for (int rep = 0; rep < config.replications; ++rep)
                    run_replication(config, setting, sampler, cell_seed, rep, acc);
            } else {
                std::atomic<int> next{0};
                std::vector<std::thread> pool;
                pool.reserve(threads);
                for (int t = 0; t < threads; ++t) {
                    pool.emplace_back([&] {
                        for (int rep = next.fetch_add(1); rep < config.replications;
                             rep = next.fetch_add(1))
                            run_replication(config, setting, sampler, cell_seed, rep, acc);
                    });
                }
                for (std::thread& th : pool) th.join();
            }

            const double mean_d =
                std::accumulate(acc.d_hats.begin(), acc.d_hats.end(), 0.0) /
                config.replications;
            for (std::size_t m = 0; m < config.methods.size(); ++m) {
                BenchmarkRow row;
                row.setting = info.name;
                row.p = p;
                row.rho = config.rho;
                row.cov_kind = config.cov_kind == CovKind::ar1 ? "ar1" : "block";
                row.method = method_name(config.methods[m]);
                row.mean_d_hat = mean_d;
                double sum = 0.0;
                for (const RepOutcome& out : acc.per_method[m]) {
                    row.seconds += out.seconds;
                    if (out.ok) {
                        ++row.n_reps;
                        sum += out.error;
                    } else {
                        ++row.failures;
                    }
                }
                if (row.n_reps > 0) row.mean_err = sum / row.n_reps;
                if (row.n_reps > 1) {
                    double ss = 0.0;
                    for (const RepOutcome& out : acc.per_method[m])
                        if (out.ok) ss += (out.error - row.mean_err) * (out.error - row.mean_err);
                    row.sd_err = std::sqrt(ss / (row.n_reps - 1));
                }
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

std::string report_csv(const BenchmarkReport& report) {
    std::string out = "setting,p,rho,cov_kind,method,n_reps,mean_err,sd_err,mean_d_hat,seconds\n";
    char line[512];
    for (const BenchmarkRow& row : report.rows) {
        std::snprintf(line, sizeof(line), "%s,%d,%.17g,%s,%s,%d,%.17g,%.17g,%.17g,%.3f\n",
                      row.setting.c_str(), row.p, row.rho, row.cov_kind.c_str(),
                      row.method.c_str(), row.n_reps, row.mean_err, row.sd_err,
                      row.mean_d_hat, row.seconds);
        out += line;
    }
    return out;
}

std::string report_table(const BenchmarkReport& report) {
    std::string out;
    char line[512];
    std::snprintf(line, sizeof(line), "%-8s %-6s %-6s %-6s %-13s %-16s %-9s %s\n", "setting",
                  "p", "rho", "cov", "method", "error", "mean_d", "reps");
    out += line;
    for (const BenchmarkRow& row : report.rows) {
        char cell[64];
        std::snprintf(cell, sizeof(cell), "%.2f ( %.2f )", row.mean_err, row.sd_err);
        std::snprintf(line, sizeof(line), "%-8s %-6d %-6.2f %-6s %-13s %-16s %-9.2f %d\n",
                      row.setting.c_str(), row.p, row.rho, row.cov_kind.c_str(),
                      row.method.c_str(), cell, row.mean_d_hat, row.n_reps);
        out += line;
        if (row.failures > 0) {
            std::snprintf(line, sizeof(line), "    (%d replication(s) failed)\n", row.failures);
            out += line;
        }
    }
    return out;
}

}  // namespace lassosir::simbench
