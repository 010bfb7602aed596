#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

// Data generators for the thirteen simulation settings and both covariance
// families, plus the Monte-Carlo benchmark runner that reproduces the
// estimation-error tables.
namespace lassosir::simbench {

enum class CovKind { ar1, block };

/// ar1: sigma_ij = rho^|i-j|. block: sigma_ii = 1, sigma_ij = rho inside the
/// active set and inside its complement, 0.1 across.
struct CovarianceSpec {
    CovKind kind = CovKind::ar1;
    int p = 0;
    double rho = 0.0;
    std::vector<int> active_set;  // 0-based; used by the block family
};

struct Covariance {
    Eigen::MatrixXd sigma;
    Eigen::MatrixXd factor;  // lower-triangular L with L L^T = sigma
};

/// Dense covariance and Cholesky factor; throws std::invalid_argument when
/// the configuration is not positive definite.
Covariance make_covariance(const CovarianceSpec& spec);

/// Column sampler for N(0, Sigma). The ar1 family uses the exact stationary
/// autoregressive recursion (O(p) per draw, no dense factor); the block
/// family draws through the Cholesky factor built once here.
class CovarianceSampler {
public:
    explicit CovarianceSampler(const CovarianceSpec& spec);
    Eigen::VectorXd sample(std::mt19937_64& gen) const;
    int dimension() const { return spec_.p; }

private:
    CovarianceSpec spec_;
    Eigen::MatrixXd factor_;  // block family only
};

enum class SettingId { I, II, III, IV, V, VI, VII, VIII, IX, X, XI, XII, XIII };

enum class ResponseKind { continuous, dichotomous, trichotomous };

struct SimulationSetting {
    SettingId id;
    std::string name;
    int d_true;
    ResponseKind response;
    std::vector<int> active_set;  // 0-based
    bool fixed_coefficients;      // +-1 pattern instead of N(0,1) draws
};

const SimulationSetting& setting_info(SettingId id);
SettingId parse_setting(const std::string& name);

/// Link evaluation for one sample: z1, z2 are the index values x.beta_1,
/// x.beta_2 (z2 ignored for single-index settings), e1/e2 the error draws
/// (e2 used only by the trichotomous setting).
double response_value(SettingId id, double z1, double z2, double e1, double e2);

struct Dataset {
    Eigen::MatrixXd X;       // p x n
    Eigen::VectorXd y;
    Eigen::MatrixXd B_true;  // p x d_true
};

Dataset sample_dataset(SettingId id, const CovarianceSpec& cov, int n, std::uint64_t seed);
Dataset sample_dataset(SettingId id, const CovarianceSampler& sampler, int n,
                       std::uint64_t seed);

enum class Method { lasso_sir, dt_sir, matrix_lasso };
std::string method_name(Method m);
Method parse_method(const std::string& name);

struct BenchmarkConfig {
    std::vector<SettingId> settings;
    std::vector<int> p_grid = {100, 1000};
    CovKind cov_kind = CovKind::ar1;
    double rho = 0.5;
    std::vector<Method> methods = {Method::lasso_sir};
    int replications = 100;
    int n = 1000;
    int slices = 20;  // continuous settings; discrete ones use the level count
    int cv_folds = 10;
    std::uint64_t seed = 0;
    int threads = 1;
    std::optional<int> directions;   // fixed d; default estimates it per replication
    std::optional<int> screen_size;  // DT-SIR screening override
};

struct BenchmarkRow {
    std::string setting;
    int p = 0;
    double rho = 0.0;
    std::string cov_kind;
    std::string method;
    int n_reps = 0;  // successful replications
    double mean_err = 0.0;
    double sd_err = 0.0;
    double mean_d_hat = 0.0;
    double seconds = 0.0;
    int failures = 0;
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows;
    std::uint64_t seed = 0;
};

/// One row per (setting, p, method). Per-replication seeds are derived from
/// the root seed and the cell content alone, so results are independent of
/// thread count and of the order cells run in. Replication failures are
/// recorded per cell, never fatal.
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

/// CSV with the fixed column set
/// setting,p,rho,cov_kind,method,n_reps,mean_err,sd_err,mean_d_hat,seconds.
std::string report_csv(const BenchmarkReport& report);

/// Human-readable rows in the "mean ( sd )" style, e.g. "0.12 ( 0.02 )".
std::string report_table(const BenchmarkReport& report);

}  // namespace lassosir::simbench
