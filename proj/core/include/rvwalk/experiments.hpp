#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rvwalk/stat_harness.hpp"

namespace rvwalk {

// Shared knobs. Thresholds follow the harness defaults: 4 standard errors
// for moment comparisons, KS p-value above 0.001.
struct RunControl {
    std::optional<std::uint64_t> master_seed; // each experiment has its own fixed default
    unsigned threads = 0;
    double ks_alpha = 1e-3;
    double moment_se = 4.0;
};

struct OracleEquivalenceParams {
    std::vector<double> gammas{0.0, 0.5, 1.0};
    // NaN entries stand for p_hat and p_c of each gamma
    std::vector<double> ps{0.0, 0.3, kNaN, kNaN, 0.9};
    std::uint64_t n = 8;
    double tolerance = 1e-10;
    double budget_seconds = 60.0;
};
ExperimentReport oracle_equivalence(const OracleEquivalenceParams& prm = {}, const RunControl& rc = {});

struct SubcriticalVarianceParams {
    double gamma = 0.0;
    double p = 0.25;
    std::uint64_t n_exact = 1000000;
    double band_lo = 1.98, band_hi = 2.02;
    std::uint64_t n = 100000;
    std::uint64_t replicas = 10000;
    double budget_seconds = 300.0;
};
ExperimentReport subcritical_variance(const SubcriticalVarianceParams& prm = {}, const RunControl& rc = {});

struct SubcriticalCltParams {
    double gamma = 0.0;
    double p = 0.25;
    std::uint64_t n = 100000;
    std::uint64_t replicas = 20000;
    std::vector<std::pair<double, double>> pairs{{0.5, 1.0}};
    double budget_seconds = 900.0;
};
ExperimentReport subcritical_clt(const SubcriticalCltParams& prm = {}, const RunControl& rc = {});

// Kernel check alone over the default finite-dimensional projections.
SubcriticalCltParams covariance_defaults();
ExperimentReport covariance(const SubcriticalCltParams& prm = covariance_defaults(), const RunControl& rc = {});

struct PhatBranchParams {
    double gamma = 1.0;
    std::uint64_t n = 1000000;
    double rel_tol = 0.03;
    double budget_seconds = 120.0;
};
ExperimentReport phat_branch(const PhatBranchParams& prm = {}, const RunControl& rc = {});

struct CriticalClassicParams {
    double gamma = 0.0;
    std::uint64_t n_lo = 1000000, n_hi = 10000000;
    double drift_tol = 0.02;
    double limit_tol = 0.02;
    double moment_rel_tol = 0.10;
    std::uint64_t n_mc = 1000000;
    std::uint64_t replicas = 10000;
    double budget_seconds = 1800.0;
};
ExperimentReport critical_classic(const CriticalClassicParams& prm = {}, const RunControl& rc = {});

struct CriticalNovelParams {
    double light_gamma = 0.5, light_alpha = 0.5;
    std::uint64_t light_n = 10000000;
    double light_rel_tol = 0.15;
    double zeta_gamma = 0.0, zeta_alpha = -1.0;
    std::vector<std::uint64_t> zeta_grid{100000, 1000000, 10000000};
    double budget_seconds = 600.0;
};
ExperimentReport critical_novel(const CriticalNovelParams& prm = {}, const RunControl& rc = {});

struct SupercriticalAsParams {
    double gamma = 0.0;
    double p = 0.9;
    std::uint64_t flat_lo = 100000, flat_hi = 10000000;
    double flat_tol = 0.01;
    // oscillation windows [w1, 2 w1] and [w2, 2 w2]
    std::uint64_t w1 = 100000, w2 = 1000000;
    std::uint64_t window_points = 100;
    std::uint64_t replicas = 1000;
    double min_shrink = 0.40;
    double budget_seconds = 900.0;
};
ExperimentReport supercritical_as(const SupercriticalAsParams& prm = {}, const RunControl& rc = {});

struct PlatykurtosisParams {
    double gamma = 0.0;
    double p = 0.9;
    std::uint64_t n_exact = 1000000;
    std::uint64_t n = 100000;
    std::uint64_t replicas = 100000;
    double se_mult = 3.0;
    double budget_seconds = 1200.0;
};
ExperimentReport platykurtosis(const PlatykurtosisParams& prm = {}, const RunControl& rc = {});

struct MarginalLawParams {
    double gamma = 1.0;
    double p = 0.6;
    std::uint64_t n_exact = 8;
    double exact_tol = 1e-12;
    std::uint64_t n = 50;
    std::uint64_t replicas = 100000;
    double budget_seconds = 120.0;
};
ExperimentReport marginal_law(const MarginalLawParams& prm = {}, const RunControl& rc = {});

struct SllnParams {
    std::vector<double> ps{0.0, 0.5, 0.9};
    std::vector<double> gammas{0.0, 1.0};
    std::uint64_t n = 1000000;
    std::uint64_t replicas = 1000;
    std::vector<std::uint64_t> n0{1000, 4000, 16000, 64000};
    double target_ratio = 0.5;
    double se_mult = 4.0;
    double budget_seconds = 600.0;
};
ExperimentReport slln(const SllnParams& prm = {}, const RunControl& rc = {});

struct KaramataParams {
    std::uint64_t n = 1000000;
    std::vector<double> nu_gammas{-0.5, 0.0, 0.5, 1.0, 2.0};
    double nu_tol = 0.02;
    std::vector<double> index_gammas{0.0, 0.5, 1.0};
    std::vector<double> index_ps{0.3, 0.7};
    double index_tol = 0.02;
    double eta_gamma = 1.0, eta_p = 0.7;
    double eta_tol = 0.02;
    double budget_seconds = 120.0;
};
ExperimentReport karamata(const KaramataParams& prm = {}, const RunControl& rc = {});

struct PerformanceParams {
    double gamma = 0.0;
    double p = 0.5;
    std::uint64_t n = 100000000;
    double budget_seconds = 300.0;
    double max_bytes_per_step = 16.0;
    // repeat the walk with the binary-indexed tree forced on
    bool tree_run = true;
};
ExperimentReport performance(const PerformanceParams& prm = {}, const RunControl& rc = {});

// CLI-facing suites. Overrides apply to the Monte Carlo size of each member.
struct SuiteOptions {
    std::optional<std::uint64_t> n;
    std::optional<std::uint64_t> replicas;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
};
std::vector<std::string> suite_names();
bool is_suite(const std::string& name);
std::vector<ExperimentReport> run_suite(const std::string& name, const SuiteOptions& opts = {});

} // namespace rvwalk
