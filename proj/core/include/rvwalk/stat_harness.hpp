#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvwalk/scaling_engine.hpp"
#include "rvwalk/walk_simulator.hpp"

namespace rvwalk {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

struct GrowthFit {
    double slope = 0.0;
    double intercept = 0.0;
    double se = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    bool superlinear = false;
    std::size_t points = 0;
};

// OLS of log var on log n, with a two-sided t interval from the residuals.
GrowthFit growth_exponent(const std::vector<std::pair<double, double>>& n_var, double confidence = 0.95);

struct MomentSummary {
    double mean = 0.0;
    double second = 0.0;   // mean of x^2 about zero
    double variance = 0.0; // central
    double skewness = 0.0;
    double kurtosis = 0.0; // central fourth / variance^2
};
MomentSummary summarize(const std::vector<double>& x);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

double normal_cdf(double x, double variance = 1.0);
// sup |F_n - F| for a sample and a continuous CDF
double ks_statistic(std::vector<double> samples, double (*cdf)(double, double), double param);
// Kolmogorov limit law with the Stephens small-sample correction:
// lambda = (sqrt(n) + 0.12 + 0.11/sqrt(n)) D, Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2)
double ks_p_value(double d, std::size_t n);

struct GaussianityResult {
    KsResult ks;
    double variance_estimate = 0.0; // mean of x^2, the centred target has mean 0
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};
GaussianityResult gaussianity_test(const std::vector<double>& samples, double target_variance);

struct ChiSquareResult {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};
ChiSquareResult chi_square_test(const std::vector<double>& observed, const std::vector<double>& probs);

struct CovarianceEstimate {
    double s = 0.0, t = 0.0;
    double estimate = 0.0;
    double se = 0.0;
    double target = 0.0;
    double z = 0.0;
};
// mean of (x_s/scale)(x_t/scale) over replicas
CovarianceEstimate covariance_check(const std::vector<double>& xs, const std::vector<double>& xt,
                                    double scale, double target);
// Looks up floor(n s) and floor(n t) among the trajectory checkpoints.
CovarianceEstimate covariance_check(const std::vector<WalkTrajectory>& trajs, double s, double t,
                                    std::uint64_t n, double scale, double target);

struct OscillationSummary {
    std::uint64_t n1 = 0, n2 = 0;
    std::size_t paths = 0;
    std::size_t points = 0;
    double q50 = 0.0, q90 = 0.0, q99 = 0.0;
};
// Per path max over window checkpoints of |a_n mu_n S_n - a_{n2} mu_{n2} S_{n2}|.
OscillationSummary as_convergence_check(const std::vector<WalkTrajectory>& trajs, const SequenceTable& seq,
                                        Regime regime, std::uint64_t n1, std::uint64_t n2);

struct SllnSummary {
    std::vector<std::uint64_t> n0;
    std::vector<double> median;
    std::vector<double> ratio;    // median[i+1] / median[i]
    std::vector<double> ratio_se; // bootstrap
};
// Uses the exact running sups recorded by the walker.
SllnSummary slln_check(const std::vector<WalkTrajectory>& trajs, const std::vector<std::uint64_t>& n0,
                       double p, std::uint64_t bootstrap = 200, std::uint64_t seed = 12345);

struct KurtosisResult {
    double kurtosis = 0.0;
    double excess = 0.0;
    double se = 0.0; // jackknife
    std::size_t n = 0;
};
KurtosisResult kurtosis_check(const std::vector<double>& samples);
// Guarded form: rademacher innovations and an a.s.-limit regime only.
KurtosisResult kurtosis_check(const std::vector<double>& samples, const InnovationSpec& innovation, Regime regime);

double quantile(std::vector<double> x, double q);

struct SubCheck {
    std::string name;
    double estimate = kNaN;
    double se = kNaN;
    double target = kNaN;
    std::string target_source;
    std::string tolerance;
    Verdict verdict = Verdict::Inconclusive;
    std::string detail;
};

struct ReportRow {
    double n = 0.0, estimate = 0.0, target = 0.0, lo = 0.0, hi = 0.0;
};

struct ExperimentReport {
    std::string kind;
    nlohmann::json params;
    std::vector<std::uint64_t> n_grid;
    std::uint64_t replicas = 0;
    std::uint64_t master_seed = 0;
    std::vector<SubCheck> checks;
    std::vector<ReportRow> rows;
    nlohmann::json statistics = nlohmann::json::object();
    std::vector<std::string> notes;
    double wall_seconds = 0.0;

    Verdict verdict() const;
    SubCheck& add(SubCheck c) {
        checks.push_back(std::move(c));
        return checks.back();
    }
    nlohmann::json to_json() const;
    std::string to_text() const;
    void write_csv(std::ostream& os) const;
};

// |est - target| <= k * se
Verdict within_se(double est, double target, double se, double k);

} // namespace rvwalk
