#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvwalk/memory_catalog.hpp"

namespace rvwalk {

inline double critical_p(double gamma) { return (gamma + 0.5) / (gamma + 1.0); }
inline double hat_p(double gamma) { return gamma / (gamma + 1.0); }

// p is treated as sitting on a critical point when within this distance.
inline constexpr double kCriticalTol = 1e-9;

enum class EtaBranch {
    Forward, // eta_n = sum_{l<n} 1/(a_l nu_l), the series diverges
    Tail,    // eta_bar_n = sum_{l>=n} 1/(a_l nu_l), truncated with a tail bound
    None,
};

struct BuildOptions {
    bool with_eta = true;
    std::uint64_t tail_horizon_factor = 8;
};

struct SequenceTable {
    double p = 0.0;
    double gamma = 0.0;
    std::uint64_t n_max = 0;

    // index 0 holds n = 1
    std::vector<double> mu, nu, log_a, v_sq, sigma_sq, eta;

    EtaBranch eta_branch = EtaBranch::None;
    std::uint64_t tail_horizon = 0;  // last index summed for eta_bar
    double tail_bound = 0.0;         // regular-variation estimate of the rest

    double mu_at(std::uint64_t n) const { return mu[n - 1]; }
    double nu_at(std::uint64_t n) const { return nu[n - 1]; }
    double log_a_at(std::uint64_t n) const { return log_a[n - 1]; }
    double a_at(std::uint64_t n) const { return std::exp(log_a[n - 1]); }
    double v_sq_at(std::uint64_t n) const { return v_sq[n - 1]; }
    double sigma_sq_at(std::uint64_t n) const { return sigma_sq[n - 1]; }
    double eta_at(std::uint64_t n) const { return eta[n - 1]; }

    // log(a_n mu_n)
    double log_amu_at(std::uint64_t n) const { return log_a[n - 1] + std::log(mu[n - 1]); }

    void write_csv(std::ostream& os) const;
};

SequenceTable build_sequences(const MemorySpec& spec, double p, std::uint64_t n_max,
                              const BuildOptions& opts = {});

// log a_n(x) = -sum_{i<n} log1p(x mu_{i+1}/nu_i), n = 1..n_max
std::vector<double> generalized_log_a(const std::vector<double>& mu,
                                      const std::vector<double>& nu, double x);

enum class Regime { Subcritical, CriticalUnboundedV, CriticalBoundedV, Supercritical };
enum class VBounded { True, False, HeuristicTrue, HeuristicFalse };
enum class ScaleKind { SqrtN, Sigma, InvAMu };
enum class LimitKind { GaussianProcess, GaussianSqrtLine, RandomSqrtLine, RandomPowerLine };

const char* to_string(Regime r);
const char* to_string(VBounded v);
const char* to_string(ScaleKind s);
const char* to_string(LimitKind l);
const char* to_string(EtaBranch b);

struct RegimeReport {
    double p = 0.0;
    double gamma = 0.0;
    double p_c = 0.0;
    double p_hat = 0.0;
    Regime regime = Regime::Subcritical;
    VBounded v_bounded = VBounded::False;
    ScaleKind scale_kind = ScaleKind::SqrtN;
    std::string predicted_scale;   // e.g. "n log n" for sigma_n^2
    std::optional<double> scale_constant;
    LimitKind limit_kind = LimitKind::GaussianProcess;
    bool covered = true;           // false when gamma <= -1/2 and a Gaussian claim is made
    std::vector<std::string> notes;

    nlohmann::json to_json() const;
};

RegimeReport classify_regime(const MemorySpec& spec, double p);

double subcritical_limit_variance(double p, double gamma);
double covariance_kernel(double s, double t, double p, double gamma);

struct CriticalScale {
    std::uint64_t n = 0;
    bool bounded = false;
    double numeric_sq = 0.0;          // sigma_n^2, or 1/(a_n mu_n)^2 when bounded
    std::string descriptor;           // closed-form order of numeric_sq, or "numeric"
    std::optional<double> constant;   // multiplies the descriptor when known
    std::optional<double> closed_form_sq; // descriptor(n) * constant
    std::optional<double> c_mu;       // n a_n^2 mu_n^2 / ell_n^{1/(gamma+1)}

    nlohmann::json to_json() const;
};

// Requires table.p at p_c and n <= table.n_max.
CriticalScale critical_scale(const MemorySpec& spec, const SequenceTable& table, std::uint64_t n);
CriticalScale critical_scale(const MemorySpec& spec, std::uint64_t n);

// Order of sigma_n^2 at criticality; nullopt when v_n stays bounded or the
// family has no closed form.
struct CriticalDescriptor {
    std::string text;
    double constant = 1.0;
    double (*order)(double n, double param) = nullptr;
    double param = 0.0;
};
std::optional<CriticalDescriptor> critical_descriptor(const MemorySpec& spec);

enum class TimescaleMode { Exponential, BrownianTuned };

struct Timescale {
    std::string example;
    TimescaleMode mode = TimescaleMode::Exponential;
    double t = 1.0;
    std::uint64_t n = 0;
    std::uint64_t index = 0;
    double scale = 0.0;       // NaN when no nondegenerate limit exists
    double clock = 0.0;       // limit is B(t^clock); 0 means a degenerate sqrt(t) Z line
    bool degenerate_limit = false;
    bool has_limit = true;
    std::string prediction;
};

// Floor with snapping: values within 1e-9 relative of an integer round to it.
std::uint64_t snapped_floor(double x);

// Name of the exploratory example a spec belongs to, or empty.
std::string timescale_example(const MemorySpec& spec);

Timescale exploratory_timescale(const MemorySpec& spec, TimescaleMode mode, double t, std::uint64_t n);

// Predicted correlation of the rescaled walk at times s and t.
double predicted_correlation(const Timescale& ts, double s, double t);

} // namespace rvwalk
