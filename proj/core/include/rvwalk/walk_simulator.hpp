#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvwalk/memory_catalog.hpp"
#include "rvwalk/rng.hpp"

namespace rvwalk {

struct Rademacher {
    bool operator==(const Rademacher&) const = default;
};
struct StandardNormal {
    bool operator==(const StandardNormal&) const = default;
};
// Inverse-CDF sampling from quantiles at u = i/m, linearly interpolated.
struct CustomIID {
    std::vector<double> quantiles;
    double declared_mean = 0.0;
    double declared_variance = 1.0;
    std::string descriptor;
    bool operator==(const CustomIID&) const = default;
};
using InnovationSpec = std::variant<Rademacher, StandardNormal, CustomIID>;

std::string innovation_name(const InnovationSpec& in);
nlohmann::json innovation_to_json(const InnovationSpec& in);
InnovationSpec innovation_from_json(const nlohmann::json& j);
void validate_innovation(const InnovationSpec& in);

inline constexpr std::size_t kDefaultMemoryCap = std::size_t(4) << 30;

// How beta is drawn. Auto picks Uniform for mu == 1 (or p == 0), an exact
// envelope-rejection sampler for power-law weights with gamma > 0, and the
// binary-indexed tree otherwise. Tree forces the tree for any spec.
enum class SamplerChoice { Auto, Tree };
enum class SamplerKind { Uniform, PowerEnvelope, Tree };
const char* to_string(SamplerKind k);

struct WalkConfig {
    MemorySpec spec = MemorySpec::power_law(0.0);
    double p = 0.0;
    InnovationSpec innovation = Rademacher{};
    std::uint64_t n_steps = 1;
    std::vector<std::uint64_t> checkpoints; // strictly increasing, within [1, n_steps]
    bool record_martingales = false;
    std::uint64_t seed = 0;
    // Exact sup_{n >= n0} |S_n / n| for each listed n0, over every step.
    std::vector<std::uint64_t> sup_starts;
    std::size_t memory_cap_bytes = kDefaultMemoryCap;
    SamplerChoice sampler = SamplerChoice::Auto;

    SamplerKind sampler_kind() const;
    void validate() const;
    std::size_t footprint_bytes() const;
    nlohmann::json to_json() const;
    static WalkConfig from_json(const nlohmann::json& j);
    std::string hash() const; // FNV-1a of the canonical JSON without the seed
};

struct WalkTrajectory {
    std::uint64_t replica = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<std::uint64_t> n;
    std::vector<double> S;
    std::vector<double> M, L, N; // filled when martingales are recorded
    std::vector<double> drift;   // p sum_{k<n} M_k/(a_k nu_k)
    std::vector<double> eta_M;   // p eta_n M_n with the forward eta
    std::vector<double> sup_abs_mean;
    double last_step = 0.0; // X_{n_steps}
    std::size_t bytes_per_step_storage = 0;
};

// Geometric grid of about k indices in [1, n], always containing n.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t n, std::uint64_t k);
// Geometric grid restricted to [lo, hi].
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t lo, std::uint64_t hi, std::uint64_t k);

// Reusable per-thread walk engine. Buffers persist across runs.
class Walker {
public:
    explicit Walker(const WalkConfig& cfg);
    ~Walker();
    Walker(const Walker&) = delete;
    Walker& operator=(const Walker&) = delete;

    WalkTrajectory run(std::uint64_t seed, std::uint64_t replica = 0);

private:
    struct Impl;
    Impl* impl_;
};

WalkTrajectory simulate(const WalkConfig& cfg);

// Replica r runs on derive_stream_seed(master_seed, r). threads = 0 picks
// hardware concurrency; output is identical for every thread count.
std::vector<WalkTrajectory> simulate_batch(const WalkConfig& cfg, std::uint64_t replicas,
                                           std::uint64_t master_seed, unsigned threads = 0);

// Runs replicas and hands each trajectory to sink, possibly from several
// threads at once; sinks should write into slots indexed by tr.replica.
void run_replicas(const WalkConfig& cfg, std::uint64_t replicas, std::uint64_t master_seed,
                  unsigned threads, const std::function<void(const WalkTrajectory&)>& sink);

// X_n across replicas.
std::vector<double> marginal_law_sample(const WalkConfig& cfg, std::uint64_t n, std::uint64_t replicas,
                                        std::uint64_t master_seed, unsigned threads = 0);

void write_trajectories_csv(std::ostream& os, const std::vector<WalkTrajectory>& trajs);

// Little-endian layout:
//   "RVWT" u32 version=1 u32 flags(bit0 martingales) u64 replicas u64 k
//   u64 checkpoint[k]; per replica: u64 seed, f64 S[k], then M[k] L[k] N[k] if flagged.
void write_trajectories_binary(std::ostream& os, const std::vector<WalkTrajectory>& trajs);
std::vector<WalkTrajectory> read_trajectories_binary(std::istream& is);

// Largest relative gaps in S = L + drift and S = N + p eta M over checkpoints.
struct IdentityCheck {
    double max_rel_L = 0.0;
    double max_rel_N = 0.0;
};
IdentityCheck check_decompositions(const WalkTrajectory& tr);

namespace detail {
// Exact draw from P(k) = k^gamma / sum_{j<=m} j^gamma, gamma > 0, by rejection
// from the continuous law with density x^gamma on [1, m+1]. u0 seeds the
// first proposal; further uniforms come from rng.
std::uint64_t sample_power_envelope(double u0, std::uint64_t m, double gamma, Rng& rng);

void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(unsigned worker, std::uint64_t i)>& body);
}

} // namespace rvwalk
