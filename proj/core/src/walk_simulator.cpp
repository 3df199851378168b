#include "rvwalk/walk_simulator.hpp"
#include "rvwalk/csv.hpp"
#include "rvwalk/error.hpp"
#include "rvwalk/rng.hpp"
#include "rvwalk/weighted_sampler.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <exception>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

namespace rvwalk {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

bool is_rademacher(const InnovationSpec& in) { return std::holds_alternative<Rademacher>(in); }

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

std::string innovation_name(const InnovationSpec& in) {
    return std::visit(overloaded{
        [](const Rademacher&) { return std::string("rademacher"); },
        [](const StandardNormal&) { return std::string("normal"); },
        [](const CustomIID&) { return std::string("custom"); },
    }, in);
}

nlohmann::json innovation_to_json(const InnovationSpec& in) {
    nlohmann::json j;
    j["kind"] = innovation_name(in);
    if (auto c = std::get_if<CustomIID>(&in)) {
        j["quantiles"] = c->quantiles;
        j["declared_mean"] = c->declared_mean;
        j["declared_variance"] = c->declared_variance;
        j["descriptor"] = c->descriptor;
    }
    return j;
}

InnovationSpec innovation_from_json(const nlohmann::json& j) {
    std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
    if (kind == "rademacher") return Rademacher{};
    if (kind == "normal") return StandardNormal{};
    if (kind == "custom") {
        CustomIID c;
        c.quantiles = j.at("quantiles").get<std::vector<double>>();
        c.declared_mean = j.value("declared_mean", 0.0);
        c.declared_variance = j.value("declared_variance", 1.0);
        c.descriptor = j.value("descriptor", std::string());
        validate_innovation(c);
        return c;
    }
    fail(ErrorKind::InvalidSpec, "unknown innovation kind '" + kind + "'");
}

void validate_innovation(const InnovationSpec& in) {
    if (auto c = std::get_if<CustomIID>(&in)) {
        require(c->quantiles.size() >= 2, ErrorKind::InvalidSpec, "custom innovation needs >= 2 quantiles");
        require(std::is_sorted(c->quantiles.begin(), c->quantiles.end()), ErrorKind::InvalidSpec,
                "custom quantiles must be nondecreasing");
        for (double q : c->quantiles)
            require(std::isfinite(q), ErrorKind::InvalidSpec, "custom quantiles must be finite");
        require(c->declared_mean == 0.0, ErrorKind::InvalidSpec, "innovations must have mean 0");
        require(std::isfinite(c->declared_variance) && c->declared_variance > 0.0, ErrorKind::InvalidSpec,
                "declared variance must be positive");
    }
}

void WalkConfig::validate() const {
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorKind::InvalidSpec, "p must lie in [0,1]");
    require(n_steps >= 1, ErrorKind::InvalidSpec, "n_steps must be >= 1");
    if (auto len = spec.max_index())
        require(n_steps <= *len, ErrorKind::InvalidSpec, "n_steps exceeds custom memory table length");
    validate_innovation(innovation);
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        require(checkpoints[i] >= 1 && checkpoints[i] <= n_steps, ErrorKind::InvalidSpec,
                "checkpoints must lie in [1, n_steps]");
        require(i == 0 || checkpoints[i] > checkpoints[i - 1], ErrorKind::InvalidSpec,
                "checkpoints must be strictly increasing");
    }
    for (std::size_t i = 0; i < sup_starts.size(); ++i) {
        require(sup_starts[i] >= 1 && sup_starts[i] <= n_steps, ErrorKind::InvalidSpec,
                "sup starts must lie in [1, n_steps]");
        require(i == 0 || sup_starts[i] > sup_starts[i - 1], ErrorKind::InvalidSpec,
                "sup starts must be strictly increasing");
    }
    require(footprint_bytes() <= memory_cap_bytes, ErrorKind::ResourceLimit,
            "walk needs " + std::to_string(footprint_bytes()) + " bytes, above the cap of "
                + std::to_string(memory_cap_bytes));
}

const char* to_string(SamplerKind k) {
    switch (k) {
    case SamplerKind::Uniform: return "uniform";
    case SamplerKind::PowerEnvelope: return "power-envelope";
    case SamplerKind::Tree: return "tree";
    }
    return "?";
}

SamplerKind WalkConfig::sampler_kind() const {
    if (sampler == SamplerChoice::Tree) return SamplerKind::Tree;
    if (spec.is_unit() || (p == 0.0 && !record_martingales)) return SamplerKind::Uniform;
    if (std::holds_alternative<PowerLaw>(spec.family()) && spec.gamma() > 0.0) return SamplerKind::PowerEnvelope;
    return SamplerKind::Tree;
}

std::size_t WalkConfig::footprint_bytes() const {
    std::size_t n = static_cast<std::size_t>(n_steps);
    std::size_t steps = is_rademacher(innovation) ? ((n + 63) / 64) * 8 : n * sizeof(double);
    std::size_t tree = sampler_kind() == SamplerKind::Tree ? (n + 1) * sizeof(double) : 0;
    return steps + tree;
}

nlohmann::json WalkConfig::to_json() const {
    nlohmann::json j;
    j["memory"] = spec.to_json();
    j["p"] = p;
    j["innovation"] = innovation_to_json(innovation);
    j["n_steps"] = n_steps;
    j["checkpoints"] = checkpoints;
    j["record_martingales"] = record_martingales;
    if (sampler == SamplerChoice::Tree) j["sampler"] = "tree";
    j["seed"] = seed;
    if (!sup_starts.empty()) j["sup_starts"] = sup_starts;
    j["memory_cap_bytes"] = memory_cap_bytes;
    return j;
}

WalkConfig WalkConfig::from_json(const nlohmann::json& j) {
    try {
        WalkConfig c;
        c.spec = MemorySpec::from_json(j.at("memory"));
        c.p = j.at("p").get<double>();
        c.innovation = j.contains("innovation") ? innovation_from_json(j.at("innovation")) : Rademacher{};
        c.n_steps = j.at("n_steps").get<std::uint64_t>();
        c.checkpoints = j.value("checkpoints", std::vector<std::uint64_t>{});
        c.record_martingales = j.value("record_martingales", false);
        std::string smp = j.value("sampler", std::string("auto"));
        require(smp == "auto" || smp == "tree", ErrorKind::InvalidSpec, "sampler must be auto or tree");
        c.sampler = smp == "tree" ? SamplerChoice::Tree : SamplerChoice::Auto;
        c.seed = j.value("seed", std::uint64_t{0});
        c.sup_starts = j.value("sup_starts", std::vector<std::uint64_t>{});
        c.memory_cap_bytes = j.value("memory_cap_bytes", kDefaultMemoryCap);
        return c;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidSpec, std::string("malformed walk config: ") + e.what());
    }
}

std::string WalkConfig::hash() const {
    nlohmann::json j = to_json();
    j.erase("seed");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
    return buf;
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t lo, std::uint64_t hi, std::uint64_t k) {
    require(lo >= 1 && hi >= lo, ErrorKind::InvalidSpec, "geometric grid needs 1 <= lo <= hi");
    require(k >= 1, ErrorKind::InvalidSpec, "geometric grid needs k >= 1");
    std::vector<std::uint64_t> out;
    if (k == 1 || lo == hi) {
        if (lo != hi && k > 1) out.push_back(lo);
        out.push_back(hi);
        return out;
    }
    double llo = std::log(static_cast<double>(lo)), lhi = std::log(static_cast<double>(hi));
    for (std::uint64_t i = 0; i < k; ++i) {
        double x = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(k - 1));
        auto v = static_cast<std::uint64_t>(std::llround(x));
        v = std::clamp(v, lo, hi);
        if (out.empty() || v > out.back()) out.push_back(v);
    }
    if (out.back() != hi) out.push_back(hi);
    return out;
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t n, std::uint64_t k) {
    return geometric_checkpoints(1, n, k);
}

struct Walker::Impl {
    WalkConfig cfg;
    std::string hash;
    SamplerKind kind;
    bool bits;
    std::vector<std::uint64_t> words;
    std::vector<double> steps;
    std::optional<DynamicWeightedIndex> tree;
    double custom_scale = 1.0;

    explicit Impl(const WalkConfig& c) : cfg(c) {
        cfg.validate();
        hash = cfg.hash();
        kind = cfg.sampler_kind();
        bits = is_rademacher(cfg.innovation);
        if (bits) words.assign((cfg.n_steps + 63) / 64, 0);
        else steps.assign(cfg.n_steps, 0.0);
        if (kind == SamplerKind::Tree) tree.emplace(cfg.n_steps);
        if (auto ci = std::get_if<CustomIID>(&cfg.innovation))
            custom_scale = 1.0 / std::sqrt(ci->declared_variance);
    }

    double draw_real(Rng& rng) const {
        if (std::holds_alternative<StandardNormal>(cfg.innovation)) return rng.normal();
        const auto& q = std::get<CustomIID>(cfg.innovation).quantiles;
        double x = rng.uniform() * static_cast<double>(q.size() - 1);
        auto i = static_cast<std::size_t>(x);
        if (i >= q.size() - 1) return q.back() * custom_scale;
        double f = x - static_cast<double>(i);
        return (q[i] + f * (q[i + 1] - q[i])) * custom_scale;
    }

    template <SamplerKind K, bool Bits, bool Mart>
    WalkTrajectory run_impl(std::uint64_t seed, std::uint64_t replica);
};

template <SamplerKind K, bool Bits, bool Mart>
WalkTrajectory Walker::Impl::run_impl(std::uint64_t seed, std::uint64_t replica) {
    Rng rng(seed);
    const std::uint64_t N = cfg.n_steps;
    const double p = cfg.p;
    const auto& cps = cfg.checkpoints;
    const auto& sups = cfg.sup_starts;
    const bool track_sup = !sups.empty();

    WalkTrajectory tr;
    tr.replica = replica;
    tr.seed = seed;
    tr.config_hash = hash;
    tr.n = cps;
    tr.S.reserve(cps.size());
    tr.bytes_per_step_storage = cfg.footprint_bytes() / std::max<std::uint64_t>(N, 1);
    if constexpr (Mart) {
        for (auto* v : {&tr.M, &tr.L, &tr.N, &tr.drift, &tr.eta_M}) v->reserve(cps.size());
    }
    std::vector<double> seg_max(sups.size(), 0.0);

    if constexpr (Bits) std::fill(words.begin(), words.end(), 0);
    if constexpr (K == SamplerKind::Tree) tree->clear();
    const double gamma = cfg.spec.gamma();
    // one uniform decides recollection and, rescaled, locates beta
    const bool share_u = p >= 1e-6;
    MemorySequence memseq(cfg.spec);

    std::size_t ci = 0;
    std::uint64_t next_cp = cps.empty() ? 0 : cps[0];
    std::size_t sj = 0;
    std::uint64_t next_sup = track_sup && sups.size() > 1 ? sups[1] : 0;

    // martingale companions
    double a = 1.0, nu = 0.0, Y = 0.0, L = 0.0, Nm = 0.0, eta = 0.0, drift = 0.0;

    double S = 0.0;
    for (std::uint64_t n = 1; n <= N; ++n) {
        double x;
        double u = 0.0;
        if (n > 1 && (u = rng.uniform()) < p) {
            double v = share_u ? u / p : rng.uniform();
            std::uint64_t k;
            if constexpr (K == SamplerKind::Uniform) k = sample_uniform_index(v, n - 1);
            else if constexpr (K == SamplerKind::PowerEnvelope) k = detail::sample_power_envelope(v, n - 1, gamma, rng);
            else k = tree->sample(v);
            if constexpr (Bits) x = ((words[(k - 1) >> 6] >> ((k - 1) & 63)) & 1u) ? 1.0 : -1.0;
            else x = steps[k - 1];
        } else {
            if constexpr (Bits) x = rng.rademacher();
            else x = draw_real(rng);
        }
        if constexpr (Bits) {
            if (x > 0) words[(n - 1) >> 6] |= std::uint64_t{1} << ((n - 1) & 63);
        } else {
            steps[n - 1] = x;
        }
        S += x;

        double mu = 1.0;
        if constexpr (K == SamplerKind::Tree) {
            mu = memseq.next();
            tree->push(mu);
        } else if constexpr (Mart) {
            mu = memseq.next();
        }
        if constexpr (Mart) {
            double dL = n == 1 ? x : x - p * Y / nu;
            if (n > 1) {
                drift += p * Y / nu;
                eta += 1.0 / (a * nu);
                a /= 1.0 + p * mu / nu;
            }
            nu += mu;
            Y += x * mu;
            L += dL;
            Nm += (1.0 - p * a * mu * eta) * dL;
        }

        if (track_sup && n >= sups[0]) {
            if (next_sup != 0 && n >= next_sup) {
                ++sj;
                next_sup = sj + 1 < sups.size() ? sups[sj + 1] : 0;
            }
            double as = std::abs(S);
            if (as > seg_max[sj] * static_cast<double>(n)) seg_max[sj] = as / static_cast<double>(n);
        }

        if (n == next_cp) {
            tr.S.push_back(S);
            if constexpr (Mart) {
                double M = a * Y;
                tr.M.push_back(M);
                tr.L.push_back(L);
                tr.N.push_back(Nm);
                tr.drift.push_back(drift);
                tr.eta_M.push_back(p * eta * M);
            }
            ++ci;
            next_cp = ci < cps.size() ? cps[ci] : 0;
        }
        if (n == N) tr.last_step = x;
    }

    if (track_sup) {
        for (std::size_t j = seg_max.size(); j-- > 1;) seg_max[j - 1] = std::max(seg_max[j - 1], seg_max[j]);
        tr.sup_abs_mean = std::move(seg_max);
    }
    return tr;
}

Walker::Walker(const WalkConfig& cfg) : impl_(new Impl(cfg)) {}
Walker::~Walker() { delete impl_; }

WalkTrajectory Walker::run(std::uint64_t seed, std::uint64_t replica) {
    Impl& I = *impl_;
    const bool m = I.cfg.record_martingales;
    auto go = [&]<SamplerKind K>() {
        if (I.bits) return m ? I.run_impl<K, true, true>(seed, replica) : I.run_impl<K, true, false>(seed, replica);
        return m ? I.run_impl<K, false, true>(seed, replica) : I.run_impl<K, false, false>(seed, replica);
    };
    switch (I.kind) {
    case SamplerKind::Uniform: return go.template operator()<SamplerKind::Uniform>();
    case SamplerKind::PowerEnvelope: return go.template operator()<SamplerKind::PowerEnvelope>();
    case SamplerKind::Tree: break;
    }
    return go.template operator()<SamplerKind::Tree>();
}

WalkTrajectory simulate(const WalkConfig& cfg) {
    Walker w(cfg);
    return w.run(cfg.seed, 0);
}

namespace detail {

std::uint64_t sample_power_envelope(double u, std::uint64_t m, double gamma, Rng& rng) {
    const double g1 = gamma + 1.0;
    const double top = static_cast<double>(m) + 1.0;
    const double floor_mass = std::exp(-g1 * std::log(top)); // (m+1)^{-(gamma+1)}
    for (;;) {
        // X^{g1} uniform on [1, (m+1)^{g1}], written relative to (m+1)
        double x = top * std::exp(std::log(u + (1.0 - u) * floor_mass) / g1);
        auto k = static_cast<std::uint64_t>(x);
        k = std::clamp<std::uint64_t>(k, 1, m);
        // k^gamma / int_k^{k+1} x^gamma dx, written to avoid cancellation
        const double kd = static_cast<double>(k);
        const double v = rng.uniform();
        if (v < 1.0 - gamma / kd) return k; // squeeze: ratio >= (1 + 1/k)^{-gamma} >= 1 - gamma/k
        const double ratio = g1 / ((kd + 1.0) * std::expm1(gamma * std::log1p(1.0 / kd)) + 1.0);
        if (v < ratio) return k;
        u = rng.uniform();
    }
}


void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(unsigned, std::uint64_t)>& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(count, 1)));
    if (threads <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) body(0, i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::atomic<bool> stop{false};
    auto work = [&](unsigned w) {
        try {
            for (;;) {
                if (stop.load(std::memory_order_relaxed)) return;
                std::uint64_t i = next.fetch_add(1);
                if (i >= count) return;
                body(w, i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(err_mu);
            if (!err) err = std::current_exception();
            stop = true;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back(work, w);
    work(0);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace detail

void run_replicas(const WalkConfig& cfg, std::uint64_t replicas, std::uint64_t master_seed,
                  unsigned threads, const std::function<void(const WalkTrajectory&)>& sink) {
    require(replicas >= 1, ErrorKind::InvalidSpec, "replicas must be >= 1");
    cfg.validate();
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, replicas));
    std::vector<std::unique_ptr<Walker>> walkers(threads);
    detail::parallel_for(replicas, threads, [&](unsigned w, std::uint64_t r) {
        if (!walkers[w]) walkers[w] = std::make_unique<Walker>(cfg);
        sink(walkers[w]->run(derive_stream_seed(master_seed, r), r));
    });
}

std::vector<WalkTrajectory> simulate_batch(const WalkConfig& cfg, std::uint64_t replicas,
                                           std::uint64_t master_seed, unsigned threads) {
    std::vector<WalkTrajectory> out(replicas);
    run_replicas(cfg, replicas, master_seed, threads,
                 [&](const WalkTrajectory& tr) { out[tr.replica] = tr; });
    return out;
}

std::vector<double> marginal_law_sample(const WalkConfig& cfg, std::uint64_t n, std::uint64_t replicas,
                                        std::uint64_t master_seed, unsigned threads) {
    require(n >= 1 && n <= cfg.n_steps, ErrorKind::OutOfRange, "marginal index outside [1, n_steps]");
    WalkConfig c = cfg;
    c.n_steps = n;
    c.checkpoints.clear();
    c.sup_starts.clear();
    c.record_martingales = false;
    std::vector<double> out(replicas);
    run_replicas(c, replicas, master_seed, threads,
                 [&](const WalkTrajectory& tr) { out[tr.replica] = tr.last_step; });
    return out;
}

void write_trajectories_csv(std::ostream& os, const std::vector<WalkTrajectory>& trajs) {
    bool mart = !trajs.empty() && !trajs.front().M.empty();
    os << "replica,n,S";
    if (mart) os << ",M,L,N";
    os << '\n';
    for (const auto& tr : trajs) {
        for (std::size_t i = 0; i < tr.n.size(); ++i) {
            os << tr.replica << ',' << tr.n[i] << ',' << format_double(tr.S[i]);
            if (mart)
                os << ',' << format_double(tr.M[i]) << ',' << format_double(tr.L[i]) << ','
                   << format_double(tr.N[i]);
            os << '\n';
        }
    }
}

namespace {

template <class T> void put_le(std::ostream& os, T v) {
    static_assert(std::endian::native == std::endian::little, "little-endian host expected");
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    os.write(b, sizeof(T));
}

template <class T> T get_le(std::istream& is) {
    char b[sizeof(T)];
    is.read(b, sizeof(T));
    require(static_cast<bool>(is), ErrorKind::InvalidSpec, "truncated trajectory dump");
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

} // namespace

void write_trajectories_binary(std::ostream& os, const std::vector<WalkTrajectory>& trajs) {
    bool mart = !trajs.empty() && !trajs.front().M.empty();
    std::uint64_t k = trajs.empty() ? 0 : trajs.front().n.size();
    os.write("RVWT", 4);
    put_le<std::uint32_t>(os, 1);
    put_le<std::uint32_t>(os, mart ? 1u : 0u);
    put_le<std::uint64_t>(os, trajs.size());
    put_le<std::uint64_t>(os, k);
    if (!trajs.empty())
        for (auto n : trajs.front().n) put_le<std::uint64_t>(os, n);
    for (const auto& tr : trajs) {
        require(tr.n.size() == k, ErrorKind::InvalidSpec, "replicas disagree on checkpoints");
        put_le<std::uint64_t>(os, tr.seed);
        for (double v : tr.S) put_le<double>(os, v);
        if (mart)
            for (const auto* col : {&tr.M, &tr.L, &tr.N})
                for (double v : *col) put_le<double>(os, v);
    }
}

std::vector<WalkTrajectory> read_trajectories_binary(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    require(is && std::memcmp(magic, "RVWT", 4) == 0, ErrorKind::InvalidSpec, "not an RVWT dump");
    auto version = get_le<std::uint32_t>(is);
    require(version == 1, ErrorKind::Unsupported, "unknown RVWT version");
    bool mart = get_le<std::uint32_t>(is) & 1u;
    auto reps = get_le<std::uint64_t>(is);
    auto k = get_le<std::uint64_t>(is);
    std::vector<std::uint64_t> ns(k);
    for (auto& n : ns) n = get_le<std::uint64_t>(is);
    std::vector<WalkTrajectory> out(reps);
    for (std::uint64_t r = 0; r < reps; ++r) {
        auto& tr = out[r];
        tr.replica = r;
        tr.n = ns;
        tr.seed = get_le<std::uint64_t>(is);
        tr.S.resize(k);
        for (auto& v : tr.S) v = get_le<double>(is);
        if (mart)
            for (auto* col : {&tr.M, &tr.L, &tr.N}) {
                col->resize(k);
                for (auto& v : *col) v = get_le<double>(is);
            }
    }
    return out;
}

IdentityCheck check_decompositions(const WalkTrajectory& tr) {
    require(!tr.M.empty(), ErrorKind::InvalidSpec, "trajectory has no martingale record");
    IdentityCheck ic;
    for (std::size_t i = 0; i < tr.S.size(); ++i) {
        double sL = std::max({1.0, std::abs(tr.S[i]), std::abs(tr.L[i]) + std::abs(tr.drift[i])});
        double sN = std::max({1.0, std::abs(tr.S[i]), std::abs(tr.N[i]) + std::abs(tr.eta_M[i])});
        ic.max_rel_L = std::max(ic.max_rel_L, std::abs(tr.S[i] - tr.L[i] - tr.drift[i]) / sL);
        ic.max_rel_N = std::max(ic.max_rel_N, std::abs(tr.S[i] - tr.N[i] - tr.eta_M[i]) / sN);
    }
    return ic;
}

} // namespace rvwalk
