#include "cli.hpp"

#include <rvwalk/csv.hpp>
#include <rvwalk/error.hpp>
#include <rvwalk/experiments.hpp>
#include <rvwalk/memory_catalog.hpp>
#include <rvwalk/moment_oracle.hpp>
#include <rvwalk/rng.hpp>
#include <rvwalk/scaling_engine.hpp>
#include <rvwalk/version.hpp>
#include <rvwalk/walk_simulator.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace rvwalk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Params {
    std::string family = "power";
    double gamma = 0.0;
    double alpha = 0.0;
    std::string zeta = "zero";
    double kappa = 1.0;
    double rho = 0.5;
    std::string table_file;
    double p = kNaN;
    std::uint64_t n = 1000;
    std::uint64_t replicas = 1;
    std::uint64_t seed = 0;
    bool have_seed = false;
    unsigned threads = 0;
    std::string checkpoints = "geometric:20";
    bool record_martingales = false;
    std::string innovation = "rademacher";
    bool moments = false;
    std::string out = ".";
    bool binary = false;
    bool gnuplot = false;
    bool json_out = false;
    std::string example;
    std::string mode = "exponential";
    std::string times = "1,2";
    std::string suite;
};

json params_json(const Params& p) {
    json j{{"family", p.family},
           {"gamma", p.gamma},
           {"alpha", p.alpha},
           {"zeta", p.zeta},
           {"kappa", p.kappa},
           {"rho", p.rho},
           {"n", p.n},
           {"replicas", p.replicas},
           {"seed", p.seed},
           {"threads", p.threads},
           {"checkpoints", p.checkpoints},
           {"record_martingales", p.record_martingales},
           {"innovation", p.innovation},
           {"moments", p.moments},
           {"binary", p.binary},
           {"mode", p.mode},
           {"t", p.times}};
    if (std::isfinite(p.p)) j["p"] = p.p;
    if (!p.table_file.empty()) j["table_file"] = p.table_file;
    if (!p.example.empty()) j["example"] = p.example;
    if (!p.suite.empty()) j["suite"] = p.suite;
    return j;
}

void apply_json(Params& p, const json& src) {
    const json& j = src.contains("params") ? src.at("params") : src;
    try {
        auto get = [&](const char* k, auto& field) {
            if (j.contains(k)) field = j.at(k).get<std::decay_t<decltype(field)>>();
        };
        get("family", p.family);
        get("gamma", p.gamma);
        get("alpha", p.alpha);
        get("zeta", p.zeta);
        get("kappa", p.kappa);
        get("rho", p.rho);
        get("table_file", p.table_file);
        get("p", p.p);
        get("n", p.n);
        get("replicas", p.replicas);
        if (j.contains("seed")) {
            p.seed = j.at("seed").get<std::uint64_t>();
            p.have_seed = true;
        }
        get("threads", p.threads);
        get("checkpoints", p.checkpoints);
        get("record_martingales", p.record_martingales);
        get("innovation", p.innovation);
        get("moments", p.moments);
        get("binary", p.binary);
        get("example", p.example);
        get("mode", p.mode);
        get("t", p.times);
        get("suite", p.suite);
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidSpec, std::string("bad config value: ") + e.what());
    }
}

// Options bound to a scratch Params; only flags actually given override the
// effective set, so file values survive unless overridden.
class Binder {
public:
    explicit Binder(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* opt(const std::string& name, T Params::*m, const std::string& desc) {
        auto* o = app_->add_option(name, scratch_.*m, desc);
        hooks_.emplace_back(o, [m](Params& e, const Params& s) { e.*m = s.*m; });
        return o;
    }
    CLI::Option* flag(const std::string& name, bool Params::*m, const std::string& desc) {
        auto* o = app_->add_flag(name, scratch_.*m, desc);
        hooks_.emplace_back(o, [m](Params& e, const Params& s) { e.*m = s.*m; });
        return o;
    }
    CLI::Option* seed() {
        auto* o = app_->add_option("--seed", scratch_.seed, "master seed (default: $RVWALK_SEED, else 1)");
        hooks_.emplace_back(o, [](Params& e, const Params& s) {
            e.seed = s.seed;
            e.have_seed = true;
        });
        return o;
    }
    CLI::Option* config() { return app_->add_option("--config", config_, "JSON config or manifest; flags override it"); }

    Params resolve() const {
        Params e;
        if (!config_.empty()) {
            std::ifstream in(config_);
            require(static_cast<bool>(in), ErrorKind::InvalidSpec, "cannot open config " + config_);
            json j;
            try {
                in >> j;
            } catch (const json::exception& ex) {
                fail(ErrorKind::InvalidSpec, std::string("config is not valid JSON: ") + ex.what());
            }
            apply_json(e, j);
        }
        for (const auto& [o, f] : hooks_)
            if (o->count() > 0) f(e, scratch_);
        if (!e.have_seed) {
            if (const char* env = std::getenv("RVWALK_SEED")) {
                try {
                    e.seed = std::stoull(env);
                } catch (const std::exception&) {
                    fail(ErrorKind::InvalidSpec, "RVWALK_SEED is not an unsigned integer");
                }
            } else {
                e.seed = 1;
            }
        }
        return e;
    }

private:
    CLI::App* app_;
    Params scratch_;
    std::string config_;
    std::vector<std::pair<CLI::Option*, std::function<void(Params&, const Params&)>>> hooks_;
};

void add_memory_flags(Binder& b) {
    b.opt("--family", &Params::family, "power | contprod | logmod | slowgrowth | table");
    b.opt("--gamma", &Params::gamma, "regular-variation index gamma > -1");
    b.opt("--alpha", &Params::alpha, "log exponent (logmod) or gap exponent (slowgrowth)");
    b.opt("--zeta", &Params::zeta, "logmod correction: zero | power | loglog");
    b.opt("--kappa", &Params::kappa, "zeta amplitude");
    b.opt("--rho", &Params::rho, "zeta power exponent");
    b.opt("--table-file", &Params::table_file, "memory values, one per line (family table)");
}

MemorySpec spec_from(const Params& p) {
    if (p.family == "power") return MemorySpec::power_law(p.gamma);
    if (p.family == "contprod") return MemorySpec::continued_product(p.gamma);
    if (p.family == "slowgrowth") return MemorySpec::slow_growth(p.gamma, p.alpha);
    if (p.family == "logmod") {
        ZetaSpec z;
        if (p.zeta == "zero") z = ZetaZero{};
        else if (p.zeta == "power") z = ZetaPower{p.kappa, p.rho};
        else if (p.zeta == "loglog") z = ZetaLogLog{p.kappa};
        else fail(ErrorKind::InvalidSpec, "unknown zeta '" + p.zeta + "'");
        return MemorySpec::log_modulated(p.gamma, p.alpha, z);
    }
    if (p.family == "table") {
        require(!p.table_file.empty(), ErrorKind::InvalidSpec, "family table needs --table-file");
        std::ifstream in(p.table_file);
        require(static_cast<bool>(in), ErrorKind::InvalidSpec, "cannot open " + p.table_file);
        std::vector<double> v;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            try {
                v.push_back(std::stod(line));
            } catch (const std::exception&) {
                fail(ErrorKind::InvalidSpec, "bad table line '" + line + "'");
            }
        }
        return MemorySpec::table(std::move(v), p.gamma);
    }
    fail(ErrorKind::InvalidSpec, "unknown family '" + p.family + "'");
}

double require_p(const Params& p) {
    require(std::isfinite(p.p), ErrorKind::InvalidSpec, "missing --p");
    require(p.p >= 0.0 && p.p <= 1.0, ErrorKind::InvalidSpec, "p must lie in [0,1]");
    return p.p;
}

InnovationSpec innovation_from(const std::string& s) {
    if (s == "rademacher") return Rademacher{};
    if (s == "normal") return StandardNormal{};
    fail(ErrorKind::InvalidSpec, "innovation must be rademacher or normal");
}

std::vector<std::uint64_t> parse_checkpoints(const std::string& s, std::uint64_t n) {
    auto colon = s.find(':');
    if (colon != std::string::npos) {
        std::string kind = s.substr(0, colon);
        std::uint64_t k = 0;
        try {
            k = std::stoull(s.substr(colon + 1));
        } catch (const std::exception&) {
            fail(ErrorKind::InvalidSpec, "bad checkpoint count in '" + s + "'");
        }
        require(k >= 1, ErrorKind::InvalidSpec, "checkpoint count must be >= 1");
        if (kind == "geometric") return geometric_checkpoints(n, k);
        if (kind == "linear") {
            std::vector<std::uint64_t> v;
            for (std::uint64_t i = 1; i <= k; ++i) {
                std::uint64_t x = std::max<std::uint64_t>(1, n * i / k);
                if (v.empty() || x > v.back()) v.push_back(x);
            }
            return v;
        }
        fail(ErrorKind::InvalidSpec, "checkpoint grid must be geometric:k, linear:k or a list");
    }
    std::vector<std::uint64_t> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            v.push_back(std::stoull(tok));
        } catch (const std::exception&) {
            fail(ErrorKind::InvalidSpec, "bad checkpoint '" + tok + "'");
        }
    }
    return v;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            v.push_back(std::stod(tok));
        } catch (const std::exception&) {
            fail(ErrorKind::InvalidSpec, "bad number '" + tok + "'");
        }
    }
    require(!v.empty(), ErrorKind::InvalidSpec, "empty list");
    return v;
}

fs::path out_dir(const Params& p) {
    fs::path d(p.out);
    std::error_code ec;
    fs::create_directories(d, ec);
    require(!ec, ErrorKind::InvalidSpec, "cannot create output directory " + p.out);
    return d;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), ErrorKind::InvalidSpec, "cannot write " + path.string());
    return f;
}

struct Manifest {
    Manifest(std::string cmd, json prm, std::uint64_t s) : command(std::move(cmd)), params(std::move(prm)), seed(s) {}

    std::string command;
    json params;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
    json extra = json::object();
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    json to_json() const {
        json j{{"command", command},
               {"params", params},
               {"master_seed", seed},
               {"tool_version", kVersion},
               {"rng_family", kRngFamily},
               {"outputs", outputs},
               {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
        for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
        return j;
    }
    void write(const fs::path& dir, std::ostream& out) {
        outputs.push_back((dir / "manifest.json").string());
        json j = to_json();
        auto f = open_out(dir / "manifest.json");
        f << j.dump(2) << '\n';
        out << j.dump(2) << '\n';
    }
};

void write_gnuplot(const fs::path& path, const std::string& data, const std::string& body) {
    auto f = open_out(path);
    f << "set datafile separator ','\nset key autotitle columnhead\nset logscale xy\n";
    f << "data = '" << data << "'\n" << body << '\n';
}

int cmd_regime(const Params& p, std::ostream& out) {
    MemorySpec spec = spec_from(p);
    RegimeReport r = classify_regime(spec, require_p(p));
    json j = r.to_json();
    j["memory"] = spec.to_json();
    if (r.regime == Regime::CriticalUnboundedV || r.regime == Regime::CriticalBoundedV) {
        if (auto d = critical_descriptor(spec)) j["critical_descriptor"] = {{"order", d->text}, {"constant", d->constant}};
    }
    if (p.json_out) {
        out << j.dump(2) << '\n';
    } else {
        out << "memory:          " << spec.describe() << '\n';
        out << "p:               " << r.p << '\n';
        out << "p_c:             " << r.p_c << '\n';
        out << "p_hat:           " << r.p_hat << '\n';
        out << "regime:          " << to_string(r.regime) << '\n';
        out << "v bounded:       " << to_string(r.v_bounded) << '\n';
        out << "scale kind:      " << to_string(r.scale_kind) << '\n';
        out << "predicted scale: " << r.predicted_scale << '\n';
        if (r.scale_constant) out << "scale constant:  " << *r.scale_constant << '\n';
        out << "limit:           " << to_string(r.limit_kind) << '\n';
        if (!r.covered) out << "covered:         no\n";
        for (const auto& n : r.notes) out << "note: " << n << '\n';
    }
    Manifest m{"regime", params_json(p), p.seed};
    m.extra["report"] = j;
    std::ostringstream sink;
    m.write(out_dir(p), sink);
    return kOk;
}

int cmd_simulate(const Params& p, std::ostream& out) {
    WalkConfig cfg;
    cfg.spec = spec_from(p);
    cfg.p = require_p(p);
    cfg.innovation = innovation_from(p.innovation);
    cfg.n_steps = p.n;
    require(p.n >= 1, ErrorKind::InvalidSpec, "--n must be >= 1");
    require(p.replicas >= 1, ErrorKind::InvalidSpec, "--replicas must be >= 1");
    cfg.checkpoints = parse_checkpoints(p.checkpoints, p.n);
    cfg.record_martingales = p.record_martingales;
    cfg.validate();

    Manifest m{"simulate", params_json(p), p.seed};
    auto trajs = simulate_batch(cfg, p.replicas, p.seed, p.threads);
    fs::path dir = out_dir(p);
    fs::path data = dir / (p.binary ? "trajectories.bin" : "trajectories.csv");
    {
        auto f = open_out(data);
        if (p.binary) write_trajectories_binary(f, trajs);
        else write_trajectories_csv(f, trajs);
    }
    m.outputs.push_back(data.string());
    m.extra["config_hash"] = cfg.hash();
    m.extra["sampler"] = to_string(cfg.sampler_kind());
    if (cfg.record_martingales) {
        double l = 0, n = 0;
        for (const auto& t : trajs) {
            IdentityCheck c = check_decompositions(t);
            l = std::max(l, c.max_rel_L);
            n = std::max(n, c.max_rel_N);
        }
        m.extra["identity_check"] = {{"max_rel_L", l}, {"max_rel_N", n}};
    }
    if (p.gnuplot && !p.binary) {
        fs::path gp = dir / "trajectories.gp";
        write_gnuplot(gp, data.string(), "unset logscale y\nplot data using 2:3 with lines title 'S_n'");
        m.outputs.push_back(gp.string());
    }
    m.write(dir, out);
    return kOk;
}

int cmd_tables(const Params& p, std::ostream& out) {
    MemorySpec spec = spec_from(p);
    double pr = require_p(p);
    require(p.n >= 1, ErrorKind::InvalidSpec, "--n must be >= 1");
    SequenceTable seq = build_sequences(spec, pr, p.n);
    std::optional<MomentTable> mt;
    if (p.moments) {
        if (p.innovation == "rademacher") mt = rademacher_fourth_moments(seq);
        else {
            innovation_from(p.innovation);
            mt = second_moments(seq);
        }
    }
    Manifest m{"tables", params_json(p), p.seed};
    m.extra["eta_branch"] = to_string(seq.eta_branch);
    if (p.out == "-") {
        seq.write_csv(out);
        if (mt) {
            out << '\n';
            mt->write_csv(out);
        }
        return kOk;
    }
    fs::path dir = out_dir(p);
    {
        auto f = open_out(dir / "sequences.csv");
        seq.write_csv(f);
        m.outputs.push_back((dir / "sequences.csv").string());
    }
    if (mt) {
        auto f = open_out(dir / "moments.csv");
        mt->write_csv(f);
        m.outputs.push_back((dir / "moments.csv").string());
    }
    if (p.gnuplot) {
        write_gnuplot(dir / "sequences.gp", (dir / "sequences.csv").string(),
                      "plot data using 1:6 with lines title 'sigma_n^2', data using 1:5 with lines title 'v_n^2'");
        m.outputs.push_back((dir / "sequences.gp").string());
    }
    m.write(dir, out);
    return kOk;
}

int cmd_verify(const Params& p, const CLI::App& sub, std::ostream& out) {
    require(is_suite(p.suite), ErrorKind::InvalidSpec, "unknown suite '" + p.suite + "'");
    SuiteOptions o;
    if (sub.count("--n")) o.n = p.n;
    if (sub.count("--replicas")) o.replicas = p.replicas;
    if (sub.count("--seed") || std::getenv("RVWALK_SEED")) o.seed = p.seed;
    o.threads = p.threads;
    Manifest m{"verify", params_json(p), p.seed};
    auto reports = run_suite(p.suite, o);
    fs::path dir = out_dir(p);
    bool ok = true;
    json summary = json::array();
    for (const auto& r : reports) {
        if (p.json_out) out << r.to_json().dump(2) << '\n';
        else out << r.to_text();
        ok = ok && r.verdict() == Verdict::Pass;
        auto jf = open_out(dir / (r.kind + ".json"));
        jf << r.to_json().dump(2) << '\n';
        auto cf = open_out(dir / (r.kind + ".csv"));
        r.write_csv(cf);
        m.outputs.push_back((dir / (r.kind + ".json")).string());
        m.outputs.push_back((dir / (r.kind + ".csv")).string());
        if (p.gnuplot) {
            write_gnuplot(dir / (r.kind + ".gp"), (dir / (r.kind + ".csv")).string(),
                          "plot data using 1:2 with linespoints title 'estimate', data using 1:3 with lines title "
                          "'target'");
            m.outputs.push_back((dir / (r.kind + ".gp")).string());
        }
        summary.push_back({{"kind", r.kind}, {"verdict", to_string(r.verdict())}, {"master_seed", r.master_seed}});
    }
    m.extra["reports"] = summary;
    std::ostringstream sink;
    m.write(dir, sink);
    out << (ok ? "verify " + p.suite + ": pass\n" : "verify " + p.suite + ": FAIL\n");
    return ok ? kOk : kVerifyFailed;
}

MemorySpec example_spec(const std::string& ex) {
    if (ex == "nlogn") return MemorySpec::power_law(0.0);
    if (ex == "zeta-zero") return MemorySpec::log_modulated(0.0, -1.0, ZetaZero{});
    if (ex == "zeta-power-zero") return MemorySpec::log_modulated(0.0, -1.0, ZetaPower{1.0, 0.5});
    if (ex == "loglog-zero") return MemorySpec::log_modulated(0.0, -1.0, ZetaLogLog{1.0});
    if (ex == "logloglog-zero") return MemorySpec::log_modulated(0.0, -1.0, ZetaLogLog{-1.0});
    if (ex == "lighter-than-nlogn") return MemorySpec::slow_growth(0.5, 0.5);
    fail(ErrorKind::Unsupported, "unsupported example '" + ex + "'");
}

int cmd_timescale(const Params& p, std::ostream& out) {
    MemorySpec spec = p.example.empty() ? spec_from(p) : example_spec(p.example);
    TimescaleMode mode;
    if (p.mode == "exponential") mode = TimescaleMode::Exponential;
    else if (p.mode == "brownian-tuned") mode = TimescaleMode::BrownianTuned;
    else fail(ErrorKind::InvalidSpec, "mode must be exponential or brownian-tuned");
    const double pc = std::isfinite(p.p) ? p.p : critical_p(spec.gamma());
    std::vector<double> ts = parse_doubles(p.times);
    std::sort(ts.begin(), ts.end());

    out << "exploratory: slow convergence; no acceptance\n";
    std::vector<Timescale> scales;
    for (double t : ts) scales.push_back(exploratory_timescale(spec, mode, t, p.n));
    out << "example: " << scales.front().example << ", mode: " << p.mode << ", n: " << p.n << '\n';
    out << "prediction: " << scales.front().prediction << '\n';
    json rows = json::array();
    for (const auto& s : scales) {
        out << "  t=" << s.t << " index=" << s.index << " scale=" << s.scale << " clock=" << s.clock << '\n';
        rows.push_back({{"t", s.t}, {"index", s.index}, {"scale", std::isfinite(s.scale) ? json(s.scale) : json()},
                        {"clock", s.clock}});
    }
    Manifest m{"timescale", params_json(p), p.seed};
    m.extra["example"] = scales.front().example;
    m.extra["prediction"] = scales.front().prediction;
    m.extra["points"] = rows;
    fs::path dir = out_dir(p);

    const std::uint64_t max_index = std::max_element(scales.begin(), scales.end(), [](auto& a, auto& b) {
                                        return a.index < b.index;
                                    })->index;
    constexpr std::uint64_t kStepCap = 20000000;
    if (!scales.front().has_limit) {
        out << "no nondegenerate limit; correlations not computed\n";
    } else if (max_index > kStepCap || max_index < 1) {
        out << "largest index " << max_index << " exceeds the simulation cap " << kStepCap
            << "; correlations not computed\n";
    } else {
        WalkConfig cfg;
        cfg.spec = spec;
        cfg.p = pc;
        cfg.n_steps = max_index;
        for (const auto& s : scales) cfg.checkpoints.push_back(s.index);
        std::sort(cfg.checkpoints.begin(), cfg.checkpoints.end());
        cfg.checkpoints.erase(std::unique(cfg.checkpoints.begin(), cfg.checkpoints.end()), cfg.checkpoints.end());
        const std::uint64_t reps = std::max<std::uint64_t>(p.replicas, 2);
        auto trajs = simulate_batch(cfg, reps, p.seed, p.threads);
        auto col = [&](const Timescale& s) {
            std::size_t i = std::lower_bound(cfg.checkpoints.begin(), cfg.checkpoints.end(), s.index) -
                            cfg.checkpoints.begin();
            std::vector<double> v;
            for (const auto& t : trajs) v.push_back(t.S[i] / s.scale);
            return v;
        };
        auto f = open_out(dir / "correlations.csv");
        f << "s,t,empirical,predicted\n";
        json cors = json::array();
        for (std::size_t a = 0; a < scales.size(); ++a) {
            for (std::size_t b = a + 1; b < scales.size(); ++b) {
                auto x = col(scales[a]), y = col(scales[b]);
                MomentSummary sx = summarize(x), sy = summarize(y);
                double c = 0;
                for (std::size_t i = 0; i < x.size(); ++i) c += (x[i] - sx.mean) * (y[i] - sy.mean);
                c /= static_cast<double>(x.size()) * std::sqrt(sx.variance * sy.variance);
                double pred = predicted_correlation(scales[a], scales[a].t, scales[b].t);
                out << "  corr(t=" << scales[a].t << ", t=" << scales[b].t << ") empirical=" << c
                    << " predicted=" << pred << '\n';
                f << format_double(scales[a].t) << ',' << format_double(scales[b].t) << ',' << format_double(c) << ','
                  << format_double(pred) << '\n';
                cors.push_back({{"s", scales[a].t}, {"t", scales[b].t}, {"empirical", c}, {"predicted", pred}});
            }
        }
        m.outputs.push_back((dir / "correlations.csv").string());
        m.extra["correlations"] = cors;
        m.extra["replicas"] = reps;
    }
    std::ostringstream sink;
    m.write(dir, sink);
    return kOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"rvwalk: step-reinforced random walks with regularly varying memory"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    auto* regime = app.add_subcommand("regime", "classify (memory, p) and predict the scaling");
    Binder br(regime);
    add_memory_flags(br);
    br.opt("--p", &Params::p, "recollection probability");
    br.flag("--json", &Params::json_out, "print JSON");
    br.opt("--out", &Params::out, "output directory for manifest.json");
    br.config();

    auto* simulate = app.add_subcommand("simulate", "simulate replicas and write trajectories");
    Binder bs(simulate);
    add_memory_flags(bs);
    bs.opt("--p", &Params::p, "recollection probability");
    bs.opt("--n", &Params::n, "steps per walk");
    bs.opt("--replicas", &Params::replicas, "number of replicas");
    bs.seed();
    bs.opt("--threads", &Params::threads, "worker threads (0 = all cores)");
    bs.opt("--checkpoints", &Params::checkpoints, "geometric:k | linear:k | n1,n2,...");
    bs.flag("--record-martingales", &Params::record_martingales, "add M, L, N columns");
    bs.opt("--innovation", &Params::innovation, "rademacher | normal");
    bs.opt("--out", &Params::out, "output directory");
    bs.flag("--binary", &Params::binary, "write the binary columnar dump instead of CSV");
    bs.flag("--gnuplot", &Params::gnuplot, "write a companion gnuplot script");
    bs.config();

    auto* verify = app.add_subcommand("verify", "run a named verification suite");
    Binder bv(verify);
    bv.opt("suite", &Params::suite, "suite name")->required();
    bv.opt("--n", &Params::n, "override the Monte Carlo horizon");
    bv.opt("--replicas", &Params::replicas, "override the replica count");
    bv.seed();
    bv.opt("--threads", &Params::threads, "worker threads (0 = all cores)");
    bv.opt("--out", &Params::out, "directory for report JSON/CSV");
    bv.flag("--json", &Params::json_out, "print reports as JSON");
    bv.flag("--gnuplot", &Params::gnuplot, "write companion gnuplot scripts");
    bv.config();
    std::string suites;
    for (const auto& s : suite_names()) suites += (suites.empty() ? "" : ", ") + s;
    verify->footer("suites: " + suites);

    auto* tables = app.add_subcommand("tables", "write deterministic sequence and moment tables");
    Binder bt(tables);
    add_memory_flags(bt);
    bt.opt("--p", &Params::p, "recollection probability");
    bt.opt("--n", &Params::n, "table length");
    bt.flag("--moments", &Params::moments, "add the moment table");
    bt.opt("--innovation", &Params::innovation, "rademacher adds fourth moments");
    bt.opt("--out", &Params::out, "output directory, or - for stdout");
    bt.flag("--gnuplot", &Params::gnuplot, "write a companion gnuplot script");
    bt.config();

    auto* timescale = app.add_subcommand("timescale", "exploratory rescalings at criticality");
    Binder bx(timescale);
    add_memory_flags(bx);
    bx.opt("--example", &Params::example,
           "nlogn | zeta-zero | zeta-power-zero | loglog-zero | logloglog-zero | lighter-than-nlogn");
    bx.opt("--mode", &Params::mode, "exponential | brownian-tuned");
    bx.opt("--p", &Params::p, "recollection probability (default p_c)");
    bx.opt("--n", &Params::n, "base n");
    bx.opt("--t", &Params::times, "comma-separated times");
    bx.opt("--replicas", &Params::replicas, "replicas for the correlation estimate");
    bx.seed();
    bx.opt("--threads", &Params::threads, "worker threads (0 = all cores)");
    bx.opt("--out", &Params::out, "output directory");
    bx.config();

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            int code = app.exit(e, out, err);
            return code == 0 ? kOk : kInvalidInput;
        }
        if (*regime) return cmd_regime(br.resolve(), out);
        if (*simulate) return cmd_simulate(bs.resolve(), out);
        if (*verify) return cmd_verify(bv.resolve(), *verify, out);
        if (*tables) return cmd_tables(bt.resolve(), out);
        if (*timescale) return cmd_timescale(bx.resolve(), out);
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return e.kind() == ErrorKind::ResourceLimit ? kResourceLimit : kInvalidInput;
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return kResourceLimit;
    }
    return kInvalidInput;
}

} // namespace rvwalk::cli
