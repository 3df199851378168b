#include "rvwalk/experiments.hpp"
#include "rvwalk/error.hpp"
#include "rvwalk/moment_oracle.hpp"
#include "rvwalk/scaling_engine.hpp"
#include "rvwalk/walk_simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace rvwalk {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t seed_or(const RunControl& rc, std::uint64_t fallback) { return rc.master_seed.value_or(fallback); }

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

SubCheck upper_bound_check(std::string name, double est, double bound, std::string source) {
    SubCheck c;
    c.name = std::move(name);
    c.estimate = est;
    c.target = bound;
    c.target_source = std::move(source);
    c.tolerance = "<= " + fmt(bound);
    c.verdict = std::isfinite(est) ? (est <= bound ? Verdict::Pass : Verdict::Fail) : Verdict::Inconclusive;
    return c;
}

SubCheck rel_check(std::string name, double est, double target, double rel, std::string source) {
    SubCheck c;
    c.name = std::move(name);
    c.estimate = est;
    c.target = target;
    c.target_source = std::move(source);
    c.tolerance = "relative " + fmt(rel);
    double err = std::abs(est / target - 1.0);
    c.detail = "relative error " + fmt(err);
    c.verdict = std::isfinite(err) ? (err <= rel ? Verdict::Pass : Verdict::Fail) : Verdict::Inconclusive;
    return c;
}

SubCheck se_check(std::string name, double est, double se, double target, double k, std::string source) {
    SubCheck c;
    c.name = std::move(name);
    c.estimate = est;
    c.se = se;
    c.target = target;
    c.target_source = std::move(source);
    c.tolerance = fmt(k) + " SE";
    c.detail = "z = " + fmt((est - target) / se);
    c.verdict = within_se(est, target, se, k);
    return c;
}

SubCheck ks_check(std::string name, const GaussianityResult& g, double alpha, double variance) {
    SubCheck c;
    c.name = std::move(name);
    c.estimate = g.ks.p_value;
    c.target = alpha;
    c.target_source = "N(0, " + fmt(variance) + ")";
    c.tolerance = "KS p-value > " + fmt(alpha);
    c.detail = "D = " + fmt(g.ks.statistic) + ", n = " + std::to_string(g.ks.n) + ", skew = " + fmt(g.skewness) +
               ", excess kurtosis = " + fmt(g.excess_kurtosis);
    c.verdict = g.ks.p_value > alpha ? Verdict::Pass : Verdict::Fail;
    return c;
}

void add_runtime(ExperimentReport& r, double budget) {
    r.add(upper_bound_check("runtime seconds", r.wall_seconds, budget, "time budget"));
}

// Monte Carlo E X^2 with its standard error
std::pair<double, double> mean_square(const std::vector<double>& x) {
    MomentSummary s = summarize(x);
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = x[i] * x[i];
    MomentSummary q = summarize(sq);
    return {s.second, std::sqrt(q.variance * static_cast<double>(x.size()) / (static_cast<double>(x.size()) - 1)) /
                          std::sqrt(static_cast<double>(x.size()))};
}

std::vector<double> column(const std::vector<WalkTrajectory>& trajs, std::size_t idx) {
    std::vector<double> out;
    out.reserve(trajs.size());
    for (const auto& t : trajs) out.push_back(t.S[idx]);
    return out;
}

std::size_t index_of(const std::vector<std::uint64_t>& grid, std::uint64_t n) {
    auto it = std::lower_bound(grid.begin(), grid.end(), n);
    require(it != grid.end() && *it == n, ErrorKind::OutOfRange, "checkpoint missing from grid");
    return static_cast<std::size_t>(it - grid.begin());
}

std::vector<std::uint64_t> merged(std::vector<std::uint64_t> a, const std::vector<std::uint64_t>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

} // namespace

ExperimentReport oracle_equivalence(const OracleEquivalenceParams& prm, const RunControl&) {
    auto t0 = Clock::now();
    ExperimentReport r;
    r.kind = "oracle-equivalence";
    r.params = {{"gammas", prm.gammas}, {"n", prm.n}, {"tolerance", prm.tolerance}};
    double err_s = 0, err_m = 0, err_y4 = 0;
    std::uint64_t cases = 0, nodes = 0;
    nlohmann::json grid = nlohmann::json::array();
    for (double g : prm.gammas) {
        for (std::size_t i = 0; i < prm.ps.size(); ++i) {
            double p = prm.ps[i];
            if (std::isnan(p)) p = i == 2 ? hat_p(g) : critical_p(g);
            MemorySpec spec = MemorySpec::power_law(g);
            ExactMoments ex = enumerate_exact(spec, p, prm.n, FiniteLaw::rademacher());
            MomentTable mt = rademacher_fourth_moments(spec, p, prm.n);
            double es = 0, em = 0, ey = 0;
            for (std::uint64_t k = 0; k < prm.n; ++k) {
                es = std::max(es, std::abs(ex.E_S_sq[k] - mt.E_S_sq[k]));
                em = std::max(em, std::abs(ex.E_M_sq[k] - mt.E_M_sq[k]));
                ey = std::max(ey, std::abs(ex.E_Y_4[k] - mt.E_Y_4[k]));
            }
            err_s = std::max(err_s, es);
            err_m = std::max(err_m, em);
            err_y4 = std::max(err_y4, ey);
            nodes += ex.nodes;
            ++cases;
            grid.push_back({{"gamma", g}, {"p", p}, {"err_E_S_sq", es}, {"err_E_M_sq", em}, {"err_E_Y_4", ey},
                            {"E_S_sq_n", ex.E_S_sq.back()}});
            r.rows.push_back({static_cast<double>(prm.n), ex.E_S_sq.back(), mt.E_S_sq.back(), ex.E_S_sq.back(),
                              ex.E_S_sq.back()});
        }
    }
    r.n_grid = {prm.n};
    r.statistics = {{"cases", cases}, {"enumerated_nodes", nodes}, {"grid", grid}};
    r.add(upper_bound_check("max |E S_n^2 enumeration - recursion|", err_s, prm.tolerance, "moment recursion"));
    r.add(upper_bound_check("max |E M_n^2 enumeration - recursion|", err_m, prm.tolerance, "moment recursion"));
    r.add(upper_bound_check("max |E Y_n^4 enumeration - recursion|", err_y4, prm.tolerance, "fourth-moment recursion"));
    r.wall_seconds = seconds_since(t0);
    add_runtime(r, prm.budget_seconds);
    return r;
}

ExperimentReport subcritical_variance(const SubcriticalVarianceParams& prm, const RunControl& rc) {
    auto t0 = Clock::now();
    ExperimentReport r;
    r.kind = "subcritical-variance";
    r.master_seed = seed_or(rc, 0x5eed0002);
    r.replicas = prm.replicas;
    r.params = {{"gamma", prm.gamma}, {"p", prm.p}, {"n_exact", prm.n_exact}, {"n", prm.n}};
    MemorySpec spec = MemorySpec::power_law(prm.gamma);
    RegimeReport reg = classify_regime(spec, prm.p);
    require(reg.regime == Regime::Subcritical, ErrorKind::WrongRegime, "subcritical variance needs p < p_c");
    const double target = subcritical_limit_variance(prm.p, prm.gamma);

    BuildOptions bo;
    bo.with_eta = false;
    SequenceTable seq = build_sequences(spec, prm.p, std::max(prm.n_exact, prm.n), bo);
    MomentTable mt = second_moments(seq);
    const double exact_ratio = mt.E_S_sq_at(prm.n_exact) / static_cast<double>(prm.n_exact);
    SubCheck band;
    band.name = "E S_n^2 / n by recursion at n=" + std::to_string(prm.n_exact);
    band.estimate = exact_ratio;
    band.target = target;
    band.target_source = "limit variance (2g+1-p)/((1-p)(2(1-p)(g+1)-1))";
    band.tolerance = "[" + fmt(prm.band_lo) + ", " + fmt(prm.band_hi) + "]";
    band.verdict = exact_ratio >= prm.band_lo && exact_ratio <= prm.band_hi ? Verdict::Pass : Verdict::Fail;
    r.add(band);

    WalkConfig cfg;
    cfg.spec = spec;
    cfg.p = prm.p;
    cfg.n_steps = prm.n;
    cfg.checkpoints = geometric_checkpoints(std::min<std::uint64_t>(100, prm.n), prm.n, 12);
    r.n_grid = cfg.checkpoints;
    auto trajs = simulate_batch(cfg, prm.replicas, r.master_seed, rc.threads);
    std::vector<std::pair<double, double>> fit;
    for (std::size_t i = 0; i < cfg.checkpoints.size(); ++i) {
        auto [m2, se] = mean_square(column(trajs, i));
        double n = static_cast<double>(cfg.checkpoints[i]);
        double ex = mt.E_S_sq_at(cfg.checkpoints[i]);
        r.rows.push_back({n, m2, ex, m2 - rc.moment_se * se, m2 + rc.moment_se * se});
        fit.emplace_back(n, m2);
    }
    auto [m2, se] = mean_square(column(trajs, cfg.checkpoints.size() - 1));
    r.add(se_check("Monte Carlo E S_n^2 at n=" + std::to_string(prm.n), m2, se, mt.E_S_sq_at(prm.n), rc.moment_se,
                   "exact recursion"));
    if (fit.size() >= 4 && fit.back().first / fit.front().first >= 100) {
        GrowthFit gf = growth_exponent(fit);
        r.statistics["growth_exponent"] = {{"slope", gf.slope}, {"ci", {gf.ci_lo, gf.ci_hi}}, {"superlinear", gf.superlinear}};
    }
    r.statistics["exact_ratio"] = exact_ratio;
    r.statistics["limit_variance"] = target;
    r.wall_seconds = seconds_since(t0);
    add_runtime(r, prm.budget_seconds);
    return r;
}

namespace {

ExperimentReport clt_like(const SubcriticalCltParams& prm, const RunControl& rc, bool with_ks, std::string kind,
                          std::uint64_t seed) {
    auto t0 = Clock::now();
    ExperimentReport r;
    r.kind = std::move(kind);
    r.master_seed = seed_or(rc, seed);
    r.replicas = prm.replicas;
    nlohmann::json pairs = nlohmann::json::array();
    for (auto [s, t] : prm.pairs) pairs.push_back({s, t});
    r.params = {{"gamma", prm.gamma}, {"p", prm.p}, {"n", prm.n}, {"pairs", pairs}};
    MemorySpec spec = MemorySpec::power_law(prm.gamma);
    RegimeReport reg = classify_regime(spec, prm.p);
    require(reg.regime == Regime::Subcritical, ErrorKind::WrongRegime, "Gaussian kernel check needs p < p_c");

    std::vector<std::uint64_t> cps{prm.n};
    for (auto [s, t] : prm.pairs) {
        require(s > 0 && s <= t && t <= 1, ErrorKind::InvalidSpec, "kernel pairs need 0 < s <= t <= 1");
        cps.push_back(static_cast<std::uint64_t>(std::floor(static_cast<double>(prm.n) * s)));
        cps.push_back(static_cast<std::uint64_t>(std::floor(static_cast<double>(prm.n) * t)));
    }
    cps = merged(cps, {});
    WalkConfig cfg;
    cfg.spec = spec;
    cfg.p = prm.p;
    cfg.n_steps = prm.n;
    cfg.checkpoints = cps;
    r.n_grid = cps;
    auto trajs = simulate_batch(cfg, prm.replicas, r.master_seed, rc.threads);

    const double scale = std::sqrt(static_cast<double>(prm.n));
    const double var = subcritical_limit_variance(prm.p, prm.gamma);
    if (with_ks) {
        std::vector<double> x = column(trajs, index_of(cps, prm.n));
        for (double& v : x) v /= scale;
        GaussianityResult g = gaussianity_test(x, var);
        r.add(ks_check("KS of S_n/sqrt(n)", g, rc.ks_alpha, var));
        r.statistics["variance_estimate"] = g.variance_estimate;
    }
    for (auto [s, t] : prm.pairs) {
        double target = covariance_kernel(s, t, prm.p, prm.gamma);
        CovarianceEstimate c = covariance_check(trajs, s, t, prm.n, scale, target);
        r.add(se_check("kernel at (" + fmt(s) + "," + fmt(t) + ")", c.estimate, c.se, target, rc.moment_se,
                       "limit covariance kernel"));
        r.rows.push_back({s * static_cast<double>(prm.n), c.estimate, target, c.estimate - rc.moment_se * c.se,
                          c.estimate + rc.moment_se * c.se});
    }
    if (with_ks) r.notes.push_back("multiplicity: KS and kernel checks are judged separately");
    r.wall_seconds = seconds_since(t0);
    add_runtime(r, prm.budget_seconds);
    return r;
}

} // namespace

ExperimentReport subcritical_clt(const SubcriticalCltParams& prm, const RunControl& rc) {
    return clt_like(prm, rc, true, "subcritical-clt", 0x5eed0003);
}

SubcriticalCltParams covariance_defaults() {
    SubcriticalCltParams p;
    p.pairs = {{0.25, 1.0}, {0.5, 1.0}, {1.0, 1.0}};
    return p;
}

ExperimentReport covariance(const SubcriticalCltParams& prm, const RunControl& rc) {
    return clt_like(prm, rc, false, "covariance", 0x5eed0013);
}

ExperimentReport phat_branch(const PhatBranchParams& prm, const RunControl&) {
    auto t0 = Clock::now();
    ExperimentReport r;
    r.kind = "phat-branch";
    const double g = prm.gamma;
    const double ph = hat_p(g);
    r.params = {{"gamma", g}, {"p", ph}, {"n", prm.n}};
    r.n_grid = {prm.n};
    BuildOptions bo;
    bo.with_eta = false;
    SequenceTable seq = build_sequences(MemorySpec::power_law(g), ph, prm.n, bo);
    MomentTable mt = second_moments(seq);
    const double target = 2 * g * g + 2 * g + 1;
    const double ratio = mt.E_S_sq_at(prm.n) / static_cast<double>(prm.n);
    r.add(rel_check("E S_n^2 / n at p_hat", ratio, target, prm.rel_tol, "2g^2+2g+1"));
    for (std::uint64_t n = 1000; n <= prm.n; n *= 10)
        r.rows.push_back({static_cast<double>(n), mt.E_S_sq_at(n) / static_cast<double>(n), target, kNaN, kNaN});
    // the kernel branch at p_hat agrees with its neighbours
    double left = subcritical_limit_variance(ph - 1e-7, g), right = subcritical_limit_variance(ph + 1e-7, g);
    double mid = subcritical_limit_variance(ph, g);
    r.add(rel_check("limit variance continuity at p_hat", mid, 0.5 * (left + right), 1e-5, "neighbouring branch"));
    r.statistics = {{"limit_variance_at_p_hat", mid}, {"left", left}, {"right", right}};
    r.wall_seconds = seconds_since(t0);
    add_runtime(r, prm.budget_seconds);
    return r;
}

ExperimentReport critical_classic(const CriticalClassicParams& prm, const RunControl& rc) {
    auto t0 = Clock::now();
    ExperimentReport r;
    r.kind = "critical-classic";
    r.master_seed = seed_or(rc, 0x5eed0005);
    r.replicas = prm.replicas;
    const double g = prm.gamma;
    const double pc = critical_p(g);
    r.params = {{"gamma", g}, {"p", pc}, {"n_lo", prm.n_lo}, {"n_hi", prm.n_hi}, {"n_mc", prm.n_mc}};
    MemorySpec spec = MemorySpec::power_law(g);
    BuildOptions bo;
    bo.with_eta = false;
    const std::uint64_t nmax = std::max({prm.n_hi, prm.n_lo, prm.n_mc});
    SequenceTable seq = build_sequences(spec, pc, nmax, bo);
    auto ratio = [&](std::uint64_t n) {
        double x = static_cast<double>(n);
        return seq.sigma_sq_at(n) / (x * std::log(x));
    };
    const double r_lo = ratio(prm.n_lo), r_hi = ratio(prm.n_hi);
    const double drift = std::abs(r_hi / r_lo - 1.0);
    SubCheck d = upper_bound_check("sigma_n^2/(n log n) drift " + std::to_string(prm.n_lo) + " -> " +
                                       std::to_string(prm.n_hi),
                                   drift, prm.drift_tol, "deterministic sequence");
    r.add(d);
    // sigma_n^2/(n log n) = C + c/log n + ...; two-point extrapolation
    const double l_lo = std::log(static_cast<double>(prm.n_lo)), l_hi = std::log(static_cast<double>(prm.n_hi));
    const double limit = (r_hi * l_hi - r_lo * l_lo) / (l_hi - l_lo);
    const double constant = (g + 1) / (g + 1); // (g+1)/(alpha+g+1) with alpha = 0
    r.add(rel_check("extrapolated limit of sigma_n^2/(n log n)", limit, constant, prm.limit_tol,
                    "(g+1)/(alpha+g+1)"));
    for (std::uint64_t n = 1000; n <= nmax; n *= 10) r.rows.push_back({static_cast<double>(n), ratio(n), constant, kNaN, kNaN});

    MomentTable mt = second_moments(seq);
    const double ms = mt.E_S_sq_at(prm.n_hi) / seq.sigma_sq_at(prm.n_hi);
    r.add(rel_check("E S_n^2 / sigma_n^2 at n=" + std::to_string(prm.n_hi), ms, (2 * g + 1) * (2 * g + 1),
                    prm.moment_rel_tol, "(2g+1)^2"));

    WalkConfig cfg;
    cfg.spec = spec;
    cfg.p = pc;
    cfg.n_steps = prm.n_mc;
    cfg.checkpoints = {prm.n_mc};
    r.n_grid = {prm.n_lo, prm.n_hi, prm.n_mc};
    auto trajs = simulate_batch(cfg, prm.replicas, r.master_seed, rc.threads);
    std::vector<double> x = column(trajs, 0);
    const double sig = std::sqrt(seq.sigma_sq_at(prm.n_mc));
    for (double& v : x) v /= sig;
    const double var = (2 * g + 1) * (2 * g + 1);
    GaussianityResult gr = gaussianity_test(x, var);
    r.add(ks_check("KS of S_n/sigma_n at n=" + std::to_string(prm.n_mc), gr, rc.ks_alpha, var));
    r.statistics = {{"ratio_lo", r_lo},
                    {"ratio_hi", r_hi},
                    {"extrapolated_limit", limit},
                    {"E_S_sq_over_sigma_sq", ms},
                    {"mc_variance", gr.variance_estimate}};
    r.notes.push_back("critical convergence carries log corrections; the limit is read through C + c/log n");
    r.wall_seconds = seconds_since(t0);
    add_runtime(r, prm.budget_seconds);
    return r;
}

ExperimentReport critical_novel(const CriticalNovelParams& prm, const RunControl&) {
    auto t0 = Clock::now();
    ExperimentReport r;
    r.kind = "critical-novel";
    r.params = {{"light", {{"gamma", prm.light_gamma}, {"alpha", prm.light_alpha}, {"n", prm.light_n}}},
                {"zeta_zero", {{"gamma", prm.zeta_gamma}, {"alpha", prm.zeta_alpha}, {"grid", prm.zeta_grid}}}};
    BuildOptions bo;
    bo.with_eta = false;
    {
        MemorySpec spec = MemorySpec::slow_growth(prm.light_gamma, prm.light_alpha);
        SequenceTable seq = build_sequences(spec, critical_p(prm.light_gamma), prm.light_n, bo);
        auto ratio = [&](std::uint64_t n) {
            double x = static_cast<double>(n);
            return seq.sigma_sq_at(n) / (x * std::pow(std::log(x), prm.light_alpha));
        };
        const double target = (prm.light_gamma + 1) / (1 - prm.light_alpha);
        r.add(rel_check("lighter than n log n: sigma_n^2/(n (log n)^alpha) at n=" + std::to_string(prm.light_n),
                        ratio(prm.light_n), target, prm.light_rel_tol, "(g+1)/(1-alpha)"));
        nlohmann::json tr = nlohmann::json::array();
        for (std::uint64_t n = 1000; n <= prm.light_n; n *= 10) {
            r.rows.push_back({static_cast<double>(n), ratio(n), target, kNaN, kNaN});
            tr.push_back({n, ratio(n)});
        }
        r.statistics["light_trend"] = tr;
    }
    {
        MemorySpec spec = MemorySpec::log_modulated(prm.zeta_gamma, prm.zeta_alpha, ZetaZero{});
        std::uint64_t nmax = *std::max_element(prm.zeta_grid.begin(), prm.zeta_grid.end());
        SequenceTable seq = build_sequences(spec, critical_p(prm.zeta_gamma), nmax, bo);
        std::vector<double> vals;
        nlohmann::json tr = nlohmann::json::array();
        for (auto n : prm.zeta_grid) {
            double x = static_cast<double>(n);
            double v = seq.sigma_sq_at(n) / (x * std::log(x) * std::log(std::log(x)));
            vals.push_back(v);
            tr.push_back({n, v});
            r.rows.push_back({x, v, kNaN, kNaN, kNaN});
        }
        bool decreasing = true;
        for (std::size_t i = 1; i < vals.size(); ++i) decreasing = decreasing && vals[i] < vals[i - 1];
        SubCheck c;
        c.name = "zeta zero: sigma_n^2/(n log n log log n) decreasing";
        c.estimate = vals.back();
        c.target_source = "trend only";
        c.tolerance = "strictly decreasing over the grid";
        c.verdict = decreasing ? Verdict::Pass : Verdict::Fail;
        r.add(c);
        r.statistics["zeta_zero_trend"] = tr;
    }
    r.notes.push_back("deterministic only; Monte Carlo at these scalings converges too slowly to judge");
    r.wall_seconds = seconds_since(t0);
    add_runtime(r, prm.budget_seconds);
    return r;
}

ExperimentReport supercritical_as(const SupercriticalAsParams& prm, const RunControl& rc) {
    auto t0 = Clock::now();
    ExperimentReport r;
    r.kind = "supercritical-as";
    r.master_seed = seed_or(rc, 0x5eed0007);
    r.replicas = prm.replicas;
    r.params = {{"gamma", prm.gamma}, {"p", prm.p}, {"flat", {prm.flat_lo, prm.flat_hi}},
                {"windows", {{prm.w1, 2 * prm.w1}, {prm.w2, 2 * prm.w2}}}};
    MemorySpec spec = MemorySpec::power_law(prm.gamma);
    RegimeReport reg = classify_regime(spec, prm.p);
    BuildOptions bo;
    bo.with_eta = false;
    const std::uint64_t nmax = std::max(prm.flat_hi, 2 * prm.w2);
    SequenceTable seq = build_sequences(spec, prm.p, nmax, bo);
    MomentTable mt = second_moments(seq);
    double lo = INFINITY, hi = -INFINITY;
    for (auto n : geometric_checkpoints(prm.flat_lo, prm.flat_hi, 21)) {
        double v = std::exp(2 * seq.log_amu_at(n)) * mt.E_S_sq_at(n);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        r.rows.push_back({static_cast<double>(n), v, kNaN, kNaN, kNaN});
    }
    r.add(upper_bound_check("(a_n mu_n)^2 E S_n^2 drift over [" + std::to_string(prm.flat_lo) + ", " +
                                std::to_string(prm.flat_hi) + "]",
                            hi / lo - 1.0, prm.flat_tol, "Cauchy flatness"));

    WalkConfig cfg;
    cfg.spec = spec;
    cfg.p = prm.p;
    cfg.n_steps = 2 * prm.w2;
    cfg.checkpoints = merged(geometric_checkpoints(prm.w1, 2 * prm.w1, prm.window_points),
                             geometric_checkpoints(prm.w2, 2 * prm.w2, prm.window_points));
    r.n_grid = cfg.checkpoints;
    auto trajs = simulate_batch(cfg, prm.replicas, r.master_seed, rc.threads);
    OscillationSummary o1 = as_convergence_check(trajs, seq, reg.regime, prm.w1, 2 * prm.w1);
    OscillationSummary o2 = as_convergence_check(trajs, seq, reg.regime, prm.w2, 2 * prm.w2);
    const double shrink = 1.0 - o2.q90 / o1.q90;
    SubCheck c;
    c.name = "oscillation q90 shrink between windows";
    c.estimate = shrink;
    c.target = prm.min_shrink;
    c.target_source = "oscillation diagnostic";
    c.tolerance = ">= " + fmt(prm.min_shrink);
    c.detail = "q90 " + fmt(o1.q90) + " -> " + fmt(o2.q90);
    c.verdict = shrink >= prm.min_shrink ? Verdict::Pass : Verdict::Fail;
    r.add(c);
    r.statistics = {{"flat_min", lo},
                    {"flat_max", hi},
                    {"window1", {{"q50", o1.q50}, {"q90", o1.q90}, {"q99", o1.q99}, {"points", o1.points}}},
                    {"window2", {{"q50", o2.q50}, {"q90", o2.q90}, {"q99", o2.q99}, {"points", o2.points}}}};
    r.notes.push_back("almost-sure convergence is operationalized by the shrink of max |a_k mu_k S_k - a_m mu_m S_m| "
                      "over checkpoint windows; it is evidence, not proof");
    r.wall_seconds = seconds_since(t0);
    add_runtime(r, prm.budget_seconds);
    return r;
}

ExperimentReport platykurtosis(const PlatykurtosisParams& prm, const RunControl& rc) {
    auto t0 = Clock::now();
    ExperimentReport r;
    r.kind = "platykurtosis";
    r.master_seed = seed_or(rc, 0x5eed0008);
    r.replicas = prm.replicas;
    r.params = {{"gamma", prm.gamma}, {"p", prm.p}, {"n_exact", prm.n_exact}, {"n", prm.n}};
    MemorySpec spec = MemorySpec::power_law(prm.gamma);
    RegimeReport reg = classify_regime(spec, prm.p);
    MomentTable mt = rademacher_fourth_moments(spec, prm.p, std::max(prm.n_exact, prm.n));
    const double k_exact = mt.kurtosis_at(prm.n_exact);
    SubCheck c0 = upper_bound_check("recursion kurtosis of M_n at n=" + std::to_string(prm.n_exact), k_exact, 3.0,
                                    "Gaussian kurtosis");
    c0.verdict = k_exact < 3.0 ? Verdict::Pass : Verdict::Fail;
    c0.tolerance = "< 3 strictly";
    c0.detail = "margin " + fmt(3.0 - k_exact);
    r.add(c0);
    nlohmann::json trend = nlohmann::json::array();
    for (std::uint64_t n = 10; n <= mt.n_max; n *= 10) {
        trend.push_back({n, mt.kurtosis_at(n)});
        r.rows.push_back({static_cast<double>(n), mt.kurtosis_at(n), 3.0, kNaN, kNaN});
    }

    // gamma = 0 gives Y_n = S_n, so M_n = a_n S_n and its kurtosis is that of S_n
    WalkConfig cfg;
    cfg.spec = spec;
    cfg.p = prm.p;
    cfg.n_steps = prm.n;
    cfg.checkpoints = {prm.n};
    cfg.record_martingales = !spec.is_unit();
    r.n_grid = {prm.n};
    std::vector<double> x(prm.replicas);
    const bool unit = spec.is_unit();
    run_replicas(cfg, prm.replicas, r.master_seed, rc.threads, [&](const WalkTrajectory& t) {
        x[t.replica] = unit ? t.S[0] : t.M[0];
    });
    KurtosisResult k = kurtosis_check(x, Rademacher{}, reg.regime);
    SubCheck c1;
    c1.name = "Monte Carlo kurtosis below 3";
    c1.estimate = k.kurtosis;
    c1.se = k.se;
    c1.target = 3.0;
    c1.target_source = "Gaussian kurtosis";
    c1.tolerance = "3 - K >= " + fmt(prm.se_mult) + " SE";
    c1.detail = "(3 - K)/SE = " + fmt((3.0 - k.kurtosis) / k.se);
    c1.verdict = 3.0 - k.kurtosis >= prm.se_mult * k.se ? Verdict::Pass : Verdict::Fail;
    r.add(c1);
    r.add(se_check("Monte Carlo kurtosis vs recursion at n=" + std::to_string(prm.n), k.kurtosis, k.se,
                   mt.kurtosis_at(prm.n), prm.se_mult, "fourth-moment recursion"));
    r.statistics = {{"recursion_kurtosis_exact_n", k_exact},
                    {"recursion_kurtosis_mc_n", mt.kurtosis_at(prm.n)},
                    {"recursion_trend", trend},
                    {"mc_kurtosis", k.kurtosis},
                    {"mc_se", k.se}};
    r.wall_seconds = seconds_since(t0);
    add_runtime(r, prm.budget_seconds);
    return r;
}

ExperimentReport marginal_law(const MarginalLawParams& prm, const RunControl& rc) {
    auto t0 = Clock::now();
    ExperimentReport r;
    r.kind = "marginal-law";
    r.master_seed = seed_or(rc, 0x5eed0009);
    r.replicas = prm.replicas;
    r.params = {{"gamma", prm.gamma}, {"p", prm.p}, {"n_exact", prm.n_exact}, {"n", prm.n}};
    MemorySpec spec = MemorySpec::power_law(prm.gamma);
    ExactMoments ex = enumerate_exact(spec, prm.p, prm.n_exact, FiniteLaw::rademacher());
    double err = 0;
    for (const auto& m : ex.marginal) err = std::max(err, std::abs(m[1] - 0.5));
    r.add(upper_bound_check("max |P(X_n = 1) - 1/2| by enumeration, n <= " + std::to_string(prm.n_exact), err,
                            prm.exact_tol, "innovation law"));

    WalkConfig cfg;
    cfg.spec = spec;
    cfg.p = prm.p;
    cfg.n_steps = prm.n;
    cfg.checkpoints = {prm.n};
    r.n_grid = {prm.n};
    auto xs = marginal_law_sample(cfg, prm.n, prm.replicas, r.master_seed, rc.threads);
    double ones = static_cast<double>(std::count(xs.begin(), xs.end(), 1.0));
    ChiSquareResult chi = chi_square_test({static_cast<double>(xs.size()) - ones, ones}, {0.5, 0.5});
    SubCheck c;
    c.name = "chi-square of X_n at n=" + std::to_string(prm.n);
    c.estimate = chi.p_value;
    c.target = rc.ks_alpha;
    c.target_source = "Rademacher law";
    c.tolerance = "p-value > " + fmt(rc.ks_alpha);
    c.detail = "statistic " + fmt(chi.statistic) + ", P(X_n=1) ~ " + fmt(ones / static_cast<double>(xs.size()));
    c.verdict = chi.p_value > rc.ks_alpha ? Verdict::Pass : Verdict::Fail;
    r.add(c);

    cfg.innovation = StandardNormal{};
    auto zs = marginal_law_sample(cfg, prm.n, prm.replicas, r.master_seed ^ 0x9e3779b97f4a7c15ULL, rc.threads);
    r.add(ks_check("KS of X_n under normal innovations", gaussianity_test(zs, 1.0), rc.ks_alpha, 1.0));
    r.wall_seconds = seconds_since(t0);
    add_runtime(r, prm.budget_seconds);
    return r;
}

ExperimentReport slln(const SllnParams& prm, const RunControl& rc) {
    auto t0 = Clock::now();
    ExperimentReport r;
    r.kind = "slln";
    r.master_seed = seed_or(rc, 0x5eed000a);
    r.replicas = prm.replicas;
    r.params = {{"ps", prm.ps}, {"gammas", prm.gammas}, {"n", prm.n}, {"n0", prm.n0}};
    r.n_grid = prm.n0;
    nlohmann::json per = nlohmann::json::array();
    std::uint64_t salt = 0;
    for (double g : prm.gammas) {
        for (double p : prm.ps) {
            WalkConfig cfg;
            cfg.spec = MemorySpec::power_law(g);
            cfg.p = p;
            cfg.n_steps = prm.n;
            cfg.checkpoints = {prm.n};
            cfg.sup_starts = prm.n0;
            auto trajs = simulate_batch(cfg, prm.replicas, derive_stream_seed(r.master_seed, 1000 + salt++),
                                        rc.threads);
            SllnSummary s = slln_check(trajs, prm.n0, p);
            const std::string tag = "gamma=" + fmt(g) + " p=" + fmt(p);
            for (std::size_t k = 0; k < s.ratio.size(); ++k) {
                SubCheck c;
                c.name = tag + " median ratio n0 " + std::to_string(prm.n0[k]) + " -> " + std::to_string(prm.n0[k + 1]);
                c.estimate = s.ratio[k];
                c.se = s.ratio_se[k];
                c.target = prm.target_ratio;
                c.target_source = "halving per 4x n0";
                c.tolerance = "ratio - " + fmt(prm.se_mult) + " SE <= " + fmt(prm.target_ratio);
                c.verdict = s.ratio[k] - prm.se_mult * s.ratio_se[k] <= prm.target_ratio ? Verdict::Pass : Verdict::Fail;
                r.add(c);
            }
            for (std::size_t k = 0; k < s.n0.size(); ++k)
                r.rows.push_back({static_cast<double>(s.n0[k]), s.median[k], kNaN, kNaN, kNaN});
            per.push_back({{"gamma", g}, {"p", p}, {"regime", to_string(classify_regime(cfg.spec, p).regime)},
                           {"median", s.median}, {"ratio", s.ratio}, {"ratio_se", s.ratio_se}});
        }
    }
    r.statistics["configs"] = per;
    r.notes.push_back("sup over n >= n0 is exact over every step up to the horizon n");
    r.wall_seconds = seconds_since(t0);
    add_runtime(r, prm.budget_seconds);
    return r;
}

ExperimentReport karamata(const KaramataParams& prm, const RunControl&) {
    auto t0 = Clock::now();
    ExperimentReport r;
    r.kind = "karamata";
    r.params = {{"n", prm.n}, {"nu_gammas", prm.nu_gammas}, {"index_gammas", prm.index_gammas},
                {"index_ps", prm.index_ps}, {"eta", {prm.eta_gamma, prm.eta_p}}};
    r.n_grid = {prm.n};
    BuildOptions bo;
    bo.with_eta = false;
    const double nd = static_cast<double>(prm.n);
    for (double g : prm.nu_gammas) {
        for (int fam = 0; fam < 2; ++fam) {
            MemorySpec spec = fam == 0 ? MemorySpec::power_law(g) : MemorySpec::continued_product(g);
            SequenceTable seq = build_sequences(spec, 0.0, prm.n, bo);
            double v = (g + 1) * seq.nu_at(prm.n) / (nd * seq.mu_at(prm.n));
            r.add(rel_check(spec.family_name() + " gamma=" + fmt(g) + ": (g+1) nu_n/(n mu_n)", v, 1.0, prm.nu_tol,
                            "Karamata"));
        }
    }
    for (double g : prm.index_gammas) {
        for (double p : prm.index_ps) {
            SequenceTable seq = build_sequences(MemorySpec::power_law(g), p, prm.n, bo);
            std::vector<double> a(seq.log_a.size());
            for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::exp(seq.log_a[i]);
            double idx = estimate_index(a);
            SubCheck c;
            c.name = "index of a_n, gamma=" + fmt(g) + " p=" + fmt(p);
            c.estimate = idx;
            c.target = -p * (g + 1);
            c.target_source = "-p(g+1)";
            c.tolerance = "absolute " + fmt(prm.index_tol);
            c.verdict = std::abs(idx - c.target) <= prm.index_tol ? Verdict::Pass : Verdict::Fail;
            r.add(c);
        }
    }
    {
        const double g = prm.eta_gamma, p = prm.eta_p;
        SequenceTable seq = build_sequences(MemorySpec::power_law(g), p, prm.n);
        double v = 1.0 - p * std::exp(seq.log_amu_at(prm.n)) * seq.eta_at(prm.n);
        r.add(rel_check("1 - p a_n mu_n eta_n, gamma=" + fmt(g) + " p=" + fmt(p), v, g / (g - p * (g + 1)),
                        prm.eta_tol, "g/(g-p(g+1))"));
        r.statistics["eta_branch"] = to_string(seq.eta_branch);
    }
    r.wall_seconds = seconds_since(t0);
    add_runtime(r, prm.budget_seconds);
    return r;
}

ExperimentReport performance(const PerformanceParams& prm, const RunControl& rc) {
    auto t0 = Clock::now();
    ExperimentReport r;
    r.kind = "performance";
    r.master_seed = seed_or(rc, 0x5eed000c);
    r.replicas = 1;
    r.params = {{"gamma", prm.gamma}, {"p", prm.p}, {"n", prm.n}};
    r.n_grid = {prm.n};
    WalkConfig cfg;
    cfg.spec = MemorySpec::power_law(prm.gamma);
    cfg.p = prm.p;
    cfg.n_steps = prm.n;
    cfg.checkpoints = {prm.n};
    cfg.seed = r.master_seed;

    std::vector<WalkConfig> runs{cfg};
    if (prm.tree_run && cfg.sampler_kind() != SamplerKind::Tree) {
        runs.push_back(cfg);
        runs.back().sampler = SamplerChoice::Tree;
    }
    r.statistics = nlohmann::json::object();
    for (const auto& c : runs) {
        const std::string tag = to_string(c.sampler_kind());
        auto ts = Clock::now();
        WalkTrajectory tr = simulate(c);
        double walk_s = seconds_since(ts);
        r.add(upper_bound_check("walk seconds (" + tag + ")", walk_s, prm.budget_seconds, "time budget"));
        const double bps = static_cast<double>(c.footprint_bytes()) / static_cast<double>(prm.n);
        r.add(upper_bound_check("bytes per step (" + tag + ")", bps, prm.max_bytes_per_step, "memory contract"));
        r.statistics[tag] = {{"ns_per_step", walk_s / static_cast<double>(prm.n) * 1e9}, {"S_n", tr.S.back()}};
    }
    r.wall_seconds = seconds_since(t0);
    return r;
}

namespace {

struct SuiteEntry {
    const char* name;
    std::vector<ExperimentReport> (*run)(const SuiteOptions&);
};

RunControl control(const SuiteOptions& o) {
    RunControl rc;
    rc.master_seed = o.seed;
    rc.threads = o.threads;
    return rc;
}

template <class P>
void apply_mc(P& p, const SuiteOptions& o) {
    if (o.n) p.n = *o.n;
    if (o.replicas) p.replicas = *o.replicas;
}

const std::vector<SuiteEntry>& registry() {
    static const std::vector<SuiteEntry> r{
        {"oracle-equivalence",
         [](const SuiteOptions& o) {
             OracleEquivalenceParams p;
             if (o.n) p.n = *o.n;
             return std::vector{oracle_equivalence(p, control(o))};
         }},
        {"subcritical-variance",
         [](const SuiteOptions& o) {
             SubcriticalVarianceParams p;
             apply_mc(p, o);
             return std::vector{subcritical_variance(p, control(o))};
         }},
        {"subcritical-clt",
         [](const SuiteOptions& o) {
             SubcriticalCltParams p;
             apply_mc(p, o);
             return std::vector{subcritical_clt(p, control(o))};
         }},
        {"covariance",
         [](const SuiteOptions& o) {
             SubcriticalCltParams p = covariance_defaults();
             apply_mc(p, o);
             return std::vector{covariance(p, control(o))};
         }},
        {"phat-branch",
         [](const SuiteOptions& o) {
             PhatBranchParams p;
             if (o.n) p.n = *o.n;
             return std::vector{phat_branch(p, control(o))};
         }},
        {"critical-scaling",
         [](const SuiteOptions& o) {
             CriticalClassicParams p;
             if (o.n) p.n_mc = *o.n;
             if (o.replicas) p.replicas = *o.replicas;
             return std::vector{critical_classic(p, control(o)), critical_novel({}, control(o))};
         }},
        {"supercritical-as",
         [](const SuiteOptions& o) {
             SupercriticalAsParams p;
             if (o.replicas) p.replicas = *o.replicas;
             return std::vector{supercritical_as(p, control(o))};
         }},
        {"kurtosis",
         [](const SuiteOptions& o) {
             PlatykurtosisParams p;
             apply_mc(p, o);
             return std::vector{platykurtosis(p, control(o))};
         }},
        {"marginal-law",
         [](const SuiteOptions& o) {
             MarginalLawParams p;
             apply_mc(p, o);
             return std::vector{marginal_law(p, control(o))};
         }},
        {"slln",
         [](const SuiteOptions& o) {
             SllnParams p;
             apply_mc(p, o);
             return std::vector{slln(p, control(o))};
         }},
        {"karamata",
         [](const SuiteOptions& o) {
             KaramataParams p;
             if (o.n) p.n = *o.n;
             return std::vector{karamata(p, control(o))};
         }},
        {"performance",
         [](const SuiteOptions& o) {
             PerformanceParams p;
             if (o.n) p.n = *o.n;
             return std::vector{performance(p, control(o))};
         }},
    };
    return r;
}

} // namespace

std::vector<std::string> suite_names() {
    std::vector<std::string> out;
    for (const auto& e : registry()) out.emplace_back(e.name);
    return out;
}

bool is_suite(const std::string& name) {
    for (const auto& e : registry())
        if (name == e.name) return true;
    return false;
}

std::vector<ExperimentReport> run_suite(const std::string& name, const SuiteOptions& opts) {
    for (const auto& e : registry())
        if (name == e.name) return e.run(opts);
    fail(ErrorKind::InvalidSpec, "unknown suite '" + name + "'");
}

} // namespace rvwalk
