#include "rvwalk/stat_harness.hpp"
#include "rvwalk/csv.hpp"
#include "rvwalk/error.hpp"
#include "rvwalk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace rvwalk {

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

GrowthFit growth_exponent(const std::vector<std::pair<double, double>>& pts, double confidence) {
    require(pts.size() >= 4, ErrorKind::InvalidSpec, "growth fit needs >= 4 grid points");
    double lo = pts.front().first, hi = pts.front().first;
    for (auto [n, v] : pts) {
        require(n > 0 && v > 0 && std::isfinite(v), ErrorKind::InvalidSpec,
                "growth fit needs positive n and variance");
        lo = std::min(lo, n);
        hi = std::max(hi, n);
    }
    require(hi / lo >= 100.0, ErrorKind::InvalidSpec, "growth fit grid must span >= 2 decades");

    const double m = static_cast<double>(pts.size());
    double sx = 0, sy = 0;
    for (auto [n, v] : pts) {
        sx += std::log(n);
        sy += std::log(v);
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (auto [n, v] : pts) {
        double dx = std::log(n) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(v) - my);
    }
    GrowthFit f;
    f.points = pts.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0;
    for (auto [n, v] : pts) {
        double r = std::log(v) - (f.intercept + f.slope * std::log(n));
        rss += r * r;
    }
    f.se = std::sqrt(rss / (m - 2) / sxx);
    boost::math::students_t tdist(m - 2);
    double tq = boost::math::quantile(boost::math::complement(tdist, (1 - confidence) / 2));
    f.ci_lo = f.slope - tq * f.se;
    f.ci_hi = f.slope + tq * f.se;
    f.superlinear = f.ci_lo > 1.0 + 1e-9;
    return f;
}

MomentSummary summarize(const std::vector<double>& x) {
    require(!x.empty(), ErrorKind::InvalidSpec, "empty sample");
    const double n = static_cast<double>(x.size());
    MomentSummary s;
    double sum = 0, sq = 0;
    for (double v : x) {
        sum += v;
        sq += v * v;
    }
    s.mean = sum / n;
    s.second = sq / n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : x) {
        double d = v - s.mean, d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.variance = m2;
    s.skewness = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
    s.kurtosis = m2 > 0 ? m4 / (m2 * m2) : 0.0;
    return s;
}

double normal_cdf(double x, double variance) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}

double ks_statistic(std::vector<double> x, double (*cdf)(double, double), double param) {
    require(!x.empty(), ErrorKind::InvalidSpec, "empty sample");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double f = cdf(x[i], param);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_p_value(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lam = (sn + 0.12 + 0.11 / sn) * d;
    if (lam < 1e-3) return 1.0;
    double q = 0, sign = 1;
    for (int k = 1; k <= 200; ++k) {
        double term = std::exp(-2.0 * k * k * lam * lam);
        q += sign * term;
        if (term < 1e-17) break;
        sign = -sign;
    }
    return std::clamp(2.0 * q, 0.0, 1.0);
}

GaussianityResult gaussianity_test(const std::vector<double>& x, double target_variance) {
    require(x.size() >= 1000, ErrorKind::InvalidSpec, "gaussianity test needs >= 1000 samples");
    require(std::isfinite(target_variance) && target_variance > 0, ErrorKind::InvalidSpec,
            "target variance must be positive");
    GaussianityResult g;
    g.ks.n = x.size();
    g.ks.statistic = ks_statistic(x, normal_cdf, target_variance);
    g.ks.p_value = ks_p_value(g.ks.statistic, x.size());
    MomentSummary s = summarize(x);
    require(std::isfinite(s.variance) && s.variance > 0, ErrorKind::InvalidSpec, "sample variance is zero or NaN");
    g.variance_estimate = s.second;
    g.skewness = s.skewness;
    g.excess_kurtosis = s.kurtosis - 3.0;
    return g;
}

ChiSquareResult chi_square_test(const std::vector<double>& observed, const std::vector<double>& probs) {
    require(observed.size() == probs.size() && observed.size() >= 2, ErrorKind::InvalidSpec,
            "chi-square needs matching bins (>= 2)");
    double total = std::accumulate(observed.begin(), observed.end(), 0.0);
    require(total > 0, ErrorKind::InvalidSpec, "chi-square needs counts");
    ChiSquareResult r;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        require(probs[i] > 0, ErrorKind::InvalidSpec, "chi-square bin probability must be positive");
        double e = total * probs[i];
        r.statistic += (observed[i] - e) * (observed[i] - e) / e;
    }
    r.dof = static_cast<double>(observed.size() - 1);
    boost::math::chi_squared dist(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    return r;
}

CovarianceEstimate covariance_check(const std::vector<double>& xs, const std::vector<double>& xt,
                                    double scale, double target) {
    require(xs.size() == xt.size() && xs.size() >= 2, ErrorKind::InvalidSpec, "covariance needs paired samples");
    require(scale > 0, ErrorKind::InvalidSpec, "scale must be positive");
    const double n = static_cast<double>(xs.size());
    std::vector<double> prod(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) prod[i] = (xs[i] / scale) * (xt[i] / scale);
    double sum = 0;
    for (double v : prod) sum += v;
    double mean = sum / n;
    double ss = 0;
    for (double v : prod) ss += (v - mean) * (v - mean);
    CovarianceEstimate c;
    c.estimate = mean;
    c.se = std::sqrt(ss / (n - 1) / n);
    c.target = target;
    c.z = c.se > 0 ? (mean - target) / c.se : 0.0;
    return c;
}

namespace {

std::size_t checkpoint_index(const WalkTrajectory& tr, std::uint64_t idx) {
    auto it = std::lower_bound(tr.n.begin(), tr.n.end(), idx);
    require(it != tr.n.end() && *it == idx, ErrorKind::OutOfRange,
            "missing checkpoint " + std::to_string(idx));
    return static_cast<std::size_t>(it - tr.n.begin());
}

} // namespace

CovarianceEstimate covariance_check(const std::vector<WalkTrajectory>& trajs, double s, double t,
                                    std::uint64_t n, double scale, double target) {
    require(!trajs.empty(), ErrorKind::InvalidSpec, "no trajectories");
    auto is = checkpoint_index(trajs[0], static_cast<std::uint64_t>(std::floor(n * s)));
    auto it = checkpoint_index(trajs[0], static_cast<std::uint64_t>(std::floor(n * t)));
    std::vector<double> xs, xt;
    xs.reserve(trajs.size());
    xt.reserve(trajs.size());
    for (const auto& tr : trajs) {
        xs.push_back(tr.S[is]);
        xt.push_back(tr.S[it]);
    }
    CovarianceEstimate c = covariance_check(xs, xt, scale, target);
    c.s = s;
    c.t = t;
    return c;
}

double quantile(std::vector<double> x, double q) {
    require(!x.empty(), ErrorKind::InvalidSpec, "quantile of empty sample");
    std::sort(x.begin(), x.end());
    double h = (static_cast<double>(x.size()) - 1) * q;
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

OscillationSummary as_convergence_check(const std::vector<WalkTrajectory>& trajs, const SequenceTable& seq,
                                        Regime regime, std::uint64_t n1, std::uint64_t n2) {
    require(regime == Regime::Supercritical || regime == Regime::CriticalBoundedV, ErrorKind::WrongRegime,
            "wrong regime: oscillation diagnostic needs an almost-sure limit");
    require(!trajs.empty(), ErrorKind::InvalidSpec, "no trajectories");
    require(n1 < n2 && n2 <= seq.n_max, ErrorKind::OutOfRange, "window outside the sequence table");
    const auto& ns = trajs[0].n;
    auto first = std::lower_bound(ns.begin(), ns.end(), n1);
    auto last = std::upper_bound(ns.begin(), ns.end(), n2);
    std::size_t i0 = first - ns.begin(), i1 = last - ns.begin();
    std::size_t iend = checkpoint_index(trajs[0], n2);
    require(i1 - i0 >= 2, ErrorKind::OutOfRange, "window holds fewer than two checkpoints");
    std::vector<double> scale(i1 - i0);
    for (std::size_t i = i0; i < i1; ++i) scale[i - i0] = std::exp(seq.log_amu_at(ns[i]));
    const double send = std::exp(seq.log_amu_at(n2));
    std::vector<double> osc;
    osc.reserve(trajs.size());
    for (const auto& tr : trajs) {
        double ref = send * tr.S[iend];
        double m = 0;
        for (std::size_t i = i0; i < i1; ++i) m = std::max(m, std::abs(scale[i - i0] * tr.S[i] - ref));
        osc.push_back(m);
    }
    OscillationSummary o;
    o.n1 = n1;
    o.n2 = n2;
    o.paths = trajs.size();
    o.points = i1 - i0;
    o.q50 = quantile(osc, 0.5);
    o.q90 = quantile(osc, 0.9);
    o.q99 = quantile(osc, 0.99);
    return o;
}

SllnSummary slln_check(const std::vector<WalkTrajectory>& trajs, const std::vector<std::uint64_t>& n0,
                       double p, std::uint64_t bootstrap, std::uint64_t seed) {
    require(p >= 0.0 && p < 1.0, ErrorKind::InvalidSpec, "SLLN check needs p in [0,1)");
    require(!trajs.empty(), ErrorKind::InvalidSpec, "no trajectories");
    require(trajs[0].sup_abs_mean.size() == n0.size(), ErrorKind::InvalidSpec,
            "trajectories lack running sups for the requested n0 grid");
    const std::size_t R = trajs.size(), K = n0.size();
    std::vector<std::vector<double>> cols(K, std::vector<double>(R));
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t k = 0; k < K; ++k) cols[k][r] = trajs[r].sup_abs_mean[k];

    SllnSummary s;
    s.n0 = n0;
    for (std::size_t k = 0; k < K; ++k) s.median.push_back(quantile(cols[k], 0.5));
    for (std::size_t k = 0; k + 1 < K; ++k) s.ratio.push_back(s.median[k + 1] / s.median[k]);

    // paired bootstrap over paths
    Rng rng(seed);
    std::vector<std::vector<double>> boot(K ? K - 1 : 0);
    std::vector<double> a(R), b(R);
    for (std::uint64_t rep = 0; rep < bootstrap; ++rep) {
        std::vector<std::size_t> idx(R);
        for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(R));
        std::vector<double> med(K);
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t r = 0; r < R; ++r) a[r] = cols[k][idx[r]];
            med[k] = quantile(a, 0.5);
        }
        for (std::size_t k = 0; k + 1 < K; ++k) boot[k].push_back(med[k + 1] / med[k]);
    }
    for (auto& v : boot) s.ratio_se.push_back(std::sqrt(summarize(v).variance));
    return s;
}

KurtosisResult kurtosis_check(const std::vector<double>& x) {
    require(x.size() >= 3, ErrorKind::InvalidSpec, "kurtosis needs >= 3 samples");
    const double n = static_cast<double>(x.size());
    // power sums for leave-one-out recomputation
    long double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (double v : x) {
        long double w = v;
        s1 += w;
        s2 += w * w;
        s3 += w * w * w;
        s4 += w * w * w * w;
    }
    auto kurt = [](long double m, long double t1, long double t2, long double t3, long double t4) {
        long double mu = t1 / m;
        long double c2 = t2 / m - mu * mu;
        long double c4 = t4 / m - 4 * mu * t3 / m + 6 * mu * mu * t2 / m - 3 * mu * mu * mu * mu;
        return static_cast<double>(c4 / (c2 * c2));
    };
    KurtosisResult r;
    r.n = x.size();
    // direct two-pass value for accuracy
    r.kurtosis = summarize(x).kurtosis;
    r.excess = r.kurtosis - 3.0;
    long double jsum = 0, jsq = 0;
    std::vector<double> loo(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        long double w = x[i];
        loo[i] = kurt(n - 1, s1 - w, s2 - w * w, s3 - w * w * w, s4 - w * w * w * w);
        jsum += loo[i];
    }
    long double jmean = jsum / n;
    for (double v : loo) jsq += (v - jmean) * (v - jmean);
    r.se = static_cast<double>(std::sqrt((n - 1) / n * jsq));
    return r;
}

KurtosisResult kurtosis_check(const std::vector<double>& samples, const InnovationSpec& innovation, Regime regime) {
    require(std::holds_alternative<Rademacher>(innovation), ErrorKind::Unsupported,
            "kurtosis check needs rademacher innovations");
    require(regime == Regime::Supercritical || regime == Regime::CriticalBoundedV, ErrorKind::WrongRegime,
            "kurtosis check needs an almost-sure-limit regime");
    return kurtosis_check(samples);
}

Verdict within_se(double est, double target, double se, double k) {
    if (!std::isfinite(est) || !std::isfinite(se)) return Verdict::Inconclusive;
    return std::abs(est - target) <= k * se ? Verdict::Pass : Verdict::Fail;
}

Verdict ExperimentReport::verdict() const {
    if (checks.empty()) return Verdict::Inconclusive;
    bool inconclusive = false;
    for (const auto& c : checks) {
        if (c.verdict == Verdict::Fail) return Verdict::Fail;
        if (c.verdict == Verdict::Inconclusive) inconclusive = true;
    }
    return inconclusive ? Verdict::Inconclusive : Verdict::Pass;
}

namespace {
nlohmann::json num_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }
} // namespace

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = kind;
    j["params"] = params;
    j["n_grid"] = n_grid;
    j["replicas"] = replicas;
    j["master_seed"] = master_seed;
    j["rng_family"] = kRngFamily;
    j["verdict"] = to_string(verdict());
    j["wall_seconds"] = wall_seconds;
    j["notes"] = notes;
    j["statistics"] = statistics;
    auto& cs = j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        cs.push_back({{"name", c.name},
                      {"estimate", num_or_null(c.estimate)},
                      {"se", num_or_null(c.se)},
                      {"target", num_or_null(c.target)},
                      {"target_source", c.target_source},
                      {"tolerance", c.tolerance},
                      {"verdict", to_string(c.verdict)},
                      {"detail", c.detail}});
    }
    return j;
}

std::string ExperimentReport::to_text() const {
    std::ostringstream os;
    os << "== " << kind << " [" << to_string(verdict()) << "] ";
    os.precision(3);
    os << std::fixed << wall_seconds << "s";
    os.unsetf(std::ios::fixed);
    os.precision(6);
    if (replicas) os << ", replicas=" << replicas << ", seed=" << master_seed;
    os << '\n';
    for (const auto& c : checks) {
        os << "  [" << to_string(c.verdict) << "] " << c.name << ": estimate=" << c.estimate;
        if (std::isfinite(c.se)) os << " se=" << c.se;
        if (std::isfinite(c.target)) os << " target=" << c.target;
        if (!c.tolerance.empty()) os << " (" << c.tolerance << ")";
        if (!c.detail.empty()) os << " - " << c.detail;
        os << '\n';
    }
    for (const auto& n : notes) os << "  note: " << n << '\n';
    return os.str();
}

void ExperimentReport::write_csv(std::ostream& os) const {
    os << "n,estimate,target,lo,hi\n";
    for (const auto& r : rows)
        os << format_double(r.n) << ',' << format_double(r.estimate) << ',' << format_double(r.target) << ','
           << format_double(r.lo) << ',' << format_double(r.hi) << '\n';
}

} // namespace rvwalk
