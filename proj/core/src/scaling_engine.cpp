#include "rvwalk/scaling_engine.hpp"
#include "rvwalk/csv.hpp"
#include "rvwalk/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rvwalk {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kRescaleGap = 600.0;

void check_p(double p) {
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorKind::InvalidSpec,
            "p must lie in [0,1]");
}

bool near(double a, double b, double tol = kCriticalTol) { return std::abs(a - b) <= tol; }

std::string num(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

double ln(double x) { return std::log(x); }

double ord_nlogn(double n, double) { return n * ln(n); }
double ord_nlogn_ll(double n, double) { return n * ln(n) * ln(ln(n)); }
double ord_nlogn_llpow(double n, double rho) { return n * ln(n) * std::pow(ln(ln(n)), rho); }
double ord_nlogn_ll_lll(double n, double) { return n * ln(n) * ln(ln(n)) * ln(ln(ln(n))); }
double ord_nlogpow(double n, double a) { return n * std::pow(ln(n), a); }

// nullopt: not decidable analytically (tables)
std::optional<bool> analytic_v_bounded(const MemorySpec& spec) {
    const double g = spec.gamma();
    return std::visit(overloaded{
        [](const PowerLaw&) -> std::optional<bool> { return false; },
        [](const ContinuedProduct&) -> std::optional<bool> { return false; },
        [](const SlowGrowth&) -> std::optional<bool> { return false; },
        [](const CustomTable&) -> std::optional<bool> { return std::nullopt; },
        [g](const LogModulated& lm) -> std::optional<bool> {
            double s = lm.alpha + g + 1.0;
            if (s > kCriticalTol) return false;
            if (s < -kCriticalTol) return true;
            return std::visit(overloaded{
                [](const ZetaZero&) { return false; },
                [](const ZetaPower& z) { return z.kappa < 0.0; },
                [g](const ZetaLogLog& z) { return z.kappa + g + 1.0 < -kCriticalTol; },
            }, lm.zeta);
        },
    }, spec.family());
}

VBounded heuristic_v_bounded(const MemorySpec& spec, double p, std::vector<std::string>& notes) {
    std::uint64_t len = spec.max_index().value_or(0);
    if (len < 16) {
        notes.push_back("table too short for the v_n growth heuristic");
        return VBounded::HeuristicFalse;
    }
    BuildOptions o;
    o.with_eta = false;
    SequenceTable t = build_sequences(spec, p, len, o);
    bool flat = true;
    for (std::uint64_t k : {len / 8, len / 4, len / 2}) {
        if (t.v_sq_at(2 * k) / t.v_sq_at(k) >= 1.0 + 1e-3) flat = false;
    }
    notes.push_back("v_n boundedness decided by doubling heuristic (eps=1e-3)");
    return flat ? VBounded::HeuristicTrue : VBounded::HeuristicFalse;
}

bool is_bounded(VBounded v) { return v == VBounded::True || v == VBounded::HeuristicTrue; }

// n * ell_n^{-1/(gamma+1)} rendered for the cataloged families
std::string bounded_asymptotic(const MemorySpec& spec) {
    const double g = spec.gamma();
    if (auto lm = std::get_if<LogModulated>(&spec.family())) {
        std::string out = "n (log n)^{" + num(-lm->alpha / (g + 1)) + "}";
        std::visit(overloaded{
            [](const ZetaZero&) {},
            [&](const ZetaPower& z) {
                out += " exp(" + num(-z.kappa / (g + 1)) + " (log log n)^{" + num(1 - z.rho) + "})";
            },
            [&](const ZetaLogLog& z) { out += " (log log n)^{" + num(-z.kappa / (g + 1)) + "}"; },
        }, lm->zeta);
        return out;
    }
    return "n ell_n^{-1/(gamma+1)}";
}

} // namespace

const char* to_string(Regime r) {
    switch (r) {
    case Regime::Subcritical: return "Subcritical";
    case Regime::CriticalUnboundedV: return "CriticalUnboundedV";
    case Regime::CriticalBoundedV: return "CriticalBoundedV";
    case Regime::Supercritical: return "Supercritical";
    }
    return "?";
}
const char* to_string(VBounded v) {
    switch (v) {
    case VBounded::True: return "True";
    case VBounded::False: return "False";
    case VBounded::HeuristicTrue: return "HeuristicTrue";
    case VBounded::HeuristicFalse: return "HeuristicFalse";
    }
    return "?";
}
const char* to_string(ScaleKind s) {
    switch (s) {
    case ScaleKind::SqrtN: return "sqrt(n)";
    case ScaleKind::Sigma: return "sigma_n";
    case ScaleKind::InvAMu: return "1/(a_n mu_n)";
    }
    return "?";
}
const char* to_string(LimitKind l) {
    switch (l) {
    case LimitKind::GaussianProcess: return "GaussianProcess";
    case LimitKind::GaussianSqrtLine: return "GaussianSqrtLine";
    case LimitKind::RandomSqrtLine: return "RandomSqrtLine";
    case LimitKind::RandomPowerLine: return "RandomPowerLine";
    }
    return "?";
}
const char* to_string(EtaBranch b) {
    switch (b) {
    case EtaBranch::Forward: return "forward";
    case EtaBranch::Tail: return "tail";
    case EtaBranch::None: return "none";
    }
    return "?";
}

SequenceTable build_sequences(const MemorySpec& spec, double p, std::uint64_t n_max,
                              const BuildOptions& opts) {
    check_p(p);
    require(n_max >= 1, ErrorKind::InvalidSpec, "n_max must be >= 1");
    if (auto len = spec.max_index())
        require(n_max <= *len, ErrorKind::OutOfRange, "n_max exceeds custom table length");

    SequenceTable t;
    t.p = p;
    t.gamma = spec.gamma();
    t.n_max = n_max;
    t.mu.resize(n_max);
    t.nu.resize(n_max);
    t.log_a.resize(n_max);
    t.v_sq.resize(n_max);
    t.sigma_sq.resize(n_max);

    MemorySequence gen(spec);
    double nu = 0.0, log_a = 0.0;
    double m = 0.0, s = 0.0; // v^2 = s * exp(m)
    for (std::uint64_t i = 0; i < n_max; ++i) {
        double mu = gen.next();
        if (i > 0) log_a -= std::log1p(p * mu / nu);
        nu += mu;
        require(std::isfinite(nu), ErrorKind::ResourceLimit,
                "nu_n overflows double range at n=" + std::to_string(i + 1));
        double lt = 2.0 * (log_a + std::log(mu));
        if (i == 0) {
            m = lt;
            s = 1.0;
        } else if (lt - m > kRescaleGap) {
            s = s * std::exp(m - lt) + 1.0;
            m = lt;
        } else {
            s += std::exp(lt - m);
        }
        double v = s * std::exp(m);
        require(std::isfinite(v), ErrorKind::ResourceLimit,
                "v_n^2 overflows double range at n=" + std::to_string(i + 1));
        t.mu[i] = mu;
        t.nu[i] = nu;
        t.log_a[i] = log_a;
        t.v_sq[i] = v;
        t.sigma_sq[i] = s * std::exp(m - lt);
    }

    if (!opts.with_eta) return t;

    const double g = spec.gamma();
    const bool forward = p * (g + 1.0) - g >= -1e-12;
    t.eta.resize(n_max);
    if (forward) {
        t.eta_branch = EtaBranch::Forward;
        double e = 0.0;
        for (std::uint64_t i = 0; i < n_max; ++i) {
            t.eta[i] = e;
            e += std::exp(-t.log_a[i] - std::log(t.nu[i]));
        }
        return t;
    }

    t.eta_branch = EtaBranch::Tail;
    std::uint64_t horizon = n_max;
    if (!spec.max_index()) {
        std::uint64_t f = std::max<std::uint64_t>(opts.tail_horizon_factor, 1);
        horizon = n_max > std::numeric_limits<std::uint64_t>::max() / f ? n_max : n_max * f;
    }
    double tail = 0.0;
    double last_term = std::exp(-t.log_a[n_max - 1] - std::log(t.nu[n_max - 1]));
    for (std::uint64_t n = n_max + 1; n <= horizon; ++n) {
        double mu = gen.next();
        log_a -= std::log1p(p * mu / nu);
        nu += mu;
        last_term = std::exp(-log_a - std::log(nu));
        tail += last_term;
    }
    // 1/(a_l nu_l) varies regularly with index -r, r = (1-p)(gamma+1) > 1 here
    double r = (1.0 - p) * (g + 1.0);
    t.tail_horizon = horizon;
    t.tail_bound = r > 1.0 ? static_cast<double>(horizon) * last_term / (r - 1.0)
                           : std::numeric_limits<double>::infinity();
    double acc = tail + t.tail_bound;
    for (std::uint64_t i = n_max; i-- > 0;) {
        acc += std::exp(-t.log_a[i] - std::log(t.nu[i]));
        t.eta[i] = acc;
    }
    return t;
}

std::vector<double> generalized_log_a(const std::vector<double>& mu, const std::vector<double>& nu,
                                      double x) {
    require(mu.size() == nu.size(), ErrorKind::InvalidSpec, "mu/nu length mismatch");
    std::vector<double> out(mu.size());
    double la = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (i > 0) la -= std::log1p(x * mu[i] / nu[i - 1]);
        out[i] = la;
    }
    return out;
}

void SequenceTable::write_csv(std::ostream& os) const {
    os << "n,mu,nu,log_a,v_sq,sigma_sq,eta\n";
    for (std::uint64_t i = 0; i < n_max; ++i) {
        os << (i + 1) << ',' << format_double(mu[i]) << ',' << format_double(nu[i]) << ','
           << format_double(log_a[i]) << ',' << format_double(v_sq[i]) << ','
           << format_double(sigma_sq[i]) << ','
           << (eta.empty() ? std::string("nan") : format_double(eta[i])) << '\n';
    }
}

std::optional<CriticalDescriptor> critical_descriptor(const MemorySpec& spec) {
    const double g = spec.gamma();
    auto bounded = analytic_v_bounded(spec);
    if (!bounded || *bounded) return std::nullopt;
    return std::visit(overloaded{
        [](const PowerLaw&) -> std::optional<CriticalDescriptor> {
            return CriticalDescriptor{"n log n", 1.0, ord_nlogn, 0.0};
        },
        [](const ContinuedProduct&) -> std::optional<CriticalDescriptor> {
            return CriticalDescriptor{"n log n", 1.0, ord_nlogn, 0.0};
        },
        [g](const SlowGrowth& sg) -> std::optional<CriticalDescriptor> {
            double a = std::get<PowerLogGap>(sg.delta).alpha;
            return CriticalDescriptor{"n (log n)^{" + num(a) + "}", (g + 1) / (1 - a), ord_nlogpow, a};
        },
        [](const CustomTable&) -> std::optional<CriticalDescriptor> { return std::nullopt; },
        [g](const LogModulated& lm) -> std::optional<CriticalDescriptor> {
            double s = lm.alpha + g + 1.0;
            if (s > kCriticalTol) return CriticalDescriptor{"n log n", (g + 1) / s, ord_nlogn, 0.0};
            return std::visit(overloaded{
                [](const ZetaZero&) -> std::optional<CriticalDescriptor> {
                    return CriticalDescriptor{"n log n log log n", 1.0, ord_nlogn_ll, 0.0};
                },
                [g](const ZetaPower& z) -> std::optional<CriticalDescriptor> {
                    return CriticalDescriptor{"n log n (log log n)^{" + num(z.rho) + "}",
                                              (g + 1) / (z.kappa * (1 - z.rho)), ord_nlogn_llpow, z.rho};
                },
                [g](const ZetaLogLog& z) -> std::optional<CriticalDescriptor> {
                    double k = z.kappa + g + 1.0;
                    if (std::abs(k) <= kCriticalTol)
                        return CriticalDescriptor{"n log n log log n log log log n", 1.0, ord_nlogn_ll_lll, 0.0};
                    return CriticalDescriptor{"n log n log log n", (g + 1) / k, ord_nlogn_ll, 0.0};
                },
            }, lm.zeta);
        },
    }, spec.family());
}

nlohmann::json RegimeReport::to_json() const {
    nlohmann::json j;
    j["p"] = p;
    j["gamma"] = gamma;
    j["p_c"] = p_c;
    j["p_hat"] = p_hat;
    j["regime"] = to_string(regime);
    j["v_bounded"] = to_string(v_bounded);
    j["scale_kind"] = to_string(scale_kind);
    j["predicted_scale"] = predicted_scale;
    j["scale_constant"] = scale_constant ? nlohmann::json(*scale_constant) : nlohmann::json(nullptr);
    j["limit_kind"] = to_string(limit_kind);
    j["covered"] = covered;
    j["notes"] = notes;
    return j;
}

RegimeReport classify_regime(const MemorySpec& spec, double p) {
    check_p(p);
    RegimeReport r;
    const double g = spec.gamma();
    r.p = p;
    r.gamma = g;
    r.p_c = critical_p(g);
    r.p_hat = hat_p(g);
    r.covered = g > -0.5;

    if (near(p, r.p_c)) {
        auto analytic = analytic_v_bounded(spec);
        r.v_bounded = analytic ? (*analytic ? VBounded::True : VBounded::False)
                               : heuristic_v_bounded(spec, p, r.notes);
        if (is_bounded(r.v_bounded)) {
            r.regime = Regime::CriticalBoundedV;
            r.scale_kind = ScaleKind::InvAMu;
            r.limit_kind = LimitKind::RandomSqrtLine;
            r.predicted_scale = "1/(a_n mu_n) ~ sqrt(C " + bounded_asymptotic(spec) + ")";
        } else {
            r.regime = Regime::CriticalUnboundedV;
            r.scale_kind = ScaleKind::Sigma;
            r.limit_kind = LimitKind::GaussianSqrtLine;
            if (auto d = critical_descriptor(spec)) {
                r.predicted_scale = d->text;
                r.scale_constant = d->constant;
            } else {
                r.predicted_scale = "numeric";
            }
        }
    } else if (p < r.p_c) {
        r.regime = Regime::Subcritical;
        r.v_bounded = VBounded::False;
        r.scale_kind = ScaleKind::SqrtN;
        r.limit_kind = LimitKind::GaussianProcess;
        r.predicted_scale = "n";
        if (r.covered) r.scale_constant = subcritical_limit_variance(p, g);
        if (near(p, r.p_hat)) r.notes.push_back("p at p_hat: logarithmic covariance branch");
    } else {
        r.regime = Regime::Supercritical;
        r.v_bounded = VBounded::True;
        r.scale_kind = ScaleKind::InvAMu;
        r.limit_kind = LimitKind::RandomPowerLine;
        r.predicted_scale = "1/(a_n mu_n) ~ n^{" + num(p * (g + 1) - g) + "} x slowly varying";
    }
    if (!r.covered) r.notes.push_back("gamma <= -1/2: Gaussian-limit predictions not covered by theory");
    return r;
}

double subcritical_limit_variance(double p, double gamma) {
    require(gamma > -0.5, ErrorKind::InvalidSpec, "limit variance needs gamma > -1/2");
    require(p >= 0.0 && p < critical_p(gamma) - kCriticalTol, ErrorKind::WrongRegime,
            "limit variance needs p < p_c");
    if (std::abs(p - hat_p(gamma)) < 1e-12) return 2 * gamma * gamma + 2 * gamma + 1;
    return (2 * gamma + 1 - p) / ((1 - p) * (2 * (1 - p) * (gamma + 1) - 1));
}

double covariance_kernel(double s, double t, double p, double gamma) {
    require(s >= 0.0 && t >= 0.0, ErrorKind::InvalidSpec, "kernel times must be nonnegative");
    if (s > t) std::swap(s, t);
    require(gamma > -0.5, ErrorKind::InvalidSpec, "kernel needs gamma > -1/2");
    require(p >= 0.0 && p < critical_p(gamma) - kCriticalTol, ErrorKind::WrongRegime,
            "kernel needs p < p_c");
    if (s == 0.0) return 0.0;
    const double g = gamma;
    if (std::abs(p - hat_p(g)) < 1e-12)
        return s * (g * g + (g + 1) * (g + 1) - g * (g + 1) * std::log(s / t));
    double d = g - p * (g + 1);
    double c = p * ((2 - p) * (g + 1) - 1) / (2 * (1 - p) * (g + 1) - 1);
    return s / ((1 - p) * d) * (g - c * std::pow(s / t, d));
}

nlohmann::json CriticalScale::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["bounded"] = bounded;
    j["numeric_sq"] = numeric_sq;
    j["descriptor"] = descriptor;
    j["constant"] = constant ? nlohmann::json(*constant) : nlohmann::json(nullptr);
    j["closed_form_sq"] = closed_form_sq ? nlohmann::json(*closed_form_sq) : nlohmann::json(nullptr);
    j["c_mu"] = c_mu ? nlohmann::json(*c_mu) : nlohmann::json(nullptr);
    return j;
}

CriticalScale critical_scale(const MemorySpec& spec, const SequenceTable& table, std::uint64_t n) {
    const double g = spec.gamma();
    require(near(table.p, critical_p(g)), ErrorKind::WrongRegime, "critical_scale needs p = p_c");
    require(n >= 1 && n <= table.n_max, ErrorKind::OutOfRange, "n outside the sequence table");
    CriticalScale cs;
    cs.n = n;
    auto analytic = analytic_v_bounded(spec);
    if (analytic) {
        cs.bounded = *analytic;
    } else {
        std::vector<std::string> notes;
        cs.bounded = is_bounded(heuristic_v_bounded(spec, table.p, notes));
    }
    double lamu = table.log_amu_at(n);
    double dn = static_cast<double>(n);
    cs.c_mu = dn * std::exp(2 * lamu - spec.log_ell(n) / (g + 1));
    if (cs.bounded) {
        cs.numeric_sq = std::exp(-2 * lamu);
        cs.descriptor = "1/(a_n mu_n)^2 ~ C " + bounded_asymptotic(spec);
        return cs;
    }
    cs.numeric_sq = table.sigma_sq_at(n);
    if (auto d = critical_descriptor(spec)) {
        cs.descriptor = d->text;
        cs.constant = d->constant;
        cs.closed_form_sq = d->constant * d->order(dn, d->param);
    } else {
        cs.descriptor = "numeric";
    }
    return cs;
}

CriticalScale critical_scale(const MemorySpec& spec, std::uint64_t n) {
    BuildOptions o;
    o.with_eta = false;
    return critical_scale(spec, build_sequences(spec, critical_p(spec.gamma()), n, o), n);
}

std::uint64_t snapped_floor(double x) {
    require(std::isfinite(x) && x >= 0.0 && x < 1.8e19, ErrorKind::OutOfRange,
            "time index outside the 64-bit range");
    double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::uint64_t>(r);
    return static_cast<std::uint64_t>(std::floor(x));
}

std::string timescale_example(const MemorySpec& spec) {
    const double g = spec.gamma();
    if (std::holds_alternative<SlowGrowth>(spec.family())) return "lighter-than-nlogn";
    if (std::holds_alternative<PowerLaw>(spec.family())) return "nlogn";
    if (auto lm = std::get_if<LogModulated>(&spec.family())) {
        double s = lm->alpha + g + 1.0;
        if (s > kCriticalTol) return "nlogn";
        if (s < -kCriticalTol) return "";
        return std::visit(overloaded{
            [](const ZetaZero&) { return std::string("zeta-zero"); },
            [](const ZetaPower& z) { return z.kappa > 0 ? std::string("zeta-power-zero") : std::string(); },
            [g](const ZetaLogLog& z) {
                double k = z.kappa + g + 1.0;
                if (std::abs(k) <= kCriticalTol) return std::string("logloglog-zero");
                return k > 0 ? std::string("loglog-zero") : std::string();
            },
        }, lm->zeta);
    }
    return "";
}

Timescale exploratory_timescale(const MemorySpec& spec, TimescaleMode mode, double t, std::uint64_t n) {
    require(t > 0.0 && std::isfinite(t), ErrorKind::InvalidSpec, "time t must be positive");
    require(n >= 16, ErrorKind::InvalidSpec, "n must be >= 16 for iterated logarithms");
    std::string ex = timescale_example(spec);
    require(!ex.empty(), ErrorKind::Unsupported,
            "no exploratory time scale for " + spec.describe());
    const double g = spec.gamma();
    const double dn = static_cast<double>(n);
    const double L = std::log(dn), LL = std::log(L), LLL = std::log(LL);

    Timescale ts;
    ts.example = ex;
    ts.mode = mode;
    ts.t = t;
    ts.n = n;

    auto expo = [&](double space) {
        double nt = std::pow(dn, t);
        ts.index = snapped_floor(nt);
        ts.scale = std::sqrt(nt * space);
    };

    if (mode == TimescaleMode::Exponential) {
        if (ex == "zeta-zero") expo(L * LL);
        else if (ex == "zeta-power-zero") expo(L * std::pow(LL, std::get<ZetaPower>(std::get<LogModulated>(spec.family()).zeta).rho));
        else if (ex == "loglog-zero") expo(L * LL);
        else if (ex == "logloglog-zero") expo(L * LL * LLL);
        else if (ex == "lighter-than-nlogn") {
            ts.index = snapped_floor(std::pow(dn, t));
            ts.scale = std::numeric_limits<double>::quiet_NaN();
            ts.has_limit = false;
            ts.prediction = "no nondegenerate limit under the exponential time scale";
            return ts;
        } else { // nlogn
            double alpha = 0.0;
            if (auto lm = std::get_if<LogModulated>(&spec.family())) alpha = lm->alpha;
            expo(std::pow(t, -alpha / (g + 1)) * L);
            ts.clock = (alpha + g + 1) / (g + 1);
            ts.prediction = "(2g+1) sqrt((g+1)/(a+g+1)) B(t^{" + num(ts.clock) + "})";
            return ts;
        }
        ts.degenerate_limit = true;
        ts.prediction = "(2g+1) sqrt(t) Z: correlation -> 1";
        return ts;
    }

    ts.clock = 1.0;
    ts.prediction = "(2g+1) c B(t)";
    if (ex == "zeta-zero") {
        double e = std::exp(std::pow(L, t));
        ts.index = snapped_floor(e);
        ts.scale = std::sqrt(e * std::pow(L, t) * LL);
    } else if (ex == "zeta-power-zero") {
        const auto& z = std::get<ZetaPower>(std::get<LogModulated>(spec.family()).zeta);
        double inner = (g + 1) / z.kappa * std::log(t) + std::pow(LL, 1 - z.rho);
        require(inner > 0, ErrorKind::OutOfRange, "time t too small for this n");
        double tau = snapped_floor(std::exp(std::exp(std::pow(inner, 1 / (1 - z.rho)))));
        ts.index = static_cast<std::uint64_t>(tau);
        ts.scale = std::sqrt(tau * std::log(tau) * std::pow(LL, z.rho) / t);
    } else if (ex == "loglog-zero") {
        const auto& z = std::get<ZetaLogLog>(std::get<LogModulated>(spec.family()).zeta);
        double k = z.kappa + g + 1;
        double tau = snapped_floor(std::exp(std::exp(std::pow(t, (g + 1) / k) * LL)));
        ts.index = static_cast<std::uint64_t>(tau);
        ts.scale = std::sqrt(std::pow(t, -z.kappa / k) * tau * std::log(tau) * LL);
    } else if (ex == "logloglog-zero") {
        double tau = snapped_floor(std::exp(std::exp(std::pow(LL, t))));
        ts.index = static_cast<std::uint64_t>(tau);
        ts.scale = std::sqrt(tau * std::log(tau) * std::exp(t * LLL) * LLL);
    } else if (ex == "lighter-than-nlogn") {
        double a = std::get<PowerLogGap>(std::get<SlowGrowth>(spec.family()).delta).alpha;
        double inner = (g + 1) * std::log(t) + std::pow(L, 1 - a);
        require(inner > 0, ErrorKind::OutOfRange, "time t too small for this n");
        double tau = snapped_floor(std::exp(std::pow(inner, 1 / (1 - a))));
        ts.index = static_cast<std::uint64_t>(tau);
        ts.scale = std::sqrt(tau * std::pow(L, a) / t);
    } else { // nlogn
        double alpha = 0.0;
        if (auto lm = std::get_if<LogModulated>(&spec.family())) alpha = lm->alpha;
        double s = alpha + g + 1;
        double tau = snapped_floor(std::exp(std::pow(t, (g + 1) / s) * L));
        ts.index = static_cast<std::uint64_t>(tau);
        ts.scale = std::sqrt(std::pow(t, -alpha / s) * tau * L);
    }
    return ts;
}

double predicted_correlation(const Timescale& ts, double s, double t) {
    if (!ts.has_limit) return std::numeric_limits<double>::quiet_NaN();
    if (ts.degenerate_limit) return 1.0;
    double lo = std::min(s, t), hi = std::max(s, t);
    return std::pow(lo / hi, ts.clock / 2.0);
}

} // namespace rvwalk
