#include "rvwalk/moment_oracle.hpp"
#include "rvwalk/csv.hpp"
#include "rvwalk/error.hpp"

#include <cmath>
#include <map>
#include <string>

namespace rvwalk {

MomentTable second_moments(const SequenceTable& seq, double innovation_variance) {
    require(std::isfinite(innovation_variance) && innovation_variance > 0, ErrorKind::InvalidSpec,
            "innovation variance must be positive");
    const std::uint64_t N = seq.n_max;
    const double p = seq.p, s2 = innovation_variance;
    MomentTable mt;
    mt.p = p;
    mt.gamma = seq.gamma;
    mt.n_max = N;
    mt.innovation_variance = s2;
    mt.E_S_sq.resize(N);
    mt.E_SY.resize(N);
    mt.E_Y_sq.resize(N);
    mt.E_M_sq.resize(N);

    double ES2 = s2, ESY = seq.mu[0] * s2, EY2 = seq.mu[0] * seq.mu[0] * s2;
    mt.E_S_sq[0] = ES2;
    mt.E_SY[0] = ESY;
    mt.E_Y_sq[0] = EY2;
    mt.E_M_sq[0] = seq.v_sq[0] * s2;
    double corr = 0.0; // p^2 sum_{k<n} (a_{k+1} mu_{k+1} / (a_k nu_k))^2 E M_k^2
    for (std::uint64_t i = 1; i < N; ++i) {
        const double mu = seq.mu[i], nu = seq.nu[i - 1];
        const double r = p / nu;
        const double ES2n = ES2 + 2.0 * r * ESY + s2;
        const double ESYn = (1.0 + r * mu) * ESY + r * EY2 + mu * s2;
        const double EY2n = (1.0 + 2.0 * r * mu) * EY2 + mu * mu * s2;
        const double ratio = std::exp(seq.log_a[i] - seq.log_a[i - 1]) * mu / nu;
        corr += p * p * ratio * ratio * mt.E_M_sq[i - 1];
        ES2 = ES2n;
        ESY = ESYn;
        EY2 = EY2n;
        mt.E_S_sq[i] = ES2;
        mt.E_SY[i] = ESY;
        mt.E_Y_sq[i] = EY2;
        mt.E_M_sq[i] = seq.v_sq[i] * s2 - corr;
    }
    return mt;
}

MomentTable second_moments(const MemorySpec& spec, double p, std::uint64_t n_max,
                           double innovation_variance) {
    BuildOptions o;
    o.with_eta = false;
    return second_moments(build_sequences(spec, p, n_max, o), innovation_variance);
}

MomentTable rademacher_fourth_moments(const SequenceTable& seq) {
    MomentTable mt = second_moments(seq, 1.0);
    const std::uint64_t N = seq.n_max;
    const double p = seq.p;
    mt.fourth = true;
    mt.E_Y_4.resize(N);
    mt.b_n.resize(N);
    mt.kurtosis_M.resize(N);

    // extended precision: E Y_n^4 grows like (n mu_n)^4 and double ulps reach 1e-10 early
    using R = long double;
    const R m1 = seq.mu[0];
    R EY4 = m1 * m1 * m1 * m1;
    R b = 2 * EY4;
    R A = m1 * m1; // E Y_n^2, recomputed here at the same precision
    mt.E_Y_4[0] = static_cast<double>(EY4);
    mt.b_n[0] = static_cast<double>(b);
    mt.kurtosis_M[0] = 1.0;
    for (std::uint64_t i = 1; i < N; ++i) {
        const R mu = seq.mu[i], mu2 = mu * mu;
        const R r = static_cast<R>(p) * mu / static_cast<R>(seq.nu[i - 1]);
        EY4 = (1 + 4 * r) * EY4 + 6 * mu2 * (1 + 2 * r / 3) * A + mu2 * mu2;
        b = (1 + 4 * r) * b + 12 * r * r * A * A + 8 * r * mu2 * A + 2 * mu2 * mu2;
        A = (1 + 2 * r) * A + mu2;
        mt.E_Y_4[i] = static_cast<double>(EY4);
        mt.b_n[i] = static_cast<double>(b);
        mt.kurtosis_M[i] = static_cast<double>(EY4 / (A * A)); // a_n^4 cancels
    }
    mt.log_a_p = seq.log_a;
    mt.log_a_2p = generalized_log_a(seq.mu, seq.nu, 2 * p);
    mt.log_a_3p = generalized_log_a(seq.mu, seq.nu, 3 * p);
    mt.log_a_4p = generalized_log_a(seq.mu, seq.nu, 4 * p);
    return mt;
}

MomentTable rademacher_fourth_moments(const MemorySpec& spec, double p, std::uint64_t n_max) {
    BuildOptions o;
    o.with_eta = false;
    return rademacher_fourth_moments(build_sequences(spec, p, n_max, o));
}

std::vector<double> closed_form_E_S_sq(const SequenceTable& seq, const MomentTable& mt) {
    const std::uint64_t N = seq.n_max;
    const double p = seq.p;
    std::vector<double> out(N);
    double A = 0.0;   // sum_{j<=k} a_j mu_j
    double B = 0.0;   // sum_{j<k} a_{j+1} E M_j^2 / (a_j^2 nu_j)
    double S = 0.0;   // sum_{k<n} E(S_k Y_k)/nu_k
    for (std::uint64_t k = 1; k <= N; ++k) {
        out[k - 1] = static_cast<double>(k) * mt.innovation_variance + 2.0 * p * S;
        const double ak = seq.a_at(k);
        A += ak * seq.mu_at(k) * mt.innovation_variance;
        const double esy = (A + p * B) / ak;
        S += esy / seq.nu_at(k);
        if (k < N) B += seq.a_at(k + 1) * mt.E_M_sq_at(k) / (ak * ak * seq.nu_at(k));
    }
    return out;
}

std::vector<double> solved_a4p_b(const SequenceTable& seq, const MomentTable& mt) {
    require(mt.fourth, ErrorKind::Unsupported, "needs the fourth-moment columns");
    const std::uint64_t N = seq.n_max;
    const double p = seq.p;
    std::vector<double> out(N);
    double s12 = 0.0, s8 = 0.0, s2 = 0.0;
    for (std::uint64_t k = 1; k <= N; ++k) {
        const double a4 = std::exp(mt.log_a_4p[k - 1]);
        const double mu = seq.mu_at(k), mu2 = mu * mu;
        s2 += a4 * mu2 * mu2;
        if (k >= 2) {
            const double nu = seq.nu_at(k - 1);
            const double A = mt.E_Y_sq[k - 2];
            s12 += a4 * mu2 / (nu * nu) * A * A;
            s8 += a4 * mu2 * mu / nu * A;
        }
        out[k - 1] = 12.0 * p * p * s12 + 8.0 * p * s8 + 2.0 * s2;
    }
    return out;
}

void MomentTable::write_csv(std::ostream& os) const {
    os << "n,E_S_sq,E_M_sq,E_SY";
    if (fourth) os << ",E_Y_sq,E_Y_4,b_n,kurtosis_M";
    os << '\n';
    for (std::uint64_t i = 0; i < n_max; ++i) {
        os << (i + 1) << ',' << format_double(E_S_sq[i]) << ',' << format_double(E_M_sq[i]) << ','
           << format_double(E_SY[i]);
        if (fourth)
            os << ',' << format_double(E_Y_sq[i]) << ',' << format_double(E_Y_4[i]) << ','
               << format_double(b_n[i]) << ',' << format_double(kurtosis_M[i]);
        os << '\n';
    }
}

double FiniteLaw::mean() const {
    double m = 0;
    for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * probs[i];
    return m;
}

double FiniteLaw::variance() const {
    double m = mean(), v = 0;
    for (std::size_t i = 0; i < values.size(); ++i) v += (values[i] - m) * (values[i] - m) * probs[i];
    return v;
}

ExactMoments enumerate_exact(const MemorySpec& spec, double p, std::uint64_t n, const FiniteLaw& law,
                             std::uint64_t node_cap) {
    require(p >= 0.0 && p <= 1.0, ErrorKind::InvalidSpec, "p must lie in [0,1]");
    require(n >= 1, ErrorKind::InvalidSpec, "n must be >= 1");
    require(!law.values.empty() && law.values.size() == law.probs.size(), ErrorKind::InvalidSpec,
            "finite law needs matching values and probabilities");
    require(law.values.size() < 256, ErrorKind::InvalidSpec, "finite law support too large");
    double tot = 0;
    for (double q : law.probs) {
        require(q >= 0.0, ErrorKind::InvalidSpec, "negative probability");
        tot += q;
    }
    require(std::abs(tot - 1.0) < 1e-12, ErrorKind::InvalidSpec, "probabilities must sum to 1");

    const std::size_t K = law.values.size();
    std::vector<double> mu(n), nu(n), log_a(n);
    MemorySequence gen(spec);
    double acc = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        mu[i] = gen.next();
        log_a[i] = i == 0 ? 0.0 : log_a[i - 1] - std::log1p(p * mu[i] / acc);
        acc += mu[i];
        nu[i] = acc;
    }

    using Path = std::string; // one byte per step, indexing law.values
    std::map<Path, long double> level;
    for (std::size_t v = 0; v < K; ++v)
        if (law.probs[v] > 0) level[Path(1, static_cast<char>(v))] += law.probs[v];

    ExactMoments ex;
    ex.n = n;
    ex.expansions = K;
    auto record = [&](std::uint64_t m) {
        long double es = 0, es2 = 0, ey2 = 0, esy = 0, ey4 = 0;
        std::vector<double> marg(K, 0.0);
        for (const auto& [path, prob] : level) {
            long double s = 0, y = 0;
            for (std::uint64_t k = 0; k < m; ++k) {
                long double x = law.values[static_cast<unsigned char>(path[k])];
                s += x;
                y += x * mu[k];
            }
            marg[static_cast<unsigned char>(path[m - 1])] += static_cast<double>(prob);
            es += prob * s;
            es2 += prob * s * s;
            ey2 += prob * y * y;
            esy += prob * s * y;
            ey4 += prob * y * y * y * y;
        }
        const double a = std::exp(log_a[m - 1]);
        ex.E_S.push_back(static_cast<double>(es));
        ex.E_S_sq.push_back(static_cast<double>(es2));
        ex.E_Y_sq.push_back(static_cast<double>(ey2));
        ex.E_SY.push_back(static_cast<double>(esy));
        ex.E_Y_4.push_back(static_cast<double>(ey4));
        ex.E_M_sq.push_back(static_cast<double>(a * a * ey2));
        ex.E_M_4.push_back(static_cast<double>(a * a * a * a * ey4));
        ex.marginal.push_back(std::move(marg));
    };
    record(1);

    for (std::uint64_t m = 1; m < n; ++m) {
        std::map<Path, long double> next;
        for (const auto& [path, prob] : level) {
            Path child = path;
            child.push_back(0);
            // alpha = 0: fresh innovation
            for (std::size_t v = 0; v < K; ++v) {
                ++ex.expansions;
                long double q = prob * (1.0L - p) * law.probs[v];
                if (q == 0.0) continue;
                child.back() = static_cast<char>(v);
                next[child] += q;
            }
            // alpha = 1: repeat step beta, P(beta = k) = mu_k / nu_m
            for (std::uint64_t k = 0; k < m; ++k) {
                ++ex.expansions;
                long double q = prob * p * static_cast<long double>(mu[k]) / nu[m - 1];
                if (q == 0.0) continue;
                child.back() = path[k];
                next[child] += q;
            }
            require(next.size() <= node_cap, ErrorKind::ResourceLimit,
                    "enumeration exceeds node cap " + std::to_string(node_cap));
        }
        level.swap(next);
        record(m + 1);
    }
    ex.nodes = level.size();
    return ex;
}

} // namespace rvwalk
