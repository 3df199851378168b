#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "rvwalk/memory_catalog.hpp"
#include "rvwalk/scaling_engine.hpp"

namespace rvwalk {

struct MomentTable {
    double p = 0.0;
    double gamma = 0.0;
    std::uint64_t n_max = 0;
    double innovation_variance = 1.0;
    bool fourth = false;

    // index 0 holds n = 1
    std::vector<double> E_S_sq, E_M_sq, E_SY, E_Y_sq;
    // Rademacher only
    std::vector<double> E_Y_4, b_n, kurtosis_M;
    // log a_n(x) for x = p, 2p, 3p, 4p
    std::vector<double> log_a_p, log_a_2p, log_a_3p, log_a_4p;

    double E_S_sq_at(std::uint64_t n) const { return E_S_sq[n - 1]; }
    double E_M_sq_at(std::uint64_t n) const { return E_M_sq[n - 1]; }
    double kurtosis_at(std::uint64_t n) const { return kurtosis_M[n - 1]; }

    void write_csv(std::ostream& os) const;
};

// E S_n^2 and E(S_n Y_n) by their coupled recursion, E M_n^2 by the
// v_n^2-minus-correction recursion, E Y_n^2 by its own recursion.
MomentTable second_moments(const MemorySpec& spec, double p, std::uint64_t n_max,
                           double innovation_variance = 1.0);
MomentTable second_moments(const SequenceTable& seq, double innovation_variance = 1.0);

// Adds E Y_n^4, b_n = 3(E Y_n^2)^2 - E Y_n^4 (own recursion), kurtosis of M_n
// and the generalized products. Unit-variance two-point innovations only.
MomentTable rademacher_fourth_moments(const MemorySpec& spec, double p, std::uint64_t n_max);
MomentTable rademacher_fourth_moments(const SequenceTable& seq);

// E S_n^2 from the double-sum representation, n = 1..seq.n_max.
std::vector<double> closed_form_E_S_sq(const SequenceTable& seq, const MomentTable& mt);

// Solved form of a_n(4p) b_n as three positive sums.
std::vector<double> solved_a4p_b(const SequenceTable& seq, const MomentTable& mt);

struct FiniteLaw {
    std::vector<double> values;
    std::vector<double> probs;

    static FiniteLaw rademacher() { return {{-1.0, 1.0}, {0.5, 0.5}}; }
    double mean() const;
    double variance() const;
};

struct ExactMoments {
    std::uint64_t n = 0;
    std::uint64_t nodes = 0;       // distinct step sequences kept at the last level
    std::uint64_t expansions = 0;  // raw (xi, alpha, beta) branches visited
    // index 0 holds step 1
    std::vector<double> E_S, E_S_sq, E_Y_sq, E_M_sq, E_SY, E_Y_4, E_M_4;
    // P(X_m = values[v]) as marginal[m-1][v]
    std::vector<std::vector<double>> marginal;
};

// Enumerates every (xi, alpha, beta) outcome up to step n, merging branches
// that produce the same step sequence. Throws ResourceLimit above node_cap.
ExactMoments enumerate_exact(const MemorySpec& spec, double p, std::uint64_t n, const FiniteLaw& law,
                             std::uint64_t node_cap = 1u << 22);

} // namespace rvwalk
