#pragma once

#include <cstdint>
#include <random>

namespace rvwalk {

// Versioned identifier written into every manifest and report.
inline constexpr const char* kRngFamily = "mt19937_64/splitmix64-v1";

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// Independent stream seed for replica r under a master seed.
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t replica) noexcept;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // 53-bit uniform in [0,1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // one bit per call, 64 bits per engine draw
    int rademacher() {
        if (nbits_ == 0) {
            bits_ = eng_();
            nbits_ = 64;
        }
        int s = static_cast<int>(bits_ & 1u);
        bits_ >>= 1;
        --nbits_;
        return s ? 1 : -1;
    }

    double normal();

private:
    std::mt19937_64 eng_;
    std::uint64_t bits_ = 0;
    int nbits_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace rvwalk
