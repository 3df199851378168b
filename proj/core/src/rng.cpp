#include "rvwalk/rng.hpp"
#include "rvwalk/error.hpp"

#include <cmath>
#include <numbers>

namespace rvwalk {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::ResourceLimit: return "resource-limit";
    case ErrorKind::WrongRegime: return "wrong-regime";
    case ErrorKind::Unsupported: return "unsupported";
    }
    return "unknown";
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t replica) noexcept {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    std::uint64_t t = a ^ (replica * 0xd1b54a32d192ed03ULL);
    splitmix64(t);
    return splitmix64(t);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
}

} // namespace rvwalk
