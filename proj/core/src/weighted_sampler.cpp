#include "rvwalk/weighted_sampler.hpp"
#include "rvwalk/error.hpp"

#include <cmath>

namespace rvwalk {

DynamicWeightedIndex::DynamicWeightedIndex(std::uint64_t capacity) : capacity_(capacity) {
    require(capacity >= 1, ErrorKind::InvalidSpec, "sampler capacity must be >= 1");
    tree_.assign(capacity + 1, 0.0);
}

std::uint64_t DynamicWeightedIndex::push(double w) {
    require(std::isfinite(w) && w > 0.0, ErrorKind::InvalidSpec, "sampler weight must be positive");
    require(count_ < capacity_, ErrorKind::ResourceLimit, "sampler capacity exceeded");
    std::uint64_t i = ++count_;
    // node i covers (i - lowbit(i), i]; its children are i-1, i-2, i-4, ...
    double s = w;
    std::uint64_t low = i & (~i + 1);
    for (std::uint64_t k = 1; k < low; k <<= 1) s += tree_[i - k];
    tree_[i] = s;
    total_ += w;
    while ((top_bit_ << 1) != 0 && (top_bit_ << 1) <= count_) top_bit_ <<= 1;
    if (top_bit_ == 0) top_bit_ = 1;
    return count_;
}

void DynamicWeightedIndex::clear() noexcept {
    count_ = 0;
    top_bit_ = 0;
    total_ = 0.0;
}

double DynamicWeightedIndex::prefix(std::uint64_t k) const {
    require(k <= count_, ErrorKind::OutOfRange, "prefix index beyond count");
    double s = 0.0;
    for (; k > 0; k &= k - 1) s += tree_[k];
    return s;
}

std::uint64_t DynamicWeightedIndex::sample(double u) const {
    require(count_ >= 1, ErrorKind::OutOfRange, "sampling from an empty index");
    double target = u * total_;
    std::uint64_t pos = 0;
    for (std::uint64_t step = top_bit_; step > 0; step >>= 1) {
        std::uint64_t nxt = pos + step;
        if (nxt <= count_ && tree_[nxt] <= target) {
            pos = nxt;
            target -= tree_[nxt];
        }
    }
    return pos + 1 > count_ ? count_ : pos + 1;
}

} // namespace rvwalk
