#pragma once

#include <cstdint>
#include <vector>

namespace rvwalk {

// Append-only Fenwick tree over positive weights. sample(u) inverts the
// cumulative weights, resolving boundary ties to the right.
class DynamicWeightedIndex {
public:
    explicit DynamicWeightedIndex(std::uint64_t capacity);

    std::uint64_t push(double w);
    void clear() noexcept;
    std::uint64_t sample(double u) const;

    // sum of w_1..w_k
    double prefix(std::uint64_t k) const;
    double total() const noexcept { return total_; }
    std::uint64_t count() const noexcept { return count_; }
    std::uint64_t capacity() const noexcept { return capacity_; }

    std::size_t bytes() const noexcept { return tree_.capacity() * sizeof(double); }

private:
    std::vector<double> tree_; // 1-based
    std::uint64_t capacity_;
    std::uint64_t count_ = 0;
    std::uint64_t top_bit_ = 0;
    double total_ = 0.0;
};

// Equal-weight special case: floor(u * count) + 1.
inline std::uint64_t sample_uniform_index(double u, std::uint64_t count) noexcept {
    auto k = static_cast<std::uint64_t>(u * static_cast<double>(count)) + 1;
    return k > count ? count : k;
}

} // namespace rvwalk
