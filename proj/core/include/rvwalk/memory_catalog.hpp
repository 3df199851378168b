#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace rvwalk {

// Slowly varying correction applied on the log-log scale.
struct ZetaZero {
    bool operator==(const ZetaZero&) const = default;
};
struct ZetaPower {
    double kappa = 1.0;
    double rho = 0.5;
    bool operator==(const ZetaPower&) const = default;
};
struct ZetaLogLog {
    double kappa = 1.0;
    bool operator==(const ZetaLogLog&) const = default;
};
using ZetaSpec = std::variant<ZetaZero, ZetaPower, ZetaLogLog>;

struct PowerLogGap {
    double alpha = 0.5;
    bool operator==(const PowerLogGap&) const = default;
};
using DeltaSpec = std::variant<PowerLogGap>;

struct PowerLaw {
    bool operator==(const PowerLaw&) const = default;
};
struct ContinuedProduct {
    bool operator==(const ContinuedProduct&) const = default;
};
struct LogModulated {
    double alpha = 0.0;
    ZetaSpec zeta = ZetaZero{};
    bool operator==(const LogModulated&) const = default;
};
struct SlowGrowth {
    DeltaSpec delta = PowerLogGap{};
    bool operator==(const SlowGrowth&) const = default;
};
struct CustomTable {
    std::vector<double> values;
    bool operator==(const CustomTable&) const = default;
};

using MemoryFamily = std::variant<PowerLaw, ContinuedProduct, LogModulated, SlowGrowth, CustomTable>;

class MemorySpec {
public:
    MemorySpec(MemoryFamily family, double gamma);

    static MemorySpec power_law(double gamma) { return {PowerLaw{}, gamma}; }
    static MemorySpec continued_product(double gamma) { return {ContinuedProduct{}, gamma}; }
    static MemorySpec log_modulated(double gamma, double alpha, ZetaSpec zeta = ZetaZero{}) {
        return {LogModulated{alpha, zeta}, gamma};
    }
    static MemorySpec slow_growth(double gamma, double alpha) {
        return {SlowGrowth{PowerLogGap{alpha}}, gamma};
    }
    static MemorySpec table(std::vector<double> values, double declared_gamma) {
        return {CustomTable{std::move(values)}, declared_gamma};
    }

    double gamma() const noexcept { return gamma_; }
    const MemoryFamily& family() const noexcept { return family_; }

    double mu(std::uint64_t n) const;
    double log_mu(std::uint64_t n) const;

    // The slowly varying part mu_n / n^gamma.
    double log_ell(std::uint64_t n) const;

    // Largest valid index, set only for tables.
    std::optional<std::uint64_t> max_index() const;

    // mu identically equal to 1
    bool is_unit() const noexcept;

    std::string family_name() const;
    std::string describe() const;

    nlohmann::json to_json() const;
    static MemorySpec from_json(const nlohmann::json& j);

    bool operator==(const MemorySpec&) const = default;

private:
    MemoryFamily family_;
    double gamma_;
};

inline double mu(const MemorySpec& spec, std::uint64_t n) { return spec.mu(n); }
inline double rv_index(const MemorySpec& spec) noexcept { return spec.gamma(); }

// Streams mu_1, mu_2, ... . The continued product is generated by its own
// recursion so consecutive ratios are exact to rounding.
class MemorySequence {
public:
    explicit MemorySequence(const MemorySpec& spec);

    double next();
    std::uint64_t index() const noexcept { return n_; }

private:
    const MemorySpec* spec_;
    std::uint64_t n_ = 0;
    double last_ = 0.0;
    bool recursive_ = false;
    bool unit_ = false;
};

// Rough regular-variation index of a finite table: slope of log mu against
// log n over its upper half. Diagnostic only.
double estimate_index(const std::vector<double>& values);

} // namespace rvwalk
