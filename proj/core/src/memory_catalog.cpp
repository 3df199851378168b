#include "rvwalk/memory_catalog.hpp"
#include "rvwalk/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

namespace rvwalk {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

bool finite(double x) { return std::isfinite(x); }

void validate(const MemoryFamily& fam, double gamma) {
    require(finite(gamma) && gamma > -1.0, ErrorKind::InvalidSpec,
            "gamma must be finite and > -1");
    std::visit(overloaded{
        [](const PowerLaw&) {},
        [](const ContinuedProduct&) {},
        [](const LogModulated& lm) {
            require(finite(lm.alpha), ErrorKind::InvalidSpec, "alpha must be finite");
            std::visit(overloaded{
                [](const ZetaZero&) {},
                [](const ZetaPower& z) {
                    require(finite(z.kappa) && z.kappa != 0.0, ErrorKind::InvalidSpec,
                            "zeta power: kappa must be nonzero");
                    require(z.rho > 0.0 && z.rho < 1.0, ErrorKind::InvalidSpec,
                            "zeta power: rho must lie in (0,1)");
                },
                [](const ZetaLogLog& z) {
                    require(finite(z.kappa) && z.kappa != 0.0, ErrorKind::InvalidSpec,
                            "zeta loglog: kappa must be nonzero");
                },
            }, lm.zeta);
        },
        [](const SlowGrowth& sg) {
            const auto& d = std::get<PowerLogGap>(sg.delta);
            require(d.alpha > 0.0 && d.alpha < 1.0, ErrorKind::InvalidSpec,
                    "slow growth: alpha must lie in (0,1)");
        },
        [](const CustomTable& t) {
            require(!t.values.empty(), ErrorKind::InvalidSpec, "custom table is empty");
            for (double v : t.values)
                require(finite(v) && v > 0.0, ErrorKind::InvalidSpec,
                        "custom table entries must be positive and finite");
        },
    }, fam);
}

// log n clamped below at 1
double clamped_log(std::uint64_t n) {
    return std::max(std::log(static_cast<double>(n)), 1.0);
}

double zeta_integral(const ZetaSpec& z, double u) {
    return std::visit(overloaded{
        [](const ZetaZero&) { return 0.0; },
        [u](const ZetaPower& zp) { return zp.kappa * std::pow(u, 1.0 - zp.rho); },
        [u](const ZetaLogLog& zl) {
            return zl.kappa * (std::min(u, 1.0) + std::log(std::max(u, 1.0)));
        },
    }, z);
}

} // namespace

MemorySpec::MemorySpec(MemoryFamily family, double gamma)
    : family_(std::move(family)), gamma_(gamma) {
    validate(family_, gamma_);
}

double MemorySpec::log_ell(std::uint64_t n) const {
    require(n >= 1, ErrorKind::OutOfRange, "memory index must be >= 1");
    return std::visit(overloaded{
        [](const PowerLaw&) { return 0.0; },
        [&](const ContinuedProduct&) {
            if (gamma_ == 0.0) return 0.0;
            double lm = -std::log(boost::math::tgamma_delta_ratio(static_cast<double>(n), gamma_))
                        - std::lgamma(1.0 + gamma_);
            return lm - gamma_ * std::log(static_cast<double>(n));
        },
        [&](const LogModulated& lm) {
            double L = clamped_log(n);
            double u = std::log(L);
            return lm.alpha * u + zeta_integral(lm.zeta, u);
        },
        [&](const SlowGrowth& sg) {
            double a = std::get<PowerLogGap>(sg.delta).alpha;
            return std::pow(clamped_log(n), 1.0 - a);
        },
        [&](const CustomTable& t) {
            require(n <= t.values.size(), ErrorKind::OutOfRange,
                    "index " + std::to_string(n) + " beyond custom table length "
                        + std::to_string(t.values.size()));
            return std::log(t.values[n - 1]) - gamma_ * std::log(static_cast<double>(n));
        },
    }, family_);
}

double MemorySpec::log_mu(std::uint64_t n) const {
    require(n >= 1, ErrorKind::OutOfRange, "memory index must be >= 1");
    if (auto t = std::get_if<CustomTable>(&family_)) {
        require(n <= t->values.size(), ErrorKind::OutOfRange,
                "index " + std::to_string(n) + " beyond custom table length "
                    + std::to_string(t->values.size()));
        return std::log(t->values[n - 1]);
    }
    if (std::holds_alternative<ContinuedProduct>(family_)) {
        if (gamma_ == 0.0) return 0.0;
        return -std::log(boost::math::tgamma_delta_ratio(static_cast<double>(n), gamma_))
               - std::lgamma(1.0 + gamma_);
    }
    return gamma_ * std::log(static_cast<double>(n)) + log_ell(n);
}

double MemorySpec::mu(std::uint64_t n) const {
    if (auto t = std::get_if<CustomTable>(&family_)) {
        require(n >= 1 && n <= t->values.size(), ErrorKind::OutOfRange,
                "index out of custom table range");
        return t->values[n - 1];
    }
    if (std::holds_alternative<PowerLaw>(family_)) {
        require(n >= 1, ErrorKind::OutOfRange, "memory index must be >= 1");
        return gamma_ == 0.0 ? 1.0 : std::pow(static_cast<double>(n), gamma_);
    }
    if (std::holds_alternative<ContinuedProduct>(family_)) {
        require(n >= 1, ErrorKind::OutOfRange, "memory index must be >= 1");
        if (gamma_ == 0.0) return 1.0;
        return 1.0 / (boost::math::tgamma_delta_ratio(static_cast<double>(n), gamma_)
                      * std::tgamma(1.0 + gamma_));
    }
    return std::exp(log_mu(n));
}

std::optional<std::uint64_t> MemorySpec::max_index() const {
    if (auto t = std::get_if<CustomTable>(&family_)) return t->values.size();
    return std::nullopt;
}

bool MemorySpec::is_unit() const noexcept {
    if (gamma_ != 0.0) return false;
    return std::holds_alternative<PowerLaw>(family_)
           || std::holds_alternative<ContinuedProduct>(family_);
}

std::string MemorySpec::family_name() const {
    return std::visit(overloaded{
        [](const PowerLaw&) { return std::string("power"); },
        [](const ContinuedProduct&) { return std::string("contprod"); },
        [](const LogModulated&) { return std::string("logmod"); },
        [](const SlowGrowth&) { return std::string("slowgrowth"); },
        [](const CustomTable&) { return std::string("table"); },
    }, family_);
}

std::string MemorySpec::describe() const {
    std::ostringstream os;
    os << family_name() << "(gamma=" << gamma_;
    std::visit(overloaded{
        [](const PowerLaw&) {},
        [](const ContinuedProduct&) {},
        [&](const LogModulated& lm) {
            os << ", alpha=" << lm.alpha;
            std::visit(overloaded{
                [&](const ZetaZero&) { os << ", zeta=zero"; },
                [&](const ZetaPower& z) { os << ", zeta=power(kappa=" << z.kappa << ", rho=" << z.rho << ")"; },
                [&](const ZetaLogLog& z) { os << ", zeta=loglog(kappa=" << z.kappa << ")"; },
            }, lm.zeta);
        },
        [&](const SlowGrowth& sg) { os << ", alpha=" << std::get<PowerLogGap>(sg.delta).alpha; },
        [&](const CustomTable& t) { os << ", length=" << t.values.size(); },
    }, family_);
    os << ")";
    return os.str();
}

nlohmann::json MemorySpec::to_json() const {
    nlohmann::json j;
    j["family"] = family_name();
    j["gamma"] = gamma_;
    std::visit(overloaded{
        [](const PowerLaw&) {},
        [](const ContinuedProduct&) {},
        [&](const LogModulated& lm) {
            j["alpha"] = lm.alpha;
            std::visit(overloaded{
                [&](const ZetaZero&) { j["zeta"] = {{"kind", "zero"}}; },
                [&](const ZetaPower& z) {
                    j["zeta"] = {{"kind", "power"}, {"kappa", z.kappa}, {"rho", z.rho}};
                },
                [&](const ZetaLogLog& z) { j["zeta"] = {{"kind", "loglog"}, {"kappa", z.kappa}}; },
            }, lm.zeta);
        },
        [&](const SlowGrowth& sg) {
            j["delta"] = {{"kind", "powerloggap"}, {"alpha", std::get<PowerLogGap>(sg.delta).alpha}};
        },
        [&](const CustomTable& t) { j["values"] = t.values; },
    }, family_);
    return j;
}

MemorySpec MemorySpec::from_json(const nlohmann::json& j) {
    try {
        std::string fam = j.at("family").get<std::string>();
        double gamma = j.at("gamma").get<double>();
        if (fam == "power") return power_law(gamma);
        if (fam == "contprod") return continued_product(gamma);
        if (fam == "logmod") {
            double alpha = j.at("alpha").get<double>();
            ZetaSpec z = ZetaZero{};
            if (j.contains("zeta")) {
                const auto& jz = j.at("zeta");
                std::string kind = jz.is_string() ? jz.get<std::string>() : jz.at("kind").get<std::string>();
                if (kind == "zero") z = ZetaZero{};
                else if (kind == "power") z = ZetaPower{jz.at("kappa").get<double>(), jz.at("rho").get<double>()};
                else if (kind == "loglog") z = ZetaLogLog{jz.at("kappa").get<double>()};
                else fail(ErrorKind::InvalidSpec, "unknown zeta kind '" + kind + "'");
            }
            return log_modulated(gamma, alpha, z);
        }
        if (fam == "slowgrowth") {
            double alpha = j.contains("delta") ? j.at("delta").at("alpha").get<double>()
                                               : j.at("alpha").get<double>();
            return slow_growth(gamma, alpha);
        }
        if (fam == "table") return table(j.at("values").get<std::vector<double>>(), gamma);
        fail(ErrorKind::InvalidSpec, "unknown memory family '" + fam + "'");
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidSpec, std::string("malformed memory spec: ") + e.what());
    }
}

MemorySequence::MemorySequence(const MemorySpec& spec) : spec_(&spec) {
    unit_ = spec.is_unit();
    recursive_ = std::holds_alternative<ContinuedProduct>(spec.family());
}

double MemorySequence::next() {
    ++n_;
    if (unit_) return last_ = 1.0;
    if (recursive_) {
        last_ = n_ == 1 ? 1.0 : last_ * (1.0 + spec_->gamma() / static_cast<double>(n_ - 1));
        return last_;
    }
    return last_ = spec_->mu(n_);
}

double estimate_index(const std::vector<double>& values) {
    require(values.size() >= 4, ErrorKind::InvalidSpec, "need at least 4 values to estimate an index");
    std::size_t lo = values.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double m = 0;
    for (std::size_t i = lo; i < values.size(); ++i) {
        double x = std::log(static_cast<double>(i + 1));
        double y = std::log(values[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y; m += 1;
    }
    double den = m * sxx - sx * sx;
    require(den > 0, ErrorKind::InvalidSpec, "degenerate index fit");
    return (m * sxy - sx * sy) / den;
}

} // namespace rvwalk
