#include "geomapprox/surplus_simulation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "geomapprox/errors.hpp"

namespace geomapprox {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

CounterRng::result_type CounterRng::operator()() noexcept {
    return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
}

double CounterRng::uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double adjustment_coefficient(const ClaimLaw& c) {
    const auto probs = c.eta().probs();
    if (probs.size() <= 2) return std::numeric_limits<double>::infinity();
    auto g = [&](double s) {
        double acc = -1.0;
        for (std::size_t k = 0; k < probs.size(); ++k) {
            if (probs[k] != 0.0) acc += probs[k] * std::exp(s * (static_cast<double>(k) - 1.0));
        }
        return acc;
    };
    const double cap = 700.0 / static_cast<double>(probs.size());
    double hi = std::min(1.0, cap);
    while (g(hi) <= 0.0) {
        if (hi >= cap) return std::numeric_limits<double>::infinity();
        hi = std::min(2.0 * hi, cap);
    }
    double lo = 0.5 * hi;
    while (g(lo) >= 0.0) {
        lo *= 0.5;
        if (lo < 1e-300) throw NumericalError("adjustment coefficient: no sign change near 0");
    }
    const auto bracket = boost::math::tools::bisect(g, lo, hi, boost::math::tools::eps_tolerance<double>(50));
    // The lower end keeps g(s) <= 0, so exp(-s u) stays a valid bound.
    return bracket.first;
}

SurplusEstimate simulate_ruin(const ClaimLaw& c, std::size_t initial_surplus, const SurplusSimulationConfig& config) {
    if (config.paths == 0 || config.batch_size == 0) throw ValidationError("simulation: paths and batch size must be positive");
    if (!(config.residual > 0.0 && config.residual < 1.0)) throw ValidationError("simulation: residual must lie in (0, 1)");

    const auto probs = c.eta().probs();
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        acc += probs[k];
        cdf[k] = acc;
    }
    const auto draw = [&](CounterRng& rng) -> std::int64_t {
        const double u = rng.uniform();
        return static_cast<std::int64_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    };

    const double s = adjustment_coefficient(c);
    SurplusEstimate out;
    out.escape_level = std::isfinite(s)
                           ? std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(-std::log(config.residual) / s)))
                           : 1;
    const std::int64_t start = static_cast<std::int64_t>(initial_surplus);

    std::size_t ruined = 0;
    const std::size_t batches = (config.paths + config.batch_size - 1) / config.batch_size;
    for (std::size_t b = 0; b < batches; ++b) {
        CounterRng rng(config.seed, b);
        const std::size_t count = std::min(config.batch_size, config.paths - b * config.batch_size);
        for (std::size_t i = 0; i < count; ++i) {
            std::int64_t u = start;
            bool done = false;
            for (std::size_t t = 0; t < config.max_steps; ++t) {
                u += 1 - draw(rng);
                if (u <= 0) {
                    ++ruined;
                    done = true;
                    break;
                }
                if (u >= out.escape_level && u >= start) {
                    done = true;
                    break;
                }
            }
            if (!done) ++out.capped_paths;
        }
    }
    out.paths = config.paths;
    const double n = static_cast<double>(config.paths);
    out.psi = static_cast<double>(ruined) / n;
    out.std_error = std::sqrt(out.psi * (1.0 - out.psi) / n);
    const double escape_bound = std::isfinite(s) ? std::exp(-s * static_cast<double>(out.escape_level)) : 0.0;
    out.residual_bound = escape_bound + static_cast<double>(out.capped_paths) / n;
    return out;
}

}  // namespace geomapprox
