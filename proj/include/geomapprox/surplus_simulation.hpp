#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

#include "geomapprox/ruin.hpp"

namespace geomapprox {

// Counter-based generator: the i-th draw of stream (seed, stream) is a
// SplitMix64 hash of the counter, so any batch can be replayed on its own.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept;
    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

struct SurplusSimulationConfig {
    std::size_t paths = 1'000'000;
    std::uint64_t seed = 1;
    std::size_t batch_size = std::size_t{1} << 14;
    // Paths reaching a level c with exp(-s c) <= residual are counted as
    // surviving; s is the adjustment coefficient.
    double residual = 1e-4;
    std::size_t max_steps = std::size_t{1} << 20;
};

struct SurplusEstimate {
    double psi = 0.0;
    double std_error = 0.0;
    // Upper bound on the ruin probability discarded by the escape rule and the
    // step cap; the estimator is biased low by at most this much.
    double residual_bound = 0.0;
    std::size_t paths = 0;
    std::size_t capped_paths = 0;
    std::int64_t escape_level = 0;
};

// Positive root s of E[exp(s (eta - 1))] = 1, or +infinity when eta <= 1.
double adjustment_coefficient(const ClaimLaw& c);

SurplusEstimate simulate_ruin(const ClaimLaw& c, std::size_t initial_surplus, const SurplusSimulationConfig& config = {});

}  // namespace geomapprox
