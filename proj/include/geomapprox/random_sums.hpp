#pragma once

#include <optional>

#include "geomapprox/pmf.hpp"

namespace geomapprox {

// W = X_1 + ... + X_N with N independent of the iid positive summands X_i.
class RandomSumModel {
public:
    // Throws ValidationError if x_law puts mass at 0.
    static RandomSumModel create(Pmf n_law, Pmf x_law);

    const Pmf& n_law() const noexcept { return n_law_; }
    const Pmf& x_law() const noexcept { return x_law_; }
    // E[X] >= 1.
    double mu() const noexcept { return mu_; }
    // P(N = 0) = P(W = 0).
    double p() const noexcept { return n_law_[0]; }
    // L(N | N > 0); throws DegenerateModelError when N = 0 almost surely.
    const Pmf& n0_law() const;

private:
    RandomSumModel(Pmf n_law, Pmf x_law, double mu, std::optional<Pmf> n0)
        : n_law_(std::move(n_law)), x_law_(std::move(x_law)), mu_(mu), n0_law_(std::move(n0)) {}

    Pmf n_law_;
    Pmf x_law_;
    double mu_;
    std::optional<Pmf> n0_law_;
};

// p = P(N = 0); throws DegenerateModelError unless 0 < p < 1.
double geom_param_sum(const RandomSumModel& m);

enum class SumBoundPath { hazard_fast, general };

struct SumBound {
    double bound = 0.0;
    SumBoundPath path = SumBoundPath::general;
    // Quantile mass of (N, N^(0)) left uncovered by the truncated tables. The
    // reported bound omits its (non-negative) contribution, so it never
    // exceeds the exact coupling bound.
    double uncovered_mass = 0.0;
};

// Hazard-rate fast path p (mu E[N] + 1) - 1 when N dominates Geom(p) in
// hazard rate, otherwise the quantile-coupling bound. Clamped to [0, 1].
SumBound thm_sum_bound(const RandomSumModel& m);

// (1 - p) E|X_{N+1} + ... + X_{N^(0)} - 1| under the quantile coupling of N
// and N^(0), regardless of the hazard condition. Not clamped.
SumBound general_sum_bound(const RandomSumModel& m);

// p (mu E[N] + 1) - 1, not clamped.
double hazard_sum_bound(const RandomSumModel& m);

// Law of D = N^(0) - N when both are driven by one uniform (quantile
// coupling). tail_mass is the uncovered quantile mass.
Pmf quantile_coupling_difference(const Pmf& n_law, const Pmf& n0_law);

// E|S_d - 1| for S_d the sum of d iid copies of a positive summand.
double expected_abs_partial_sum_minus_one(const Pmf& x_law, std::size_t d);

// Comparison bound for geometric N ~ Geom(r) with the mean-matched parameter
// p' = r / (r + mu (1 - r)), using the smoothness u = 1 - d_TV(X, X + 1).
struct MeanMatchedBound {
    double p_prime = 0.0;
    double u = 0.0;
    double bound = 0.0;
};

MeanMatchedBound mean_matched_bound(double r, const Pmf& x_law);

// d_TV(L(W), Geom(p)) computed exactly.
TvResult exact_sum_tv(const RandomSumModel& m, const TruncationPolicy& policy = {});

}  // namespace geomapprox
