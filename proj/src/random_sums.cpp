#include "geomapprox/random_sums.hpp"

#include <algorithm>
#include <cmath>

#include "geomapprox/detail/summation.hpp"
#include "geomapprox/errors.hpp"

namespace geomapprox {

RandomSumModel RandomSumModel::create(Pmf n_law, Pmf x_law) {
    if (x_law[0] != 0.0) throw ValidationError("random sum: summand law must put no mass at 0");
    const double mu = x_law.mean();
    std::optional<Pmf> n0;
    if (n_law[0] < 1.0) n0 = condition_positive(n_law);
    return RandomSumModel(std::move(n_law), std::move(x_law), mu, std::move(n0));
}

const Pmf& RandomSumModel::n0_law() const {
    if (!n0_law_) throw DegenerateModelError("random sum: N is 0 almost surely");
    return *n0_law_;
}

double geom_param_sum(const RandomSumModel& m) {
    const double p = m.p();
    if (!(p > 0.0 && p < 1.0)) {
        throw DegenerateModelError("random sum: P(N = 0) must lie in (0, 1) for a geometric approximation");
    }
    return p;
}

Pmf quantile_coupling_difference(const Pmf& n_law, const Pmf& n0_law) {
    const auto a = n_law.probs();
    const auto b = n0_law.probs();
    std::vector<double> diff(b.size(), 0.0);
    std::size_t i = 0;
    std::size_t j = 0;
    detail::CompensatedSum ca;
    detail::CompensatedSum cb;
    ca += a[0];
    cb += b[0];
    double covered = 0.0;
    double misordered = 0.0;
    while (i < a.size() && j < b.size()) {
        const double upper = std::min(ca.value(), cb.value());
        const double mass = upper - covered;
        if (mass > 0.0) {
            if (j >= i) {
                diff[j - i] += mass;
            } else {
                // Only reachable through rounding when N^(0) >=_st N.
                misordered += mass;
            }
            covered = upper;
        }
        const bool advance_a = ca.value() <= cb.value();
        const bool advance_b = cb.value() <= ca.value();
        if (advance_a && ++i < a.size()) ca += a[i];
        if (advance_b && ++j < b.size()) cb += b[j];
    }
    const double tail = std::max(0.0, 1.0 - covered) + misordered;
    const double kept = detail::compensated_total(diff);
    return Pmf::from_probs(std::move(diff), std::max(tail, 1.0 - kept));
}

double expected_abs_partial_sum_minus_one(const Pmf& x_law, std::size_t d) {
    // S_0 = 0; for d >= 1, S_d >= d >= 1 so |S_d - 1| = S_d - 1.
    if (d == 0) return 1.0;
    return static_cast<double>(d) * x_law.mean() - 1.0;
}

SumBound general_sum_bound(const RandomSumModel& m) {
    const double p = geom_param_sum(m);
    const Pmf d_law = quantile_coupling_difference(m.n_law(), m.n0_law());
    detail::CompensatedSum acc;
    for (std::size_t d = 0; d < d_law.size(); ++d) {
        if (d_law[d] != 0.0) acc += d_law[d] * expected_abs_partial_sum_minus_one(m.x_law(), d);
    }
    SumBound out;
    out.bound = (1.0 - p) * acc.value();
    out.path = SumBoundPath::general;
    out.uncovered_mass = d_law.tail_mass();
    return out;
}

double hazard_sum_bound(const RandomSumModel& m) {
    const double p = geom_param_sum(m);
    return p * (m.mu() * m.n_law().mean() + 1.0) - 1.0;
}

SumBound thm_sum_bound(const RandomSumModel& m) {
    const double p = geom_param_sum(m);
    SumBound out;
    if (hazard_order_vs_geometric(m.n_law(), p)) {
        out.bound = hazard_sum_bound(m);
        out.path = SumBoundPath::hazard_fast;
    } else {
        out = general_sum_bound(m);
    }
    out.bound = std::clamp(out.bound, 0.0, 1.0);
    return out;
}

MeanMatchedBound mean_matched_bound(double r, const Pmf& x_law) {
    if (!(r > 0.0 && r < 1.0)) throw ValidationError("mean-matched bound: r must lie in (0, 1)");
    if (x_law[0] != 0.0) throw ValidationError("mean-matched bound: summand law must put no mass at 0");
    const double mu = x_law.mean();
    const double second = x_law.expect([](double k) { return k * k; });
    MeanMatchedBound out;
    out.p_prime = r / (r + mu * (1.0 - r));
    out.u = 1.0 - shift_tv(x_law).value;
    double smoothing = 1.0;
    if (out.u > 0.0) {
        smoothing = std::min(1.0, r * (1.0 + std::sqrt(-2.0 / (out.u * std::log1p(-r)))));
    }
    out.bound = 0.5 * smoothing * (second / mu - 1.0);
    return out;
}

TvResult exact_sum_tv(const RandomSumModel& m, const TruncationPolicy& policy) {
    const double p = m.p();
    if (!(p > 0.0)) throw DegenerateModelError("random sum: P(N = 0) = 0 leaves no geometric approximation");
    const Pmf w = compound_pmf(m.n_law(), m.x_law(), policy);
    return tv_distance(w, geometric_pmf(GeometricLaw(p), std::nullopt, policy));
}

}  // namespace geomapprox
