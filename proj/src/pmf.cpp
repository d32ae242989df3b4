#include "geomapprox/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "geomapprox/detail/summation.hpp"
#include "geomapprox/errors.hpp"

namespace geomapprox {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string describe_total(double total) {
    std::ostringstream os;
    os.precision(17);
    os << total;
    return os.str();
}

void trim_trailing_zeros(std::vector<double>& probs) {
    while (probs.size() > 1 && probs.back() == 0.0) probs.pop_back();
}

// Smallest K in [lo, cap] with tail(K) <= eps; tail must be nonincreasing.
// Returns cap when no such K exists.
template <class TailFn>
std::size_t smallest_horizon(TailFn&& tail, std::size_t lo, std::size_t cap, double eps) {
    std::size_t hi = std::max<std::size_t>(lo, 1);
    while (hi < cap && tail(hi) > eps) hi = std::min(cap, hi * 2);
    if (tail(hi) > eps) return cap;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (tail(mid) <= eps) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

}  // namespace

// --- Pmf ------------------------------------------------------------------

Pmf::Pmf() : probs_{1.0}, tail_mass_(0.0) {}

Pmf::Pmf(std::vector<double> probs, double tail_mass)
    : probs_(std::move(probs)), tail_mass_(tail_mass) {}

Pmf Pmf::from_probs(std::vector<double> probs, double tail_mass) {
    if (probs.empty()) throw ValidationError("pmf: empty probability table");
    if (!std::isfinite(tail_mass) || tail_mass < 0.0) {
        throw ValidationError("pmf: tail_mass must be finite and non-negative");
    }
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (!std::isfinite(probs[k]) || probs[k] < 0.0) {
            throw ValidationError("pmf: weight at index " + std::to_string(k) +
                                  " is negative or not finite");
        }
    }
    const double total = detail::compensated_total(probs) + tail_mass;
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
        throw ValidationError("pmf: weights plus tail sum to " + describe_total(total) +
                              ", expected 1");
    }
    trim_trailing_zeros(probs);
    return Pmf(std::move(probs), tail_mass);
}

Pmf Pmf::point_mass(std::size_t k) {
    std::vector<double> probs(k + 1, 0.0);
    probs[k] = 1.0;
    return Pmf(std::move(probs), 0.0);
}

double Pmf::total() const { return detail::compensated_total(probs_); }

double Pmf::mean() const {
    detail::CompensatedSum s;
    for (std::size_t k = 1; k < probs_.size(); ++k) s += static_cast<double>(k) * probs_[k];
    return s.value();
}

double Pmf::survival(std::size_t j) const {
    detail::CompensatedSum s;
    s += tail_mass_;
    for (std::size_t k = probs_.size(); k-- > j + 1;) s += probs_[k];
    return s.value();
}

Pmf Pmf::shifted(std::ptrdiff_t offset) const {
    if (offset >= 0) {
        std::vector<double> out(probs_.size() + static_cast<std::size_t>(offset), 0.0);
        std::copy(probs_.begin(), probs_.end(), out.begin() + offset);
        return Pmf(std::move(out), tail_mass_);
    }
    const auto drop = static_cast<std::size_t>(-offset);
    for (std::size_t k = 0; k < std::min(drop, probs_.size()); ++k) {
        if (probs_[k] != 0.0) throw ValidationError("pmf: shift would move mass below zero");
    }
    if (drop >= probs_.size()) {
        if (tail_mass_ == 0.0) throw ValidationError("pmf: shift would move mass below zero");
        return Pmf(std::vector<double>{0.0}, tail_mass_);
    }
    return Pmf(std::vector<double>(probs_.begin() + static_cast<std::ptrdiff_t>(drop), probs_.end()),
               tail_mass_);
}

GeometricLaw::GeometricLaw(double p) : p_(p) {
    if (!(p > 0.0 && p <= 1.0)) throw ValidationError("geometric law: p must lie in (0, 1]");
}

// --- constructors ---------------------------------------------------------

Pmf geometric_pmf(const GeometricLaw& law, std::optional<std::size_t> horizon,
                  const TruncationPolicy& policy) {
    const double p = law.p();
    if (p == 1.0) return Pmf::point_mass(0);
    const double q = 1.0 - p;
    std::size_t last = 0;
    if (horizon) {
        last = *horizon;
    } else {
        const double guess = std::ceil(std::log(policy.eps_tail) / std::log(q)) - 1.0;
        last = static_cast<std::size_t>(std::clamp(guess, 0.0, static_cast<double>(policy.max_support - 1)));
        // Settle on the smallest K with q^(K+1) <= eps despite rounding in the guess.
        while (last > 0 && std::pow(q, static_cast<double>(last)) <= policy.eps_tail) --last;
        while (last + 1 < policy.max_support && std::pow(q, static_cast<double>(last + 1)) > policy.eps_tail) {
            ++last;
        }
    }
    std::vector<double> probs(last + 1);
    for (std::size_t k = 0; k <= last; ++k) probs[k] = p * std::pow(q, static_cast<double>(k));
    return Pmf::from_probs(std::move(probs), std::pow(q, static_cast<double>(last + 1)));
}

Pmf poisson_pmf(double mean, std::optional<std::size_t> horizon, const TruncationPolicy& policy) {
    if (!std::isfinite(mean) || mean < 0.0) throw ValidationError("poisson: mean must be >= 0");
    if (mean == 0.0) return Pmf::point_mass(0);
    auto tail = [mean](std::size_t k) {
        return boost::math::gamma_p(static_cast<double>(k) + 1.0, mean);
    };
    const std::size_t last =
        horizon ? *horizon
                : smallest_horizon(tail, static_cast<std::size_t>(mean), policy.max_support - 1, policy.eps_tail);
    std::vector<double> probs(last + 1);
    const double log_mean = std::log(mean);
    for (std::size_t k = 0; k <= last; ++k) {
        const double kd = static_cast<double>(k);
        probs[k] = std::exp(-mean + kd * log_mean - std::lgamma(kd + 1.0));
    }
    return Pmf::from_probs(std::move(probs), tail(last));
}

Pmf negative_binomial_pmf(double shape, double success, std::optional<std::size_t> horizon,
                          const TruncationPolicy& policy) {
    if (!(shape > 0.0) || !std::isfinite(shape)) throw ValidationError("negative binomial: shape must be > 0");
    if (!(success > 0.0 && success <= 1.0)) {
        throw ValidationError("negative binomial: success probability must lie in (0, 1]");
    }
    if (success == 1.0) return Pmf::point_mass(0);
    auto tail = [shape, success](std::size_t k) {
        return boost::math::ibetac(shape, static_cast<double>(k) + 1.0, success);
    };
    const std::size_t last = horizon ? *horizon : smallest_horizon(tail, 0, policy.max_support - 1, policy.eps_tail);
    std::vector<double> probs(last + 1);
    const double head = shape * std::log(success) - std::lgamma(shape);
    const double log_fail = std::log1p(-success);
    for (std::size_t k = 0; k <= last; ++k) {
        const double kd = static_cast<double>(k);
        probs[k] = std::exp(head + std::lgamma(kd + shape) - std::lgamma(kd + 1.0) + kd * log_fail);
    }
    return Pmf::from_probs(std::move(probs), tail(last));
}

Pmf uniform_pmf(std::size_t lo, std::size_t hi) {
    if (hi < lo) throw ValidationError("uniform: empty support");
    std::vector<double> probs(hi + 1, 0.0);
    const double w = 1.0 / static_cast<double>(hi - lo + 1);
    for (std::size_t k = lo; k <= hi; ++k) probs[k] = w;
    return Pmf::from_probs(std::move(probs), 0.0);
}

// --- operations -----------------------------------------------------------

TvResult tv_distance(const Pmf& a, const Pmf& b) {
    const std::size_t n = std::max(a.size(), b.size());
    detail::CompensatedSum s;
    for (std::size_t k = 0; k < n; ++k) s += std::abs(a[k] - b[k]);
    TvResult out;
    out.value = std::clamp(0.5 * s.value(), 0.0, 1.0);
    out.slack = std::max(a.tail_mass(), b.tail_mass()) + static_cast<double>(n) * kEps;
    return out;
}

Pmf convolve(const Pmf& a, const Pmf& b, const TruncationPolicy& policy) {
    const std::size_t full = a.size() + b.size() - 1;
    const std::size_t len = std::min(full, policy.max_support);
    std::vector<double> out(len, 0.0);
    const auto pa = a.probs();
    const auto pb = b.probs();
    for (std::size_t i = 0; i < pa.size() && i < len; ++i) {
        if (pa[i] == 0.0) continue;
        const std::size_t jmax = std::min(pb.size(), len - i);
        for (std::size_t j = 0; j < jmax; ++j) out[i + j] += pa[i] * pb[j];
    }
    const double kept = detail::compensated_total(out);
    const double inner = a.total() * b.total();
    const double dropped = std::max(0.0, inner - kept);
    const double tail = a.tail_mass() + b.tail_mass() - a.tail_mass() * b.tail_mass() + dropped;
    // Rebalance rounding so the table plus tail stays normalized.
    return Pmf::from_probs(std::move(out), std::max(tail, std::max(0.0, 1.0 - kept)));
}

namespace {

// Mass lost because the summand table is itself truncated:
// 1 - E[c^N] with c the summand's tabulated mass.
double unavoidable_deficit(const Pmf& n_law, double summand_total) {
    detail::CompensatedSum covered;
    double power = 1.0;
    for (std::size_t n = 0; n < n_law.size(); ++n) {
        covered += n_law[n] * power;
        power *= summand_total;
    }
    return std::max(0.0, 1.0 - covered.value());
}

std::vector<double> compound_table(const Pmf& n_law, const Pmf& x_law, std::size_t len) {
    std::vector<double> out(len, 0.0);
    std::vector<double> partial(len, 0.0);
    std::vector<double> next(len, 0.0);
    partial[0] = 1.0;
    out[0] = n_law[0];
    const auto px = x_law.probs();
    const std::size_t nmax = std::min(n_law.max_index(), len - 1);
    for (std::size_t n = 1; n <= nmax; ++n) {
        std::fill(next.begin(), next.end(), 0.0);
        // S_{n-1} >= n-1, so entries below n-1 are zero.
        for (std::size_t i = n - 1; i < len; ++i) {
            if (partial[i] == 0.0) continue;
            const std::size_t jmax = std::min(px.size(), len - i);
            for (std::size_t j = 1; j < jmax; ++j) next[i + j] += partial[i] * px[j];
        }
        partial.swap(next);
        const double w = n_law[n];
        if (w == 0.0) continue;
        for (std::size_t s = n; s < len; ++s) out[s] += w * partial[s];
    }
    return out;
}

}  // namespace

Pmf compound_pmf(const Pmf& n_law, const Pmf& x_law, const TruncationPolicy& policy) {
    if (x_law[0] != 0.0) {
        throw ValidationError("compound: summand law must put no mass at 0");
    }
    const double floor_deficit = n_law.tail_mass() + unavoidable_deficit(n_law, x_law.total());
    const std::size_t reach = std::min(policy.max_support,
                                       n_law.max_index() * x_law.max_index() + 1);
    const double mean_guess = n_law.mean() * x_law.mean();
    std::size_t len = std::min(reach, std::max<std::size_t>(64, static_cast<std::size_t>(4.0 * mean_guess) + 16));
    std::vector<double> table;
    for (;;) {
        table = compound_table(n_law, x_law, len);
        const double deficit = 1.0 - detail::compensated_total(table);
        if (deficit <= floor_deficit + policy.eps_tail || len >= reach) break;
        len = std::min(reach, len * 2);
    }
    const double tail = std::max(0.0, 1.0 - detail::compensated_total(table));
    return Pmf::from_probs(std::move(table), tail);
}

Pmf geometric_compound_pmf(double success, const Pmf& summand, std::size_t min_length,
                           const TruncationPolicy& policy) {
    if (!(success > 0.0 && success <= 1.0)) {
        throw ValidationError("geometric compound: success probability must lie in (0, 1]");
    }
    if (success == 1.0) {
        std::vector<double> point(std::max<std::size_t>(min_length, 1), 0.0);
        point[0] = 1.0;
        return Pmf::from_probs(std::move(point), 0.0);
    }
    const double fail = 1.0 - success;
    const double denom = 1.0 - fail * summand[0];
    const double c = summand.total();
    // Mass of the event that every summand stays inside the table.
    const double reachable = success / (1.0 - fail * c);
    const auto py = summand.probs();

    std::vector<double> f;
    f.push_back(success / denom);
    detail::CompensatedSum acc;
    acc += f[0];
    const double scale = fail / denom;
    while ((acc.value() < reachable - policy.eps_tail || f.size() < min_length) && f.size() < policy.max_support) {
        const std::size_t s = f.size();
        const std::size_t jmax = std::min(s, py.size() - 1);
        detail::CompensatedSum term;
        for (std::size_t j = 1; j <= jmax; ++j) term += py[j] * f[s - j];
        const double v = scale * term.value();
        f.push_back(v);
        acc += v;
    }
    const double tail = std::max(0.0, 1.0 - acc.value());
    return Pmf::from_probs(std::move(f), tail);
}

Pmf condition_positive(const Pmf& n_law) {
    const auto probs = n_law.probs();
    detail::CompensatedSum positive;
    positive += n_law.tail_mass();
    for (std::size_t k = 1; k < probs.size(); ++k) positive += probs[k];
    const double mass = positive.value();
    if (!(mass > 0.0)) throw DegenerateModelError("conditioning on N > 0: P(N > 0) = 0");
    std::vector<double> out(std::max<std::size_t>(probs.size(), 2), 0.0);
    for (std::size_t k = 1; k < probs.size(); ++k) out[k] = probs[k] / mass;
    const double tail = n_law.tail_mass() / mass;
    const double total = detail::compensated_total(out);
    return Pmf::from_probs(std::move(out), std::max(tail, 1.0 - total));
}

namespace {

// P(. > j) for every tabulated j, accumulated from the far end for accuracy.
std::vector<double> survival_table(const Pmf& law, std::size_t len) {
    std::vector<double> out(len);
    detail::CompensatedSum s;
    s += law.tail_mass();
    for (std::size_t j = len; j-- > 0;) {
        out[j] = s.value();
        s += law[j];
    }
    return out;
}

}  // namespace

bool hazard_order_vs_geometric(const Pmf& n_law, double p, double rel_tol) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("hazard order: p must lie in (0, 1)");
    const double ratio = p / (1.0 - p);
    const auto probs = n_law.probs();
    const std::vector<double> survival = survival_table(n_law, probs.size());
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (probs[j] == 0.0) continue;
        if (survival[j] == 0.0) return false;
        if (probs[j] > ratio * survival[j] * (1.0 + rel_tol)) return false;
    }
    // Beyond the table nothing is known; accept only a negligible tail.
    return n_law.tail_mass() <= TruncationPolicy{}.eps_tail;
}

bool stochastically_larger(const Pmf& a, const Pmf& b, double abs_tol) {
    const std::size_t n = std::max(a.size(), b.size());
    const std::vector<double> sa = survival_table(a, n);
    const std::vector<double> sb = survival_table(b, n);
    for (std::size_t t = 0; t < n; ++t) {
        if (sa[t] + abs_tol < sb[t]) return false;
    }
    return b.tail_mass() <= abs_tol;
}

TvResult shift_tv(const Pmf& x_law) { return tv_distance(x_law, x_law.shifted(1)); }

}  // namespace geomapprox
