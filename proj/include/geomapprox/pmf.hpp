#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace geomapprox {

// Controls how infinite-support laws are cut off. Every truncating constructor
// stops at the smallest support whose missing mass is at most eps_tail.
struct TruncationPolicy {
    double eps_tail = 1e-12;
    std::size_t max_support = std::size_t{1} << 20;
};

// Tolerance on |sum(probs) + tail_mass - 1| accepted at construction.
inline constexpr double kNormalizationTolerance = 1e-12;

// Probability mass function on {0, 1, ..., K} plus the mass not represented
// in the table. probs[k] never exceeds the true P(. = k); tail_mass bounds the
// L1 distance between the table and the true law. For the analytic
// constructors the two coincide with the exact mass beyond K.
class Pmf {
public:
    // Point mass at 0.
    Pmf();

    // Throws ValidationError on negative weights, a negative tail, or a total
    // outside 1 +- kNormalizationTolerance.
    static Pmf from_probs(std::vector<double> probs, double tail_mass = 0.0);
    static Pmf point_mass(std::size_t k);

    std::size_t size() const noexcept { return probs_.size(); }
    std::size_t max_index() const noexcept { return probs_.size() - 1; }
    double operator[](std::size_t k) const noexcept { return k < probs_.size() ? probs_[k] : 0.0; }
    std::span<const double> probs() const noexcept { return probs_; }
    double tail_mass() const noexcept { return tail_mass_; }

    double total() const;
    double mean() const;
    // E[g(K)] over the tabulated support.
    template <class F>
    double expect(F&& g) const;

    // P(. > j), counting the tail mass as lying beyond the table.
    double survival(std::size_t j) const;

    // Law of (this + offset). Negative offsets require no mass below -offset.
    Pmf shifted(std::ptrdiff_t offset) const;

private:
    Pmf(std::vector<double> probs, double tail_mass);

    std::vector<double> probs_;
    double tail_mass_ = 0.0;
};

template <class F>
double Pmf::expect(F&& g) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k) {
        if (probs_[k] != 0.0) acc += probs_[k] * g(static_cast<double>(k));
    }
    return acc;
}

class GeometricLaw {
public:
    // Throws ValidationError unless 0 < p <= 1.
    explicit GeometricLaw(double p);
    double p() const noexcept { return p_; }

private:
    double p_;
};

// Total variation distance with a certified bound on the error introduced by
// truncated tails and floating-point summation.
struct TvResult {
    double value = 0.0;
    double slack = 0.0;
};

// --- constructors ---------------------------------------------------------

// P(Y = k) = p (1-p)^k. Without an explicit horizon the table stops at the
// smallest K with (1-p)^(K+1) <= policy.eps_tail.
Pmf geometric_pmf(const GeometricLaw& law, std::optional<std::size_t> horizon = std::nullopt,
                  const TruncationPolicy& policy = {});
Pmf poisson_pmf(double mean, std::optional<std::size_t> horizon = std::nullopt,
                const TruncationPolicy& policy = {});
// Number of failures before the shape-th success, success probability p;
// shape may be non-integer (gamma-mixed Poisson).
Pmf negative_binomial_pmf(double shape, double success, std::optional<std::size_t> horizon = std::nullopt,
                          const TruncationPolicy& policy = {});
// Uniform on {lo, ..., hi}.
Pmf uniform_pmf(std::size_t lo, std::size_t hi);

// --- operations -----------------------------------------------------------

TvResult tv_distance(const Pmf& a, const Pmf& b);

// Law of A + B for independent A, B. The table is cut at policy.max_support.
Pmf convolve(const Pmf& a, const Pmf& b, const TruncationPolicy& policy = {});

// Law of X_1 + ... + X_N by partial-sum convolutions. x_law must put no mass
// at 0.
Pmf compound_pmf(const Pmf& n_law, const Pmf& x_law, const TruncationPolicy& policy = {});

// Law of Y_1 + ... + Y_M with M ~ Geom(success) (P(M = k) = success (1-success)^k)
// via the geometric Panjer recursion. Summands may put mass at 0. The table
// holds at least min_length entries.
Pmf geometric_compound_pmf(double success, const Pmf& summand, std::size_t min_length = 1,
                           const TruncationPolicy& policy = {});

// L(N | N > 0).
Pmf condition_positive(const Pmf& n_law);

// Hazard-rate dominance P(N=j)/P(N>j) <= p/(1-p) for all j. Comparisons
// carry a relative tolerance so that the geometric law itself passes.
bool hazard_order_vs_geometric(const Pmf& n_law, double p, double rel_tol = 1e-9);

// P(a > t) >= P(b > t) for every integer t, up to an absolute tolerance.
bool stochastically_larger(const Pmf& a, const Pmf& b, double abs_tol = 1e-12);

// d_TV(L(X), L(X + 1)).
TvResult shift_tv(const Pmf& x_law);

}  // namespace geomapprox
