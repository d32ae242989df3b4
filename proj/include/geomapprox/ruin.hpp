#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "geomapprox/pmf.hpp"

namespace geomapprox {

// Claim law of the compound binomial risk process
//   U_t = m + t - (eta_1 + ... + eta_t),
// ruin being the first t >= 1 with U_t <= 0.
//
// A truncated eta is replaced by the proper law that puts the tail mass on the
// first index past the table. That law is stochastically smaller than eta and
// within truncated_mass() of it in total variation; every derived quantity
// refers to it.
class ClaimLaw {
public:
    // Throws ValidationError unless E[eta] < 1 and P(eta = 0) > 0.
    static ClaimLaw create(Pmf eta);
    static ClaimLaw poisson(double lambda, const TruncationPolicy& policy = {});
    // P(eta = k) = alpha (1 - alpha)^k.
    static ClaimLaw geometric(double alpha, const TruncationPolicy& policy = {});
    // Poisson with a Gamma(shape alpha, rate beta) mean: negative binomial
    // with success probability beta / (1 + beta) and E[eta] = alpha / beta.
    static ClaimLaw gamma_mixed_poisson(double alpha, double beta, const TruncationPolicy& policy = {});
    // P(eta = k) = probs[k].
    static ClaimLaw finite(std::vector<double> probs);

    const Pmf& eta() const noexcept { return eta_; }
    double q() const noexcept { return q_; }
    double p0() const noexcept { return eta_[0]; }
    // P(eta > 0) and, more generally, P(eta > j) on the table.
    double prob_positive() const { return survival(0); }
    double survival(std::size_t j) const;
    // E[eta (eta - 1)].
    double factorial2() const noexcept { return factorial2_; }
    // E[eta (eta - 1) (2 eta - 1)].
    double factorial3() const noexcept { return factorial3_; }
    // P(eta <= 1) = 1, i.e. q = P(eta > 0).
    bool degenerate() const noexcept { return degenerate_; }
    double truncated_mass() const noexcept { return truncated_mass_; }

private:
    ClaimLaw(Pmf eta, std::vector<double> survival, double q, double f2, double f3, bool degenerate,
             double truncated)
        : eta_(std::move(eta)),
          survival_(std::move(survival)),
          q_(q),
          factorial2_(f2),
          factorial3_(f3),
          degenerate_(degenerate),
          truncated_mass_(truncated) {}

    Pmf eta_;
    std::vector<double> survival_;
    double q_;
    double factorial2_;
    double factorial3_;
    bool degenerate_;
    double truncated_mass_;
};

// P(Y = j) = P(eta > j) / q.
Pmf ladder_pmf(const ClaimLaw& c);

// P(X = j) = P(eta > j) / (q - P(eta > 0)), j >= 1. Throws
// DegenerateModelError when P(eta <= 1) = 1.
Pmf conditioned_claim_pmf(const ClaimLaw& c);

// r = (1 - q) / P(eta = 0); throws ValidationError outside (0, 1].
double pk_geometric_rate(const ClaimLaw& c);

struct PsiTable {
    // psi[m] for m = 0..m_max; psi[0] = q.
    std::vector<double> psi;
    double slack = 0.0;
};

// Infinite-horizon ruin probabilities from the geometric compound
// representation psi(m) = P(W >= m), W = X_1 + ... + X_N, N ~ Geom(r).
PsiTable psi_exact(const ClaimLaw& c, std::size_t m_max, const TruncationPolicy& policy = {});

struct ClaimXMoments {
    double mean = 0.0;
    double second = 0.0;
    double shift_tv = 0.0;
};

// E[X], E[X^2] and shift_tv = P(eta > 0) / (2 (q - P(eta > 0))), the shift
// term used by the second ruin bound. The exact d_TV(X, X + 1) is
// P(eta > 1) / (q - P(eta > 0)); the two agree only when P(eta = 1) = P(eta > 1).
ClaimXMoments claim_x_moments(const ClaimLaw& c);

struct RuinBound1 {
    double lower = 0.0;
    double upper = 0.0;
    // (1 / P(eta = 0)) (E[eta (eta - 1)] / 2 - q + P(eta > 0)), unclamped.
    double error = 0.0;
};

RuinBound1 ruin_bound_1(const ClaimLaw& c, std::size_t m);

struct RuinBound2 {
    double center = 0.0;
    double err = 0.0;
    // False when v is not real and the smoothing factor falls back to 1.
    bool v_defined = false;
};

RuinBound2 ruin_bound_2(const ClaimLaw& c, std::size_t m);

struct PoissonClaims {
    double lambda;
};

struct GammaMixedClaims {
    double alpha;
    double beta;
};

using MixedPoissonLaw = std::variant<PoissonClaims, GammaMixedClaims>;

// Error term of the first ruin bound for mixed Poisson claims, in closed form.
double mixed_poisson_error(const MixedPoissonLaw& law);

struct RuinReport {
    std::size_t m = 1;
    double psi_exact = 0.0;
    double approx1 = 0.0;
    double err1 = 0.0;
    double approx2 = 0.0;
    double err2 = 0.0;
    bool v_defined = false;
};

// One report per m = 1..m_max.
std::vector<RuinReport> ruin_reports(const ClaimLaw& c, std::size_t m_max, const TruncationPolicy& policy = {});

}  // namespace geomapprox
