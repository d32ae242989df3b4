#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "geomapprox/pmf.hpp"

namespace geomapprox {

// The chain starts from its stationary law and T = 0.
struct StationaryStart {};

// The chain starts from `initial`; `translation` is the law of a stationary
// time for that start, independent of the hitting time.
struct TranslatedStart {
    std::vector<double> initial;
    Pmf translation;
};

using MarkovStart = std::variant<StationaryStart, TranslatedStart>;

// Finite ergodic chain with a target set A; W = min{i >= 0 : xi_i in A}.
class MarkovModel {
public:
    // Validates row-stochasticity, irreducibility, aperiodicity and that A is
    // a nonempty proper subset of the states. Throws ValidationError.
    static MarkovModel create(Eigen::MatrixXd transition, std::vector<std::size_t> target,
                              MarkovStart start = StationaryStart{});

    const Eigen::MatrixXd& transition() const noexcept { return transition_; }
    const std::vector<std::size_t>& target() const noexcept { return target_; }
    const std::vector<bool>& in_target() const noexcept { return in_target_; }
    const MarkovStart& start() const noexcept { return start_; }
    std::size_t state_count() const noexcept { return static_cast<std::size_t>(transition_.rows()); }

private:
    MarkovModel(Eigen::MatrixXd transition, std::vector<std::size_t> target, std::vector<bool> mask,
                MarkovStart start)
        : transition_(std::move(transition)),
          target_(std::move(target)),
          in_target_(std::move(mask)),
          start_(std::move(start)) {}

    Eigen::MatrixXd transition_;
    std::vector<std::size_t> target_;
    std::vector<bool> in_target_;
    MarkovStart start_;
};

// Throws ValidationError naming the failing property.
void validate_ergodic(const Eigen::MatrixXd& transition);

// pi with pi P = pi by a direct linear solve; throws NumericalError when the
// system is singular or the residual exceeds 1e-12.
Eigen::VectorXd stationary(const Eigen::MatrixXd& transition);

// Law of W from the given start. tail_mass is the exact mass still outside A
// at the last tabulated step.
Pmf hitting_time_pmf(const MarkovModel& model, const std::vector<double>& start,
                     std::optional<std::size_t> horizon = std::nullopt, const TruncationPolicy& policy = {});

// sum_{n>=1} sum_{i,j in A} pi_i |P^n_ij - pi_j|: the partial sum to n_max
// plus a certified bound on the remainder from the Dobrushin coefficient of
// the smallest contracting power of P.
struct MixingSeries {
    double value = 0.0;
    double tail_bound = 0.0;
    std::size_t contraction_power = 1;
    double contraction = 0.0;
};

MixingSeries mixing_series(const MarkovModel& model, std::size_t n_max, std::size_t max_power = 64);

// max_{i,k} d_TV(M_i., M_k.).
double dobrushin_coefficient(const Eigen::MatrixXd& m);

struct HittingBound {
    double p = 0.0;
    double prob_w_lt_t = 0.0;
    MixingSeries series;
    double bound = 0.0;
};

// P(W < T) + (1 - p) / (p pi(A^c)) * series, clamped to [0, 1].
HittingBound hitting_bound(const MarkovModel& model, std::size_t n_max = 200,
                           const TruncationPolicy& policy = {});

struct HittingCheck {
    HittingBound bound;
    TvResult exact;
};

// Bound next to d_TV(L(W), L(Y + T)) computed exactly.
HittingCheck check_hitting(const MarkovModel& model, std::size_t n_max = 200, const TruncationPolicy& policy = {});

}  // namespace geomapprox
