#include "geomapprox/markov_hitting.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <queue>
#include <string>

#include "geomapprox/detail/summation.hpp"
#include "geomapprox/errors.hpp"

namespace geomapprox {

namespace {

constexpr double kRowTolerance = 1e-12;
constexpr double kResidualTolerance = 1e-12;

std::vector<int> bfs_levels(const Eigen::MatrixXd& p, bool reversed) {
    const auto n = static_cast<std::size_t>(p.rows());
    std::vector<int> level(n, -1);
    std::queue<std::size_t> frontier;
    level[0] = 0;
    frontier.push(0);
    while (!frontier.empty()) {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (std::size_t v = 0; v < n; ++v) {
            const double w = reversed ? p(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u))
                                      : p(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v));
            if (w > 0.0 && level[v] < 0) {
                level[v] = level[u] + 1;
                frontier.push(v);
            }
        }
    }
    return level;
}

std::vector<double> stationary_vector(const MarkovModel& model) {
    const Eigen::VectorXd pi = stationary(model.transition());
    return {pi.data(), pi.data() + pi.size()};
}

}  // namespace

void validate_ergodic(const Eigen::MatrixXd& p) {
    if (p.rows() == 0 || p.rows() != p.cols()) throw ValidationError("markov: transition matrix must be square");
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            if (!std::isfinite(p(i, j)) || p(i, j) < 0.0) {
                throw ValidationError("markov: negative or non-finite entry in row " + std::to_string(i));
            }
            row += p(i, j);
        }
        if (std::abs(row - 1.0) > kRowTolerance) {
            throw ValidationError("markov: row " + std::to_string(i) + " does not sum to 1");
        }
    }
    const auto forward = bfs_levels(p, false);
    const auto backward = bfs_levels(p, true);
    const bool connected = std::none_of(forward.begin(), forward.end(), [](int l) { return l < 0; }) &&
                           std::none_of(backward.begin(), backward.end(), [](int l) { return l < 0; });
    if (!connected) throw ValidationError("markov: chain is not irreducible");
    // Period = gcd over edges u -> v of level(u) + 1 - level(v).
    int period = 0;
    for (Eigen::Index u = 0; u < p.rows(); ++u) {
        for (Eigen::Index v = 0; v < p.cols(); ++v) {
            if (p(u, v) > 0.0) {
                period = std::gcd(period, std::abs(forward[static_cast<std::size_t>(u)] + 1 -
                                                   forward[static_cast<std::size_t>(v)]));
            }
        }
    }
    if (period != 1) throw ValidationError("markov: chain is periodic with period " + std::to_string(period));
}

MarkovModel MarkovModel::create(Eigen::MatrixXd transition, std::vector<std::size_t> target, MarkovStart start) {
    validate_ergodic(transition);
    const auto n = static_cast<std::size_t>(transition.rows());
    std::vector<bool> mask(n, false);
    for (std::size_t a : target) {
        if (a >= n) throw ValidationError("markov: target state " + std::to_string(a) + " out of range");
        if (mask[a]) throw ValidationError("markov: target state " + std::to_string(a) + " listed twice");
        mask[a] = true;
    }
    if (target.empty()) throw ValidationError("markov: target set is empty");
    if (target.size() == n) throw ValidationError("markov: target set must be a proper subset");
    std::sort(target.begin(), target.end());
    if (const auto* ts = std::get_if<TranslatedStart>(&start)) {
        if (ts->initial.size() != n) throw ValidationError("markov: initial distribution has the wrong length");
        double total = 0.0;
        for (double x : ts->initial) {
            if (!(x >= 0.0)) throw ValidationError("markov: initial distribution has a negative entry");
            total += x;
        }
        if (std::abs(total - 1.0) > kRowTolerance) {
            throw ValidationError("markov: initial distribution does not sum to 1");
        }
    }
    return MarkovModel(std::move(transition), std::move(target), std::move(mask), std::move(start));
}

Eigen::VectorXd stationary(const Eigen::MatrixXd& p) {
    const Eigen::Index n = p.rows();
    Eigen::MatrixXd system = p.transpose() - Eigen::MatrixXd::Identity(n, n);
    system.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (!lu.isInvertible()) throw NumericalError("stationary: singular balance system");
    Eigen::VectorXd pi = lu.solve(rhs);
    pi = pi.cwiseMax(0.0);
    pi /= pi.sum();
    const double residual = (pi.transpose() * p - pi.transpose()).cwiseAbs().sum();
    if (!(residual <= kResidualTolerance)) {
        throw NumericalError("stationary: residual " + std::to_string(residual) + " exceeds tolerance");
    }
    return pi;
}

Pmf hitting_time_pmf(const MarkovModel& model, const std::vector<double>& start, std::optional<std::size_t> horizon,
                     const TruncationPolicy& policy) {
    const std::size_t n = model.state_count();
    if (start.size() != n) throw ValidationError("hitting time: start distribution has the wrong length");
    const auto& mask = model.in_target();
    const Eigen::MatrixXd& p = model.transition();

    Eigen::RowVectorXd outside(static_cast<Eigen::Index>(n));
    double hit_now = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        if (mask[i]) {
            hit_now += start[i];
            outside(ii) = 0.0;
        } else {
            outside(ii) = start[i];
        }
    }
    std::vector<double> probs{hit_now};
    double remaining = outside.sum();
    const std::size_t last = horizon ? *horizon : policy.max_support - 1;
    while (probs.size() <= last && (horizon || remaining > policy.eps_tail)) {
        Eigen::RowVectorXd next = outside * p;
        double hit = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (mask[j]) {
                hit += next(static_cast<Eigen::Index>(j));
                next(static_cast<Eigen::Index>(j)) = 0.0;
            }
        }
        probs.push_back(hit);
        outside = std::move(next);
        remaining = outside.sum();
    }
    return Pmf::from_probs(std::move(probs), std::max(0.0, remaining));
}

double dobrushin_coefficient(const Eigen::MatrixXd& m) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = i + 1; k < m.rows(); ++k) {
            worst = std::max(worst, 0.5 * (m.row(i) - m.row(k)).cwiseAbs().sum());
        }
    }
    return worst;
}

MixingSeries mixing_series(const MarkovModel& model, std::size_t n_max, std::size_t max_power) {
    const Eigen::MatrixXd& p = model.transition();
    const auto n = static_cast<Eigen::Index>(model.state_count());
    const Eigen::VectorXd pi = stationary(p);
    const auto& target = model.target();

    MixingSeries out;
    {
        Eigen::MatrixXd power = p;
        std::size_t k = 1;
        double gamma = dobrushin_coefficient(power);
        while (!(gamma < 1.0) && k < max_power) {
            power = power * p;
            ++k;
            gamma = dobrushin_coefficient(power);
        }
        if (!(gamma < 1.0)) {
            throw NumericalError("mixing series: no power of P up to " + std::to_string(max_power) +
                                 " has Dobrushin coefficient below 1");
        }
        out.contraction_power = k;
        out.contraction = gamma;
    }
    const std::size_t k = out.contraction_power;
    const double gamma = out.contraction;
    const double per_row_weight = std::min(2.0, static_cast<double>(target.size()));

    // tv[s][a] = d_TV(P^s(target[a], .), pi), kept for the last k powers.
    std::deque<std::vector<double>> recent_tv;
    auto row_tv = [&](const Eigen::MatrixXd& m) {
        std::vector<double> tv(target.size());
        for (std::size_t a = 0; a < target.size(); ++a) {
            const auto i = static_cast<Eigen::Index>(target[a]);
            tv[a] = 0.5 * (m.row(i).transpose() - pi).cwiseAbs().sum();
        }
        return tv;
    };
    auto remember = [&](std::vector<double> tv) {
        recent_tv.push_back(std::move(tv));
        if (recent_tv.size() > k) recent_tv.pop_front();
    };

    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    remember(row_tv(power));
    detail::CompensatedSum value;
    detail::CompensatedSum extra;
    const std::size_t n_eff = std::max(n_max, k - 1);
    for (std::size_t step = 1; step <= n_eff; ++step) {
        power = power * p;
        auto tv = row_tv(power);
        if (step <= n_max) {
            for (std::size_t a = 0; a < target.size(); ++a) {
                const auto i = static_cast<Eigen::Index>(target[a]);
                double row = 0.0;
                for (std::size_t b = 0; b < target.size(); ++b) {
                    const auto j = static_cast<Eigen::Index>(target[b]);
                    row += std::abs(power(i, j) - pi(j));
                }
                value += pi(i) * row;
            }
        } else {
            // Powers computed only to reach a full window of k steps.
            for (std::size_t a = 0; a < target.size(); ++a) {
                extra += pi(static_cast<Eigen::Index>(target[a])) * per_row_weight * tv[a];
            }
        }
        remember(std::move(tv));
    }
    // Any later power n' is s + jk (j >= 1) for one s in the window, and
    // d_TV(P^{s+jk}(i, .), pi) <= gamma^j d_TV(P^s(i, .), pi).
    const double geometric = gamma / (1.0 - gamma);
    detail::CompensatedSum tail;
    tail += extra.value();
    for (const auto& tv : recent_tv) {
        for (std::size_t a = 0; a < target.size(); ++a) {
            tail += pi(static_cast<Eigen::Index>(target[a])) * per_row_weight * geometric * tv[a];
        }
    }
    out.value = value.value();
    out.tail_bound = tail.value();
    return out;
}

HittingBound hitting_bound(const MarkovModel& model, std::size_t n_max, const TruncationPolicy& policy) {
    const std::vector<double> pi = stationary_vector(model);
    std::vector<double> initial = pi;
    Pmf translation;
    if (const auto* ts = std::get_if<TranslatedStart>(&model.start())) {
        initial = ts->initial;
        translation = ts->translation;
    }
    const Pmf w = hitting_time_pmf(model, initial, std::nullopt, policy);

    HittingBound out;
    detail::CompensatedSum p;
    detail::CompensatedSum below;
    double cdf = 0.0;  // P(W <= t - 1)
    for (std::size_t t = 0; t < translation.size(); ++t) {
        below += translation[t] * cdf;
        cdf += w[t];
        p += translation[t] * cdf;
    }
    out.p = p.value();
    out.prob_w_lt_t = below.value();
    if (!(out.p > 0.0)) throw DegenerateModelError("hitting bound: p = P(W <= T) is 0");

    double outside = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (!model.in_target()[i]) outside += pi[i];
    }
    out.series = mixing_series(model, n_max);
    const double scale = (1.0 - out.p) / (out.p * outside);
    out.bound = std::clamp(out.prob_w_lt_t + scale * (out.series.value + out.series.tail_bound), 0.0, 1.0);
    return out;
}

HittingCheck check_hitting(const MarkovModel& model, std::size_t n_max, const TruncationPolicy& policy) {
    HittingCheck out;
    out.bound = hitting_bound(model, n_max, policy);
    std::vector<double> initial = stationary_vector(model);
    Pmf translation;
    if (const auto* ts = std::get_if<TranslatedStart>(&model.start())) {
        initial = ts->initial;
        translation = ts->translation;
    }
    const Pmf w = hitting_time_pmf(model, initial, std::nullopt, policy);
    const Pmf approx =
        convolve(geometric_pmf(GeometricLaw(std::min(1.0, out.bound.p)), std::nullopt, policy), translation, policy);
    out.exact = tv_distance(w, approx);
    return out;
}

}  // namespace geomapprox
