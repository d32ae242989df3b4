#include "geomapprox/poisson_horizon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "geomapprox/detail/summation.hpp"
#include "geomapprox/errors.hpp"

namespace geomapprox {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kNegativeRoundoff = 1e-14;

void require_positive_rate(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("poisson horizon: process rate lambda must be > 0");
    }
}

// P(tau > u) for the closed-form families; empty for Custom without survival.
std::function<double(double)> survival_of(const HorizonLaw& h) {
    return std::visit(
        Overloaded{
            [](const HorizonLaw::Exponential& e) -> std::function<double(double)> {
                return [mu = e.rate](double t) { return t <= 0.0 ? 1.0 : std::exp(-mu * t); };
            },
            [](const HorizonLaw::GammaUnitMean& g) -> std::function<double(double)> {
                return [beta = g.shape](double t) { return t <= 0.0 ? 1.0 : boost::math::gamma_q(beta, beta * t); };
            },
            [](const HorizonLaw::Uniform& un) -> std::function<double(double)> {
                return [a = un.a, b = un.b](double t) { return std::clamp((b - t) / (b - a), 0.0, 1.0); };
            },
            [](const HorizonLaw::Custom& c) -> std::function<double(double)> { return c.survival; },
        },
        h.kind());
}

// E[exp(-lambda tau); tau > u], multiplied by exp(lambda u).
double discounted_tail(const HorizonLaw& h, double lambda, double u) {
    return std::visit(
        Overloaded{
            [&](const HorizonLaw::Exponential& e) {
                return e.rate / (e.rate + lambda) * std::exp(-e.rate * u);
            },
            [&](const HorizonLaw::GammaUnitMean& g) {
                const double beta = g.shape;
                return std::exp(lambda * u + beta * std::log(beta / (beta + lambda))) *
                       boost::math::gamma_q(beta, (beta + lambda) * u);
            },
            [&](const HorizonLaw::Uniform& un) {
                if (u >= un.b) return 0.0;
                const double lo = std::max(u, un.a);
                return (std::exp(-lambda * (lo - u)) - std::exp(-lambda * (un.b - u))) / (lambda * (un.b - un.a));
            },
            [](const HorizonLaw::Custom&) -> double {
                throw UnsupportedLawError("poisson horizon: no closed form for a custom horizon");
            },
        },
        h.kind());
}

Pmf uniform_count_pmf(const HorizonLaw::Uniform& un, double lambda, std::optional<std::size_t> horizon,
                      const TruncationPolicy& policy) {
    const double width = un.b - un.a;
    // P(N(tau) > K) <= P(N(b) > K) since the count is monotone in the horizon.
    auto tail_bound = [&](std::size_t k) {
        return boost::math::gamma_p(static_cast<double>(k) + 1.0, lambda * un.b);
    };
    std::size_t last = 0;
    if (horizon) {
        last = *horizon;
    } else {
        while (last + 1 < policy.max_support && tail_bound(last) > policy.eps_tail) ++last;
    }
    // P(N = k) = (1 / (lambda (b - a))) * int_{lambda a}^{lambda b} x^k e^{-x} / k! dx, a difference of
    // regularized incomplete gamma functions; the complemented pair is used past the median.
    std::vector<double> probs(last + 1);
    const double scale = lambda * width;
    for (std::size_t k = 0; k <= last; ++k) {
        const double s = static_cast<double>(k) + 1.0;
        double mass = 0.0;
        if (boost::math::gamma_p(s, lambda * un.b) < 0.5) {
            mass = boost::math::gamma_p(s, lambda * un.b) - boost::math::gamma_p(s, lambda * un.a);
        } else {
            mass = boost::math::gamma_q(s, lambda * un.a) - boost::math::gamma_q(s, lambda * un.b);
        }
        probs[k] = std::max(0.0, mass / scale);
    }
    const double kept = detail::compensated_total(probs);
    const double tail = std::max(std::max(0.0, 1.0 - kept), tail_bound(last));
    return Pmf::from_probs(std::move(probs), tail);
}

}  // namespace

// --- HorizonLaw -----------------------------------------------------------

HorizonLaw HorizonLaw::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw ValidationError("exponential horizon: rate must be > 0");
    return HorizonLaw(Exponential{rate});
}

HorizonLaw HorizonLaw::gamma_unit_mean(double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape)) throw ValidationError("gamma horizon: shape must be > 0");
    return HorizonLaw(GammaUnitMean{shape});
}

HorizonLaw HorizonLaw::uniform(double a, double b) {
    if (!(a >= 0.0 && a < b) || !std::isfinite(b)) throw ValidationError("uniform horizon: need 0 <= a < b");
    return HorizonLaw(Uniform{a, b});
}

HorizonLaw HorizonLaw::custom(std::function<double(double)> laplace, double mean, AgingTag tag,
                              std::function<double(double)> survival) {
    if (!laplace) throw ValidationError("custom horizon: a Laplace transform is required");
    if (!(mean > 0.0) || !std::isfinite(mean)) throw ValidationError("custom horizon: mean must be > 0");
    return HorizonLaw(Custom{std::move(laplace), mean, tag, std::move(survival)});
}

double HorizonLaw::mean() const {
    return std::visit(Overloaded{
                          [](const Exponential& e) { return 1.0 / e.rate; },
                          [](const GammaUnitMean&) { return 1.0; },
                          [](const Uniform& u) { return 0.5 * (u.a + u.b); },
                          [](const Custom& c) { return c.mean; },
                      },
                      kind_);
}

// Gamma: decreasing failure rate below shape 1, increasing above; uniform IFR.
bool HorizonLaw::is_nbu() const {
    return std::visit(Overloaded{
                          [](const Exponential&) { return true; },
                          [](const GammaUnitMean& g) { return g.shape >= 1.0; },
                          [](const Uniform&) { return true; },
                          [](const Custom& c) { return c.tag == AgingTag::nbu; },
                      },
                      kind_);
}

bool HorizonLaw::is_nwu() const {
    return std::visit(Overloaded{
                          [](const Exponential&) { return true; },
                          [](const GammaUnitMean& g) { return g.shape <= 1.0; },
                          [](const Uniform&) { return false; },
                          [](const Custom& c) { return c.tag == AgingTag::nwu; },
                      },
                      kind_);
}

std::string HorizonLaw::describe() const {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const Exponential& e) { os << "exponential(rate=" << e.rate << ")"; },
                   [&](const GammaUnitMean& g) { os << "gamma(shape=" << g.shape << ", mean=1)"; },
                   [&](const Uniform& u) { os << "uniform(" << u.a << ", " << u.b << ")"; },
                   [&](const Custom& c) { os << "custom(mean=" << c.mean << ")"; },
               },
               kind_);
    return os.str();
}

// --- operations -----------------------------------------------------------

double geom_param(const HorizonLaw& h, double lambda) {
    require_positive_rate(lambda);
    return std::visit(
        Overloaded{
            [&](const HorizonLaw::Exponential& e) { return e.rate / (e.rate + lambda); },
            [&](const HorizonLaw::GammaUnitMean& g) { return std::pow(1.0 + lambda / g.shape, -g.shape); },
            [&](const HorizonLaw::Uniform& u) {
                return (std::exp(-lambda * u.a) - std::exp(-lambda * u.b)) / (lambda * (u.b - u.a));
            },
            [&](const HorizonLaw::Custom& c) {
                const double v = c.laplace(lambda);
                if (!(v > 0.0 && v <= 1.0)) {
                    throw ValidationError("custom horizon: Laplace transform must lie in (0, 1]");
                }
                return v;
            },
        },
        h.kind());
}

Pmf exact_count_pmf(const HorizonLaw& h, double lambda, std::optional<std::size_t> horizon,
                    const TruncationPolicy& policy) {
    require_positive_rate(lambda);
    return std::visit(
        Overloaded{
            [&](const HorizonLaw::Exponential& e) {
                return geometric_pmf(GeometricLaw(e.rate / (e.rate + lambda)), horizon, policy);
            },
            [&](const HorizonLaw::GammaUnitMean& g) {
                return negative_binomial_pmf(g.shape, g.shape / (g.shape + lambda), horizon, policy);
            },
            [&](const HorizonLaw::Uniform& u) { return uniform_count_pmf(u, lambda, horizon, policy); },
            [](const HorizonLaw::Custom&) -> Pmf {
                throw UnsupportedLawError("poisson horizon: exact count law unavailable for a custom horizon");
            },
        },
        h.kind());
}

double sigma_survival(const HorizonLaw& h, double lambda, double u) {
    require_positive_rate(lambda);
    if (!(u >= 0.0)) throw ValidationError("sigma survival: u must be >= 0");
    const double p = geom_param(h, lambda);
    if (p >= 1.0) throw DegenerateModelError("sigma survival: P(tau > xi_1) = 0");
    if (u == 0.0) return 1.0;

    double numerator = 0.0;
    if (const auto* c = std::get_if<HorizonLaw::Custom>(&h.kind())) {
        if (!c->survival) {
            throw UnsupportedLawError("sigma survival: custom horizon has no survival function");
        }
        using boost::math::quadrature::gauss_kronrod;
        auto integrand = [&](double x) { return c->survival(u + x) * lambda * std::exp(-lambda * x); };
        numerator = gauss_kronrod<double, 61>::integrate(integrand, 0.0, std::numeric_limits<double>::infinity(),
                                                         15, 1e-13);
    } else {
        // E[P(tau > u + xi_1)] = P(tau > u) - e^{lambda u} E[e^{-lambda tau}; tau > u].
        numerator = survival_of(h)(u) - discounted_tail(h, lambda, u);
    }
    return std::clamp(numerator / (1.0 - p), 0.0, 1.0);
}

double sigma_mean(const HorizonLaw& h, double lambda) {
    const double p = geom_param(h, lambda);
    if (p >= 1.0) throw DegenerateModelError("sigma mean: p = 1 (tau is 0 almost surely)");
    return h.mean() / (1.0 - p) - 1.0 / lambda;
}

double nbu_bound(const HorizonLaw& h, double lambda) {
    if (!h.is_nbu()) throw TagMismatchError("nbu bound: horizon " + h.describe() + " is not NBU");
    const double v = 1.0 - geom_param(h, lambda) * (1.0 + lambda * h.mean());
    if (v < -kNegativeRoundoff) {
        throw TagMismatchError("nbu bound: negative value for " + h.describe() + "; the NBU tag is wrong");
    }
    return std::max(v, 0.0);
}

double nwu_bound(const HorizonLaw& h, double lambda) {
    if (!h.is_nwu()) throw TagMismatchError("nwu bound: horizon " + h.describe() + " is not NWU");
    const double v = geom_param(h, lambda) * (1.0 + lambda * h.mean()) - 1.0;
    if (v < -kNegativeRoundoff) {
        throw TagMismatchError("nwu bound: negative value for " + h.describe() + "; the NWU tag is wrong");
    }
    return std::max(v, 0.0);
}

std::vector<std::pair<double, double>> gamma_bound_curve(double lambda, const std::vector<double>& betas) {
    require_positive_rate(lambda);
    std::vector<std::pair<double, double>> out;
    out.reserve(betas.size());
    for (double beta : betas) {
        if (!(beta > 0.0)) throw ValidationError("gamma bound curve: beta must be > 0");
        out.emplace_back(beta, std::abs(1.0 - (1.0 + lambda) * std::pow(1.0 + lambda / beta, -beta)));
    }
    return out;
}

HorizonCheck check_horizon(const HorizonLaw& h, double lambda, const TruncationPolicy& policy) {
    HorizonCheck out;
    out.p = geom_param(h, lambda);
    if (h.is_nbu() && h.is_nwu()) {
        out.bound = std::min(nbu_bound(h, lambda), nwu_bound(h, lambda));
    } else if (h.is_nbu()) {
        out.bound = nbu_bound(h, lambda);
    } else if (h.is_nwu()) {
        out.bound = nwu_bound(h, lambda);
    } else {
        throw TagMismatchError("poisson horizon: " + h.describe() + " is neither NBU nor NWU");
    }
    const Pmf exact = exact_count_pmf(h, lambda, std::nullopt, policy);
    out.exact = tv_distance(exact, geometric_pmf(GeometricLaw(out.p), std::nullopt, policy));
    return out;
}

}  // namespace geomapprox
