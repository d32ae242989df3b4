#include "geomapprox/ruin.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>

#include "geomapprox/detail/summation.hpp"
#include "geomapprox/errors.hpp"

namespace geomapprox {

ClaimLaw ClaimLaw::create(Pmf eta) {
    const double truncated = eta.tail_mass();
    if (truncated > 0.0) {
        std::vector<double> lumped(eta.probs().begin(), eta.probs().end());
        lumped.push_back(truncated);
        eta = Pmf::from_probs(std::move(lumped));
    }
    const auto probs = eta.probs();
    std::vector<double> survival(probs.size(), 0.0);
    double acc = 0.0;
    for (std::size_t j = probs.size(); j-- > 1;) {
        acc += probs[j];
        survival[j - 1] = acc;
    }
    detail::CompensatedSum q;
    detail::CompensatedSum f2;
    detail::CompensatedSum f3;
    for (std::size_t k = 1; k < probs.size(); ++k) {
        const double x = static_cast<double>(k);
        q += probs[k] * x;
        f2 += probs[k] * x * (x - 1.0);
        f3 += probs[k] * x * (x - 1.0) * (2.0 * x - 1.0);
    }
    if (!(q.value() < 1.0)) {
        throw ValidationError("claim law: E[eta] = " + std::to_string(q.value()) + " must be below 1");
    }
    if (!(eta[0] > 0.0)) throw ValidationError("claim law: P(eta = 0) must be positive");
    const bool degenerate = probs.size() <= 2;
    return ClaimLaw(std::move(eta), std::move(survival), q.value(), f2.value(), f3.value(), degenerate, truncated);
}

ClaimLaw ClaimLaw::poisson(double lambda, const TruncationPolicy& policy) {
    if (!(lambda >= 0.0 && lambda < 1.0)) throw ValidationError("claim law: Poisson mean must lie in [0, 1)");
    return create(poisson_pmf(lambda, std::nullopt, policy));
}

ClaimLaw ClaimLaw::geometric(double alpha, const TruncationPolicy& policy) {
    if (!(alpha > 0.5 && alpha <= 1.0)) throw ValidationError("claim law: geometric parameter must lie in (1/2, 1]");
    return create(geometric_pmf(GeometricLaw(alpha), std::nullopt, policy));
}

ClaimLaw ClaimLaw::gamma_mixed_poisson(double alpha, double beta, const TruncationPolicy& policy) {
    if (!(alpha > 0.0 && beta > 0.0)) throw ValidationError("claim law: gamma parameters must be positive");
    if (!(alpha < beta)) throw ValidationError("claim law: gamma mixing needs alpha / beta < 1");
    return create(negative_binomial_pmf(alpha, beta / (1.0 + beta), std::nullopt, policy));
}

ClaimLaw ClaimLaw::finite(std::vector<double> probs) { return create(Pmf::from_probs(std::move(probs))); }

double ClaimLaw::survival(std::size_t j) const { return j < survival_.size() ? survival_[j] : 0.0; }

Pmf ladder_pmf(const ClaimLaw& c) {
    const std::size_t n = std::max<std::size_t>(c.eta().size() - 1, 1);
    std::vector<double> y(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) y[j] = c.survival(j) / c.q();
    if (c.q() == 0.0) y.assign(1, 1.0);
    return Pmf::from_probs(std::move(y));
}

Pmf conditioned_claim_pmf(const ClaimLaw& c) {
    if (c.degenerate()) throw DegenerateModelError("claim law: P(eta <= 1) = 1 leaves X undefined");
    const double denom = c.q() - c.prob_positive();
    std::vector<double> x(c.eta().size() - 1, 0.0);
    for (std::size_t j = 1; j < x.size(); ++j) x[j] = c.survival(j) / denom;
    return Pmf::from_probs(std::move(x));
}

double pk_geometric_rate(const ClaimLaw& c) {
    const double r = (1.0 - c.q()) / c.p0();
    if (!(r > 0.0) || r > 1.0 + 1e-12) {
        throw ValidationError("claim law: r = " + std::to_string(r) + " lies outside (0, 1]");
    }
    return std::min(r, 1.0);
}

PsiTable psi_exact(const ClaimLaw& c, std::size_t m_max, const TruncationPolicy& policy) {
    if (m_max < 1) throw ValidationError("psi_exact: m_max must be at least 1");
    PsiTable out;
    out.psi.assign(m_max + 1, 0.0);
    out.psi[0] = c.q();
    if (c.degenerate()) return out;

    const Pmf x = conditioned_claim_pmf(c);
    const double r = pk_geometric_rate(c);
    const Pmf w = geometric_compound_pmf(r, x, m_max + 1, policy);
    detail::CompensatedSum below;
    for (std::size_t m = 1; m <= m_max; ++m) {
        below += w[m - 1];
        out.psi[m] = std::clamp(1.0 - below.value(), 0.0, 1.0);
    }
    out.slack = x.tail_mass() + c.truncated_mass() + 4.0 * static_cast<double>(m_max + 1) * DBL_EPSILON;
    return out;
}

ClaimXMoments claim_x_moments(const ClaimLaw& c) {
    if (c.degenerate()) throw DegenerateModelError("claim law: P(eta <= 1) = 1 leaves X undefined");
    const double d = c.q() - c.prob_positive();
    ClaimXMoments out;
    out.mean = c.factorial2() / (2.0 * d);
    out.second = c.factorial3() / (6.0 * d);
    out.shift_tv = c.prob_positive() / (2.0 * d);
    return out;
}

RuinBound1 ruin_bound_1(const ClaimLaw& c, std::size_t m) {
    if (m < 1) throw ValidationError("ruin bound: m must be at least 1");
    RuinBound1 out;
    if (c.degenerate()) return out;
    const double d = std::max(0.0, c.q() - c.prob_positive());
    const double lower = std::pow(d / c.p0(), static_cast<double>(m));
    out.error = (0.5 * c.factorial2() - c.q() + c.prob_positive()) / c.p0();
    out.lower = std::clamp(lower, 0.0, 1.0);
    out.upper = std::clamp(lower + out.error, 0.0, 1.0);
    return out;
}

RuinBound2 ruin_bound_2(const ClaimLaw& c, std::size_t m) {
    if (m < 1) throw ValidationError("ruin bound: m must be at least 1");
    RuinBound2 out;
    const double e2 = c.factorial2();
    if (c.degenerate() || e2 == 0.0) return out;

    const double q = c.q();
    const double pos = c.prob_positive();
    const double p0 = c.p0();
    out.center = std::pow(e2 / (2.0 * (1.0 - q) + e2), static_cast<double>(m));

    const double d = q - pos;
    const double s = 2.0 * q - 3.0 * pos;
    const double ratio = d / p0;
    double smoothing = 1.0;
    if (d > 0.0 && s > 0.0 && ratio > 0.0 && ratio < 1.0) {
        const double v = std::sqrt(-4.0 * d / (s * std::log(ratio)));
        out.v_defined = std::isfinite(v);
        if (out.v_defined) smoothing = std::min(1.0, (1.0 - q) * (1.0 + v) / p0);
    }
    const double spread = std::max(0.0, c.factorial3() / (3.0 * e2) - 1.0);
    out.err = 0.5 * smoothing * spread;
    return out;
}

namespace {

// 1 - x + x^2/2 - e^{-x} = x^3/6 - x^4/24 + ...
double poisson_error_core(double x) {
    if (x < 0.5) {
        double term = x * x * x / 6.0;
        double acc = 0.0;
        for (int k = 3; std::abs(term) > 1e-18 * std::abs(acc) || k == 3; ++k) {
            acc += term;
            term *= -x / static_cast<double>(k + 1);
            if (k > 60) break;
        }
        return acc;
    }
    return 0.5 * x * x - x - std::expm1(-x);
}

}  // namespace

double mixed_poisson_error(const MixedPoissonLaw& law) {
    if (const auto* p = std::get_if<PoissonClaims>(&law)) {
        const double l = p->lambda;
        if (!(l >= 0.0 && l < 1.0)) throw ValidationError("mixed Poisson error: lambda must lie in [0, 1)");
        return std::exp(l) * poisson_error_core(l);
    }
    const auto& g = std::get<GammaMixedClaims>(law);
    if (!(g.alpha > 0.0 && g.beta > 0.0)) throw ValidationError("mixed Poisson error: alpha, beta must be positive");
    if (!(g.alpha / g.beta < 1.0)) throw ValidationError("mixed Poisson error: alpha / beta must be below 1");
    const double a = g.alpha;
    const double b = g.beta;
    return std::pow(1.0 + 1.0 / b, a) * (a * (a + 1.0) / (2.0 * b * b) - a / b + 1.0) - 1.0;
}

std::vector<RuinReport> ruin_reports(const ClaimLaw& c, std::size_t m_max, const TruncationPolicy& policy) {
    const PsiTable psi = psi_exact(c, m_max, policy);
    std::vector<RuinReport> rows;
    rows.reserve(m_max);
    for (std::size_t m = 1; m <= m_max; ++m) {
        const RuinBound1 b1 = ruin_bound_1(c, m);
        const RuinBound2 b2 = ruin_bound_2(c, m);
        RuinReport row;
        row.m = m;
        row.psi_exact = psi.psi[m];
        row.approx1 = b1.lower;
        row.err1 = b1.error;
        row.approx2 = b2.center;
        row.err2 = b2.err;
        row.v_defined = b2.v_defined;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace geomapprox
