#include "geomapprox/translated_geom.hpp"

#include <algorithm>
#include <cmath>

#include "geomapprox/errors.hpp"

namespace geomapprox {

namespace {

void validate(const TranslatedBoundInputs& in) {
    if (!(in.p > 0.0 && in.p <= 1.0)) throw ValidationError("translated bound: p must lie in (0, 1]");
    if (!(in.prob_w_lt_t >= 0.0 && in.prob_w_lt_t <= 1.0)) {
        throw ValidationError("translated bound: P(W < T) must lie in [0, 1]");
    }
    if (!(in.coupling_term >= 0.0) || !std::isfinite(in.coupling_term)) {
        throw ValidationError("translated bound: coupling term must be finite and non-negative");
    }
}

}  // namespace

double bound_via_mean_coupling(const TranslatedBoundInputs& in) {
    validate(in);
    return std::clamp(in.prob_w_lt_t + (1.0 - in.p) * in.coupling_term, 0.0, 1.0);
}

double bound_via_tv_coupling(const TranslatedBoundInputs& in) {
    validate(in);
    return std::clamp(in.prob_w_lt_t + (1.0 - in.p) / in.p * in.coupling_term, 0.0, 1.0);
}

TvResult exact_translated_tv(const Pmf& w, const Pmf& t, double p, const TruncationPolicy& policy) {
    const Pmf approx = convolve(geometric_pmf(GeometricLaw(p), std::nullopt, policy), t, policy);
    return tv_distance(w, approx);
}

}  // namespace geomapprox
