#pragma once

#include "geomapprox/pmf.hpp"

namespace geomapprox {

// Ingredients of the translated geometric bounds for W approximated by Y + T,
// Y ~ Geom(p), p = P(W <= T). coupling_term is E|W - T - V| for the
// mean-coupling bound and d_TV(L(W - T), L(V)) for the tv-coupling bound,
// where L(V + T + 1) = L(W | W > T).
struct TranslatedBoundInputs {
    double prob_w_lt_t = 0.0;
    double p = 1.0;
    double coupling_term = 0.0;
};

// P(W < T) + (1 - p) E|W - T - V|, clamped to [0, 1].
double bound_via_mean_coupling(const TranslatedBoundInputs& in);

// P(W < T) + (1 - p) / p * d_TV(L(W - T), L(V)), clamped to [0, 1].
double bound_via_tv_coupling(const TranslatedBoundInputs& in);

// d_TV(L(W), L(Y + T)) computed exactly from the two tables.
TvResult exact_translated_tv(const Pmf& w, const Pmf& t, double p, const TruncationPolicy& policy = {});

}  // namespace geomapprox
