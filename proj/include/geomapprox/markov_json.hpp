#pragma once

#include <string_view>

#include "geomapprox/markov_hitting.hpp"

namespace geomapprox {

// {"P": [[...], ...], "A": [i, ...], "F": [...], "T": {"probs": [...]}}.
// F defaults to the stationary law and T to a point mass at 0; giving either
// one selects a translated start. Throws ValidationError.
MarkovModel markov_model_from_json(std::string_view text);

}  // namespace geomapprox
