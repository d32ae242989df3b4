#pragma once

#include <json.hpp>

#include "geomapprox/pmf.hpp"

namespace geomapprox {

// {"probs": [...], "tail_mass": x}; tail_mass defaults to 0 when absent.
nlohmann::json pmf_to_json(const Pmf& pmf);
Pmf pmf_from_json(const nlohmann::json& j);

}  // namespace geomapprox
