#include "geomapprox/pmf_json.hpp"

#include <vector>

#include "geomapprox/errors.hpp"

namespace geomapprox {

nlohmann::json pmf_to_json(const Pmf& pmf) {
    const auto probs = pmf.probs();
    return {{"probs", std::vector<double>(probs.begin(), probs.end())}, {"tail_mass", pmf.tail_mass()}};
}

Pmf pmf_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("probs") || !j.at("probs").is_array()) {
        throw ValidationError("pmf json: expected an object with a \"probs\" array");
    }
    std::vector<double> probs;
    probs.reserve(j.at("probs").size());
    for (const auto& v : j.at("probs")) {
        if (!v.is_number()) throw ValidationError("pmf json: \"probs\" must hold numbers");
        probs.push_back(v.get<double>());
    }
    double tail = 0.0;
    if (j.contains("tail_mass")) {
        if (!j.at("tail_mass").is_number()) throw ValidationError("pmf json: \"tail_mass\" must be a number");
        tail = j.at("tail_mass").get<double>();
    }
    return Pmf::from_probs(std::move(probs), tail);
}

}  // namespace geomapprox
