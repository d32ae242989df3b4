#include "geomapprox/markov_json.hpp"

#include <json.hpp>

#include "geomapprox/errors.hpp"
#include "geomapprox/pmf_json.hpp"

namespace geomapprox {

MarkovModel markov_model_from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("markov model: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("P") || !doc.contains("A")) {
        throw ValidationError("markov model: expected an object with keys P and A");
    }
    try {
        const auto rows = doc.at("P").get<std::vector<std::vector<double>>>();
        if (rows.empty()) throw ValidationError("markov model: P is empty");
        Eigen::MatrixXd p(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) throw ValidationError("markov model: P must be square");
            for (std::size_t j = 0; j < rows.size(); ++j) {
                p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
            }
        }
        auto target = doc.at("A").get<std::vector<std::size_t>>();
        MarkovStart start = StationaryStart{};
        if (doc.contains("F") || doc.contains("T")) {
            TranslatedStart ts;
            if (doc.contains("F")) {
                ts.initial = doc.at("F").get<std::vector<double>>();
            } else {
                const Eigen::VectorXd pi = stationary(p);
                ts.initial.assign(pi.data(), pi.data() + pi.size());
            }
            if (doc.contains("T")) ts.translation = pmf_from_json(doc.at("T"));
            start = std::move(ts);
        }
        return MarkovModel::create(std::move(p), std::move(target), std::move(start));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("markov model: ") + e.what());
    }
}

}  // namespace geomapprox
