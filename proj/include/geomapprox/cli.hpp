#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "geomapprox/pmf.hpp"

namespace geomapprox::cli {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr const char* kOutDirEnv = "GEOMAPPROX_OUT_DIR";

enum ExitCode : int { kOk = 0, kVerificationFailure = 1, kValidationError = 2, kIoError = 3 };

// Entry point shared by the executable and the tests. args excludes the
// program name. CSV goes to `out` unless --output names a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "poisson:0.5" -> ("poisson", {0.5}). Throws ValidationError.
struct FamilySpec {
    std::string name;
    std::vector<double> params;
};
FamilySpec parse_family(std::string_view text);

// Count laws: geom:p, poisson:mean, negbin:shape,success.
Pmf count_law_from_family(const FamilySpec& spec, const TruncationPolicy& policy);
// Positive summand laws: uniform:lo,hi, point:k, geom1:p (1 + Geom(p)).
Pmf summand_law_from_family(const FamilySpec& spec, const TruncationPolicy& policy);

// {"cases": [...]} exercised by `verify` when no --ensemble is given.
nlohmann::json default_ensemble();

// %.17g.
std::string format_number(double x);

}  // namespace geomapprox::cli
