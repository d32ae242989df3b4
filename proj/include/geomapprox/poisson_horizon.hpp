#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "geomapprox/pmf.hpp"

namespace geomapprox {

// Ageing class of a horizon: new-better-than-used, new-worse-than-used.
enum class AgingTag { nbu, nwu, neither, unknown };

// The random time tau over which a rate-lambda Poisson process is observed.
class HorizonLaw {
public:
    struct Exponential {
        double rate;
    };
    // Gamma with shape beta and unit mean (rate beta).
    struct GammaUnitMean {
        double shape;
    };
    struct Uniform {
        double a;
        double b;
    };
    // A law known only through its Laplace transform and mean. The survival
    // function is optional and enables the sigma-law utilities.
    struct Custom {
        std::function<double(double)> laplace;
        double mean;
        AgingTag tag;
        std::function<double(double)> survival;
    };
    using Kind = std::variant<Exponential, GammaUnitMean, Uniform, Custom>;

    static HorizonLaw exponential(double rate);
    static HorizonLaw gamma_unit_mean(double shape);
    static HorizonLaw uniform(double a, double b);
    static HorizonLaw custom(std::function<double(double)> laplace, double mean, AgingTag tag,
                             std::function<double(double)> survival = {});

    const Kind& kind() const noexcept { return kind_; }
    double mean() const;
    bool is_nbu() const;
    bool is_nwu() const;
    std::string describe() const;

private:
    explicit HorizonLaw(Kind kind) : kind_(std::move(kind)) {}
    Kind kind_;
};

// p = E[exp(-lambda tau)] = P(tau < xi_1).
double geom_param(const HorizonLaw& h, double lambda);

// Exact law of N(tau). Exponential and gamma horizons are closed-form
// (geometric, negative binomial); uniform horizons use incomplete gamma differences.
Pmf exact_count_pmf(const HorizonLaw& h, double lambda, std::optional<std::size_t> horizon = std::nullopt,
                    const TruncationPolicy& policy = {});

// P(sigma > u) with L(sigma) = L(tau - xi_1 | tau > xi_1).
double sigma_survival(const HorizonLaw& h, double lambda, double u);

// E[sigma] = E[tau] / (1 - p) - 1 / lambda.
double sigma_mean(const HorizonLaw& h, double lambda);

// 1 - p (1 + lambda E[tau]); requires an NBU horizon.
double nbu_bound(const HorizonLaw& h, double lambda);

// p (1 + lambda E[tau]) - 1; requires an NWU horizon.
double nwu_bound(const HorizonLaw& h, double lambda);

// |1 - (1 + lambda)(1 + lambda / beta)^(-beta)| for each beta.
std::vector<std::pair<double, double>> gamma_bound_curve(double lambda, const std::vector<double>& betas);

// Bound versus exact distance for one horizon, the unit of every sweep.
struct HorizonCheck {
    double p = 0.0;
    double bound = 0.0;
    TvResult exact;
};

// Uses whichever of the NBU/NWU bounds the tag allows (the smaller when both).
HorizonCheck check_horizon(const HorizonLaw& h, double lambda, const TruncationPolicy& policy = {});

}  // namespace geomapprox
