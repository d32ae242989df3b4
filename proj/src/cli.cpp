#include "geomapprox/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "geomapprox/errors.hpp"
#include "geomapprox/markov_hitting.hpp"
#include "geomapprox/markov_json.hpp"
#include "geomapprox/pmf_json.hpp"
#include "geomapprox/poisson_horizon.hpp"
#include "geomapprox/random_sums.hpp"
#include "geomapprox/ruin.hpp"
#include "geomapprox/surplus_simulation.hpp"

namespace geomapprox::cli {

namespace {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path);
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << text;
    os.flush();
    if (!os) throw IoError("cannot write " + path.string());
}

nlohmann::json parse_json(const std::string& text, const std::string& what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(what + ": " + e.what());
    }
}

Pmf read_pmf_file(const std::string& path) { return pmf_from_json(parse_json(read_file(path), path)); }

double parse_number(std::string_view text) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw ValidationError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::size_t as_index(double x, const std::string& what) {
    if (!(x >= 0.0) || x != std::floor(x) || x > 1e9) throw ValidationError(what + " must be a non-negative integer");
    return static_cast<std::size_t>(x);
}

void expect_params(const FamilySpec& spec, std::size_t count) {
    if (spec.params.size() != count) {
        throw ValidationError("family '" + spec.name + "' takes " + std::to_string(count) + " parameter(s)");
    }
}

class Csv {
public:
    Csv(std::ostream& os, double eps_tail) : os_(os) {
        os_ << "# eps_tail=" << format_number(eps_tail) << " version=" << kVersion << '\n';
    }

    Csv& header(std::initializer_list<std::string_view> names) {
        write_row(names);
        return *this;
    }

    template <class... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        ((os_ << (first ? "" : ",") << field(fields), first = false), ...);
        os_ << '\n';
    }

private:
    void write_row(std::initializer_list<std::string_view> names) {
        bool first = true;
        for (auto n : names) {
            os_ << (first ? "" : ",") << n;
            first = false;
        }
        os_ << '\n';
    }

    static std::string field(double x) { return format_number(x); }
    static std::string field(std::size_t x) { return std::to_string(x); }
    static std::string field(const std::string& s) { return s; }
    static std::string field(const char* s) { return s; }

    std::ostream& os_;
};

// --- verification ------------------------------------------------------------

constexpr double kVerifyFloor = 1e-12;

struct Check {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool holds() const { return lhs <= rhs + slack; }
};

Pmf pmf_or_family(const nlohmann::json& c, const std::string& key, bool summand, const TruncationPolicy& policy) {
    if (c.contains(key)) return pmf_from_json(c.at(key));
    const std::string fam_key = key.substr(0, key.find('_')) + "_family";
    if (!c.contains(fam_key)) throw ValidationError("case needs '" + key + "' or '" + fam_key + "'");
    const FamilySpec spec = parse_family(c.at(fam_key).get<std::string>());
    return summand ? summand_law_from_family(spec, policy) : count_law_from_family(spec, policy);
}

ClaimLaw claim_law_from_family(const FamilySpec& spec, const TruncationPolicy& policy) {
    if (spec.name == "poisson") {
        expect_params(spec, 1);
        return ClaimLaw::poisson(spec.params[0], policy);
    }
    if (spec.name == "geom") {
        expect_params(spec, 1);
        return ClaimLaw::geometric(spec.params[0], policy);
    }
    if (spec.name == "negbin") {
        expect_params(spec, 2);
        return ClaimLaw::gamma_mixed_poisson(spec.params[0], spec.params[1], policy);
    }
    if (spec.name == "support") {
        if (spec.params.empty()) throw ValidationError("support: needs at least one probability");
        return ClaimLaw::finite(spec.params);
    }
    throw ValidationError("unknown claim family '" + spec.name + "'");
}

void horizon_checks(const HorizonLaw& h, double lambda, const TruncationPolicy& policy, double scale,
                    const std::string& label, std::vector<Check>& out) {
    const HorizonCheck hc = check_horizon(h, lambda, policy);
    out.push_back({label + " exact_tv <= bound", hc.exact.value, scale * hc.bound, hc.exact.slack + kVerifyFloor});
}

void evaluate_case(const nlohmann::json& c, const TruncationPolicy& policy, double scale, std::vector<Check>& out) {
    if (!c.is_object() || !c.contains("kind")) throw ValidationError("ensemble case must be an object with a 'kind'");
    const std::string kind = c.at("kind").get<std::string>();
    if (kind == "gamma_horizon") {
        const double beta = c.at("beta").get<double>();
        const double lambda = c.at("lambda").get<double>();
        horizon_checks(HorizonLaw::gamma_unit_mean(beta), lambda, policy, scale,
                       "gamma_horizon(beta=" + format_number(beta) + ", lambda=" + format_number(lambda) + ")", out);
    } else if (kind == "uniform_horizon") {
        const double a = c.at("a").get<double>();
        const double b = c.at("b").get<double>();
        const double lambda = c.at("lambda").get<double>();
        horizon_checks(HorizonLaw::uniform(a, b), lambda, policy, scale,
                       "uniform_horizon(a=" + format_number(a) + ", b=" + format_number(b) +
                           ", lambda=" + format_number(lambda) + ")",
                       out);
    } else if (kind == "markov") {
        const MarkovModel model = markov_model_from_json(c.dump());
        const std::size_t n_max = c.contains("n_max") ? c.at("n_max").get<std::size_t>() : 200;
        const HittingCheck hc = check_hitting(model, n_max, policy);
        out.push_back({"markov(" + std::to_string(model.state_count()) + " states) exact_tv <= bound", hc.exact.value,
                       scale * hc.bound.bound, hc.exact.slack + kVerifyFloor});
    } else if (kind == "random_sum") {
        const RandomSumModel model = RandomSumModel::create(pmf_or_family(c, "n_law", false, policy),
                                                            pmf_or_family(c, "x_law", true, policy));
        const SumBound b = thm_sum_bound(model);
        const TvResult exact = exact_sum_tv(model, policy);
        out.push_back({"random_sum exact_tv <= bound", exact.value, scale * b.bound, exact.slack + kVerifyFloor});
        if (b.path == SumBoundPath::hazard_fast) {
            const SumBound g = general_sum_bound(model);
            const double fast = hazard_sum_bound(model);
            out.push_back({"random_sum |general - hazard|", std::abs(g.bound - fast), 0.0, 1e-9});
        }
    } else if (kind == "ruin") {
        const ClaimLaw claims = c.contains("eta") ? ClaimLaw::create(pmf_from_json(c.at("eta")))
                                                  : claim_law_from_family(parse_family(c.at("eta_family").get<std::string>()), policy);
        const std::size_t m_max = c.contains("m_max") ? c.at("m_max").get<std::size_t>() : 30;
        const PsiTable psi = psi_exact(claims, m_max, policy);
        const double slack = psi.slack + kVerifyFloor;
        for (std::size_t m = 1; m <= m_max; ++m) {
            const std::string tag = "ruin m=" + std::to_string(m);
            const RuinBound1 b1 = ruin_bound_1(claims, m);
            out.push_back({tag + " lower <= psi", b1.lower, psi.psi[m], slack});
            out.push_back({tag + " psi <= upper", psi.psi[m], scale * b1.upper, slack});
            const RuinBound2 b2 = ruin_bound_2(claims, m);
            if (b2.v_defined) out.push_back({tag + " |psi - center| <= err", std::abs(psi.psi[m] - b2.center), scale * b2.err, slack});
        }
    } else {
        throw ValidationError("unknown case kind '" + kind + "'");
    }
}

nlohmann::json markov_case(const Eigen::MatrixXd& p, const std::vector<std::size_t>& target) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(p.cols()));
        for (Eigen::Index j = 0; j < p.cols(); ++j) row[static_cast<std::size_t>(j)] = p(i, j);
        rows.push_back(row);
    }
    return {{"kind", "markov"}, {"P", rows}, {"A", target}};
}

// --- subcommands -------------------------------------------------------------

struct Globals {
    double eps_tail = 1e-12;
    std::string output;
    std::uint64_t seed = 1;

    TruncationPolicy policy() const {
        TruncationPolicy p;
        p.eps_tail = eps_tail;
        return p;
    }
};

void emit(const Globals& g, std::ostream& out, const std::string& text) {
    if (g.output.empty()) {
        out << text;
    } else {
        write_file(g.output, text);
    }
}

struct HorizonOptions {
    std::string family;
    std::vector<double> rate;
    std::vector<double> beta;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> lambda;
};

int cmd_poisson_horizon(const Globals& g, const HorizonOptions& o, std::ostream& out) {
    std::ostringstream buf;
    Csv csv(buf, g.eps_tail);
    const auto policy = g.policy();
    auto write = [&](auto&&... leading) {
        return [&, leading...](const HorizonLaw& h, double lambda) {
            const HorizonCheck hc = check_horizon(h, lambda, policy);
            csv.row(leading..., lambda, hc.p, hc.bound, hc.exact.value, hc.exact.slack);
        };
    };
    if (o.family == "exponential") {
        if (o.rate.empty()) throw ValidationError("--family exponential needs --rate");
        csv.header({"rate", "lambda", "p", "bound", "exact_tv", "slack"});
        for (double r : o.rate) {
            for (double l : o.lambda) write(r)(HorizonLaw::exponential(r), l);
        }
    } else if (o.family == "gamma") {
        if (o.beta.empty()) throw ValidationError("--family gamma needs --beta");
        csv.header({"beta", "lambda", "p", "bound", "exact_tv", "slack"});
        for (double b : o.beta) {
            for (double l : o.lambda) write(b)(HorizonLaw::gamma_unit_mean(b), l);
        }
    } else if (o.family == "uniform") {
        if (o.a.empty() || o.a.size() != o.b.size()) {
            throw ValidationError("--family uniform needs --a and --b with the same number of values");
        }
        csv.header({"a", "b", "lambda", "p", "bound", "exact_tv", "slack"});
        for (std::size_t i = 0; i < o.a.size(); ++i) {
            for (double l : o.lambda) write(o.a[i], o.b[i])(HorizonLaw::uniform(o.a[i], o.b[i]), l);
        }
    } else {
        throw ValidationError("unknown horizon family '" + o.family + "'");
    }
    emit(g, out, buf.str());
    return kOk;
}

int cmd_markov(const Globals& g, const std::string& model_path, std::size_t n_max, std::ostream& out) {
    const MarkovModel model = markov_model_from_json(read_file(model_path));
    const HittingCheck hc = check_hitting(model, n_max, g.policy());
    std::ostringstream buf;
    Csv csv(buf, g.eps_tail);
    csv.header({"p", "prob_w_lt_t", "series", "series_tail", "contraction_power", "contraction", "bound", "exact_tv",
                "slack"});
    const HittingBound& b = hc.bound;
    csv.row(b.p, b.prob_w_lt_t, b.series.value, b.series.tail_bound, b.series.contraction_power, b.series.contraction,
            b.bound, hc.exact.value, hc.exact.slack);
    emit(g, out, buf.str());
    return kOk;
}

struct RandomSumOptions {
    std::string n_law;
    std::string x_law;
    std::string n_family;
    std::string x_family;
};

int cmd_random_sum(const Globals& g, const RandomSumOptions& o, std::ostream& out) {
    const auto policy = g.policy();
    if (o.n_law.empty() == o.n_family.empty()) throw ValidationError("give exactly one of --n-law, --n-family");
    if (o.x_law.empty() == o.x_family.empty()) throw ValidationError("give exactly one of --x-law, --x-family");
    std::optional<FamilySpec> n_spec;
    if (!o.n_family.empty()) n_spec = parse_family(o.n_family);
    Pmf n = n_spec ? count_law_from_family(*n_spec, policy) : read_pmf_file(o.n_law);
    Pmf x = o.x_family.empty() ? read_pmf_file(o.x_law) : summand_law_from_family(parse_family(o.x_family), policy);
    const RandomSumModel model = RandomSumModel::create(std::move(n), std::move(x));
    const SumBound b = thm_sum_bound(model);
    const TvResult exact = exact_sum_tv(model, policy);

    std::ostringstream buf;
    Csv csv(buf, g.eps_tail);
    const std::string path = b.path == SumBoundPath::hazard_fast ? "hazard_fast" : "general";
    if (n_spec && n_spec->name == "geom") {
        const double r = n_spec->params[0];
        const MeanMatchedBound mm = mean_matched_bound(r, model.x_law());
        const TvResult mm_exact = tv_distance(compound_pmf(model.n_law(), model.x_law(), policy),
                                              geometric_pmf(GeometricLaw(mm.p_prime), std::nullopt, policy));
        csv.header({"p", "bound", "path", "exact_tv", "slack", "r", "p_prime", "mean_matched_bound",
                    "mean_matched_exact_tv", "mean_matched_slack"});
        csv.row(model.p(), b.bound, path, exact.value, exact.slack, r, mm.p_prime, mm.bound, mm_exact.value,
                mm_exact.slack);
    } else {
        csv.header({"p", "bound", "path", "exact_tv", "slack"});
        csv.row(model.p(), b.bound, path, exact.value, exact.slack);
    }
    emit(g, out, buf.str());
    return kOk;
}

struct RuinOptions {
    std::string eta;
    std::string eta_family;
    std::size_t m_max = 20;
    std::size_t mc_paths = 0;
};

int cmd_ruin(const Globals& g, const RuinOptions& o, std::ostream& out) {
    const auto policy = g.policy();
    if (o.eta.empty() == o.eta_family.empty()) throw ValidationError("give exactly one of --eta, --eta-family");
    const ClaimLaw claims = o.eta.empty() ? claim_law_from_family(parse_family(o.eta_family), policy)
                                          : ClaimLaw::create(read_pmf_file(o.eta));
    const auto rows = ruin_reports(claims, o.m_max, policy);
    std::ostringstream buf;
    Csv csv(buf, g.eps_tail);
    if (o.mc_paths == 0) {
        csv.header({"m", "psi_exact", "approx1", "err1", "approx2", "err2"});
        for (const auto& r : rows) csv.row(r.m, r.psi_exact, r.approx1, r.err1, r.approx2, r.err2);
    } else {
        csv.header({"m", "psi_exact", "approx1", "err1", "approx2", "err2", "psi_mc", "mc_std_error", "mc_residual"});
        SurplusSimulationConfig cfg;
        cfg.paths = o.mc_paths;
        cfg.seed = g.seed;
        for (const auto& r : rows) {
            const SurplusEstimate e = simulate_ruin(claims, r.m, cfg);
            csv.row(r.m, r.psi_exact, r.approx1, r.err1, r.approx2, r.err2, e.psi, e.std_error, e.residual_bound);
        }
    }
    emit(g, out, buf.str());
    return kOk;
}

int cmd_figures(const Globals& g, std::string out_dir, std::ostream& out) {
    if (out_dir.empty()) {
        const char* env = std::getenv(kOutDirEnv);
        out_dir = env != nullptr && *env != '\0' ? env : ".";
    }
    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    {
        std::ostringstream buf;
        Csv csv(buf, g.eps_tail);
        csv.header({"lambda", "beta", "bound"});
        std::vector<double> betas;
        for (int k = 1; k <= 50; ++k) betas.push_back(k / 10.0);
        for (double lambda : {0.5, 1.0, 2.0}) {
            for (const auto& [beta, bound] : gamma_bound_curve(lambda, betas)) csv.row(lambda, beta, bound);
        }
        write_file(dir / "figure1_gamma_horizon.csv", buf.str());
    }
    {
        std::ostringstream buf;
        Csv csv(buf, g.eps_tail);
        csv.header({"lambda", "error"});
        for (int k = 0; k <= 99; ++k) {
            const double lambda = k / 100.0;
            csv.row(lambda, mixed_poisson_error(PoissonClaims{lambda}));
        }
        write_file(dir / "figure2_poisson_claims.csv", buf.str());
    }
    {
        std::ostringstream buf;
        Csv csv(buf, g.eps_tail);
        csv.header({"alpha", "beta", "error"});
        for (double alpha : {0.5, 1.0, 1.5}) {
            for (int k = 1; k <= 256; ++k) {
                const double beta = k / 4.0;
                if (beta <= alpha) continue;
                csv.row(alpha, beta, mixed_poisson_error(GammaMixedClaims{alpha, beta}));
            }
        }
        write_file(dir / "figure3_gamma_mixed_claims.csv", buf.str());
    }
    out << (dir / "figure1_gamma_horizon.csv").string() << '\n'
        << (dir / "figure2_poisson_claims.csv").string() << '\n'
        << (dir / "figure3_gamma_mixed_claims.csv").string() << '\n';
    return kOk;
}

int cmd_verify(const Globals& g, const std::string& ensemble_path, double scale, std::ostream& out) {
    const nlohmann::json doc =
        ensemble_path.empty() ? default_ensemble() : parse_json(read_file(ensemble_path), ensemble_path);
    if (!doc.is_object() || !doc.contains("cases") || !doc.at("cases").is_array()) {
        throw ValidationError("ensemble: expected an object with a 'cases' array");
    }
    const auto& cases = doc.at("cases");
    if (cases.empty()) throw ValidationError("ensemble: no cases");
    const auto policy = g.policy();
    std::size_t total = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        std::vector<Check> checks;
        try {
            evaluate_case(cases[i], policy, scale, checks);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("ensemble case " + std::to_string(i) + ": " + e.what());
        }
        for (const auto& c : checks) {
            ++total;
            if (!c.holds()) {
                out << "FAIL case " << i << ": " << c.name << " lhs=" << format_number(c.lhs)
                    << " rhs=" << format_number(c.rhs) << " slack=" << format_number(c.slack) << '\n';
                return kVerificationFailure;
            }
        }
    }
    out << "ok: " << total << " checks in " << cases.size() << " cases\n";
    return kOk;
}

}  // namespace

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

FamilySpec parse_family(std::string_view text) {
    const auto colon = text.find(':');
    FamilySpec spec;
    spec.name = std::string(text.substr(0, colon));
    if (spec.name.empty()) throw ValidationError("empty family name in '" + std::string(text) + "'");
    if (colon == std::string_view::npos) return spec;
    std::string_view rest = text.substr(colon + 1);
    while (true) {
        const auto comma = rest.find(',');
        spec.params.push_back(parse_number(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return spec;
}

Pmf count_law_from_family(const FamilySpec& spec, const TruncationPolicy& policy) {
    if (spec.name == "geom") {
        expect_params(spec, 1);
        return geometric_pmf(GeometricLaw(spec.params[0]), std::nullopt, policy);
    }
    if (spec.name == "poisson") {
        expect_params(spec, 1);
        return poisson_pmf(spec.params[0], std::nullopt, policy);
    }
    if (spec.name == "negbin") {
        expect_params(spec, 2);
        return negative_binomial_pmf(spec.params[0], spec.params[1], std::nullopt, policy);
    }
    throw ValidationError("unknown count family '" + spec.name + "'");
}

Pmf summand_law_from_family(const FamilySpec& spec, const TruncationPolicy& policy) {
    if (spec.name == "uniform") {
        expect_params(spec, 2);
        return uniform_pmf(as_index(spec.params[0], "uniform lo"), as_index(spec.params[1], "uniform hi"));
    }
    if (spec.name == "point") {
        expect_params(spec, 1);
        return Pmf::point_mass(as_index(spec.params[0], "point"));
    }
    if (spec.name == "geom1") {
        expect_params(spec, 1);
        return geometric_pmf(GeometricLaw(spec.params[0]), std::nullopt, policy).shifted(1);
    }
    throw ValidationError("unknown summand family '" + spec.name + "'");
}

nlohmann::json default_ensemble() {
    nlohmann::json cases = nlohmann::json::array();
    for (double beta : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        for (double lambda : {0.5, 1.0, 2.0}) cases.push_back({{"kind", "gamma_horizon"}, {"beta", beta}, {"lambda", lambda}});
    }
    for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{0.5, 1.5}, std::pair{1.0, 3.0}}) {
        for (double lambda : {0.5, 1.0}) cases.push_back({{"kind", "uniform_horizon"}, {"a", a}, {"b", b}, {"lambda", lambda}});
    }

    CounterRng rng(20240601, 0);
    for (int c = 0; c < 24; ++c) {
        const auto n = static_cast<Eigen::Index>(3 + rng() % 4);
        Eigen::MatrixXd p(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) p(i, j) = 0.05 + rng.uniform();
            p.row(i) /= p.row(i).sum();
        }
        std::vector<std::size_t> target;
        while (target.empty() || target.size() == static_cast<std::size_t>(n)) {
            target.clear();
            for (Eigen::Index i = 0; i < n; ++i) {
                if (rng.uniform() < 0.4) target.push_back(static_cast<std::size_t>(i));
            }
        }
        cases.push_back(markov_case(p, target));
    }
    {
        Eigen::MatrixXd p(4, 4);
        for (Eigen::Index i = 0; i < 4; ++i) p.row(i) << 0.1, 0.2, 0.3, 0.4;
        cases.push_back(markov_case(p, {0, 2}));
    }

    const std::vector<std::pair<std::string, std::string>> sums = {
        {"geom:0.3", "uniform:1,3"}, {"geom:0.5", "point:1"},     {"geom:0.2", "geom1:0.6"},
        {"poisson:2", "uniform:1,2"}, {"negbin:2,0.5", "point:2"}, {"negbin:0.5,0.4", "uniform:1,4"},
    };
    for (const auto& [n, x] : sums) cases.push_back({{"kind", "random_sum"}, {"n_family", n}, {"x_family", x}});
    cases.push_back({{"kind", "random_sum"},
                     {"n_law", {{"probs", {0.3, 0.1, 0.2, 0.2, 0.2}}}},
                     {"x_law", {{"probs", {0.0, 0.5, 0.5}}}}});

    for (const char* fam : {"support:0.7,0,0.3", "support:0.5,0.25,0.25", "support:0.6,0.2,0.2", "geom:0.6",
                            "geom:0.75", "geom:0.9", "poisson:0.1", "poisson:0.3", "poisson:0.5", "negbin:1,3",
                            "negbin:0.5,2", "negbin:2,4"}) {
        cases.push_back({{"kind", "ruin"}, {"eta_family", fam}, {"m_max", 30}});
    }
    return {{"cases", cases}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Geometric approximation bounds with exact total-variation oracles", "geomapprox"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    Globals g;
    app.add_option("--eps-tail", g.eps_tail, "Tail mass allowed when truncating infinite supports")
        ->check(CLI::Range(1e-300, 1e-3));
    app.add_option("--output", g.output, "Write CSV to this file instead of stdout");
    app.add_option("--seed", g.seed, "Seed for Monte Carlo oracles");

    HorizonOptions ho;
    auto* ph = app.add_subcommand("poisson-horizon", "Poisson process over a random horizon");
    ph->fallthrough();
    ph->add_option("--family", ho.family, "exponential | gamma | uniform")->required();
    ph->add_option("--rate", ho.rate, "Exponential horizon rate(s)");
    ph->add_option("--beta", ho.beta, "Gamma shape(s), unit mean");
    ph->add_option("--a", ho.a, "Uniform lower end(s)");
    ph->add_option("--b", ho.b, "Uniform upper end(s)");
    ph->add_option("--lambda", ho.lambda, "Poisson rate(s)")->required();

    std::string model_path;
    std::size_t n_max = 200;
    auto* mk = app.add_subcommand("markov", "Hitting time of a finite Markov chain");
    mk->fallthrough();
    mk->add_option("--model", model_path, "JSON model file")->required();
    mk->add_option("--n-max", n_max, "Terms of the mixing series summed exactly");

    RandomSumOptions so;
    auto* rs = app.add_subcommand("random-sum", "Random sum of positive integer summands");
    rs->fallthrough();
    rs->add_option("--n-law", so.n_law, "JSON pmf file for N");
    rs->add_option("--x-law", so.x_law, "JSON pmf file for X");
    rs->add_option("--n-family", so.n_family, "geom:p | poisson:mean | negbin:shape,success");
    rs->add_option("--x-family", so.x_family, "uniform:lo,hi | point:k | geom1:p");

    RuinOptions ro;
    auto* ru = app.add_subcommand("ruin", "Compound binomial ruin probabilities");
    ru->fallthrough();
    ru->add_option("--eta", ro.eta, "JSON pmf file for the claim law");
    ru->add_option("--eta-family", ro.eta_family, "poisson:l | geom:a | negbin:a,b | support:p0,p1,...");
    ru->add_option("--m-max", ro.m_max, "Largest initial surplus")->check(CLI::PositiveNumber);
    ru->add_option("--mc-paths", ro.mc_paths, "Add a Monte Carlo estimate with this many paths");

    std::string out_dir;
    auto* fg = app.add_subcommand("figures", "Write the three figure CSVs");
    fg->fallthrough();
    fg->add_option("--out-dir", out_dir, std::string("Directory for the CSVs (default $") + kOutDirEnv + " or .)");

    std::string ensemble;
    double bound_scale = 1.0;
    auto* vf = app.add_subcommand("verify", "Check every bound against its exact oracle");
    vf->fallthrough();
    vf->add_option("--ensemble", ensemble, "JSON file {\"cases\": [...]}");
    vf->add_option("--bound-scale", bound_scale, "Multiply every upper bound (harness self-test)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return kOk;
        err << app.help();
        return kValidationError;
    }

    try {
        if (*ph) return cmd_poisson_horizon(g, ho, out);
        if (*mk) return cmd_markov(g, model_path, n_max, out);
        if (*rs) return cmd_random_sum(g, so, out);
        if (*ru) return cmd_ruin(g, ro, out);
        if (*fg) return cmd_figures(g, out_dir, out);
        if (*vf) return cmd_verify(g, ensemble, bound_scale, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kValidationError;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    }
    err << app.help();
    return kValidationError;
}

}  // namespace geomapprox::cli
