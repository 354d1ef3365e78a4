#include <catch2/catch_amalgamated.hpp>

#include <cfkit/cfkit.hpp>

#include <string>
#include <vector>

using namespace cfkit;

// Exercises the bundled Danish fire-loss dataset end to end: descriptive
// statistics, the peaks-over-threshold tail fit, and the two published
// value-at-risk pipelines (fully nonparametric, and empirical body with a
// fitted GPD tail).

#ifndef CFKIT_DATA_DIR
#define CFKIT_DATA_DIR "data"
#endif

namespace {

const std::string kLosses = std::string(CFKIT_DATA_DIR) + "/danish_fire_losses.txt";
const std::string kCounts = std::string(CFKIT_DATA_DIR) + "/danish_claim_counts.txt";

const ClaimSample& losses() {
    static ClaimSample s = load_claims(kLosses, SampleKind::severity);
    return s;
}

const ClaimSample& counts() {
    static ClaimSample s = load_claims(kCounts, SampleKind::frequency);
    return s;
}

} // namespace

TEST_CASE("fire-loss descriptive statistics", "[danish]") {
    auto s = summarize(losses().values());
    REQUIRE(s.n == 2167);
    REQUIRE(s.mean == Catch::Approx(3.39).margin(0.01));
    REQUIRE(s.sd == Catch::Approx(8.51).margin(0.01));
    REQUIRE(s.skewness == Catch::Approx(18.74).margin(0.1));
    REQUIRE(s.kurtosis == Catch::Approx(485.65).margin(1.0));
}

TEST_CASE("claim counts split into calm and busy sub-periods", "[danish]") {
    auto cs = counts().values();
    REQUIRE(cs.size() == 11);
    double total = 0.0;
    for (double c : cs) total += c;
    REQUIRE(total == 2167.0);
    double first = 0.0, last = 0.0;
    for (int i = 0; i < 5; ++i) first += cs[static_cast<std::size_t>(i)];
    for (int i = 5; i < 11; ++i) last += cs[static_cast<std::size_t>(i)];
    REQUIRE(first / 5.0 == Catch::Approx(166.6).margin(0.05));
    REQUIRE(last / 6.0 == Catch::Approx(222.3).margin(0.05));
}

TEST_CASE("tail fit above the 95 percent threshold", "[danish]") {
    auto fit = fit_gpd_tail(losses(), 0.95);
    REQUIRE(fit.theta == Catch::Approx(10.0203).margin(0.001));
    REQUIRE(fit.n_excesses == 108);
    REQUIRE(fit.xi == Catch::Approx(0.4890).margin(0.005));
    REQUIRE(fit.sigma == Catch::Approx(7.1082).margin(0.05));
}

TEST_CASE("nonparametric annual loss quantiles", "[danish]") {
    auto agg = compound_cf(empirical_pgf(counts()), empirical_cf(losses()));
    auto q = quantiles(agg, {0.9, 0.99, 0.999});
    REQUIRE(q[0] == Catch::Approx(872.9).epsilon(0.01));
    REQUIRE(q[1] == Catch::Approx(1112.8).epsilon(0.01));
    REQUIRE(q[2] == Catch::Approx(1319.6).epsilon(0.01));
}

TEST_CASE("annual loss quantiles with a fitted tail", "[danish]") {
    auto fit = fit_gpd_tail(losses(), 0.95);
    auto sev = tail_mixture_cf(losses(), 0.95, fit);
    auto agg = compound_cf(empirical_pgf(counts()), sev);
    InversionOptions opts;
    opts.six_sigma_k = 15.0;     // the fitted tail is far heavier than the body
    opts.quadrature_n = 1 << 16; // resolve the long support
    InversionDiagnostics diag;
    invert_cdf(agg, {900.0}, opts, &diag);
    REQUIRE(diag.n == (1 << 16)); // the tail rule is already satisfied there
    auto q = quantiles(agg, {0.9, 0.99, 0.999}, opts);
    REQUIRE(q[0] == Catch::Approx(847.96).epsilon(0.015));
    REQUIRE(q[1] == Catch::Approx(1156.8).epsilon(0.015));
    REQUIRE(q[2] == Catch::Approx(2063.3).epsilon(0.015));
}

TEST_CASE("config-driven run over the bundled dataset", "[danish]") {
    RunConfig cfg;
    cfg.frequency_file = kCounts;
    cfg.severity_file = kLosses;
    cfg.probs = {0.9, 0.99, 0.999};
    auto out = run_compute(cfg);
    REQUIRE(out.result.quantiles[0] == Catch::Approx(872.9).epsilon(0.01));
    REQUIRE(out.result.quantiles[2] == Catch::Approx(1319.6).epsilon(0.01));
    REQUIRE(out.frequency_desc == "empirical counts (n=11)");
}
