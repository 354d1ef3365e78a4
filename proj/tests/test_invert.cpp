#include <catch2/catch_amalgamated.hpp>

#include <cfkit/cfkit.hpp>

#include "oracles.hpp"

#include <cmath>
#include <string>

using namespace cfkit;

namespace {

CharFn standard_normal_cf() {
    CharFn cf([](double t) { return Complex(std::exp(-0.5 * t * t), 0.0); });
    return cf.with_moment_hints(0.0, 1.0);
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return xs;
}

} // namespace

TEST_CASE("six-sigma grid selection on the standard normal", "[invert]") {
    auto g = choose_grid(standard_normal_cf());
    REQUIRE(g.a == Catch::Approx(-6.0).margin(1e-12));
    REQUIRE(g.b == Catch::Approx(6.0).margin(1e-12));
    REQUIRE(g.delta == Catch::Approx(2.0 * M_PI / 12.0).epsilon(1e-14));
    REQUIRE(g.n == 1024); // gaussian tail is already negligible at the first T
    REQUIRE(g.tail_magnitude < 1e-12);
    REQUIRE(!g.capped);
    REQUIRE(g.mean == 0.0);
    REQUIRE(g.variance == 1.0);
}

TEST_CASE("tail rule doubles N until |cf(T)|/T is small", "[invert]") {
    auto g = choose_grid(make_severity_cf(SeverityParams::exponential(1.0)));
    // |cf(T)|/T ~ 1/T^2 < 1e-12 forces T ~ 1e6, i.e. N = 2^21 at this delta
    REQUIRE(g.n == (1L << 21));
    REQUIRE(g.tail_magnitude < 1e-12);
    REQUIRE(!g.capped);
}

TEST_CASE("node cap is recorded when the tail never settles", "[invert]") {
    // point mass: |cf| = 1 for every t, so |cf(T)|/T cannot reach epsilon
    auto cf = empirical_cf(ClaimSample({1.0}, SampleKind::severity));
    InversionOptions opts;
    opts.support = std::make_pair(0.0, 2.0);
    auto g = choose_grid(cf, opts);
    REQUIRE(g.capped);
    REQUIRE(g.n == (1L << 22));
}

TEST_CASE("explicit support and explicit T are honored", "[invert]") {
    InversionOptions opts;
    opts.support = std::make_pair(0.0, 40.0);
    opts.t_max = 100.0;
    auto g = choose_grid(make_severity_cf(SeverityParams::exponential(1.0)), opts);
    REQUIRE(g.a == 0.0);
    REQUIRE(g.b == 40.0);
    double delta = 2.0 * M_PI / 40.0;
    REQUIRE(g.delta == Catch::Approx(delta).epsilon(1e-14));
    REQUIRE(g.n == static_cast<long>(std::ceil(100.0 / delta)));
    REQUIRE(!g.capped);
}

TEST_CASE("compound support is clamped at zero before delta is fixed", "[invert]") {
    InversionOptions opts;
    opts.is_compound = true;
    auto g = choose_grid(make_severity_cf(SeverityParams::exponential(1.0)), opts);
    REQUIRE(g.a == 0.0);
    REQUIRE(g.b == Catch::Approx(7.0).margin(1e-12));
    REQUIRE(g.delta == Catch::Approx(2.0 * M_PI / 7.0).epsilon(1e-14));
}

TEST_CASE("degenerate variance asks for an explicit support", "[invert]") {
    CharFn flat([](double) { return Complex(1.0, 0.0); }); // point mass at 0
    try {
        choose_grid(flat);
        FAIL("expected a throw");
    } catch (const degenerate_support_error& e) {
        REQUIRE(std::string(e.what()).find("support") != std::string::npos);
    }
}

TEST_CASE("inversion option validation", "[invert]") {
    auto cf = standard_normal_cf();
    InversionOptions o;
    o.quadrature_n = 1;
    REQUIRE_THROWS_AS(choose_grid(cf, o), invalid_argument_error);
    o = {};
    o.six_sigma_k = 0.0;
    REQUIRE_THROWS_AS(choose_grid(cf, o), invalid_argument_error);
    o = {};
    o.tail_epsilon = -1.0;
    REQUIRE_THROWS_AS(choose_grid(cf, o), invalid_argument_error);
    o = {};
    o.support = std::make_pair(3.0, 3.0);
    REQUIRE_THROWS_AS(choose_grid(cf, o), invalid_argument_error);
    o = {};
    o.t_max = -5.0;
    REQUIRE_THROWS_AS(choose_grid(cf, o), invalid_argument_error);
    REQUIRE_THROWS_AS(invert_pdf(cf, {std::nan("")}), invalid_argument_error);
}

TEST_CASE("standard normal density and distribution values", "[invert]") {
    auto cf = standard_normal_cf();
    REQUIRE(invert_pdf(cf, {0.0})[0] ==
            Catch::Approx(1.0 / std::sqrt(2.0 * M_PI)).margin(1e-6));
    // 0.95 within 1e-6; the residual is dominated by the rounded quantile
    REQUIRE(invert_cdf(cf, {1.644854})[0] == Catch::Approx(0.95).margin(1e-6));
}

TEST_CASE("gamma(2,1) density at one", "[invert]") {
    auto cf = make_severity_cf(SeverityParams::gamma(2.0, 1.0));
    REQUIRE(invert_pdf(cf, {1.0})[0] == Catch::Approx(std::exp(-1.0)).margin(1e-6));
}

TEST_CASE("exponential distribution function at one", "[invert]") {
    auto cf = make_severity_cf(SeverityParams::exponential(1.0));
    // default range rule leaves a wraparound floor of exp(-(x+B-A)) ~ 2.3e-6
    // at this point; the value collapses once the range is widened
    REQUIRE(invert_cdf(cf, {1.0})[0] ==
            Catch::Approx(1.0 - std::exp(-1.0)).margin(5e-6));
    InversionOptions wide;
    wide.six_sigma_k = 15.0;
    REQUIRE(invert_cdf(cf, {1.0}, wide)[0] ==
            Catch::Approx(1.0 - std::exp(-1.0)).margin(1e-9));
}

TEST_CASE("exponential quantile at 1 - 1/e", "[invert]") {
    auto cf = make_severity_cf(SeverityParams::exponential(1.0));
    double p = 1.0 - std::exp(-1.0);
    // same wraparound floor as the cdf, amplified by 1/pdf at the root
    REQUIRE(quantiles(cf, {p})[0] == Catch::Approx(1.0).margin(2e-5));
    InversionOptions wide;
    wide.six_sigma_k = 15.0;
    REQUIRE(quantiles(cf, {p}, wide)[0] == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("full normal inversion matches the error-function oracle", "[invert]") {
    auto r = invert_distribution(standard_normal_cf(), linspace(-5.0, 5.0, 101),
                                 {0.025, 0.5, 0.975});
    for (std::size_t i = 0; i < r.x_grid.size(); ++i) {
        REQUIRE(r.pdf[i] == Catch::Approx(oracles::normal_pdf(r.x_grid[i])).margin(1e-6));
        REQUIRE(r.cdf[i] == Catch::Approx(oracles::normal_cdf(r.x_grid[i])).margin(1e-6));
    }
    REQUIRE(r.quantiles[0] == Catch::Approx(-1.959963985).margin(1e-6));
    REQUIRE(r.quantiles[1] == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(r.quantiles[2] == Catch::Approx(1.959963985).margin(1e-6));
    REQUIRE(r.mean_estimate == 0.0);
    REQUIRE(r.var_estimate == 1.0);
    REQUIRE(r.diagnostics.pdf_negative_count == 0);
}

TEST_CASE("quantile then cdf lands back on the probability", "[invert][property]") {
    InversionOptions opts;
    auto check = [&opts](const CharFn& cf) {
        for (double p : {0.1, 0.5, 0.9, 0.99}) {
            double q = quantiles(cf, {p}, opts)[0];
            double c = invert_cdf(cf, {q}, opts)[0];
            REQUIRE(std::abs(c - p) < 1e-6);
        }
    };
    check(standard_normal_cf());
    check(compound_cf(FrequencyModel::poisson(10.0),
                      make_severity_cf(SeverityParams::exponential(1.0))));
}

TEST_CASE("default x grid spans the chosen support with 201 points", "[invert]") {
    auto r = invert_distribution(standard_normal_cf(), {}, {});
    REQUIRE(r.x_grid.size() == 201);
    REQUIRE(r.x_grid.front() == Catch::Approx(-6.0).margin(1e-12));
    REQUIRE(r.x_grid.back() == Catch::Approx(6.0).margin(1e-12));
    REQUIRE(std::is_sorted(r.cdf.begin(), r.cdf.end()));
    for (double v : r.cdf) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
    }
}

TEST_CASE("one grid evaluation pass serves pdf, cdf and quantiles", "[invert][property]") {
    long lambda_calls = 0;
    CharFn counting([&lambda_calls](double t) {
        ++lambda_calls;
        return Complex(std::exp(-0.5 * t * t), 0.0);
    });
    auto hinted = counting.with_moment_hints(0.0, 1.0);
    auto r = invert_distribution(hinted, {}, {0.25, 0.5, 0.75});
    // t_j = j delta for j = 0..N; t = 0 never reaches the rule
    REQUIRE(r.diagnostics.cf_evaluations == r.diagnostics.n + 1);
    REQUIRE(lambda_calls == r.diagnostics.n);
}

TEST_CASE("atom at zero is split out and recombined", "[invert]") {
    oracles::CompoundPoissonExp oracle{2.0, 1.0};
    auto agg = compound_cf(FrequencyModel::poisson(2.0),
                           make_severity_cf(SeverityParams::exponential(1.0)));
    InversionOptions opts;
    opts.six_sigma_k = 15.0; // push the wraparound floor below the tolerances
    InversionDiagnostics diag;
    auto cdf = invert_cdf(agg, {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}, opts, &diag);
    REQUIRE(diag.atom_split);
    REQUIRE(diag.prob_zero == Catch::Approx(std::exp(-2.0)).epsilon(1e-12));
    REQUIRE(cdf[0] == Catch::Approx(std::exp(-2.0)).margin(5e-6));
    double xs[] = {0.0, 0.5, 1.0, 2.0, 5.0, 10.0};
    for (int i = 1; i < 6; ++i)
        REQUIRE(cdf[static_cast<std::size_t>(i)] ==
                Catch::Approx(oracle.cdf(xs[i])).margin(5e-6));
    auto pdf = invert_pdf(agg, {0.5, 1.0, 2.0, 5.0}, opts);
    double ps[] = {0.5, 1.0, 2.0, 5.0};
    for (int i = 0; i < 4; ++i)
        REQUIRE(pdf[static_cast<std::size_t>(i)] ==
                Catch::Approx(oracle.pdf(ps[i])).margin(5e-6));
}

TEST_CASE("compound values below zero are hard zeros", "[invert]") {
    auto agg = compound_cf(FrequencyModel::poisson(2.0),
                           make_severity_cf(SeverityParams::exponential(1.0)));
    REQUIRE(invert_cdf(agg, {-1.0})[0] == 0.0);
    REQUIRE(invert_pdf(agg, {-1.0})[0] == 0.0);
}

TEST_CASE("probabilities at or inside the atom map to zero loss", "[invert]") {
    auto agg = compound_cf(FrequencyModel::poisson(2.0),
                           make_severity_cf(SeverityParams::exponential(1.0)));
    double p0 = std::exp(-2.0);
    auto q = quantiles(agg, {p0 / 2.0, p0 * 0.999});
    REQUIRE(q[0] == 0.0);
    REQUIRE(q[1] == 0.0);
    // just above the atom the quantile leaves zero but stays small
    InversionOptions opts;
    opts.six_sigma_k = 15.0;
    double qa = quantiles(agg, {p0 + 0.01}, opts)[0];
    REQUIRE(qa > 0.0);
    oracles::CompoundPoissonExp oracle{2.0, 1.0};
    REQUIRE(oracle.cdf(qa) == Catch::Approx(p0 + 0.01).margin(1e-5));
}

TEST_CASE("quantile probabilities outside (0,1) are rejected", "[invert]") {
    auto cf = standard_normal_cf();
    for (double p : {0.0, 1.0, -0.2, 1.3})
        REQUIRE_THROWS_AS(quantiles(cf, {p}), invalid_argument_error);
    REQUIRE_THROWS_AS(quantiles(cf, {std::nan("")}), invalid_argument_error);
}

TEST_CASE("unreachable probabilities surface as convergence errors", "[invert]") {
    // a support window that misses the mass leaves nothing to bracket
    InversionOptions opts;
    opts.support = std::make_pair(50.0, 60.0);
    try {
        quantiles(make_severity_cf(SeverityParams::exponential(1.0)), {0.9}, opts);
        FAIL("expected a throw");
    } catch (const convergence_error& e) {
        REQUIRE(std::string(e.what()).find("cdf(B)") != std::string::npos);
    }
}

TEST_CASE("oscillatory ringing is reported, not hidden", "[invert]") {
    // a point mass CF rings hard; the density must keep its raw negatives
    auto cf = FrequencyModel::dirac(5.0).cf();
    InversionOptions opts;
    opts.support = std::make_pair(0.0, 10.0);
    InversionDiagnostics diag;
    auto pdf = invert_pdf(cf, linspace(0.0, 10.0, 101), opts, &diag);
    bool any_negative = false;
    for (double v : pdf) any_negative = any_negative || v < 0.0;
    REQUIRE(any_negative);
    REQUIRE(diag.pdf_negative_count > 0);

    InversionDiagnostics cdiag;
    auto cdf = invert_cdf(cf, linspace(0.0, 10.0, 101), opts, &cdiag);
    REQUIRE(std::is_sorted(cdf.begin(), cdf.end()));
    for (double v : cdf) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
    }
    REQUIRE(cdiag.max_monotonicity_violation > 0.0);
}

TEST_CASE("non-finite CF values on the grid are reported", "[invert]") {
    CharFn bad([](double t) {
        if (std::abs(t) > 3.0) return Complex(std::nan(""), 0.0);
        return Complex(std::exp(-0.5 * t * t), 0.0);
    });
    auto hinted = bad.with_moment_hints(0.0, 1.0);
    REQUIRE_THROWS_AS(invert_cdf(hinted, {0.0}), numeric_failure_error);
}

TEST_CASE("stencil moment estimates reach 1e-4 relative accuracy", "[invert][moments]") {
    struct Case {
        CharFn cf;
        double mean, var;
    };
    Case cases[] = {
        {CharFn([](double t) { return Complex(std::exp(-0.5 * t * t), 0.0); }), 0.0, 1.0},
        {make_severity_cf(SeverityParams::gamma(2.0, 1.0)).without_moment_hints(), 2.0, 2.0},
        {FrequencyModel::poisson(5.0).cf().without_moment_hints(), 5.0, 5.0},
    };
    for (const auto& c : cases) {
        REQUIRE(!c.cf.moment_hints()); // these must exercise the stencil
        auto [m, v] = moments_by_differentiation(c.cf);
        if (c.mean == 0.0)
            REQUIRE(std::abs(m) < 1e-4);
        else
            REQUIRE(std::abs(m - c.mean) / c.mean < 1e-4);
        REQUIRE(std::abs(v - c.var) / c.var < 1e-4);
    }
}

TEST_CASE("point mass moments from the stencil", "[invert][moments]") {
    auto [m, v] = moments_by_differentiation(FrequencyModel::dirac(5.0).cf());
    REQUIRE(m == Catch::Approx(5.0).epsilon(1e-8));
    REQUIRE(std::abs(v) < 1e-4);
}

TEST_CASE("moment hints take precedence over the stencil", "[invert][moments]") {
    CharFn cf([](double t) { return Complex(std::exp(-0.5 * t * t), 0.0); });
    auto lied = cf.with_moment_hints(42.0, 9.0);
    auto [m, v] = estimate_moments(lied);
    REQUIRE(m == 42.0);
    REQUIRE(v == 9.0);
    auto [m2, v2] = estimate_moments(cf);
    REQUIRE(std::abs(m2) < 1e-4);
    REQUIRE(v2 == Catch::Approx(1.0).epsilon(1e-6));
    REQUIRE_THROWS_AS(moments_by_differentiation(cf, 0.0), invalid_argument_error);
    REQUIRE_THROWS_AS(moments_by_differentiation(cf, -1e-3), invalid_argument_error);
}

TEST_CASE("quantiles are nondecreasing in the probabilities", "[invert]") {
    auto agg = compound_cf(FrequencyModel::poisson(10.0),
                           make_severity_cf(SeverityParams::exponential(1.0)));
    auto r = invert_distribution(agg, {}, {0.99, 0.5, 0.9, 0.1, 0.5});
    REQUIRE(r.quantiles[3] <= r.quantiles[1]);
    REQUIRE(r.quantiles[1] <= r.quantiles[2]);
    REQUIRE(r.quantiles[2] <= r.quantiles[0]);
    REQUIRE(r.quantiles[1] == r.quantiles[4]);
    REQUIRE(r.diagnostics.newton_iterations.size() == 5);
}
