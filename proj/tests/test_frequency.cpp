#include <catch2/catch_amalgamated.hpp>

#include <cfkit/cfkit.hpp>

#include <cmath>

using namespace cfkit;

TEST_CASE("pgf at one is exactly one for every family", "[frequency]") {
    std::vector<FrequencyModel> models = {
        FrequencyModel::dirac(4.0), FrequencyModel::binomial(7, 0.3),
        FrequencyModel::negative_binomial(2.5, 0.4), FrequencyModel::poisson(3.2)};
    for (const auto& m : models) {
        Complex v = m.pgf(Complex(1.0, 0.0));
        REQUIRE(v.real() == 1.0);
        REQUIRE(v.imag() == 0.0);
    }
}

TEST_CASE("pgf values match the closed forms on the unit disk", "[frequency]") {
    Complex z(0.35, -0.4);

    auto dir = FrequencyModel::dirac(3.0);
    REQUIRE(std::abs(dir.pgf(z) - z * z * z) < 1e-15);

    auto bin = FrequencyModel::binomial(5, 0.25);
    Complex base = 0.75 + 0.25 * z;
    REQUIRE(std::abs(bin.pgf(z) - std::pow(base, 5)) < 1e-14);

    auto nb = FrequencyModel::negative_binomial(2.5, 0.4);
    Complex expect = std::pow(Complex(0.4, 0.0), 2.5) * std::pow(1.0 - 0.6 * z, -2.5);
    REQUIRE(std::abs(nb.pgf(z) - expect) < 1e-14);

    auto poi = FrequencyModel::poisson(3.0);
    REQUIRE(std::abs(poi.pgf(z) - std::exp(3.0 * (z - 1.0))) < 1e-14);
}

TEST_CASE("prob_zero equals the pgf at the origin", "[frequency]") {
    auto check = [](const FrequencyModel& m) {
        REQUIRE(m.prob_zero() ==
                Catch::Approx(m.pgf(Complex(0.0, 0.0)).real()).margin(1e-15));
    };
    check(FrequencyModel::dirac(0.0));
    check(FrequencyModel::dirac(6.0));
    check(FrequencyModel::binomial(9, 0.2));
    check(FrequencyModel::negative_binomial(1.5, 0.3));
    check(FrequencyModel::poisson(2.0));
    REQUIRE(FrequencyModel::poisson(2.0).prob_zero() == Catch::Approx(std::exp(-2.0)));
}

TEST_CASE("induced CF is the pgf evaluated on the unit circle", "[frequency]") {
    auto nb = FrequencyModel::negative_binomial(3.0, 0.55);
    CharFn cf = nb.cf();
    for (double t : {-2.7, -0.4, 0.9, 14.0}) {
        Complex expect = nb.pgf(std::polar(1.0, t));
        REQUIRE(std::abs(cf.eval(t) - expect) < 1e-14);
    }
    REQUIRE(cf.moment_hints().has_value());
    double q = 0.45, p = 0.55;
    REQUIRE(cf.moment_hints()->mean == Catch::Approx(3.0 * q / p).epsilon(1e-14));
    REQUIRE(cf.moment_hints()->variance == Catch::Approx(3.0 * q / (p * p)).epsilon(1e-14));
}

TEST_CASE("closed-form moments per family", "[frequency]") {
    auto poi = FrequencyModel::poisson(4.2);
    REQUIRE(poi.moments().mean == Catch::Approx(4.2));
    REQUIRE(poi.moments().variance == Catch::Approx(4.2));

    auto bin = FrequencyModel::binomial(10, 0.3);
    REQUIRE(bin.moments().mean == Catch::Approx(3.0));
    REQUIRE(bin.moments().variance == Catch::Approx(2.1));

    auto dir = FrequencyModel::dirac(5.0);
    REQUIRE(dir.moments().mean == 5.0);
    REQUIRE(dir.moments().variance == 0.0);
}

TEST_CASE("invalid frequency parameters are rejected", "[frequency]") {
    REQUIRE_THROWS_AS(FrequencyModel::binomial(0, 0.5), invalid_parameter_error);
    REQUIRE_THROWS_AS(FrequencyModel::binomial(4, 0.0), invalid_parameter_error);
    REQUIRE_THROWS_AS(FrequencyModel::binomial(4, 1.0), invalid_parameter_error);
    REQUIRE_THROWS_AS(FrequencyModel::negative_binomial(-1.0, 0.5), invalid_parameter_error);
    REQUIRE_THROWS_AS(FrequencyModel::negative_binomial(2.0, 1.5), invalid_parameter_error);
    REQUIRE_THROWS_AS(FrequencyModel::poisson(0.0), invalid_parameter_error);
    REQUIRE_THROWS_AS(FrequencyModel::poisson(-3.0), invalid_parameter_error);
    REQUIRE_THROWS_AS(FrequencyModel::dirac(std::nan("")), invalid_parameter_error);
}

TEST_CASE("string factory dispatches families and validates arity", "[frequency]") {
    auto m = make_frequency_model("poisson", {2.5});
    REQUIRE(m.family() == "poisson");
    REQUIRE(m.params() == std::vector<double>{2.5});
    REQUIRE(make_frequency_model("negbinomial", {2.0, 0.3}).family() == "negative-binomial");
    REQUIRE(make_frequency_model("dirac", {7.0}).family() == "dirac");
    REQUIRE(make_frequency_model("binomial", {6.0, 0.4}).family() == "binomial");
    REQUIRE_THROWS_AS(make_frequency_model("poisson", {1.0, 2.0}), invalid_parameter_error);
    REQUIRE_THROWS_AS(make_frequency_model("binomial", {6.5, 0.4}), invalid_parameter_error);
    REQUIRE_THROWS_AS(make_frequency_model("zeta", {1.0}), invalid_parameter_error);
}
