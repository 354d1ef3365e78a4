#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "char_fn.hpp"
#include "errors.hpp"

namespace cfkit {

namespace detail {

// Exact integer power by squaring. Avoids exp(n log z) branch-cut trouble
// when PGFs are compounded (|z| can pass arbitrarily close to 0).
inline Complex ipow(Complex z, unsigned long long n) {
    Complex r(1.0, 0.0);
    while (n != 0) {
        if (n & 1ull) r *= z;
        z *= z;
        n >>= 1;
    }
    return r;
}

inline bool is_nonneg_integer(double x) {
    return x >= 0.0 && std::isfinite(x) && x == std::floor(x);
}

} // namespace detail

// A discrete claim-count distribution exposed through its probability
// generating function, evaluable on the closed complex unit disk. That is
// exactly what compounding needs: cf_S(t) = pgf_N(cf_X(t)).
class FrequencyModel {
public:
    using PgfFn = std::function<Complex(Complex)>;

    FrequencyModel(PgfFn pgf, MomentHints moments, double prob_zero, std::string family,
                   std::vector<double> params = {})
        : pgf_(std::move(pgf)), moments_(moments), prob_zero_(prob_zero),
          family_(std::move(family)), params_(std::move(params)) {
        if (!pgf_) throw invalid_argument_error("FrequencyModel: empty PGF rule");
    }

    Complex pgf(Complex z) const {
        if (z == Complex(1.0, 0.0)) return Complex(1.0, 0.0);
        return pgf_(z);
    }

    // Pr(N = 0), kept in closed form rather than re-evaluated.
    double prob_zero() const noexcept { return prob_zero_; }
    const MomentHints& moments() const noexcept { return moments_; }
    const std::string& family() const noexcept { return family_; }

    // Raw factory parameters; empty for models built from data.
    const std::vector<double>& params() const noexcept { return params_; }

    // Induced CF: cf_N(t) = pgf(e^{it}).
    CharFn cf() const {
        PgfFn g = pgf_;
        CharFn c([g](double t) { return g(std::polar(1.0, t)); });
        return c.with_moment_hints(moments_.mean, moments_.variance);
    }

    static FrequencyModel dirac(double mu) {
        if (!std::isfinite(mu))
            throw invalid_parameter_error("dirac: mu must be finite");
        PgfFn g;
        if (detail::is_nonneg_integer(mu)) {
            auto n = static_cast<unsigned long long>(mu);
            g = [n](Complex z) { return detail::ipow(z, n); };
        } else {
            // non-integer location: principal-branch power, z = 0 maps to 0
            g = [mu](Complex z) {
                if (z == Complex(0.0, 0.0)) return Complex(mu == 0.0 ? 1.0 : 0.0, 0.0);
                return std::exp(mu * std::log(z));
            };
        }
        return FrequencyModel(std::move(g), MomentHints{mu, 0.0},
                              mu == 0.0 ? 1.0 : 0.0, "dirac", {mu});
    }

    static FrequencyModel binomial(int n, double p) {
        if (n < 1) throw invalid_parameter_error("binomial: need n >= 1");
        if (!(p > 0.0 && p < 1.0))
            throw invalid_parameter_error("binomial: need p in (0,1)");
        auto un = static_cast<unsigned long long>(n);
        PgfFn g = [un, p](Complex z) { return detail::ipow(1.0 - p + p * z, un); };
        return FrequencyModel(std::move(g), MomentHints{n * p, n * p * (1.0 - p)},
                              std::pow(1.0 - p, n), "binomial",
                              {static_cast<double>(n), p});
    }

    static FrequencyModel negative_binomial(double r, double p) {
        if (!(r > 0.0) || !std::isfinite(r))
            throw invalid_parameter_error("negative_binomial: need r > 0");
        if (!(p > 0.0 && p < 1.0))
            throw invalid_parameter_error("negative_binomial: need p in (0,1)");
        // pgf(z) = p^r (1-(1-p)z)^{-r}; 1-(1-p)z stays in the right half-plane
        // on the unit disk, so the principal power is single-valued there.
        double logp = std::log(p);
        PgfFn g = [r, p, logp](Complex z) {
            return std::exp(r * (logp - std::log(1.0 - (1.0 - p) * z)));
        };
        double q = 1.0 - p;
        return FrequencyModel(std::move(g), MomentHints{r * q / p, r * q / (p * p)},
                              std::pow(p, r), "negative-binomial", {r, p});
    }

    static FrequencyModel poisson(double lambda) {
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            throw invalid_parameter_error("poisson: need lambda > 0");
        PgfFn g = [lambda](Complex z) { return std::exp(lambda * (z - 1.0)); };
        return FrequencyModel(std::move(g), MomentHints{lambda, lambda},
                              std::exp(-lambda), "poisson", {lambda});
    }

private:
    PgfFn pgf_;
    MomentHints moments_;
    double prob_zero_;
    std::string family_;
    std::vector<double> params_;
};

// String-keyed factory used by the CLI and config layer.
inline FrequencyModel make_frequency_model(const std::string& family,
                                           const std::vector<double>& params) {
    auto need = [&](std::size_t n) {
        if (params.size() != n)
            throw invalid_parameter_error("frequency family '" + family + "' expects " +
                                          std::to_string(n) + " parameter(s), got " +
                                          std::to_string(params.size()));
    };
    if (family == "dirac") {
        need(1);
        return FrequencyModel::dirac(params[0]);
    }
    if (family == "binomial") {
        need(2);
        double n = params[0];
        if (!detail::is_nonneg_integer(n))
            throw invalid_parameter_error("binomial: n must be a nonnegative integer");
        return FrequencyModel::binomial(static_cast<int>(n), params[1]);
    }
    if (family == "negative-binomial" || family == "negbinomial") {
        need(2);
        return FrequencyModel::negative_binomial(params[0], params[1]);
    }
    if (family == "poisson") {
        need(1);
        return FrequencyModel::poisson(params[0]);
    }
    throw invalid_parameter_error("unknown frequency family '" + family + "'");
}

} // namespace cfkit
