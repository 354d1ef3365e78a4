#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "empirical.hpp"
#include "errors.hpp"

namespace cfkit {

// Result of a peaks-over-threshold fit: GPD(xi, sigma) on the excesses above
// theta, where theta is the p-quantile of the severity sample.
struct GpdFit {
    double xi = 0.0;
    double sigma = 1.0;
    double theta = 0.0;
    double p = 0.0;
    std::size_t n_excesses = 0;
    double log_lik = 0.0;
};

// Sample p-quantile under the midpoint plotting-position rule: order
// statistics sit at probabilities (k - 0.5)/n, linear interpolation between
// them, constant beyond the end positions.
inline double select_threshold(const ClaimSample& sample, double p) {
    if (sample.kind() != SampleKind::severity)
        throw invalid_argument_error("select_threshold: expected a severity sample");
    if (!(p > 0.0 && p < 1.0))
        throw invalid_argument_error("select_threshold: need p in (0,1)");
    if (sample.size() < 2)
        throw invalid_argument_error("select_threshold: need at least 2 observations");
    std::vector<double> xs = sample.values();
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    const double pos = p * n - 0.5; // index position in sorted order
    if (pos <= 0.0) return xs.front();
    if (pos >= n - 1.0) return xs.back();
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - std::floor(pos);
    return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

// GPD log-likelihood over nonnegative excesses; xi = 0 uses the exponential
// limit. Support violations yield -inf rather than an exception so the
// optimizer can treat them as rejections.
inline double gpd_loglik(double xi, double sigma, const std::vector<double>& excesses) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw invalid_parameter_error("gpd_loglik: need sigma > 0");
    if (!(xi >= 0.0) || !std::isfinite(xi))
        throw invalid_parameter_error("gpd_loglik: need xi >= 0");
    const double neg_inf = -std::numeric_limits<double>::infinity();
    double ll = 0.0;
    if (xi == 0.0) {
        for (double z : excesses) {
            if (z < 0.0) return neg_inf;
            ll += -std::log(sigma) - z / sigma;
        }
        return ll;
    }
    for (double z : excesses) {
        double u = 1.0 + xi * z / sigma;
        if (z < 0.0 || u <= 0.0) return neg_inf;
        ll += -std::log(sigma) - (1.0 / xi + 1.0) * std::log(u);
    }
    return ll;
}

namespace detail {

// internal variant that also accepts xi < 0 (diagnostic fits)
inline double gpd_loglik_any(double xi, double sigma, const std::vector<double>& excesses) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    if (!(sigma > 0.0)) return neg_inf;
    if (xi == 0.0) return gpd_loglik(0.0, sigma, excesses);
    double ll = 0.0;
    for (double z : excesses) {
        double u = 1.0 + xi * z / sigma;
        if (z < 0.0 || u <= 0.0) return neg_inf;
        ll += -std::log(sigma) - (1.0 / xi + 1.0) * std::log(u);
    }
    return ll;
}

// Probability-weighted-moments starting point (Hosking-Wallis b0/b1 form).
inline std::array<double, 2> gpd_pwm_start(const std::vector<double>& excesses) {
    std::vector<double> z = excesses;
    std::sort(z.begin(), z.end());
    const double n = static_cast<double>(z.size());
    double b0 = 0.0, b1 = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        b0 += z[j];
        b1 += z[j] * (1.0 - (static_cast<double>(j) + 1.0 - 0.35) / n);
    }
    b0 /= n;
    b1 /= n;
    double denom = b0 - 2.0 * b1;
    if (denom <= 0.0) return {0.1, b0 > 0.0 ? b0 : 1.0};
    double xi = 2.0 - b0 / denom;
    double sigma = 2.0 * b0 * b1 / denom;
    if (!(sigma > 0.0)) sigma = b0;
    return {xi, sigma};
}

// Nelder-Mead on R^2 (reflection / expansion / contraction / shrink with the
// standard coefficients). Minimizes f; returns best point. Deterministic.
template <typename F>
inline std::array<double, 2> nelder_mead_2d(F&& f, std::array<double, 2> start,
                                            double ftol, int max_evals, int* evals_out) {
    using Pt = std::array<double, 2>;
    struct Vertex { Pt x; double fx; };
    int evals = 0;
    auto eval = [&](const Pt& x) {
        ++evals;
        return f(x);
    };
    std::array<Vertex, 3> s;
    s[0] = {start, eval(start)};
    for (int d = 0; d < 2; ++d) {
        Pt x = start;
        double step = 0.25 * std::abs(x[d]);
        if (step == 0.0) step = 0.25;
        x[d] += step;
        s[d + 1] = {x, eval(x)};
    }
    auto order = [&] {
        std::sort(s.begin(), s.end(),
                  [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; });
    };
    order();
    while (evals < max_evals) {
        if (std::abs(s[2].fx - s[0].fx) <= ftol * (std::abs(s[0].fx) + ftol)) break;
        Pt c{0.5 * (s[0].x[0] + s[1].x[0]), 0.5 * (s[0].x[1] + s[1].x[1])};
        auto blend = [&](double coef) {
            return Pt{c[0] + coef * (c[0] - s[2].x[0]), c[1] + coef * (c[1] - s[2].x[1])};
        };
        Pt xr = blend(1.0);
        double fr = eval(xr);
        if (fr < s[0].fx) {
            Pt xe = blend(2.0);
            double fe = eval(xe);
            if (fe < fr) s[2] = {xe, fe};
            else s[2] = {xr, fr};
        } else if (fr < s[1].fx) {
            s[2] = {xr, fr};
        } else {
            bool outside = fr < s[2].fx;
            Pt xc = outside ? blend(0.5)
                            : Pt{c[0] - 0.5 * (c[0] - s[2].x[0]),
                                 c[1] - 0.5 * (c[1] - s[2].x[1])};
            double fc = eval(xc);
            if (fc < (outside ? fr : s[2].fx)) {
                s[2] = {xc, fc};
            } else { // shrink toward the best vertex
                for (int v = 1; v < 3; ++v) {
                    s[v].x[0] = s[0].x[0] + 0.5 * (s[v].x[0] - s[0].x[0]);
                    s[v].x[1] = s[0].x[1] + 0.5 * (s[v].x[1] - s[0].x[1]);
                    s[v].fx = eval(s[v].x);
                }
            }
        }
        order();
    }
    if (evals_out) *evals_out = evals;
    return s[0].x;
}

} // namespace detail

// Maximum-likelihood GPD fit on excesses. Optimizes (xi, log sigma) by
// Nelder-Mead from the PWM start; xi >= 0 is enforced by penalty unless
// allow_negative_xi is set (diagnostic use). When the unconstrained optimum
// is interior-negative the fit is clipped to xi = 0, where the exact MLE is
// sigma = mean(excesses).
struct GpdMleResult {
    double xi = 0.0;
    double sigma = 1.0;
    double log_lik = 0.0;
    int evaluations = 0;
};

inline GpdMleResult fit_gpd(const std::vector<double>& excesses,
                            bool allow_negative_xi = false) {
    if (excesses.size() < 2)
        throw invalid_argument_error("fit_gpd: need at least 2 excesses");
    double zmin = excesses[0], zmax = excesses[0];
    for (double z : excesses) {
        if (!std::isfinite(z) || z < 0.0)
            throw invalid_argument_error("fit_gpd: excesses must be finite and nonnegative");
        zmin = std::min(zmin, z);
        zmax = std::max(zmax, z);
    }
    if (zmin == zmax)
        throw degenerate_data_error("fit_gpd: all excesses are equal");

    const int max_evals = 10000;
    auto objective = [&](const std::array<double, 2>& q) {
        double xi = q[0], sigma = std::exp(q[1]);
        if (!allow_negative_xi && xi < 0.0) return 1e30 * (1.0 + (-xi));
        if (!std::isfinite(sigma) || sigma <= 0.0) return 1e30;
        double ll = detail::gpd_loglik_any(xi, sigma, excesses);
        if (!std::isfinite(ll)) return 1e30;
        return -ll;
    };
    auto start = detail::gpd_pwm_start(excesses);
    if (!allow_negative_xi && start[0] < 0.0) start[0] = 0.05;
    std::array<double, 2> q0{start[0], std::log(start[1])};
    int evals = 0;
    auto best = detail::nelder_mead_2d(objective, q0, 1e-12, max_evals, &evals);
    if (evals >= max_evals)
        throw convergence_error("fit_gpd: optimizer did not converge within " +
                                std::to_string(max_evals) + " evaluations (xi=" +
                                std::to_string(best[0]) + ", log sigma=" +
                                std::to_string(best[1]) + ")");
    GpdMleResult r;
    r.xi = best[0];
    r.sigma = std::exp(best[1]);
    r.evaluations = evals;
    r.log_lik = detail::gpd_loglik_any(r.xi, r.sigma, excesses);
    if (!allow_negative_xi) {
        // compare against the xi = 0 boundary, where the MLE is closed form
        // (exponential with sigma = mean); take it unless the interior point
        // beats it by more than cross-branch rounding noise
        double mean = 0.0;
        for (double z : excesses) mean += z;
        mean /= static_cast<double>(excesses.size());
        double ll0 = gpd_loglik(0.0, mean, excesses);
        double slack = 1e-9 * (1.0 + std::abs(ll0));
        if (r.xi < 0.0 || !(r.log_lik > ll0 + slack)) {
            r.xi = 0.0;
            r.sigma = mean;
            r.log_lik = ll0;
        }
    }
    return r;
}

// Full peaks-over-threshold pipeline: threshold at the p-quantile, excesses
// strictly above it, MLE on the excesses.
inline GpdFit fit_gpd_tail(const ClaimSample& sample, double p) {
    double theta = select_threshold(sample, p);
    std::vector<double> excesses;
    for (double x : sample.values())
        if (x > theta) excesses.push_back(x - theta);
    if (excesses.size() < 2)
        throw degenerate_data_error("fit_gpd_tail: fewer than 2 excesses above threshold " +
                                    std::to_string(theta));
    auto mle = fit_gpd(excesses);
    GpdFit fit;
    fit.xi = mle.xi;
    fit.sigma = mle.sigma;
    fit.theta = theta;
    fit.p = p;
    fit.n_excesses = excesses.size();
    fit.log_lik = mle.log_lik;
    return fit;
}

} // namespace cfkit
