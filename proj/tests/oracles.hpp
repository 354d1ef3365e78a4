#pragma once

// Independent reference implementations used to check the library numerics.
// Nothing here goes through the contour-rotated CF evaluator or the
// Gil-Pelaez engine; the only shared ingredient is the Legendre panel rule,
// which the quadrature tests validate on its own (polynomial exactness).

#include <cfkit/quadrature.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

namespace oracles {

using Complex = std::complex<double>;

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

inline double normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

inline double gamma21_pdf(double x) { return x <= 0.0 ? 0.0 : x * std::exp(-x); }

inline double gamma21_cdf(double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x) * (1.0 + x); }

// CF of the aggregate of Poisson(lambda) many Exp(mu) claims, summed as an
// explicit Poisson mixture of Gamma(n, mu) terms. Also exposes the cdf/pdf
// of the same mixture through the integer-shape incomplete gamma series.
struct CompoundPoissonExp {
    double lambda;
    double mu;

    int n_terms() const {
        return static_cast<int>(lambda + 40.0 * std::sqrt(lambda) + 25.0);
    }

    Complex cf(double t) const {
        // E e^{itS} = exp(lambda (mu/(mu-it) - 1))
        Complex g = mu / Complex(mu, -t);
        return std::exp(lambda * (g - 1.0));
    }

    double cdf(double x) const {
        if (x < 0.0) return 0.0;
        double y = mu * x;
        double pois = std::exp(-lambda);
        double cdf = pois;
        double term = std::exp(-y); // e^{-y} y^k / k!, k = 0
        double partial = 0.0;       // e^{-y} sum_{k < n} y^k / k!
        int nmax = n_terms();
        for (int n = 1; n <= nmax; ++n) {
            pois *= lambda / n;
            partial += term;
            term *= y / n;
            cdf += pois * (1.0 - partial);
        }
        return cdf;
    }

    double pdf(double x) const {
        if (x < 0.0) return 0.0;
        double y = mu * x;
        double pois = std::exp(-lambda);
        double dens = 0.0;
        double term = mu * std::exp(-y); // mu e^{-y} y^{n-1}/(n-1)!, n = 1
        int nmax = n_terms();
        for (int n = 1; n <= nmax; ++n) {
            pois *= lambda / n;
            dens += pois * term;
            term *= y / n;
        }
        return dens;
    }
};

// Direct oscillatory quadrature of E e^{itX} = int_lo^inf e^{itx} f(x) dx on
// geometric panels, truncated once the van der Corput tail bound 2 f(x)/|t|
// (valid past the mode of a unimodal density) drops below ~5e-8. Panels are
// capped at two oscillation periods; a 32-node Legendre rule per panel keeps
// the in-panel error far below the truncation budget. Needs |t| bounded away
// from zero for the tail bound to bite.
inline Complex brute_force_cf(const std::function<double(double)>& pdf, double t, double lo,
                              double scale, double mode) {
    if (t == 0.0) return Complex(1.0, 0.0);
    static const cfkit::QuadratureRule rule = cfkit::gauss_legendre_01(32);
    const double period = 2.0 * M_PI / std::abs(t);
    double width = std::min(scale, period) / 16.0;
    Complex acc(0.0, 0.0);
    double mass = 0.0;
    double x = lo;
    for (long panel = 0; panel < 2000000; ++panel) {
        double hi = x + width;
        for (int k = 0; k < 32; ++k) {
            double xx = x + width * rule.nodes[k];
            double f = pdf(xx);
            acc += (width * rule.weights[k] * f) * std::polar(1.0, t * xx);
            mass += width * rule.weights[k] * f;
        }
        x = hi;
        if (x > mode) {
            double tail = 2.0 * pdf(x) / std::abs(t);
            if (tail < 5e-8 || 1.0 - mass < 1e-9) return acc;
        }
        width = std::min(width * 1.3, 2.0 * period);
    }
    throw std::runtime_error("brute_force_cf: panel budget exhausted");
}

} // namespace oracles
