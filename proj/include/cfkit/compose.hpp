#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "char_fn.hpp"
#include "empirical.hpp"
#include "errors.hpp"
#include "frequency.hpp"
#include "gpd.hpp"
#include "severity.hpp"

namespace cfkit {

// CF of S = X_1 + ... + X_N through the PGF: cf_S(t) = pgf_N(cf_X(t)).
// Equivalent to cf_N(-i log cf_X(t)) but free of complex-log branch cuts.
// The result carries the compound tag and Pr(N=0) so inversion can separate
// the atom at zero, plus propagated moment hints when the severity has them:
//   E(S) = E(N) E(X),  Var(S) = E(N) Var(X) + Var(N) E(X)^2.
inline CharFn compound_cf(const FrequencyModel& freq, const CharFn& sev) {
    auto f = std::make_shared<const FrequencyModel>(freq);
    auto x = std::make_shared<const CharFn>(sev);
    CharFn cf([f, x](double t) { return f->pgf(x->eval(t)); });
    cf = cf.with_compound_tag(freq.prob_zero());
    if (const auto& hx = sev.moment_hints()) {
        const MomentHints& hn = freq.moments();
        double mean = hn.mean * hx->mean;
        double var = hn.mean * hx->variance + hn.variance * hx->mean * hx->mean;
        cf = cf.with_moment_hints(mean, var);
    }
    return cf;
}

// CF of sum c_j X_j with independent X_j: prod cf_j(c_j t).
inline CharFn weighted_sum_cf(const std::vector<CharFn>& cfs,
                              const std::vector<double>& coeffs) {
    if (cfs.size() != coeffs.size())
        throw invalid_argument_error("weighted_sum_cf: " + std::to_string(cfs.size()) +
                                     " CFs vs " + std::to_string(coeffs.size()) +
                                     " coefficients");
    if (cfs.empty()) throw invalid_argument_error("weighted_sum_cf: no components");
    for (double c : coeffs)
        if (!(c > 0.0) || !std::isfinite(c))
            throw invalid_argument_error("weighted_sum_cf: coefficients must be positive");
    auto parts = std::make_shared<const std::vector<CharFn>>(cfs);
    auto cs = std::make_shared<const std::vector<double>>(coeffs);
    CharFn out([parts, cs](double t) {
        Complex prod(1.0, 0.0);
        for (std::size_t j = 0; j < parts->size(); ++j)
            prod *= (*parts)[j].eval((*cs)[j] * t);
        return prod;
    });
    double mean = 0.0, var = 0.0;
    bool hinted = true;
    for (std::size_t j = 0; j < cfs.size(); ++j) {
        const auto& h = cfs[j].moment_hints();
        if (!h) { hinted = false; break; }
        mean += coeffs[j] * h->mean;
        var += coeffs[j] * coeffs[j] * h->variance;
    }
    return hinted ? out.with_moment_hints(mean, var) : out;
}

// Weighted mixture: sum w_j cf_j(t), w_j >= 0, sum w_j = 1.
inline CharFn mixture_cf(const std::vector<CharFn>& cfs, const std::vector<double>& weights) {
    if (cfs.size() != weights.size())
        throw invalid_argument_error("mixture_cf: " + std::to_string(cfs.size()) +
                                     " CFs vs " + std::to_string(weights.size()) +
                                     " weights");
    if (cfs.empty()) throw invalid_argument_error("mixture_cf: no components");
    double wsum = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w))
            throw invalid_argument_error("mixture_cf: weights must be nonnegative");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw invalid_argument_error("mixture_cf: weights sum to " + std::to_string(wsum) +
                                     ", expected 1");
    auto parts = std::make_shared<const std::vector<CharFn>>(cfs);
    auto ws = std::make_shared<const std::vector<double>>(weights);
    CharFn out([parts, ws](double t) {
        Complex s(0.0, 0.0);
        for (std::size_t j = 0; j < parts->size(); ++j)
            s += (*ws)[j] * (*parts)[j].eval(t);
        return s;
    });
    // mixture moments go through raw second moments
    double mean = 0.0, ex2 = 0.0;
    bool hinted = true;
    for (std::size_t j = 0; j < cfs.size(); ++j) {
        const auto& h = cfs[j].moment_hints();
        if (!h) { hinted = false; break; }
        mean += weights[j] * h->mean;
        ex2 += weights[j] * (h->variance + h->mean * h->mean);
    }
    return hinted ? out.with_moment_hints(mean, ex2 - mean * mean) : out;
}

// One frequency/severity cell per independent event type or business line.
struct PortfolioSpec {
    std::vector<std::pair<FrequencyModel, CharFn>> cells;
};

// CF of the aggregate loss of independent compound cells: the product of the
// per-cell compound CFs. Pr(L=0) is the product of the cell atoms.
inline CharFn portfolio_cf(const PortfolioSpec& spec) {
    if (spec.cells.empty()) throw invalid_argument_error("portfolio_cf: no cells");
    std::vector<CharFn> parts;
    parts.reserve(spec.cells.size());
    double p0 = 1.0;
    double mean = 0.0, var = 0.0;
    bool hinted = true;
    for (const auto& cell : spec.cells) {
        CharFn c = compound_cf(cell.first, cell.second);
        p0 *= cell.first.prob_zero();
        if (const auto& h = c.moment_hints()) {
            mean += h->mean;
            var += h->variance;
        } else {
            hinted = false;
        }
        parts.push_back(std::move(c));
    }
    auto shared = std::make_shared<const std::vector<CharFn>>(std::move(parts));
    CharFn out([shared](double t) {
        Complex prod(1.0, 0.0);
        for (const auto& c : *shared) prod *= c.eval(t);
        return prod;
    });
    out = out.with_compound_tag(p0);
    return hinted ? out.with_moment_hints(mean, var) : out;
}

// Semi-parametric severity CF: empirical body below the threshold, fitted GPD
// tail above it, mixed with weights (p, 1-p). Ties at the threshold go to the
// body. fit.theta is expected to be the p-quantile used to split the sample.
inline CharFn tail_mixture_cf(const ClaimSample& sample, double p, const GpdFit& fit,
                              int halfline_nodes = 1 << 7) {
    if (sample.kind() != SampleKind::severity)
        throw invalid_argument_error("tail_mixture_cf: expected a severity sample");
    if (!(p > 0.0 && p < 1.0))
        throw invalid_argument_error("tail_mixture_cf: need p in (0,1)");
    std::vector<double> lower;
    for (double x : sample.values())
        if (x <= fit.theta) lower.push_back(x);
    if (lower.empty())
        throw invalid_argument_error("tail_mixture_cf: no sample values at or below "
                                     "threshold " + std::to_string(fit.theta));
    CharFn body = empirical_cf(ClaimSample(std::move(lower), SampleKind::severity));
    CharFn tail = make_severity_cf(SeverityParams::gpd(fit.xi, fit.sigma, fit.theta),
                                   halfline_nodes);
    return mixture_cf({std::move(body), std::move(tail)}, {p, 1.0 - p});
}

// Gaussian kernel smoothing at CF level: cf(t) e^{-sigma^2 t^2 / 2}.
// sigma = 0 is the identity (metadata included); sigma > 0 yields an
// absolutely continuous distribution, so compound atom metadata is dropped.
inline CharFn smooth_cf(const CharFn& cf, double sigma) {
    if (sigma < 0.0 || !std::isfinite(sigma))
        throw invalid_argument_error("smooth_cf: need sigma >= 0");
    if (sigma == 0.0) return cf;
    auto base = std::make_shared<const CharFn>(cf);
    double s2 = sigma * sigma;
    CharFn out([base, s2](double t) {
        return base->eval(t) * std::exp(-0.5 * s2 * t * t);
    });
    if (const auto& h = cf.moment_hints())
        out = out.with_moment_hints(h->mean, h->variance + s2);
    return out;
}

} // namespace cfkit
