#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "empirical.hpp"
#include "errors.hpp"
#include "frequency.hpp"
#include "severity.hpp"

namespace cfkit {

namespace detail {

// splitmix64: tiny counter-based generator. Each simulated draw gets its own
// stream keyed by (seed, draw index), so results do not depend on scheduling
// or on how many variates one draw consumes.
struct SplitMix64 {
    std::uint64_t state;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
        return SplitMix64{mix(seed + 0x9E3779B97F4A7C15ull * (index + 1))};
    }

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        return mix(state);
    }

    // uniform on the open interval (0,1)
    double u01() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() {
        double u1 = u01(), u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Marsaglia-Tsang; exact for all alpha > 0
    double gamma(double alpha, double beta) {
        if (alpha < 1.0) {
            double boost = std::pow(u01(), 1.0 / alpha);
            return gamma(alpha + 1.0, beta) * boost;
        }
        double d = alpha - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double z = normal();
            double f = 1.0 + c * z;
            if (f <= 0.0) continue;
            double v = f * f * f;
            double u = u01();
            if (u < 1.0 - 0.0331 * z * z * z * z) return d * v / beta;
            if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v / beta;
        }
    }

    // Knuth multiplication, split additively for larger rates so the
    // e^{-lambda} threshold never underflows
    long poisson(double lambda) {
        long total = 0;
        while (lambda > 30.0) {
            total += poisson_small(30.0);
            lambda -= 30.0;
        }
        return total + poisson_small(lambda);
    }

private:
    long poisson_small(double lambda) {
        double limit = std::exp(-lambda);
        long k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= u01();
        } while (p > limit);
        return k - 1;
    }
};

} // namespace detail

struct SimulationSpec {
    std::variant<FrequencyModel, ClaimSample> frequency;
    std::variant<SeverityParams, ClaimSample> severity;
    long n_sims = 1;
    std::uint64_t seed = 0;

    SimulationSpec(std::variant<FrequencyModel, ClaimSample> f,
                   std::variant<SeverityParams, ClaimSample> s)
        : frequency(std::move(f)), severity(std::move(s)) {}
};

namespace detail {

inline long sample_count(const FrequencyModel& fm, SplitMix64& rng) {
    const auto& fam = fm.family();
    const auto& q = fm.params();
    if (fam == "dirac") {
        if (!is_nonneg_integer(q[0]))
            throw validation_error("simulate_aggregate: dirac frequency must be a "
                                   "nonnegative integer, got " + std::to_string(q[0]));
        return static_cast<long>(q[0]);
    }
    if (fam == "binomial") {
        long n = static_cast<long>(q[0]), k = 0;
        for (long i = 0; i < n; ++i)
            if (rng.u01() < q[1]) ++k;
        return k;
    }
    if (fam == "negative-binomial") {
        // gamma-Poisson mixture: N | G ~ Poisson(G), G ~ Gamma(r, p/(1-p))
        double r = q[0], p = q[1];
        return rng.poisson(rng.gamma(r, p / (1.0 - p)));
    }
    if (fam == "poisson") return rng.poisson(q[0]);
    throw invalid_argument_error("simulate_aggregate: cannot sample frequency family '" +
                                 fam + "'; pass the underlying counts sample instead");
}

inline double sample_severity(const SeverityParams& sp, SplitMix64& rng) {
    double u = 0.0;
    switch (sp.family) {
    case SeverityFamily::exponential: return -std::log(rng.u01()) / sp.p1;
    case SeverityFamily::gamma: return rng.gamma(sp.p1, sp.p2);
    case SeverityFamily::lognormal: return std::exp(sp.p1 + sp.p2 * rng.normal());
    case SeverityFamily::loglogistic:
        u = rng.u01();
        return sp.p1 * std::pow(u / (1.0 - u), 1.0 / sp.p2);
    case SeverityFamily::pareto1: return sp.p2 * std::pow(rng.u01(), -1.0 / sp.p1);
    case SeverityFamily::pareto2: return sp.p2 * (std::pow(rng.u01(), -1.0 / sp.p1) - 1.0);
    case SeverityFamily::gpd:
        u = rng.u01();
        if (sp.p1 == 0.0) return sp.p3 - sp.p2 * std::log(u);
        return sp.p3 + sp.p2 * (std::pow(u, -sp.p1) - 1.0) / sp.p1;
    }
    throw invalid_parameter_error("simulate_aggregate: unknown severity family");
}

} // namespace detail

// nSims independent draws of S = sum_{j=1}^{N} X_j, bit-reproducible per
// seed. Empirical inputs are resampled uniformly with replacement.
inline std::vector<double> simulate_aggregate(const SimulationSpec& spec) {
    if (spec.n_sims < 1)
        throw invalid_argument_error("simulate_aggregate: need nSims >= 1");
    if (auto* cs = std::get_if<ClaimSample>(&spec.frequency))
        if (cs->kind() != SampleKind::frequency)
            throw invalid_argument_error("simulate_aggregate: frequency sample has severity kind");
    if (auto* cs = std::get_if<ClaimSample>(&spec.severity))
        if (cs->kind() != SampleKind::severity)
            throw invalid_argument_error("simulate_aggregate: severity sample has frequency kind");

    std::vector<double> out(static_cast<std::size_t>(spec.n_sims));
    for (long i = 0; i < spec.n_sims; ++i) {
        auto rng = detail::SplitMix64::stream(spec.seed, static_cast<std::uint64_t>(i));
        long n = 0;
        if (auto* fm = std::get_if<FrequencyModel>(&spec.frequency)) {
            n = detail::sample_count(*fm, rng);
        } else {
            const auto& vals = std::get<ClaimSample>(spec.frequency).values();
            auto idx = static_cast<std::size_t>(rng.u01() * static_cast<double>(vals.size()));
            if (idx >= vals.size()) idx = vals.size() - 1;
            n = static_cast<long>(vals[idx]);
        }
        double s = 0.0;
        if (auto* sp = std::get_if<SeverityParams>(&spec.severity)) {
            for (long j = 0; j < n; ++j) s += detail::sample_severity(*sp, rng);
        } else {
            const auto& vals = std::get<ClaimSample>(spec.severity).values();
            for (long j = 0; j < n; ++j) {
                auto idx = static_cast<std::size_t>(rng.u01() * static_cast<double>(vals.size()));
                if (idx >= vals.size()) idx = vals.size() - 1;
                s += vals[idx];
            }
        }
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

// sup over the sample points of |ECDF - cdf|, with the ECDF taken
// right-continuous (value i/n at the i-th order statistic).
inline double ks_distance(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
    if (sample.empty()) throw invalid_argument_error("ks_distance: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double ecdf = (static_cast<double>(i) + 1.0) / n;
        worst = std::max(worst, std::abs(ecdf - cdf(sample[i])));
    }
    return worst;
}

} // namespace cfkit
