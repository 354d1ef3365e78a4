#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "char_fn.hpp"
#include "errors.hpp"
#include "frequency.hpp"

namespace cfkit {

enum class SampleKind { severity, frequency };

// Observed claim data: either individual loss severities or per-period claim
// counts. Validated once, immutable afterwards.
class ClaimSample {
public:
    ClaimSample(std::vector<double> values, SampleKind kind)
        : values_(std::make_shared<const std::vector<double>>(std::move(values))),
          kind_(kind) {
        const auto& v = *values_;
        if (v.empty()) throw invalid_argument_error("ClaimSample: empty sample");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!std::isfinite(v[i]))
                throw validation_error("ClaimSample: non-finite value at index " +
                                       std::to_string(i));
            if (kind == SampleKind::severity && v[i] < 0.0)
                throw validation_error("ClaimSample: negative severity at index " +
                                       std::to_string(i));
            if (kind == SampleKind::frequency &&
                (v[i] < 0.0 || v[i] != std::floor(v[i])))
                throw validation_error(
                    "ClaimSample: count at index " + std::to_string(i) +
                    " is not a nonnegative integer");
        }
    }

    const std::vector<double>& values() const noexcept { return *values_; }
    SampleKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return values_->size(); }

    double mean() const {
        double s = 0.0;
        for (double x : *values_) s += x;
        return s / static_cast<double>(values_->size());
    }

    // variance of the discrete uniform distribution on the sample points,
    // i.e. the exact variance of the empirical CF's distribution (1/K form)
    double population_variance() const {
        double m = mean(), s = 0.0;
        for (double x : *values_) s += (x - m) * (x - m);
        return s / static_cast<double>(values_->size());
    }

    // shares the underlying storage with CFs built from this sample
    std::shared_ptr<const std::vector<double>> share() const noexcept { return values_; }

private:
    std::shared_ptr<const std::vector<double>> values_;
    SampleKind kind_;
};

// Equally weighted mixture of point-mass CFs: cf(t) = (1/K) sum e^{it x_k}.
inline CharFn empirical_cf(const ClaimSample& sample) {
    if (sample.kind() != SampleKind::severity)
        throw invalid_argument_error("empirical_cf: expected a severity sample");
    auto data = sample.share();
    CharFn cf([data](double t) {
        double re = 0.0, im = 0.0;
        for (double x : *data) {
            re += std::cos(t * x);
            im += std::sin(t * x);
        }
        double k = static_cast<double>(data->size());
        return Complex(re / k, im / k);
    });
    return cf.with_moment_hints(sample.mean(), sample.population_variance());
}

// Empirical claim-count PGF: pgf(z) = (1/J) sum z^{n_j}, complex-capable so
// it can sit on top of any severity CF when compounding.
inline FrequencyModel empirical_pgf(const ClaimSample& sample) {
    if (sample.kind() != SampleKind::frequency)
        throw invalid_argument_error("empirical_pgf: expected a frequency sample");
    auto data = sample.share();
    std::size_t zeros = 0;
    for (double n : *data)
        if (n == 0.0) ++zeros;
    auto pgf = [data](Complex z) {
        Complex s(0.0, 0.0);
        for (double n : *data)
            s += detail::ipow(z, static_cast<unsigned long long>(n));
        return s / static_cast<double>(data->size());
    };
    return FrequencyModel(std::move(pgf),
                          MomentHints{sample.mean(), sample.population_variance()},
                          static_cast<double>(zeros) / static_cast<double>(sample.size()),
                          "empirical-counts");
}

} // namespace cfkit
